"""Path and point error measures."""
from __future__ import annotations

import numpy as np
from shapely.geometry import LineString, Point


def _polyline(path):
    coords = [(p.x, p.y) for p in path]
    if not coords:
        raise ValueError("empty path")
    return Point(coords[0]) if len(set(coords)) == 1 else LineString(coords)


def point_to_path_distances(estimate, ground_truth) -> np.ndarray:
    line = _polyline(ground_truth)
    if not estimate:
        raise ValueError("empty estimate")
    return np.array([line.distance(Point(p.x, p.y)) for p in estimate])


def path_max_deviation(estimate, ground_truth) -> float:
    """Directed Hausdorff distance from the estimate points to the true polyline."""
    return float(point_to_path_distances(estimate, ground_truth).max())


def path_mean_error(estimate, ground_truth) -> float:
    return float(point_to_path_distances(estimate, ground_truth).mean())


def error_ecdf(errors):
    """Right-continuous empirical CDF as a callable."""
    xs = np.sort(np.asarray(errors, dtype=float))
    if xs.size == 0:
        raise ValueError("ECDF of an empty sample")

    def f(t: float) -> float:
        return float(np.searchsorted(xs, t, side="right")) / xs.size
    return f
