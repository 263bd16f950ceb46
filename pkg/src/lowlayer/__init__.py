"""Low-layer cellular attack simulator, message codecs and passive beam localization.

Subpackages: ``core`` (timing and resources), ``channel``, ``codec``,
``procedures``, ``attacker``, ``geoloc`` and ``simkit``.
"""
from importlib.metadata import PackageNotFoundError, version

from .simkit import ScenarioConfig, config_from_dict, load_config, run

try:
    __version__ = version("artifact")
except PackageNotFoundError:
    __version__ = "0.0.0"

__all__ = ["ScenarioConfig", "config_from_dict", "load_config", "run", "__version__"]
