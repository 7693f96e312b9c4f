from .config import BuildingConfig, WeatherConfig, ZoneConfig, load_building_config
from .building import Building, GroundTruth, compute_guardband

__all__ = [
    "Building",
    "BuildingConfig",
    "GroundTruth",
    "WeatherConfig",
    "ZoneConfig",
    "compute_guardband",
    "load_building_config",
]
