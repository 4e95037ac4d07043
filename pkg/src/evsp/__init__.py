"""Electric vehicle sharing planning: instances, time-space networks,
MILP formulations, solver bridge, heuristics, generators and benchmarks."""

from .model import (
    CHARGING,
    PLAIN,
    WM_PER_KWH,
    Customer,
    Demand,
    Instance,
    ParkingInterval,
    SolutionPlan,
    Station,
    Vehicle,
    two_station_instance,
    initial_distribution,
    validate_instance,
)

__version__ = "0.1.0"

__all__ = [
    "CHARGING", "PLAIN", "WM_PER_KWH", "Customer", "Demand", "Instance", "ParkingInterval", "SolutionPlan",
    "Station", "Vehicle", "initial_distribution", "two_station_instance", "validate_instance",
]
