"""Branch-and-cut for the vehicle routing problem with scenario-based stochastic demands."""
from .instance import (
    DirectedRoute,
    Instance,
    Route,
    RoutingPlan,
    ScenarioSet,
    dump_instance,
    generate_instance,
    load_instance,
    parse_instance,
    preprocess_demands,
)
from .recourse import Disaggregation, q_classical

__all__ = [
    "DirectedRoute",
    "Disaggregation",
    "Instance",
    "Route",
    "RoutingPlan",
    "ScenarioSet",
    "dump_instance",
    "generate_instance",
    "load_instance",
    "parse_instance",
    "preprocess_demands",
    "q_classical",
]
__version__ = "0.1.0"
