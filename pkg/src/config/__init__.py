from .app_config import (
    NORM_TOL, PRUNE_WEIGHT, FILLER_MASS_THRESHOLD, MAX_ENUMERATED_OBJECTS,
    MAX_REPOSITORY_PARTIES, ORDER_LISTING_PARTY_LIMIT, MAX_LISTED_ORDERS,
    DEFAULT_SEED, MAX_SEED, MIN_EXPECTED_COUNT, INDEPENDENCE_ALPHA,
    CHSH_CLASSICAL_BOUND, TSIRELSON_BOUND, NO_SIGNALING_BOUND, SINGLET_CHSH_ANGLES,
)
from .logger_config import setup_logger
from .reference_tables import A_TO_B_TABLE, B_TO_A_TABLE, CYCLIC_TABLE
from .simulation_config import DemoConfig


__all__ = [
    #AppConfig
    "NORM_TOL",
    "PRUNE_WEIGHT",
    "FILLER_MASS_THRESHOLD",
    "MAX_ENUMERATED_OBJECTS",
    "MAX_REPOSITORY_PARTIES",
    "ORDER_LISTING_PARTY_LIMIT",
    "MAX_LISTED_ORDERS",
    "DEFAULT_SEED",
    "MAX_SEED",
    "MIN_EXPECTED_COUNT",
    "INDEPENDENCE_ALPHA",
    "CHSH_CLASSICAL_BOUND",
    "TSIRELSON_BOUND",
    "NO_SIGNALING_BOUND",
    "SINGLET_CHSH_ANGLES",

    #Logger Config
    "setup_logger",

    #Reference Tables
    "A_TO_B_TABLE",
    "B_TO_A_TABLE",
    "CYCLIC_TABLE",

    #Simulation Config
    "DemoConfig",
]
