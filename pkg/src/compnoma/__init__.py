"""Ergodic capacity of downlink CoMP-NOMA under imperfect CSI.

Closed-form capacities (``compnoma.analytic``) are cross-checked against a
counter-based Monte Carlo estimator (``compnoma.montecarlo``) whose inner loop
runs under numba when available.
"""

__version__ = "0.1.0"

from .analytic import (  # noqa: E402
    GroupCapacity,
    all_capacities,
    ceu_capacity,
    ccu_capacity_case1,
    ccu_capacity_case2,
    group_capacity,
    noma_group_capacity,
    oma_group_capacity,
    perfect_csi_group_capacity,
)
from .channel import LinkTable, build_link_table  # noqa: E402
from .errors import (  # noqa: E402
    ModelError,
    ParameterError,
    RateCollisionError,
    VarianceExhaustedError,
)
from .geometry import CellLayout, distances, preset_b2, preset_b3  # noqa: E402
from .montecarlo import CapacityEstimate, McConfig, estimate, estimate_all  # noqa: E402
from .params import Case, OmaPower, Scheme, SystemParams  # noqa: E402

__all__ = [
    "CapacityEstimate",
    "Case",
    "CellLayout",
    "GroupCapacity",
    "LinkTable",
    "McConfig",
    "ModelError",
    "OmaPower",
    "ParameterError",
    "RateCollisionError",
    "Scheme",
    "SystemParams",
    "VarianceExhaustedError",
    "all_capacities",
    "build_link_table",
    "ccu_capacity_case1",
    "ccu_capacity_case2",
    "ceu_capacity",
    "distances",
    "estimate",
    "estimate_all",
    "group_capacity",
    "noma_group_capacity",
    "oma_group_capacity",
    "perfect_csi_group_capacity",
    "preset_b2",
    "preset_b3",
]
