"""Named experiment scenarios with reproducible CSV artifacts and verdicts."""

from __future__ import annotations

from .bmo_equivalence import run_bmo_equivalence
from .commutator_bound import run_commutator_bound
from .config import ScenarioConfig, load_config, load_default_config
from .counterexample import run_counterexample
from .endpoint import run_endpoint
from .power_sweep import run_power_weight_sweep
from .sparse_scaling import run_sparse_scaling
from .verdict import Check, Verdict

SCENARIOS = {
    "power-sweep": (
        run_power_weight_sweep,
        "power-weight membership dichotomy for both weight classes against "
        "their exact exponent ranges",
    ),
    "sparse-scaling": (
        run_sparse_scaling,
        "sparse-operator norm lower bounds against the [w]^max(1,1/(p-1)) "
        "envelope on boundary-approaching power weights",
    ),
    "commutator-bound": (
        run_commutator_bound,
        "commutator-form sparse operators against the squared envelope "
        "||b|| [w]^{2 max(1,1/(p-1))}",
    ),
    "endpoint": (
        run_endpoint,
        "weighted weak-type endpoint at the L log L scale, with the L^1 "
        "analogue rejected on the same data",
    ),
    "counterexample": (
        run_counterexample,
        "failure of weak (1,1) for the commutator with the log symbol "
        "(strict per-decade gate documents the logarithmic growth)",
    ),
    "bmo-equivalence": (
        run_bmo_equivalence,
        "agreement band and exact one-sided constants across the "
        "oscillation-norm flavors",
    ),
}

__all__ = [
    "SCENARIOS",
    "ScenarioConfig",
    "Check",
    "Verdict",
    "load_config",
    "load_default_config",
]
