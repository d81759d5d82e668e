"""Dynamic contagion reinsurance toolkit.

Simulation of self-exciting/externally-excited claim arrival intensities,
Monte Carlo valuation of exponential-utility reinsurance problems, and
optimal-strategy computation. The heavy lifting lives in the C++ extension
module `_core`.
"""

try:
    from ._core import *  # noqa: F401,F403  (installed layout)
    from ._core import __doc__ as _core_doc
except ImportError:  # pragma: no cover - in-tree build layout
    from _core import *  # noqa: F401,F403
    from _core import __doc__ as _core_doc

__all__ = [
    "MarkDistribution",
    "ModelParams",
    "RetentionContract",
    "PremiumPrinciple",
    "Policy",
    "Estimate",
    "simulate",
    "mean_intensity",
    "estimate_phi",
    "estimate_phi_q",
    "phi_closed_form_poisson",
    "value_function",
    "cox_optimal",
    "solve_foc",
    "thresholds",
    "policy_iteration",
    "strana_check",
    "coupled_monotonicity",
    "run_scenario",
]
