"""Sequential unambiguous discrimination of symmetric qudit states."""

__version__ = "0.1.0"

from .capacity import ErasureChannelSpec, capacity_equal, capacity_two_rate, mutual_info_two_rate
from .chain import ChainPlan, exact_success, plan_custom, plan_equal_split, simulate_chain
from .eve import build_sqrt_measurement, eve_success, intercept_resend_sim
from .states import StateFamily, build_equal_overlap, build_two_set
from .twoset import build_twoset_measurement, positivity_check
from .usd import UsdMeasurement, build_measurement, measure

__all__ = [
    "ChainPlan", "ErasureChannelSpec", "StateFamily", "UsdMeasurement",
    "build_equal_overlap", "build_measurement", "build_sqrt_measurement", "build_two_set",
    "build_twoset_measurement", "capacity_equal", "capacity_two_rate", "eve_success",
    "exact_success", "intercept_resend_sim", "measure", "mutual_info_two_rate",
    "plan_custom", "plan_equal_split", "positivity_check", "simulate_chain",
]
