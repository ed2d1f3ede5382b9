"""Individual and group envy-freeness for indivisible goods."""

from .algorithms import (
    PickTrace,
    RepresentativeGoods,
    check_trace_structure,
    representative_goods,
    run_iwrr,
    run_sm,
    run_sm_iwrr,
    run_weighted_greedy,
)
from .audit import (
    FairnessReport,
    Verdict,
    audit,
    check_ef,
    check_ef1,
    check_efx,
    check_exante_wef1,
    check_iprop1,
    check_pef1,
    check_wef,
    check_wef1,
    check_wefx,
    min_feasible_gamma,
)
from .model import (
    ALL_COMMON,
    GENERAL,
    GROUP_COMMON,
    Allocation,
    GroupAllocation,
    InputError,
    Instance,
    PreconditionError,
    averaged_group_view,
    bundle_value,
    group_bundle,
    group_utility,
)

__version__ = "0.1.0"
