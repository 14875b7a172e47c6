"""Exact finite co-design with composable parametric uncertainty.

Design problems are monotone feasibility tables between finite posets.
Uncertainty enters through a small closed set of monads (identity, nonempty
powerset, interval, finite distribution) applied to families of design
problems indexed by parameters.
"""

from .dp import (
    DesignProblem,
    dp_compose,
    dp_dual_counit,
    dp_dual_unit,
    dp_identity,
    dp_leq,
    dp_lift_monotone,
    dp_tensor,
    dp_threshold,
    dp_trace,
)
from .errors import CodesignError
from .monads import DIST, IDENTITY, INTERVAL, POWERSET, Dist, Interval, Point, Subset, get_monad
from .param import (
    ParamCell,
    ParamSpace,
    Reparam,
    cell_compose,
    cell_lift,
    cell_reparam,
    cell_tensor,
    check_2cell,
    tensorator,
)
from .poset import Antichain, FinitePoset, MonotoneMap, antichain, chain, minimal_elements, poset_opposite, poset_product
from .queries import decide, fix_fun_min_res, query_cell

__version__ = "0.1.0"

__all__ = [
    "DesignProblem",
    "dp_compose",
    "dp_dual_counit",
    "dp_dual_unit",
    "dp_identity",
    "dp_leq",
    "dp_lift_monotone",
    "dp_tensor",
    "dp_threshold",
    "dp_trace",
    "CodesignError",
    "DIST",
    "IDENTITY",
    "INTERVAL",
    "POWERSET",
    "Dist",
    "Interval",
    "Point",
    "Subset",
    "get_monad",
    "ParamCell",
    "ParamSpace",
    "Reparam",
    "cell_compose",
    "cell_lift",
    "cell_reparam",
    "cell_tensor",
    "check_2cell",
    "tensorator",
    "Antichain",
    "FinitePoset",
    "MonotoneMap",
    "antichain",
    "chain",
    "minimal_elements",
    "poset_opposite",
    "poset_product",
    "decide",
    "fix_fun_min_res",
    "query_cell",
    "__version__",
]
