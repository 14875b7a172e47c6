"""Queries on plain and uncertain design problems, and decisions over parameters.

``fix_fun_min_res`` answers "which resources are minimally needed for this
functionality"; ``query_cell`` lifts it through each monad, and ``decide``
scores every parameter with a cost on resources and picks the cheapest.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .dp import DesignProblem
from .errors import NoFeasibleParameter, NotMonotone, ObjectiveMonadMismatch, MonadMismatch
from .monads import Dist, Interval, Point, Subset
from .param import ParamCell
from .poset import Antichain, FinitePoset, format_element, maximal_elements, minimal_elements

OBJECTIVES = ("expected", "worst_case", "optimistic")

_ALLOWED = {
    "expected": ("dist", "identity"),
    "worst_case": ("interval", "powerset", "identity"),
    "optimistic": ("interval", "powerset", "identity"),
}


def fix_fun_min_res(d: DesignProblem, f) -> Antichain:
    """Minimal resources making ``f`` feasible (empty when nothing does)."""
    return minimal_elements(d.res, d.feasible_resources(f))


def fix_res_max_fun(d: DesignProblem, r) -> Antichain:
    """Maximal functionalities feasible with resource ``r``."""
    j = d.res.index(r)
    feasible = [f for i, f in enumerate(d.fun.elements) if d.table[i, j]]
    return maximal_elements(d.fun, feasible)


@dataclass(frozen=True)
class PlainResult:
    antichain: Antichain


@dataclass(frozen=True)
class PossibleResult:
    antichains: frozenset


@dataclass(frozen=True)
class IntervalResult:
    pessimistic: Antichain
    optimistic: Antichain


@dataclass(frozen=True)
class ProbabilisticResult:
    dist: Dist
    p_feasible: Fraction


def query_value(v, f):
    """Query one uncertain design problem."""
    if isinstance(v, Point):
        return PlainResult(fix_fun_min_res(v.value, f))
    if isinstance(v, Subset):
        return PossibleResult(frozenset(fix_fun_min_res(d, f) for d in v.members))
    if isinstance(v, Interval):
        return IntervalResult(fix_fun_min_res(v.lo, f), fix_fun_min_res(v.hi, f))
    if isinstance(v, Dist):
        acc = {}
        for d, w in v.items():
            a = fix_fun_min_res(d, f)
            acc[a] = acc.get(a, Fraction(0)) + w
        dist = Dist(acc)
        return ProbabilisticResult(dist, dist.prob(lambda a: len(a) > 0))
    raise MonadMismatch(f"cannot query {v!r}")


def query_cell(c: ParamCell, f) -> dict:
    """Parameter tuple -> query result, in enumeration order."""
    c.source.index(f)
    return {u: query_value(c.table[u], f) for u in c.space.carrier}


# -- decisions -------------------------------------------------------------


class CostMap:
    """A monotone rational cost on a resource poset."""

    def __init__(self, poset: FinitePoset, values):
        call = values if callable(values) else values.__getitem__
        self.poset = poset
        self.values = {r: Fraction(call(r)) for r in poset.elements}
        for a, b in poset.pairs():
            if self.values[a] > self.values[b]:
                raise NotMonotone(
                    f"cost is not monotone: {format_element(a)} <= {format_element(b)} "
                    f"but cost {self.values[a]} > {self.values[b]}",
                    witness=(a, b),
                )

    def __call__(self, r) -> Fraction:
        return self.values[r]

    def of_antichain(self, a: Antichain):
        """Cheapest minimal resource, or None when the antichain is empty."""
        if len(a) == 0:
            return None
        return min(self.values[r] for r in a.members)


def _penalized(cost: CostMap, a: Antichain, penalty):
    v = cost.of_antichain(a)
    return penalty if v is None else v


def _max(values):
    if any(v is None for v in values):
        return None
    return max(values)


def _min(values):
    finite = [v for v in values if v is not None]
    return min(finite) if finite else None


@dataclass(frozen=True)
class DecisionRow:
    param: tuple
    value: object  # Fraction, or None when infeasible
    result: object


@dataclass(frozen=True)
class DecisionReport:
    objective: str
    rows: tuple
    chosen: tuple
    chosen_value: Fraction

    @property
    def values(self) -> dict:
        return {row.param: row.value for row in self.rows}


def objective_value(result, objective: str, cost: CostMap, infeasible_penalty=None):
    """Scalar score of one query result; None marks an infeasible parameter.

    ``infeasible_penalty`` of None is an infinite penalty.
    """
    pen = None if infeasible_penalty is None else Fraction(infeasible_penalty)
    if isinstance(result, PlainResult):
        return _penalized(cost, result.antichain, pen)
    if isinstance(result, IntervalResult):
        chosen = result.pessimistic if objective == "worst_case" else result.optimistic
        return _penalized(cost, chosen, pen)
    if isinstance(result, PossibleResult):
        vals = [_penalized(cost, a, pen) for a in result.antichains]
        return _max(vals) if objective == "worst_case" else _min(vals)
    if isinstance(result, ProbabilisticResult):
        total = Fraction(0)
        for a, w in result.dist.items():
            v = _penalized(cost, a, pen)
            if v is None:
                return None
            total += w * v
        return total
    raise MonadMismatch(f"cannot score {result!r}")


def check_objective(objective: str, monad_name: str):
    if objective not in _ALLOWED:
        raise ObjectiveMonadMismatch(f"unknown objective {objective!r}; expected one of {', '.join(OBJECTIVES)}")
    if monad_name not in _ALLOWED[objective]:
        raise ObjectiveMonadMismatch(
            f"objective {objective} needs one of {', '.join(_ALLOWED[objective])}, the cell uses {monad_name}"
        )


def decide(c: ParamCell, f, objective: str, cost, infeasible_penalty=None) -> DecisionReport:
    """Score every parameter and return the argmin (first in enumeration order on ties)."""
    check_objective(objective, c.monad.name)
    if not isinstance(cost, CostMap):
        cost = CostMap(c.target, cost)
    rows = []
    best = None
    for u, res in query_cell(c, f).items():
        v = objective_value(res, objective, cost, infeasible_penalty)
        rows.append(DecisionRow(u, v, res))
        if v is not None and (best is None or v < best.value):
            best = rows[-1]
    if best is None:
        raise NoFeasibleParameter(f"no parameter makes {format_element(f)} feasible")
    return DecisionReport(objective, tuple(rows), best.param, best.value)
