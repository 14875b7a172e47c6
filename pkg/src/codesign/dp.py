"""The category DP of feasibility relations between finite posets.

A design problem ``d: F -> R`` is a boolean table that is monotone as a map
``F^op x R -> Bool``: weaker functionality and stronger resources stay
feasible. Composition is the boolean matrix product (a join over the middle
poset), tensor is the Kronecker product over product posets.
"""

from __future__ import annotations

import numpy as np

from .errors import NotMonotone, ObjectMismatch
from .poset import (
    UNIT,
    FinitePoset,
    MonotoneMap,
    format_element,
    poset_opposite,
    poset_product,
)


def _bool_matmul(a, b):
    return (a.astype(np.int64) @ b.astype(np.int64)) > 0


class DesignProblem:
    """A monotone feasibility table indexed by ``fun x res``."""

    __slots__ = ("fun", "res", "table", "_hash")

    def __init__(self, fun: FinitePoset, res: FinitePoset, table, check=True):
        table = np.array(table, dtype=bool).reshape(len(fun), len(res))
        table.setflags(write=False)
        self.fun = fun
        self.res = res
        self.table = table
        self._hash = None
        if check:
            bad = monotonicity_violation(fun, res, table)
            if bad is not None:
                f, f2, r, r2 = bad
                raise NotMonotone(
                    "feasibility table is not monotone: "
                    f"d({format_element(f)}, {format_element(r)}) holds, "
                    f"{format_element(f2)} <= {format_element(f)} and "
                    f"{format_element(r)} <= {format_element(r2)}, "
                    f"but d({format_element(f2)}, {format_element(r2)}) fails",
                    witness=bad,
                )

    @classmethod
    def from_pairs(cls, fun, res, feasible) -> "DesignProblem":
        t = np.zeros((len(fun), len(res)), dtype=bool)
        for f, r in feasible:
            t[fun.index(f), res.index(r)] = True
        return cls(fun, res, t)

    @classmethod
    def from_predicate(cls, fun, res, pred) -> "DesignProblem":
        t = [[bool(pred(f, r)) for r in res.elements] for f in fun.elements]
        return cls(fun, res, t)

    def __call__(self, f, r) -> bool:
        return bool(self.table[self.fun.index(f), self.res.index(r)])

    def feasible_pairs(self):
        return [(self.fun.elements[i], self.res.elements[j]) for i, j in np.argwhere(self.table)]

    def feasible_resources(self, f):
        row = self.table[self.fun.index(f)]
        return [self.res.elements[j] for j in np.flatnonzero(row)]

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, DesignProblem):
            return NotImplemented
        return (
            self.fun == other.fun
            and self.res == other.res
            and np.array_equal(self.table, other.table)
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.fun, self.res, self.table.tobytes()))
        return self._hash

    def __repr__(self):
        return f"DesignProblem({len(self.fun)}x{len(self.res)}, {int(self.table.sum())} feasible)"


def monotone_closure(fun, res, table):
    """Smallest monotone table containing ``table``."""
    down = fun.leq_table  # down[f2, f]: f2 <= f
    return _bool_matmul(_bool_matmul(down, np.asarray(table, dtype=bool)), res.leq_table)


def monotonicity_violation(fun, res, table):
    """A quadruple ``(f, f2, r, r2)`` breaking monotonicity, or None."""
    table = np.asarray(table, dtype=bool)
    if table.size == 0:
        return None
    closed = monotone_closure(fun, res, table)
    bad = closed & ~table
    if not bad.any():
        return None
    i2, j2 = map(int, np.argwhere(bad)[0])
    # find the feasible (f, r) with f2 <= f and r <= r2 that forces (f2, r2)
    for i in np.flatnonzero(fun.leq_table[i2]):
        for j in np.flatnonzero(res.leq_table[:, j2]):
            if table[i, j]:
                return (fun.elements[i], fun.elements[i2], res.elements[j], res.elements[j2])
    raise AssertionError("closure reported a violation without a witness")


def dp_compose(phi: DesignProblem, psi: DesignProblem) -> DesignProblem:
    """Series composition: ``(phi ; psi)(f, q) = OR_r phi(f, r) AND psi(r, q)``."""
    if phi.res != psi.fun:
        raise ObjectMismatch("cannot compose: resources of the first differ from functionalities of the second")
    return DesignProblem(phi.fun, psi.res, _bool_matmul(phi.table, psi.table), check=False)


def dp_tensor(phi1: DesignProblem, phi2: DesignProblem) -> DesignProblem:
    """Parallel composition over product posets (entrywise conjunction)."""
    fun = poset_product(phi1.fun, phi2.fun)
    res = poset_product(phi1.res, phi2.res)
    return DesignProblem(fun, res, np.kron(phi1.table, phi2.table).astype(bool), check=False)


def dp_identity(P: FinitePoset) -> DesignProblem:
    return DesignProblem(P, P, P.leq_table, check=False)


def dp_empty(F: FinitePoset, R: FinitePoset) -> DesignProblem:
    """The bottom of the hom-poset: nothing is feasible."""
    return DesignProblem(F, R, np.zeros((len(F), len(R)), dtype=bool), check=False)


def dp_full(F: FinitePoset, R: FinitePoset) -> DesignProblem:
    return DesignProblem(F, R, np.ones((len(F), len(R)), dtype=bool), check=False)


def dp_lift_monotone(g: MonotoneMap) -> DesignProblem:
    """Threshold design problem ``d(p, q) = g(p) <= q``."""
    P, Q = g.domain, g.codomain
    img = np.array([Q.index(g(p)) for p in P.elements], dtype=int)
    table = Q.leq_table[img] if len(img) else np.zeros((0, len(Q)), dtype=bool)
    return DesignProblem(P, Q, table, check=False)


def dp_threshold(F: FinitePoset, R: FinitePoset, phi) -> DesignProblem:
    """``d(f, r) = phi(f) <= r`` where ``phi`` may be undefined (None) for infeasible ``f``."""
    call = phi if callable(phi) else (lambda f: phi.get(f))
    t = np.zeros((len(F), len(R)), dtype=bool)
    for i, f in enumerate(F.elements):
        need = call(f)
        if need is not None:
            t[i] = R.leq_table[R.index(need)]
    return DesignProblem(F, R, t)


def _split(P: FinitePoset, what: str):
    if P.factors is None or len(P.factors) != 2:
        raise ObjectMismatch(f"{what} must be a binary product poset")
    return P.factors


def dp_trace(phi: DesignProblem, P: FinitePoset) -> DesignProblem:
    """Close the feedback wire ``P``: ``tr(phi)(f, r) = OR_p phi((f, p), (r, p))``."""
    F, P1 = _split(phi.fun, "functionality")
    R, P2 = _split(phi.res, "resource")
    if P1 != P or P2 != P:
        raise ObjectMismatch("the traced factor must be the last factor of both sides")
    n = len(P)
    t4 = phi.table.reshape(len(F), n, len(R), n)
    if n == 0:
        table = np.zeros((len(F), len(R)), dtype=bool)
    else:
        table = np.diagonal(t4, axis1=1, axis2=3).any(axis=-1)
    return DesignProblem(F, R, table, check=False)


def dp_dual_unit(P: FinitePoset) -> DesignProblem:
    """``I -> P x P^op`` with ``(*, (p, q))`` feasible iff ``q <= p``."""
    res = poset_product(P, poset_opposite(P))
    row = P.leq_table.T.reshape(1, -1)  # index (p, q) -> leq[q, p]
    return DesignProblem(UNIT, res, row, check=False)


def dp_dual_counit(P: FinitePoset) -> DesignProblem:
    """``P^op x P -> I`` with ``((q, p), *)`` feasible iff ``p <= q``."""
    fun = poset_product(poset_opposite(P), P)
    col = P.leq_table.T.reshape(-1, 1)  # index (q, p) -> leq[p, q]
    return DesignProblem(fun, UNIT, col, check=False)


def dp_leq(d1: DesignProblem, d2: DesignProblem) -> bool:
    """Pointwise order of the hom-poset: every pair feasible in ``d1`` is feasible in ``d2``."""
    if d1.fun != d2.fun or d1.res != d2.res:
        raise ObjectMismatch("design problems live in different hom-sets")
    return bool((~d1.table | d2.table).all())


# -- structural isomorphisms (lifted bijections) ---------------------------


def map_swap(P: FinitePoset, Q: FinitePoset) -> MonotoneMap:
    return MonotoneMap.from_function(poset_product(P, Q), poset_product(Q, P), lambda x: (x[1], x[0]))


def map_associator(P, Q, R) -> MonotoneMap:
    """``(P x Q) x R -> P x (Q x R)``."""
    return MonotoneMap.from_function(
        poset_product(poset_product(P, Q), R),
        poset_product(P, poset_product(Q, R)),
        lambda x: (x[0][0], (x[0][1], x[1])),
    )


def map_associator_inv(P, Q, R) -> MonotoneMap:
    return MonotoneMap.from_function(
        poset_product(P, poset_product(Q, R)),
        poset_product(poset_product(P, Q), R),
        lambda x: ((x[0], x[1][0]), x[1][1]),
    )


def map_left_unitor(P) -> MonotoneMap:
    """``I x P -> P``."""
    return MonotoneMap.from_function(poset_product(UNIT, P), P, lambda x: x[1])


def map_left_unitor_inv(P) -> MonotoneMap:
    return MonotoneMap.from_function(P, poset_product(UNIT, P), lambda x: ("*", x))


def map_right_unitor(P) -> MonotoneMap:
    """``P x I -> P``."""
    return MonotoneMap.from_function(poset_product(P, UNIT), P, lambda x: x[0])


def map_right_unitor_inv(P) -> MonotoneMap:
    return MonotoneMap.from_function(P, poset_product(P, UNIT), lambda x: (x, "*"))


def dp_braiding(P, Q) -> DesignProblem:
    return dp_lift_monotone(map_swap(P, Q))


def dp_chain(*ds: DesignProblem) -> DesignProblem:
    """Compose a sequence of design problems left to right."""
    out = ds[0]
    for d in ds[1:]:
        out = dp_compose(out, d)
    return out


def snake_left(P: FinitePoset, unit=None, counit=None) -> DesignProblem:
    """``P -> I x P -> (P x P^op) x P -> P x (P^op x P) -> P x I -> P``.

    Equals ``dp_identity(P)`` for a valid unit/counit pair.
    """
    unit = dp_dual_unit(P) if unit is None else unit
    counit = dp_dual_counit(P) if counit is None else counit
    Pop = poset_opposite(P)
    return dp_chain(
        dp_lift_monotone(map_left_unitor_inv(P)),
        dp_tensor(unit, dp_identity(P)),
        dp_lift_monotone(map_associator(P, Pop, P)),
        dp_tensor(dp_identity(P), counit),
        dp_lift_monotone(map_right_unitor(P)),
    )


def snake_right(P: FinitePoset, unit=None, counit=None) -> DesignProblem:
    """``P^op -> P^op x I -> P^op x (P x P^op) -> (P^op x P) x P^op -> I x P^op -> P^op``."""
    unit = dp_dual_unit(P) if unit is None else unit
    counit = dp_dual_counit(P) if counit is None else counit
    Pop = poset_opposite(P)
    return dp_chain(
        dp_lift_monotone(map_right_unitor_inv(Pop)),
        dp_tensor(dp_identity(Pop), unit),
        dp_lift_monotone(map_associator_inv(Pop, P, Pop)),
        dp_tensor(counit, dp_identity(Pop)),
        dp_lift_monotone(map_left_unitor(Pop)),
    )


def dp_trace_via_duals(phi: DesignProblem, P: FinitePoset) -> DesignProblem:
    """The trace built only from unit, counit, symmetry and composition."""
    F, _ = _split(phi.fun, "functionality")
    R, _ = _split(phi.res, "resource")
    Pop = poset_opposite(P)
    return dp_chain(
        dp_lift_monotone(map_right_unitor_inv(F)),
        dp_tensor(dp_identity(F), dp_dual_unit(P)),
        dp_lift_monotone(map_associator_inv(F, P, Pop)),
        dp_tensor(phi, dp_identity(Pop)),
        dp_lift_monotone(map_associator(R, P, Pop)),
        dp_tensor(dp_identity(R), dp_braiding(P, Pop)),
        dp_tensor(dp_identity(R), dp_dual_counit(P)),
        dp_lift_monotone(map_right_unitor(R)),
    )
