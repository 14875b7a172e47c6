"""Parametrized uncertain design problems and their reparametrizations.

A ``ParamCell`` from ``F`` to ``R`` assigns to every parameter tuple ``u`` an
uncertain design problem ``M(DP(F, R))``. Parameter spaces are flat lists of
factor posets, so composing cells simply concatenates factor lists and the
associativity/unit coherences become exact equalities. The only 2-cells that
do real work are the tensorator (a factor permutation) and the factor swap
that makes the symmetry natural.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dp import DesignProblem, dp_braiding, dp_compose, dp_identity, dp_leq, dp_tensor
from .errors import IntervalOrderError, MonadMismatch, ObjectMismatch
from .monads import IDENTITY, Point, UncertaintyMonad, get_monad
from .poset import UNIT, FinitePoset, format_element, poset_product


class ParamSpace:
    """An ordered list of factor posets; points are flat tuples."""

    __slots__ = ("factors", "_poset")

    def __init__(self, factors=()):
        self.factors = tuple(factors)
        self._poset = None

    @property
    def carrier(self) -> list:
        return list(itertools.product(*(F.elements for F in self.factors)))

    def __len__(self):
        n = 1
        for F in self.factors:
            n *= len(F)
        return n

    @property
    def poset(self) -> FinitePoset:
        """The carrier with the componentwise order."""
        if self._poset is None:
            t = np.ones((1, 1), dtype=bool)
            for F in self.factors:
                t = np.kron(t, F.leq_table).astype(bool)
            self._poset = FinitePoset(self.carrier, t, check=False)
        return self._poset

    def leq(self, u, v) -> bool:
        return all(F.leq(a, b) for F, a, b in zip(self.factors, u, v))

    def concat(self, other: "ParamSpace") -> "ParamSpace":
        return ParamSpace(self.factors + other.factors)

    def drop_units(self) -> "ParamSpace":
        return ParamSpace(F for F in self.factors if F != UNIT)

    def __eq__(self, other):
        return isinstance(other, ParamSpace) and self.factors == other.factors

    def __hash__(self):
        return hash(self.factors)

    def __repr__(self):
        return "ParamSpace(" + ", ".join(repr(F) for F in self.factors) + ")"


UNIT_SPACE = ParamSpace()


def _unit_positions(space: ParamSpace):
    return [i for i, F in enumerate(space.factors) if F == UNIT]


def _strip(u, drop):
    return tuple(x for i, x in enumerate(u) if i not in drop)


def _as_space(space) -> ParamSpace:
    return space if isinstance(space, ParamSpace) else ParamSpace(space)


class ParamCell:
    """``space -> M(DP(source, target))``, stored as a table over parameter tuples.

    Factors equal to the one-point poset are dropped on construction (the
    table keys lose the corresponding coordinate), so cells are compared in
    normal form.
    """

    __slots__ = ("source", "target", "space", "monad", "table")

    def __init__(self, source: FinitePoset, target: FinitePoset, space, monad, table, check=True):
        space = _as_space(space)
        monad = get_monad(monad)
        drop = _unit_positions(space)
        if drop:
            dropped = set(drop)
            table = {_strip(u, dropped): table[u] for u in space.carrier}
            space = space.drop_units()
        self.source = source
        self.target = target
        self.space = space
        self.monad = monad
        self.table = {u: table[u] for u in space.carrier}
        if check:
            self._validate()

    def _validate(self):
        M = self.monad
        for u, v in self.table.items():
            M.validate(v)
            for d in M.outcomes(v):
                if not isinstance(d, DesignProblem):
                    raise ObjectMismatch(f"entry at {format_element(u)} is not a design problem")
                if d.fun != self.source or d.res != self.target:
                    raise ObjectMismatch(
                        f"entry at {format_element(u)} has the wrong functionality/resource posets"
                    )
            if M.ordered and not dp_leq(v.lo, v.hi):
                raise IntervalOrderError(
                    f"interval entry at {format_element(u)} has lo not below hi in the hom-order"
                )

    def __call__(self, u):
        return self.table[tuple(u)]

    def __eq__(self, other):
        if not isinstance(other, ParamCell):
            return NotImplemented
        return (
            self.monad.name == other.monad.name
            and self.source == other.source
            and self.target == other.target
            and self.space == other.space
            and self.table == other.table
        )

    def __hash__(self):
        return hash((self.monad.name, self.source, self.target, self.space))

    def __repr__(self):
        return (
            f"ParamCell[{self.monad.name}]({len(self.source)} -> {len(self.target)}, "
            f"{len(self.space.factors)} factors, {len(self.table)} entries)"
        )


def _same_monad(a, b) -> UncertaintyMonad:
    if a.monad.name != b.monad.name:
        raise MonadMismatch(f"cannot combine {a.monad.name} and {b.monad.name} cells")
    return a.monad


def cell_lift(d: DesignProblem, monad=IDENTITY) -> ParamCell:
    """Unit parameter space, the point sent to ``unit(d)``."""
    monad = get_monad(monad)
    return ParamCell(d.fun, d.res, UNIT_SPACE, monad, {(): monad.unit(d)}, check=False)


def cell_identity(P: FinitePoset, monad=IDENTITY) -> ParamCell:
    return cell_lift(dp_identity(P), monad)


def constant_cell(source, target, space, monad, value) -> ParamCell:
    space = _as_space(space)
    return ParamCell(source, target, space, monad, {u: value for u in space.carrier})


def _lifted(c1, c2, op):
    M = _same_monad(c1, c2)
    table = {}
    for u1, v1 in c1.table.items():
        for u2, v2 in c2.table.items():
            table[u1 + u2] = M.map(M.strength(v1, v2), lambda p: op(p[0], p[1]))
    return M, table


def cell_compose(c1: ParamCell, c2: ParamCell) -> ParamCell:
    """Series composition: ``(u1, u2) |-> M(compose)(strength(c1(u1), c2(u2)))``."""
    if c1.target != c2.source:
        raise ObjectMismatch("cells are not composable: target and source posets differ")
    M, table = _lifted(c1, c2, dp_compose)
    return ParamCell(c1.source, c2.target, c1.space.concat(c2.space), M, table, check=False)


def cell_tensor(c1: ParamCell, c2: ParamCell) -> ParamCell:
    """Parallel composition over product posets and concatenated parameters."""
    M, table = _lifted(c1, c2, dp_tensor)
    return ParamCell(
        poset_product(c1.source, c2.source),
        poset_product(c1.target, c2.target),
        c1.space.concat(c2.space),
        M,
        table,
        check=False,
    )


def cell_map(c: ParamCell, fn: Callable, source=None, target=None) -> ParamCell:
    """Apply a DP-level operation to every possible design problem of every entry."""
    M = c.monad
    table = {u: M.map(v, fn) for u, v in c.table.items()}
    return ParamCell(
        c.source if source is None else source,
        c.target if target is None else target,
        c.space,
        M,
        table,
    )


def promote(c: ParamCell, target) -> ParamCell:
    """Embed an identity-monad cell into another monad via its unit."""
    target = get_monad(target)
    if c.monad.name != IDENTITY.name:
        raise MonadMismatch("only identity-monad cells can be promoted")
    table = {u: target.unit(v.value) for u, v in c.table.items()}
    return ParamCell(c.source, c.target, c.space, target, table, check=False)


class Reparam:
    """A Kleisli arrow between parameter spaces: ``from_space -> M(to_space)``.

    Under the interval monad the table must be monotone for the componentwise
    order, and every interval must have ordered endpoints.
    """

    __slots__ = ("from_space", "to_space", "monad", "table")

    def __init__(self, from_space, to_space, monad, table, check=True):
        self.from_space = _as_space(from_space)
        self.to_space = _as_space(to_space)
        self.monad = get_monad(monad)
        self.table = {u: table[u] for u in self.from_space.carrier}
        if check:
            self._validate()

    def _validate(self):
        M = self.monad
        targets = set(self.to_space.carrier)
        leq = self.to_space.leq
        for u, v in self.table.items():
            M.validate(v, leq)
            for w in M.outcomes(v):
                if w not in targets:
                    raise ObjectMismatch(f"reparam sends {format_element(u)} outside its target space")
        if M.ordered:
            vleq = M.value_leq(leq)
            for a, b in self.from_space.poset.pairs():
                if not vleq(self.table[a], self.table[b]):
                    raise ObjectMismatch(
                        f"interval reparam is not monotone at {format_element(a)} <= {format_element(b)}"
                    )

    def __call__(self, u):
        return self.table[tuple(u)]

    def __eq__(self, other):
        if not isinstance(other, Reparam):
            return NotImplemented
        return (
            self.monad.name == other.monad.name
            and self.from_space == other.from_space
            and self.to_space == other.to_space
            and self.table == other.table
        )

    def __hash__(self):
        return hash((self.monad.name, self.from_space, self.to_space))

    def __repr__(self):
        body = ", ".join(f"{format_element(u)} -> {v!r}" for u, v in self.table.items())
        return f"Reparam[{self.monad.name}]({body})"


def reparam_pure(from_space, to_space, fn: Callable, monad=IDENTITY) -> Reparam:
    """The deterministic reparametrization ``u |-> unit(fn(u))``."""
    monad = get_monad(monad)
    from_space = _as_space(from_space)
    return Reparam(from_space, to_space, monad, {u: monad.unit(tuple(fn(u))) for u in from_space.carrier})


def reparam_identity(space, monad=IDENTITY) -> Reparam:
    return reparam_pure(space, space, lambda u: u, monad)


def reparam_constant(from_space, to_space, point, monad=IDENTITY) -> Reparam:
    return reparam_pure(from_space, to_space, lambda u: point, monad)


def reparam_permutation(blocks, order, monad=IDENTITY) -> Reparam:
    """Rearrange a concatenation of parameter blocks.

    ``blocks`` lists ParamSpaces; the source space is their concatenation in
    the given order and the target is the concatenation in ``order``.
    """
    blocks = [_as_space(b) for b in blocks]
    src = ParamSpace(F for b in blocks for F in b.factors)
    dst = ParamSpace(F for i in order for F in blocks[i].factors)
    bounds = []
    start = 0
    for b in blocks:
        bounds.append((start, start + len(b.factors)))
        start += len(b.factors)

    def perm(u):
        return tuple(x for i in order for x in u[bounds[i][0]:bounds[i][1]])

    return reparam_pure(src, dst, perm, monad)


def cell_reparam(phi: Reparam, c: ParamCell) -> ParamCell:
    """Precompose the parameter: ``u' |-> bind(phi(u'), c)``."""
    if phi.monad.name != c.monad.name:
        raise MonadMismatch(f"reparam uses {phi.monad.name} but the cell uses {c.monad.name}")
    if phi.to_space != c.space:
        raise ObjectMismatch("reparam target space differs from the cell's parameter space")
    M = c.monad
    table = {u: M.bind(v, c.table.__getitem__) for u, v in phi.table.items()}
    return ParamCell(c.source, c.target, phi.from_space, M, table)


def two_cell_witness(phi: Reparam, f: ParamCell, g: ParamCell):
    """First parameter of ``f`` where ``f`` and ``phi ; g`` disagree, else None."""
    if f.source != g.source or f.target != g.target:
        raise ObjectMismatch("2-cells relate cells with the same source and target")
    if phi.from_space != f.space:
        raise ObjectMismatch("reparam source space differs from the first cell's space")
    pulled = cell_reparam(phi, g)
    for u in f.space.carrier:
        if pulled.table[u] != f.table[u]:
            return u
    return None


def check_2cell(phi: Reparam, f: ParamCell, g: ParamCell) -> bool:
    """True iff ``f == phi ; g`` entrywise."""
    return two_cell_witness(phi, f, g) is None


def twocell_vcompose(phi: Reparam, psi: Reparam) -> Reparam:
    """Kleisli composite: first ``phi``, then ``psi``."""
    if phi.monad.name != psi.monad.name:
        raise MonadMismatch("reparams use different monads")
    if phi.to_space != psi.from_space:
        raise ObjectMismatch("reparams are not composable")
    M = phi.monad
    table = {u: M.bind(v, psi.table.__getitem__) for u, v in phi.table.items()}
    return Reparam(phi.from_space, psi.to_space, M, table, check=False)


def twocell_hcompose(phi1: Reparam, phi2: Reparam) -> Reparam:
    """Side by side on concatenated spaces, paired through the strength."""
    if phi1.monad.name != phi2.monad.name:
        raise MonadMismatch("reparams use different monads")
    M = phi1.monad
    table = {}
    for u1, v1 in phi1.table.items():
        for u2, v2 in phi2.table.items():
            table[u1 + u2] = M.map(M.strength(v1, v2), lambda p: p[0] + p[1])
    return Reparam(
        phi1.from_space.concat(phi2.from_space),
        phi1.to_space.concat(phi2.to_space),
        M,
        table,
        check=False,
    )


def tensorator(f1: ParamCell, f2: ParamCell, g1: ParamCell, g2: ParamCell) -> Reparam:
    """Factor permutation ``[U1, U2, P1, P2] -> [U1, P1, U2, P2]``.

    It relates ``(f1 x f2) ; (g1 x g2)`` (first) to ``(f1 ; g1) x (f2 ; g2)``
    (second) in the sense of ``check_2cell``.
    """
    if f1.target != g1.source or f2.target != g2.source:
        raise ObjectMismatch("tensorator cells do not form an interchange square")
    M = _same_monad(f1, f2)
    _same_monad(f1, g1)
    _same_monad(f1, g2)
    return reparam_permutation([f1.space, f2.space, g1.space, g2.space], [0, 2, 1, 3], M)


def symmetry_cell(P: FinitePoset, Q: FinitePoset, monad=IDENTITY) -> ParamCell:
    """The lifted braiding ``P x Q -> Q x P`` on the unit space."""
    return cell_lift(dp_braiding(P, Q), monad)


@dataclass(frozen=True)
class SymmetryNaturality:
    """``lhs = s ; (f2 x f1)`` over ``[U2, U1]`` and ``rhs = (f1 x f2) ; s`` over ``[U1, U2]``."""

    lhs: ParamCell
    rhs: ParamCell
    reparam: Reparam

    def holds(self) -> bool:
        return check_2cell(self.reparam, self.lhs, self.rhs)

    def holds_without_swap(self) -> bool:
        return self.lhs == self.rhs


def symmetry_naturality(f1: ParamCell, f2: ParamCell) -> SymmetryNaturality:
    M = _same_monad(f1, f2)
    lhs = cell_compose(symmetry_cell(f1.source, f2.source, M), cell_tensor(f2, f1))
    rhs = cell_compose(cell_tensor(f1, f2), symmetry_cell(f1.target, f2.target, M))
    swap = reparam_permutation([f2.space, f1.space], [1, 0], M)
    return SymmetryNaturality(lhs, rhs, swap)


def entries(c: ParamCell):
    """Parameter tuples with their values, in enumeration order."""
    return [(u, c.table[u]) for u in c.space.carrier]


def is_lifted(c: ParamCell) -> bool:
    return not c.space.factors and isinstance(c.table[()], Point)
