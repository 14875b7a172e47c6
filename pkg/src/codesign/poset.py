"""Finite posets, antichains, upper sets and the upper-set sigma-algebra.

Elements are hashable labels. Atomic posets use strings; product posets use
Python tuples ``(a, b)`` and remember their two factors so that traces and
loops can find the fed-back wire.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import CarrierTooLarge, ElementNotInPoset, CodesignError

#: upper_sets / generate_sigma_algebra refuse larger carriers.
DEFAULT_ENUMERATION_CAP = 12


def format_element(x) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join(format_element(y) for y in x) + ")"
    return str(x)


class FinitePoset:
    """A finite carrier with a dense boolean order table.

    ``leq_table[i, j]`` is true iff ``elements[i] <= elements[j]``.
    Equality is structural: same element list (order matters) and same table.
    """

    __slots__ = ("elements", "leq_table", "factors", "_index", "_hash")

    def __init__(self, elements, leq_table, factors=None, check=True):
        elements = tuple(elements)
        table = np.array(leq_table, dtype=bool).reshape(len(elements), len(elements))
        table.setflags(write=False)
        index = {x: i for i, x in enumerate(elements)}
        if len(index) != len(elements):
            raise CodesignError("poset elements must be distinct")
        self.elements = elements
        self.leq_table = table
        self.factors = tuple(factors) if factors is not None else None
        self._index = index
        self._hash = None
        if check:
            self._validate()

    def _validate(self):
        t = self.leq_table
        n = len(self.elements)
        if n == 0:
            return
        if not t.diagonal().all():
            raise CodesignError("order is not reflexive")
        both = t & t.T
        if (both & ~np.eye(n, dtype=bool)).any():
            i, j = map(int, np.argwhere(both & ~np.eye(n, dtype=bool))[0])
            raise CodesignError(
                f"order is not antisymmetric: {format_element(self.elements[i])} "
                f"and {format_element(self.elements[j])} are mutually below each other"
            )
        if ((t.astype(np.int64) @ t.astype(np.int64) > 0) & ~t).any():
            raise CodesignError("order is not transitive")

    @classmethod
    def from_pairs(cls, elements, pairs: Iterable[tuple]) -> "FinitePoset":
        """Build a poset from generating ``(a, b)`` pairs meaning ``a <= b``.

        The reflexive-transitive closure is taken; antisymmetry is validated.
        """
        elements = tuple(elements)
        index = {x: i for i, x in enumerate(elements)}
        n = len(elements)
        t = np.eye(n, dtype=bool)
        for a, b in pairs:
            if a not in index or b not in index:
                missing = a if a not in index else b
                raise ElementNotInPoset(f"{missing!r} is not an element")
            t[index[a], index[b]] = True
        for k in range(n):
            t |= np.outer(t[:, k], t[k, :])
        return cls(elements, t)

    # -- element access -------------------------------------------------
    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        try:
            return x in self._index
        except TypeError:
            return False

    def index(self, x) -> int:
        try:
            return self._index[x]
        except (KeyError, TypeError):
            raise ElementNotInPoset(f"{format_element(x)!r} is not an element of {self!r}") from None

    def leq(self, a, b) -> bool:
        return bool(self.leq_table[self.index(a), self.index(b)])

    def lt(self, a, b) -> bool:
        return a != b and self.leq(a, b)

    def comparable(self, a, b) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    def pairs(self):
        """All ``(a, b)`` with ``a <= b``."""
        return [(self.elements[i], self.elements[j]) for i, j in np.argwhere(self.leq_table)]

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FinitePoset):
            return NotImplemented
        return self.elements == other.elements and np.array_equal(self.leq_table, other.leq_table)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.elements, self.leq_table.tobytes()))
        return self._hash

    def __repr__(self):
        shown = ", ".join(format_element(x) for x in self.elements[:6])
        more = ", ..." if len(self.elements) > 6 else ""
        return f"FinitePoset([{shown}{more}])"


def chain(n: int, labels=None) -> FinitePoset:
    """Total order ``0 < 1 < ... < n-1`` with string labels."""
    labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(n))
    if len(labels) != n:
        raise CodesignError("chain needs exactly n labels")
    return FinitePoset(labels, np.triu(np.ones((n, n), dtype=bool)), check=False)


def antichain(labels) -> FinitePoset:
    labels = tuple(labels)
    return FinitePoset(labels, np.eye(len(labels), dtype=bool), check=False)


def unit_poset() -> FinitePoset:
    """The one-point poset, the unit for the product."""
    return FinitePoset(("*",), np.ones((1, 1), dtype=bool), check=False)


UNIT = unit_poset()
BOOL = chain(2, ("F", "T"))


def poset_product(P: FinitePoset, Q: FinitePoset) -> FinitePoset:
    elements = [(a, b) for a in P.elements for b in Q.elements]
    table = np.kron(P.leq_table, Q.leq_table).astype(bool)
    return FinitePoset(elements, table, factors=(P, Q), check=False)


def poset_opposite(P: FinitePoset) -> FinitePoset:
    factors = None
    if P.factors is not None:
        factors = tuple(poset_opposite(F) for F in P.factors)
    return FinitePoset(P.elements, P.leq_table.T, factors=factors, check=False)


def product_of(posets) -> FinitePoset:
    """Left-nested product of a list of posets, ``UNIT`` for an empty list."""
    posets = list(posets)
    if not posets:
        return UNIT
    out = posets[0]
    for P in posets[1:]:
        out = poset_product(out, P)
    return out


@dataclass(frozen=True)
class Antichain:
    poset: FinitePoset
    members: frozenset

    def __post_init__(self):
        for x in self.members:
            self.poset.index(x)
        ms = list(self.members)
        for a, b in itertools.combinations(ms, 2):
            if self.poset.comparable(a, b):
                raise CodesignError(
                    f"antichain members {format_element(a)} and {format_element(b)} are comparable"
                )

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.sorted())

    def __contains__(self, x):
        return x in self.members

    def sorted(self):
        """Members in the carrier's element order."""
        return sorted(self.members, key=self.poset.index)

    def __repr__(self):
        return "{" + ", ".join(format_element(x) for x in self.sorted()) + "}"


def minimal_elements(P: FinitePoset, S) -> Antichain:
    """Members of ``S`` with no strictly smaller member of ``S``."""
    S = list(dict.fromkeys(S))
    idx = np.array([P.index(s) for s in S], dtype=int)
    if len(idx) == 0:
        return Antichain(P, frozenset())
    sub = P.leq_table[np.ix_(idx, idx)]
    below = sub & ~np.eye(len(idx), dtype=bool)
    keep = ~below.any(axis=0)
    return Antichain(P, frozenset(s for s, k in zip(S, keep) if k))


def maximal_elements(P: FinitePoset, S) -> Antichain:
    mins = minimal_elements(poset_opposite(P), S)
    return Antichain(P, mins.members)


def is_monotone(P: FinitePoset, Q: FinitePoset, g) -> bool:
    """True iff ``a <= b`` in P implies ``g(a) <= g(b)`` in Q."""
    return monotonicity_witness(P, Q, g) is None


def monotonicity_witness(P, Q, g):
    """First pair ``(a, b)`` with ``a <= b`` but ``g(a) </= g(b)``, else None."""
    call = g if callable(g) else g.__getitem__
    img = [Q.index(call(x)) for x in P.elements]
    img = np.array(img, dtype=int)
    if len(img) == 0:
        return None
    pulled = Q.leq_table[np.ix_(img, img)]
    bad = P.leq_table & ~pulled
    if bad.any():
        i, j = np.argwhere(bad)[0]
        return P.elements[i], P.elements[j]
    return None


@dataclass(frozen=True)
class MonotoneMap:
    """A monotone function between finite posets, stored as a table."""

    domain: FinitePoset
    codomain: FinitePoset
    table: Mapping

    def __post_init__(self):
        table = dict(self.table)
        for x in self.domain:
            if x not in table:
                raise CodesignError(f"map undefined at {format_element(x)}")
            self.codomain.index(table[x])
        object.__setattr__(self, "table", table)
        bad = monotonicity_witness(self.domain, self.codomain, table)
        if bad is not None:
            from .errors import NotMonotone

            a, b = bad
            raise NotMonotone(
                f"map is not monotone: {format_element(a)} <= {format_element(b)} but "
                f"{format_element(table[a])} </= {format_element(table[b])}",
                witness=bad,
            )

    @classmethod
    def from_function(cls, domain, codomain, fn: Callable) -> "MonotoneMap":
        return cls(domain, codomain, {x: fn(x) for x in domain})

    def __call__(self, x):
        return self.table[x]

    def __eq__(self, other):
        if not isinstance(other, MonotoneMap):
            return NotImplemented
        return (
            self.domain == other.domain
            and self.codomain == other.codomain
            and self.table == other.table
        )

    def __hash__(self):
        return hash((self.domain, self.codomain, tuple(self.table[x] for x in self.domain)))

    def then(self, other: "MonotoneMap") -> "MonotoneMap":
        """Diagrammatic composite: first ``self`` then ``other``."""
        if self.codomain != other.domain:
            from .errors import ObjectMismatch

            raise ObjectMismatch("maps are not composable")
        return MonotoneMap(self.domain, other.codomain, {x: other(self(x)) for x in self.domain})


# -- set families --------------------------------------------------------


@dataclass(frozen=True)
class SetFamily:
    ground: FinitePoset
    sets: frozenset  # of frozensets of elements

    def __len__(self):
        return len(self.sets)

    def __contains__(self, s):
        return frozenset(s) in self.sets

    def is_sigma_algebra(self) -> bool:
        full = frozenset(self.ground.elements)
        if frozenset() not in self.sets or full not in self.sets:
            return False
        for a in self.sets:
            if full - a not in self.sets:
                return False
            for b in self.sets:
                if a | b not in self.sets:
                    return False
        return True


def _check_cap(P: FinitePoset, cap):
    cap = DEFAULT_ENUMERATION_CAP if cap is None else cap
    if len(P) > cap:
        raise CarrierTooLarge(
            f"carrier has {len(P)} elements; subset enumeration is capped at {cap}"
        )


def _mask_to_set(P, mask):
    return frozenset(x for i, x in enumerate(P.elements) if mask >> i & 1)


def _set_to_mask(P, s):
    m = 0
    for x in s:
        m |= 1 << P.index(x)
    return m


def upper_sets(P: FinitePoset, cap=None) -> SetFamily:
    """Every up-closed subset of ``P`` (exponential; carriers are capped)."""
    _check_cap(P, cap)
    n = len(P)
    up = [_set_to_mask(P, [P.elements[j] for j in np.flatnonzero(P.leq_table[i])]) for i in range(n)]
    found = []
    for mask in range(1 << n):
        ok = True
        for i in range(n):
            if mask >> i & 1 and (up[i] & ~mask):
                ok = False
                break
        if ok:
            found.append(_mask_to_set(P, mask))
    return SetFamily(P, frozenset(found))


def generate_sigma_algebra(generators: SetFamily, cap=None) -> SetFamily:
    """Least family containing the generators, closed under complement and union."""
    P = generators.ground
    _check_cap(P, cap)
    full = (1 << len(P)) - 1
    seen = set()
    work = [0, full] + [_set_to_mask(P, s) for s in generators.sets]
    # worklist fixed point: each new set is complemented and joined with all earlier ones
    while work:
        a = work.pop()
        if a in seen:
            continue
        seen.add(a)
        work.append(full & ~a)
        work.extend(a | b for b in seen if a | b not in seen)
    return SetFamily(P, frozenset(_mask_to_set(P, m) for m in seen))


def powerset_family(P: FinitePoset, cap=None) -> SetFamily:
    _check_cap(P, cap)
    return SetFamily(P, frozenset(_mask_to_set(P, m) for m in range(1 << len(P))))


def rectangle_family(A: SetFamily, B: SetFamily) -> SetFamily:
    """Rectangles ``a x b`` over the product of the two grounds."""
    ground = poset_product(A.ground, B.ground)
    rects = frozenset(frozenset((x, y) for x in a for y in b) for a in A.sets for b in B.sets)
    return SetFamily(ground, rects)
