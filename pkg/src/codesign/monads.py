"""Uncertainty monads: identity, nonempty powerset, interval and finite distributions.

Each instance provides ``unit``, ``bind`` and the strength ``strength`` that
pairs two independent uncertain values. ``map`` and ``join`` are derived.
All values are immutable and hashable so they can be nested (a distribution
of design problems, an interval of intervals, ...).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from .errors import CodesignError, IntervalOrderError, MonadMismatch


@dataclass(frozen=True)
class Point:
    """Exactly one value (identity monad)."""

    value: object

    def __repr__(self):
        return f"Point({self.value!r})"


@dataclass(frozen=True)
class Subset:
    """A finite set of possible values."""

    members: frozenset

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __repr__(self):
        return "Subset({" + ", ".join(sorted(map(repr, self.members))) + "})"


@dataclass(frozen=True)
class Interval:
    """Endpoints ``lo <= hi`` in some order (validated by the monad, not here)."""

    lo: object
    hi: object

    def __repr__(self):
        return f"[{self.lo!r}, {self.hi!r}]"


class Dist:
    """Finite-support probability distribution with exact rational weights.

    Zero weights are pruned; weights must be nonnegative and sum to exactly 1.
    """

    __slots__ = ("_weights", "_hash")

    def __init__(self, weights):
        items = weights.items() if hasattr(weights, "items") else weights
        acc = {}
        for x, w in items:
            w = Fraction(w)
            if w < 0:
                raise CodesignError(f"negative probability {w} for {x!r}")
            acc[x] = acc.get(x, Fraction(0)) + w
        acc = {x: w for x, w in acc.items() if w != 0}
        if not acc:
            raise CodesignError("distribution has empty support")
        total = sum(acc.values())
        if total != 1:
            raise CodesignError(f"weights sum to {total}, not 1")
        self._weights = acc
        self._hash = None

    @classmethod
    def point(cls, x) -> "Dist":
        return cls({x: 1})

    @classmethod
    def uniform(cls, xs) -> "Dist":
        xs = list(dict.fromkeys(xs))
        return cls({x: Fraction(1, len(xs)) for x in xs})

    def items(self):
        return self._weights.items()

    def support(self):
        return list(self._weights)

    def __getitem__(self, x) -> Fraction:
        return self._weights.get(x, Fraction(0))

    def __len__(self):
        return len(self._weights)

    def prob(self, pred: Callable) -> Fraction:
        return sum((w for x, w in self._weights.items() if pred(x)), Fraction(0))

    def expect(self, fn: Callable) -> Fraction:
        return sum((w * fn(x) for x, w in self._weights.items()), Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, Dist):
            return NotImplemented
        return self._weights == other._weights

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._weights.items()))
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{x!r}: {w}" for x, w in sorted(self._weights.items(), key=lambda kv: repr(kv[0])))
        return "Dist({" + body + "})"


class UncertaintyMonad:
    """Interface shared by the instances below."""

    name = "abstract"
    affine = True
    #: Kleisli arrows must be monotone into the induced order on values
    ordered = False

    def unit(self, x):
        raise NotImplementedError

    def bind(self, m, k: Callable):
        raise NotImplementedError

    def strength(self, mx, my):
        raise NotImplementedError

    def outcomes(self, m) -> list:
        """The deterministic values a monadic value can resolve to."""
        raise NotImplementedError

    def is_value(self, m) -> bool:
        raise NotImplementedError

    def values(self, elements, leq=None) -> list:
        """A finite pool of values over ``elements`` for law checking."""
        raise NotImplementedError

    def map(self, m, f: Callable):
        return self.bind(m, lambda x: self.unit(f(x)))

    def join(self, mm):
        return self.bind(mm, lambda m: m)

    def value_leq(self, leq):
        """Induced order on values, given the order on the carrier (None when unordered)."""
        return None

    def validate(self, m, leq=None):
        if not self.is_value(m):
            raise MonadMismatch(f"{m!r} is not a {self.name} value")
        return m

    def __repr__(self):
        return f"<monad {self.name}>"


class IdentityMonad(UncertaintyMonad):
    name = "identity"

    def unit(self, x):
        return Point(x)

    def bind(self, m, k):
        return k(m.value)

    def strength(self, mx, my):
        return Point((mx.value, my.value))

    def outcomes(self, m):
        return [m.value]

    def is_value(self, m):
        return isinstance(m, Point)

    def values(self, elements, leq=None):
        return [Point(x) for x in elements]


class NonemptyPowerset(UncertaintyMonad):
    """Multi-valued outcomes; union as multiplication, Cartesian product as strength."""

    name = "powerset"

    def make(self, members) -> Subset:
        s = Subset(frozenset(members))
        return self.validate(s)

    def unit(self, x):
        return Subset(frozenset([x]))

    def bind(self, m, k):
        out = set()
        for x in m.members:
            out |= k(x).members
        return Subset(frozenset(out))

    def strength(self, mx, my):
        return Subset(frozenset(itertools.product(mx.members, my.members)))

    def outcomes(self, m):
        return list(m.members)

    def is_value(self, m):
        return isinstance(m, Subset) and len(m.members) > 0

    def values(self, elements, leq=None):
        elements = list(elements)
        out = []
        for r in range(1, len(elements) + 1):
            out.extend(Subset(frozenset(c)) for c in itertools.combinations(elements, r))
        return out


class FullPowerset(NonemptyPowerset):
    """Powerset with the empty set allowed.

    Still a symmetric monoidal monad, but not affine: ``M(1)`` has two
    inhabitants and deleting the empty set is not the same as deleting a point.
    """

    name = "full_powerset"
    affine = False

    def is_value(self, m):
        return isinstance(m, Subset)

    def values(self, elements, leq=None):
        return [Subset(frozenset())] + super().values(elements, leq)


class IntervalMonad(UncertaintyMonad):
    """Intervals ``[lo, hi]`` over a poset, ordered by their endpoints."""

    name = "interval"
    ordered = True

    def make(self, lo, hi, leq) -> Interval:
        return self.validate(Interval(lo, hi), leq)

    def unit(self, x):
        return Interval(x, x)

    def bind(self, m, k):
        return Interval(k(m.lo).lo, k(m.hi).hi)

    def join(self, mm):
        return Interval(mm.lo.lo, mm.hi.hi)

    def strength(self, mx, my):
        return Interval((mx.lo, my.lo), (mx.hi, my.hi))

    def outcomes(self, m):
        return [m.lo] if m.lo == m.hi else [m.lo, m.hi]

    def is_value(self, m):
        return isinstance(m, Interval)

    def value_leq(self, leq):
        return lambda a, b: leq(a.lo, b.lo) and leq(a.hi, b.hi)

    def validate(self, m, leq=None):
        super().validate(m)
        if leq is not None and not leq(m.lo, m.hi):
            raise IntervalOrderError(f"interval endpoints out of order: {m.lo!r} </= {m.hi!r}")
        return m

    def values(self, elements, leq=None):
        if leq is None:
            raise CodesignError("the interval monad needs an ordered carrier")
        elements = list(elements)
        return [Interval(a, b) for a in elements for b in elements if leq(a, b)]


class DistributionMonad(UncertaintyMonad):
    """Finitely supported probability distributions with rational weights."""

    name = "dist"
    #: ``values`` enumerates all distributions with weights in multiples of this
    grid = Fraction(1, 2)

    def unit(self, x):
        return Dist.point(x)

    def bind(self, m, k):
        acc = {}
        for x, w in m.items():
            for y, v in k(x).items():
                acc[y] = acc.get(y, Fraction(0)) + w * v
        return Dist(acc)

    def strength(self, mx, my):
        return Dist({(x, y): wx * wy for x, wx in mx.items() for y, wy in my.items()})

    def outcomes(self, m):
        return m.support()

    def is_value(self, m):
        return isinstance(m, Dist)

    def values(self, elements, leq=None):
        elements = list(elements)
        steps = int(1 / self.grid)
        out = []
        for counts in _compositions(steps, len(elements)):
            out.append(Dist({x: Fraction(c, steps) for x, c in zip(elements, counts) if c}))
        return out


def _compositions(total, parts):
    """All tuples of ``parts`` nonnegative ints summing to ``total``."""
    if parts == 0:
        return []
    if parts == 1:
        return [(total,)]
    out = []
    for first in range(total, -1, -1):
        out.extend((first,) + rest for rest in _compositions(total - first, parts - 1))
    return out


IDENTITY = IdentityMonad()
POWERSET = NonemptyPowerset()
INTERVAL = IntervalMonad()
DIST = DistributionMonad()
FULL_POWERSET = FullPowerset()

MONADS = {m.name: m for m in (IDENTITY, POWERSET, INTERVAL, DIST)}


def get_monad(name) -> UncertaintyMonad:
    if isinstance(name, UncertaintyMonad):
        return name
    try:
        return MONADS[name]
    except KeyError:
        raise MonadMismatch(
            f"unknown monad {name!r}; expected one of {', '.join(MONADS)}"
        ) from None


def promote(value, target: UncertaintyMonad):
    """Embed an identity-monad value into ``target`` via its unit."""
    if not isinstance(value, Point):
        raise MonadMismatch("only identity values can be promoted")
    return target.unit(value.value)


def strength_all(monad: UncertaintyMonad, values: Iterable):
    """Iterated strength, returning a value over flat tuples."""
    values = list(values)
    acc = monad.unit(())
    for v in values:
        acc = monad.map(monad.strength(acc, v), lambda p: p[0] + (p[1],))
    return acc
