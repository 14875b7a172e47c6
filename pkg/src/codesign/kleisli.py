"""Kleisli arrows ``A -> M(B)`` between finite posets and their Markov structure."""

from __future__ import annotations

import itertools
from typing import Callable

from .errors import MonadMismatch, ObjectMismatch
from .monads import UncertaintyMonad
from .poset import UNIT, FinitePoset, format_element, poset_product


class KleisliArrow:
    """A total table ``domain -> M(codomain)``."""

    __slots__ = ("domain", "codomain", "monad", "table")

    def __init__(self, domain: FinitePoset, codomain: FinitePoset, monad: UncertaintyMonad, table, check=True):
        self.domain = domain
        self.codomain = codomain
        self.monad = monad
        self.table = {x: table[x] for x in domain.elements}
        if check:
            self._validate()

    def _validate(self):
        m = self.monad
        for x, v in self.table.items():
            m.validate(v, self.codomain.leq)
            for y in m.outcomes(v):
                self.codomain.index(y)
        if m.ordered:
            vleq = m.value_leq(self.codomain.leq)
            for a, b in self.domain.pairs():
                if not vleq(self.table[a], self.table[b]):
                    raise ObjectMismatch(
                        f"arrow is not monotone: {format_element(a)} <= {format_element(b)} "
                        f"but {self.table[a]!r} is not below {self.table[b]!r}"
                    )

    def __call__(self, x):
        return self.table[x]

    def __eq__(self, other):
        if not isinstance(other, KleisliArrow):
            return NotImplemented
        return (
            self.monad.name == other.monad.name
            and self.domain == other.domain
            and self.codomain == other.codomain
            and self.table == other.table
        )

    def __hash__(self):
        return hash((self.monad.name, self.domain, self.codomain))

    def __repr__(self):
        body = ", ".join(f"{format_element(x)} -> {v!r}" for x, v in self.table.items())
        return f"KleisliArrow[{self.monad.name}]({body})"


def _same_monad(*arrows):
    names = {a.monad.name for a in arrows}
    if len(names) != 1:
        raise MonadMismatch(f"arrows use different monads: {sorted(names)}")
    return arrows[0].monad


def kleisli_compose(f: KleisliArrow, g: KleisliArrow) -> KleisliArrow:
    """``a |-> bind(f(a), g)``."""
    m = _same_monad(f, g)
    if f.codomain != g.domain:
        raise ObjectMismatch("Kleisli arrows are not composable")
    table = {x: m.bind(v, g.table.__getitem__) for x, v in f.table.items()}
    return KleisliArrow(f.domain, g.codomain, m, table, check=m.ordered)


def kleisli_tensor(f: KleisliArrow, g: KleisliArrow) -> KleisliArrow:
    """Parallel product through the strength."""
    m = _same_monad(f, g)
    dom = poset_product(f.domain, g.domain)
    cod = poset_product(f.codomain, g.codomain)
    table = {(a, b): m.strength(f.table[a], g.table[b]) for a, b in dom.elements}
    return KleisliArrow(dom, cod, m, table, check=False)


def lift_pure(fn: Callable, domain: FinitePoset, codomain: FinitePoset, monad: UncertaintyMonad) -> KleisliArrow:
    """``fn ; unit``. Ordered monads require ``fn`` to be monotone."""
    table = {x: monad.unit(fn(x)) for x in domain.elements}
    return KleisliArrow(domain, codomain, monad, table)


def kleisli_identity(X: FinitePoset, monad: UncertaintyMonad) -> KleisliArrow:
    return lift_pure(lambda x: x, X, X, monad)


def copy(X: FinitePoset, monad: UncertaintyMonad) -> KleisliArrow:
    return lift_pure(lambda x: (x, x), X, poset_product(X, X), monad)


def delete(X: FinitePoset, monad: UncertaintyMonad) -> KleisliArrow:
    return lift_pure(lambda x: "*", X, UNIT, monad)


def swap(X, Y, monad) -> KleisliArrow:
    return lift_pure(lambda p: (p[1], p[0]), poset_product(X, Y), poset_product(Y, X), monad)


def associator(X, Y, Z, monad) -> KleisliArrow:
    """``(X x Y) x Z -> X x (Y x Z)``."""
    return lift_pure(
        lambda p: (p[0][0], (p[0][1], p[1])),
        poset_product(poset_product(X, Y), Z),
        poset_product(X, poset_product(Y, Z)),
        monad,
    )


def left_unitor(X, monad) -> KleisliArrow:
    return lift_pure(lambda p: p[1], poset_product(UNIT, X), X, monad)


def right_unitor(X, monad) -> KleisliArrow:
    return lift_pure(lambda p: p[0], poset_product(X, UNIT), X, monad)


def compose_all(*arrows) -> KleisliArrow:
    out = arrows[0]
    for a in arrows[1:]:
        out = kleisli_compose(out, a)
    return out


def is_deterministic(f: KleisliArrow) -> bool:
    """``f ; copy == copy ; (f x f)``."""
    m = f.monad
    lhs = kleisli_compose(f, copy(f.codomain, m))
    rhs = kleisli_compose(copy(f.domain, m), kleisli_tensor(f, f))
    return lhs == rhs


def all_arrows(monad: UncertaintyMonad, X: FinitePoset, Y: FinitePoset, pool=None):
    """Every arrow ``X -> M(Y)`` whose values come from ``monad.values(Y)``."""
    pool = monad.values(Y.elements, Y.leq) if pool is None else pool
    vleq = monad.value_leq(Y.leq) if monad.ordered else None
    for choice in itertools.product(pool, repeat=len(X)):
        table = dict(zip(X.elements, choice))
        if vleq is not None and not all(vleq(table[a], table[b]) for a, b in X.pairs()):
            continue
        yield KleisliArrow(X, Y, monad, table, check=False)
