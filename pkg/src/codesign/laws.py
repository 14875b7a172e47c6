"""Law checking for uncertainty monads and their Kleisli (Markov) categories.

Every check walks all carriers up to a size cap. Within one carrier
combination the cases are enumerated exhaustively when there are at most
``case_cap`` of them; otherwise a seeded uniform sample of ``case_cap`` cases
is drawn and the result is marked non-exhaustive. With the default cap all
checks on carriers of size <= 3 are exhaustive.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import CarrierTooLarge
from .generators import discrete_carriers, small_posets
from .kleisli import (
    all_arrows,
    associator,
    compose_all,
    copy,
    delete,
    is_deterministic,
    kleisli_compose,
    kleisli_identity,
    kleisli_tensor,
    left_unitor,
    lift_pure,
    right_unitor,
    swap,
)
from .monads import FULL_POWERSET, get_monad
from .poset import UNIT, FinitePoset, format_element, poset_product

MAX_CARRIER = 4


@dataclass
class LawResult:
    law: str
    passed: bool
    cases: int
    exhaustive: bool
    witness: str | None = None


@dataclass
class LawReport:
    subject: str
    seed: int
    max_size: int
    results: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self):
        return [r for r in self.results if not r.passed]

    def result(self, law) -> LawResult:
        for r in self.results:
            if r.law == law:
                return r
        raise KeyError(law)

    def format(self) -> str:
        lines = [f"laws for {self.subject} (carriers <= {self.max_size}, seed {self.seed})"]
        for r in self.results:
            mark = "PASS" if r.passed else "FAIL"
            how = "exhaustive" if r.exhaustive else "sampled"
            line = f"  {mark}  {r.law:<28} {r.cases:>8} cases ({how})"
            if r.witness:
                line += f"  witness: {r.witness}"
            lines.append(line)
        return "\n".join(lines)


class _Law:
    """Accumulates cases for one law across carrier combinations."""

    def __init__(self, name, rng, case_cap):
        self.name = name
        self.rng = rng
        self.case_cap = case_cap
        self.cases = 0
        self.exhaustive = True
        self.witness = None

    def run(self, pools, check):
        """Apply ``check(*case)`` to cases from the product of ``pools``.

        ``check`` returns None on success or a witness string.
        """
        if self.witness is not None:
            return
        pools = [list(p) for p in pools]
        total = 1
        for p in pools:
            total *= len(p)
        if total == 0:
            return
        if total <= self.case_cap:
            cases = itertools.product(*pools)
        else:
            self.exhaustive = False
            cases = (
                tuple(p[int(self.rng.integers(len(p)))] for p in pools)
                for _ in range(self.case_cap)
            )
        self.run_cases(cases, check)

    def run_cases(self, cases, check):
        """Apply ``check`` to an explicit, already complete case stream."""
        if self.witness is not None:
            return
        for case in cases:
            self.cases += 1
            w = check(*case)
            if w is not None:
                self.witness = w
                return

    def result(self):
        return LawResult(self.name, self.witness is None, self.cases, self.exhaustive, self.witness)


def _carriers(monad, max_size):
    if max_size > MAX_CARRIER:
        raise CarrierTooLarge(f"law checks are limited to carriers with <= {MAX_CARRIER} elements")
    return small_posets(max_size) if monad.ordered else discrete_carriers(max_size)


def _pool(monad, X):
    return monad.values(X.elements, X.leq)


def _value_leq(monad, X):
    return monad.value_leq(X.leq) if monad.ordered else None


def _pure_maps(monad, X, Y):
    """All functions ``X -> Y`` (monotone ones for ordered monads)."""
    out = []
    for img in itertools.product(Y.elements, repeat=len(X)):
        table = dict(zip(X.elements, img))
        if monad.ordered and not all(Y.leq(table[a], table[b]) for a, b in X.pairs()):
            continue
        out.append(table)
    return out


def _fmt(*parts):
    return "; ".join(repr(p) if not isinstance(p, (str, tuple)) else format_element(p) for p in parts)


class _Restrictions:
    """Distinct restrictions of a family of tables to subsets of their domain.

    A law that only evaluates an arrow on the outcomes of some value cannot
    tell apart two arrows agreeing there, so checking one representative per
    restriction is still exhaustive.
    """

    def __init__(self, tables):
        self.tables = tables
        self._cache = {}

    def on(self, keys):
        keys = tuple(keys)
        if keys not in self._cache:
            seen = {}
            for t in self.tables:
                r = tuple(t[k] for k in keys)
                if r not in seen:
                    seen[r] = dict(zip(keys, r))
            self._cache[keys] = list(seen.values())
        return self._cache[keys]


def _ordered_outcomes(M, X, m):
    outs = set(M.outcomes(m))
    return [x for x in X.elements if x in outs]


def check_monad_laws(monad, max_size: int = 3, seed: int = 0, case_cap: int = 200_000) -> LawReport:
    """Monad, monoidal-monad, symmetry and affineness laws on small carriers.

    Laws quantifying over Kleisli arrows or pure maps enumerate them up to
    their restriction to the outcomes actually reached, which keeps every
    law exhaustive on carriers of size 3.
    """
    if isinstance(monad, str):
        monad = FULL_POWERSET if monad == "full_powerset" else get_monad(monad)
    rng = np.random.default_rng(seed)
    carriers = _carriers(monad, max_size)
    M = monad
    laws = {
        name: _Law(name, rng, case_cap)
        for name in (
            "left_unit",
            "right_unit",
            "bind_associativity",
            "strength_naturality_left",
            "strength_naturality_right",
            "strength_associativity",
            "strength_unit",
            "unit_monoidal",
            "join_monoidal",
            "symmetry",
            "affine",
            "delete_naturality",
        )
    }

    pools = {X: _pool(M, X) for X in carriers}
    arrows = {}
    pures = {}

    def arrows_of(X, Y):
        if (X, Y) not in arrows:
            arrows[(X, Y)] = _Restrictions([a.table for a in all_arrows(M, X, Y, pools[Y])])
        return arrows[(X, Y)]

    def pures_of(X, Y):
        if (X, Y) not in pures:
            pures[(X, Y)] = _Restrictions(_pure_maps(M, X, Y))
        return pures[(X, Y)]

    for X in carriers:
        laws["right_unit"].run(
            [pools[X]], lambda m: None if M.bind(m, M.unit) == m else _fmt(m)
        )
        laws["strength_unit"].run(
            [pools[X]],
            lambda m: None
            if M.map(M.strength(M.unit("*"), m), lambda p: p[1]) == m
            and M.map(M.strength(m, M.unit("*")), lambda p: p[0]) == m
            else _fmt(m),
        )
        laws["delete_naturality"].run(
            [pools[X]],
            lambda m: None if M.map(m, lambda x: "*") == M.unit("*") else f"deleting {m!r}",
        )

    unit_pool = M.values(UNIT.elements, UNIT.leq)
    laws["affine"].run(
        [[unit_pool]],
        lambda pool: None if len(pool) == 1 else f"M(1) has {len(pool)} inhabitants: {pool!r}",
    )

    for X, Y in itertools.product(carriers, repeat=2):
        # bind(unit(x), k) only looks at k(x)
        laws["left_unit"].run_cases(
            ((x, k) for x in X.elements for k in arrows_of(X, Y).on([x])),
            lambda x, k: None if M.bind(M.unit(x), k.__getitem__) == k[x] else _fmt(x, k[x]),
        )
        laws["unit_monoidal"].run(
            [X.elements, Y.elements],
            lambda x, y: None if M.strength(M.unit(x), M.unit(y)) == M.unit((x, y)) else _fmt(x, y),
        )
        laws["symmetry"].run(
            [pools[X], pools[Y]],
            lambda a, b: None
            if M.map(M.strength(a, b), lambda p: (p[1], p[0])) == M.strength(b, a)
            else _fmt(a, b),
        )
        # join is a monoidal transformation: strength of joins = join of mapped strength
        mmx = M.values(pools[X], _value_leq(M, X))
        mmy = M.values(pools[Y], _value_leq(M, Y))
        laws["join_monoidal"].run(
            [mmx, mmy],
            lambda a, b: None
            if M.strength(M.join(a), M.join(b))
            == M.join(M.map(M.strength(a, b), lambda p: M.strength(p[0], p[1])))
            else _fmt(a, b),
        )

    for X, Y, Z in itertools.product(carriers, repeat=3):
        ks, hs = arrows_of(X, Y), arrows_of(Y, Z)

        def assoc_cases(X=X, Y=Y, ks=ks, hs=hs):
            for m in pools[X]:
                for k in ks.on(_ordered_outcomes(M, X, m)):
                    reached = set()
                    for v in k.values():
                        reached.update(M.outcomes(v))
                    for h in hs.on([y for y in Y.elements if y in reached]):
                        yield m, k, h

        laws["bind_associativity"].run_cases(
            assoc_cases(),
            lambda m, k, h: None
            if M.bind(M.bind(m, k.__getitem__), h.__getitem__)
            == M.bind(m, lambda x: M.bind(k[x], h.__getitem__))
            else _fmt(m, k, h),
        )
        laws["strength_associativity"].run(
            [pools[X], pools[Y], pools[Z]],
            lambda a, b, c: None
            if M.map(M.strength(M.strength(a, b), c), lambda p: (p[0][0], (p[0][1], p[1])))
            == M.strength(a, M.strength(b, c))
            else _fmt(a, b, c),
        )
        # naturality in the left argument along pure f: X -> Z, right along g: Y -> Z
        fs, gs = pures_of(X, Z), pures_of(Y, Z)
        laws["strength_naturality_left"].run_cases(
            (
                (f, a, b)
                for a in pools[X]
                for f in fs.on(_ordered_outcomes(M, X, a))
                for b in pools[Y]
            ),
            lambda f, a, b: None
            if M.strength(M.map(a, f.__getitem__), b)
            == M.map(M.strength(a, b), lambda p: (f[p[0]], p[1]))
            else _fmt(a, b),
        )
        laws["strength_naturality_right"].run_cases(
            (
                (g, a, b)
                for b in pools[Y]
                for g in gs.on(_ordered_outcomes(M, Y, b))
                for a in pools[X]
            ),
            lambda g, a, b: None
            if M.strength(a, M.map(b, g.__getitem__))
            == M.map(M.strength(a, b), lambda p: (p[0], g[p[1]]))
            else _fmt(a, b),
        )

    report = LawReport(monad.name, seed, max_size)
    report.results = [law.result() for law in laws.values()]
    return report


def check_markov_axioms(monad, max_size: int = 3, seed: int = 0, case_cap: int = 200_000) -> LawReport:
    """Comonoid, tensor-compatibility, delete-naturality and determinism checks in Kl(M)."""
    M = get_monad(monad) if isinstance(monad, str) else monad
    rng = np.random.default_rng(seed)
    carriers = _carriers(M, max_size)
    names = (
        "copy_counit_left",
        "copy_counit_right",
        "copy_coassociative",
        "copy_commutative",
        "copy_tensor_compatible",
        "delete_tensor_compatible",
        "delete_natural",
        "pure_is_deterministic",
        "kleisli_unit_laws",
    )
    laws = {n: _Law(n, rng, case_cap) for n in names}

    def eq(a, b, what):
        return None if a == b else what

    for X in carriers:
        idX = kleisli_identity(X, M)
        cp = copy(X, M)
        laws["copy_counit_left"].run(
            [[X]],
            lambda X: eq(
                compose_all(cp, kleisli_tensor(delete(X, M), idX), left_unitor(X, M)), idX, repr(X)
            ),
        )
        laws["copy_counit_right"].run(
            [[X]],
            lambda X: eq(
                compose_all(cp, kleisli_tensor(idX, delete(X, M)), right_unitor(X, M)), idX, repr(X)
            ),
        )
        laws["copy_coassociative"].run(
            [[X]],
            lambda X: eq(
                compose_all(cp, kleisli_tensor(cp, idX), associator(X, X, X, M)),
                compose_all(cp, kleisli_tensor(idX, cp)),
                repr(X),
            ),
        )
        laws["copy_commutative"].run(
            [[X]], lambda X: eq(kleisli_compose(cp, swap(X, X, M)), cp, repr(X))
        )

    for X, Y in itertools.product(carriers, repeat=2):
        XY = poset_product(X, Y)
        # copy on X x Y = (copy_X x copy_Y) ; middle swap
        middle = lift_pure(
            lambda p: ((p[0][0], p[1][0]), (p[0][1], p[1][1])),
            poset_product(poset_product(X, X), poset_product(Y, Y)),
            poset_product(XY, XY),
            M,
        )
        laws["copy_tensor_compatible"].run(
            [[XY]],
            lambda XY: eq(
                copy(XY, M), compose_all(kleisli_tensor(copy(X, M), copy(Y, M)), middle), repr(XY)
            ),
        )
        laws["delete_tensor_compatible"].run(
            [[XY]],
            lambda XY: eq(
                delete(XY, M),
                compose_all(kleisli_tensor(delete(X, M), delete(Y, M)), left_unitor(UNIT, M)),
                repr(XY),
            ),
        )
        laws["delete_natural"].run(
            [list(all_arrows(M, X, Y))],
            lambda f: eq(kleisli_compose(f, delete(Y, M)), delete(X, M), repr(f)),
        )
        laws["pure_is_deterministic"].run(
            [_pure_maps(M, X, Y)],
            lambda t: None if is_deterministic(lift_pure(t.__getitem__, X, Y, M)) else repr(t),
        )
        laws["kleisli_unit_laws"].run(
            [list(all_arrows(M, X, Y))],
            lambda f: eq(kleisli_compose(kleisli_identity(X, M), f), f, repr(f))
            or eq(kleisli_compose(f, kleisli_identity(Y, M)), f, repr(f)),
        )

    report = LawReport(f"Kl({M.name})", seed, max_size)
    report.results = [law.result() for law in laws.values()]
    return report


@dataclass(frozen=True)
class TwArrWitness:
    """Outcome of testing the candidate unit ``a |-> [a, a]`` under inclusion order."""

    poset: FinitePoset
    pair: tuple | None

    @property
    def found(self) -> bool:
        return self.pair is not None

    def explain(self) -> str:
        if self.pair is None:
            return "no strictly comparable pair: the candidate unit is monotone here"
        a, b = (format_element(x) for x in self.pair)
        return (
            f"{a} <= {b} but [{a},{a}] is not inside [{b},{b}] under inclusion "
            f"(that would need {b} <= {a}); the candidate unit is not monotone"
        )


def twisted_leq(P: FinitePoset):
    """Inclusion order on intervals: ``[a, b] <= [c, d]`` iff ``c <= a`` and ``b <= d``."""
    return lambda i, j: P.leq(j[0], i[0]) and P.leq(i[1], j[1])


def twarr_counterexample(P: FinitePoset | None = None) -> TwArrWitness:
    """Search ``P`` for a pair breaking monotonicity of the unit under inclusion order."""
    from .poset import chain

    P = chain(2, ("a", "b")) if P is None else P
    inc = twisted_leq(P)
    for a, b in P.pairs():
        if not inc((a, a), (b, b)):
            return TwArrWitness(P, (a, b))
    return TwArrWitness(P, None)
