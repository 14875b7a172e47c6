"""Small-poset enumeration and seeded random instances for checks and tests."""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .dp import DesignProblem, monotone_closure
from .poset import FinitePoset, MonotoneMap

LABELS = "abcdefghij"


def _transitive(t):
    return not ((t.astype(np.int64) @ t.astype(np.int64) > 0) & ~t).any()


def _canonical(t):
    n = len(t)
    best = None
    for perm in itertools.permutations(range(n)):
        key = t[np.ix_(perm, perm)].tobytes()
        if best is None or key < best:
            best = key
    return best


@lru_cache(maxsize=None)
def _small_tables(n):
    """One order table per isomorphism class of n-element posets."""
    slots = [(i, j) for i in range(n) for j in range(i + 1, n)]
    seen = {}
    for bits in range(1 << len(slots)):
        t = np.eye(n, dtype=bool)
        for k, (i, j) in enumerate(slots):
            if bits >> k & 1:
                t[i, j] = True
        if not _transitive(t):
            continue
        key = _canonical(t)
        if key not in seen:
            seen[key] = t
    return tuple(seen.values())


def small_posets(max_size: int, min_size: int = 0):
    """All posets with ``min_size..max_size`` elements, one per isomorphism class."""
    out = []
    for n in range(min_size, max_size + 1):
        for t in _small_tables(n):
            out.append(FinitePoset(LABELS[:n], t, check=False))
    return out


def discrete_carriers(max_size: int, min_size: int = 0):
    return [FinitePoset(LABELS[:n], np.eye(n, dtype=bool), check=False) for n in range(min_size, max_size + 1)]


def random_poset(rng: np.random.Generator, n: int, density: float = 0.4, labels=None) -> FinitePoset:
    t = np.eye(n, dtype=bool)
    t |= np.triu(rng.random((n, n)) < density, k=1)
    for k in range(n):
        t |= np.outer(t[:, k], t[k, :])
    perm = rng.permutation(n)
    t = t[np.ix_(perm, perm)]
    labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(n))
    return FinitePoset(labels, t, check=False)


def random_dp(rng: np.random.Generator, F: FinitePoset, R: FinitePoset, density: float = 0.15) -> DesignProblem:
    """Monotone closure of a sparse random seed table."""
    seed = rng.random((len(F), len(R))) < density
    return DesignProblem(F, R, monotone_closure(F, R, seed), check=False)


def random_monotone_map(rng: np.random.Generator, P: FinitePoset, Q: FinitePoset) -> MonotoneMap:
    order = sorted(range(len(P)), key=lambda i: int(P.leq_table[:, i].sum()))
    for _ in range(20):
        img = {}
        ok = True
        for i in order:
            below = [img[j] for j in order if j in img and P.leq_table[j, i] and j != i]
            cands = [q for q in range(len(Q)) if all(Q.leq_table[b, q] for b in below)]
            if not cands:
                ok = False
                break
            img[i] = int(rng.choice(cands))
        if ok:
            return MonotoneMap(P, Q, {P.elements[i]: Q.elements[q] for i, q in img.items()})
    return MonotoneMap(P, Q, {p: Q.elements[0] for p in P.elements})


def all_design_problems(F: FinitePoset, R: FinitePoset):
    """Every monotone table ``F x R`` (brute force, tiny posets only)."""
    n = len(F) * len(R)
    out = []
    for bits in range(1 << n):
        t = np.array([(bits >> k) & 1 for k in range(n)], dtype=bool).reshape(len(F), len(R))
        if np.array_equal(monotone_closure(F, R, t), t):
            out.append(DesignProblem(F, R, t, check=False))
    return out
