"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import itertools
import json
import math
import os
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np

from codesign.dp import (
    dp_compose,
    dp_identity,
    dp_lift_monotone,
    dp_tensor,
    dp_trace,
    dp_trace_via_duals,
    map_swap,
    snake_left,
    snake_right,
)
from codesign.errors import NoFeasibleParameter, ZeroEvidence
from codesign.generators import all_design_problems, random_dp, random_poset, small_posets
from codesign.kleisli import KleisliArrow, is_deterministic, lift_pure
from codesign.laws import check_markov_axioms, check_monad_laws, twarr_counterexample
from codesign.learning import Observation, bayes_update, likelihood
from codesign.monads import DIST, IDENTITY, INTERVAL, POWERSET, Dist, Interval
from codesign.param import (
    cell_compose,
    cell_lift,
    cell_tensor,
    check_2cell,
    symmetry_naturality,
    tensorator,
)
from codesign.poset import UNIT, antichain, chain, generate_sigma_algebra, poset_opposite, poset_product
from codesign.poset import powerset_family, rectangle_family, upper_sets
from codesign.queries import decide, query_cell

from cells import random_cell
from oracles import EVOracle, sigma_oracle

MONADS = [IDENTITY, POWERSET, INTERVAL, DIST]


def report(capsys, n, title, ok, detail=""):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] AC{n:02d} {title}" + (f" ({detail})" if detail else ""))
    assert ok, detail


def _poset(rng, lo=1, hi=5):
    return random_poset(rng, int(rng.integers(lo, hi + 1)))


def test_ac01_dp_category_laws(capsys):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(200):
        A, B, C, D = (_poset(rng, 1, 5) for _ in range(4))
        f, g, h = random_dp(rng, A, B, 0.3), random_dp(rng, B, C, 0.3), random_dp(rng, C, D, 0.3)
        ok = dp_compose(dp_compose(f, g), h) == dp_compose(f, dp_compose(g, h))
        ok &= dp_compose(dp_identity(A), f) == f and dp_compose(f, dp_identity(B)) == f
        # interchange on small factors so the products stay <= 25 elements
        P, Q, R, S, T, U = (_poset(rng, 1, 3) for _ in range(6))
        a, b = random_dp(rng, P, Q, 0.3), random_dp(rng, S, T, 0.3)
        c, d = random_dp(rng, Q, R, 0.3), random_dp(rng, T, U, 0.3)
        ok &= dp_compose(dp_tensor(a, b), dp_tensor(c, d)) == dp_tensor(dp_compose(a, c), dp_compose(b, d))
        bad += not ok
    dt = time.perf_counter() - t0
    report(capsys, 1, "DP associativity, units, interchange on 200 instances", bad == 0 and dt < 10, f"{bad} failures, {dt:.2f}s")


def test_ac02_monad_laws_exhaustive(capsys):
    t0 = time.perf_counter()
    problems = []
    for name in ("identity", "powerset", "interval", "dist"):
        rep = check_monad_laws(name, max_size=3)
        problems += [f"{name}:{r.law}" for r in rep.results if not (r.passed and r.exhaustive)]
    mutant = check_monad_laws("full_powerset", max_size=3).result("delete_naturality")
    dt = time.perf_counter() - t0
    ok = not problems and not mutant.passed and bool(mutant.witness) and dt < 30
    detail = f"{len(problems)} failing laws, mutant witness {mutant.witness!r}, {dt:.1f}s"
    report(capsys, 2, "monad and monoidal laws exhaustive on carriers <= 3; mutant caught", ok, detail)


def test_ac03_markov_and_determinism(capsys):
    problems = []
    for name in ("identity", "powerset", "interval", "dist"):
        rep = check_markov_axioms(name, max_size=3)
        problems += [f"{name}:{r.law}" for r in rep.results if not (r.passed and r.exhaustive)]
    det_ok = all(is_deterministic(lift_pure(lambda x: x, chain(3), chain(3), M)) for M in MONADS)
    coin = KleisliArrow(UNIT, antichain("HT"), DIST, {"*": Dist({"H": Fraction(1, 2), "T": Fraction(1, 2)})})
    ok = not problems and det_ok and not is_deterministic(coin)
    report(capsys, 3, "Markov axioms and determinism classification", ok, f"{len(problems)} failing laws")


def test_ac04_tensorator_and_symmetry(capsys):
    rng = np.random.default_rng(4)
    raw_equal = unrelated = sym_bad = 0
    for i in range(100):
        M = MONADS[i % 4]
        P, Q = _poset(rng, 1, 3), _poset(rng, 1, 3)
        f1 = random_cell(rng, M, P, Q, [chain(2)])
        f2 = random_cell(rng, M, Q, P, [chain(3)])
        g1 = random_cell(rng, M, Q, P, [antichain("xy")])
        g2 = random_cell(rng, M, P, Q, [chain(2), chain(2)])
        first = cell_compose(cell_tensor(f1, f2), cell_tensor(g1, g2))
        second = cell_tensor(cell_compose(f1, g1), cell_compose(f2, g2))
        raw_equal += first == second
        unrelated += not check_2cell(tensorator(f1, f2, g1, g2), first, second)
        sn = symmetry_naturality(f1, g1)
        sym_bad += not sn.holds() or sn.holds_without_swap()
    ok = raw_equal == 0 and unrelated == 0 and sym_bad == 0
    detail = f"raw equal {raw_equal}, not related by m {unrelated}, symmetry failures {sym_bad}"
    report(capsys, 4, "interchange holds exactly after reparametrization, not before", ok, detail)


def test_ac05_lift_strict_and_injective(capsys):
    rng = np.random.default_rng(5)
    bad = 0
    for _ in range(50):
        P, Q, R = _poset(rng, 1, 4), _poset(rng, 1, 4), _poset(rng, 1, 4)
        d1, d2 = random_dp(rng, P, Q, 0.3), random_dp(rng, Q, R, 0.3)
        for M in MONADS:
            bad += cell_lift(dp_compose(d1, d2), M) != cell_compose(cell_lift(d1, M), cell_lift(d2, M))
            bad += cell_lift(dp_tensor(d1, d2), M) != cell_tensor(cell_lift(d1, M), cell_lift(d2, M))
    hom = all_design_problems(chain(2), poset_product(chain(2), chain(1)))
    injective = all(len({cell_lift(d, M) for d in hom}) == len(hom) for M in MONADS)
    report(capsys, 5, "lift preserves compose and tensor strictly; injective", bad == 0 and injective, f"{bad} mismatches")


def test_ac06_compact_closed(capsys):
    rng = np.random.default_rng(6)
    bad = []
    posets = small_posets(4, 1)
    for P in posets:
        if dp_trace(dp_lift_monotone(map_swap(P, P)), P) != dp_identity(P):
            bad.append(("yank", P))
        if snake_left(P) != dp_identity(P) or snake_right(P) != dp_identity(poset_opposite(P)):
            bad.append(("snake", P))
        for _ in range(3):
            F, R = _poset(rng, 1, 3), _poset(rng, 1, 3)
            phi = random_dp(rng, poset_product(F, P), poset_product(R, P), 0.3)
            if dp_trace_via_duals(phi, P) != dp_trace(phi, P):
                bad.append(("trace", P))
    report(capsys, 6, f"yanking, snakes, trace via duals on all {len(posets)} posets <= 4", not bad, f"{len(bad)} failures")


def test_ac07_sigma_algebras(capsys):
    small = small_posets(3, 1)
    bad = 0
    for P, Q in itertools.product(small, repeat=2):
        joint = generate_sigma_algebra(upper_sets(poset_product(P, Q)))
        gens = rectangle_family(upper_sets(P), upper_sets(Q))
        rect = generate_sigma_algebra(gens)
        bad += set(joint.sets) != set(rect.sets)
        bad += set(rect.sets) != sigma_oracle(poset_product(P, Q).elements, gens.sets)
    full = 0
    for P in small_posets(5, 1):
        full += set(generate_sigma_algebra(upper_sets(P)).sets) == set(powerset_family(P).sets)
    n5 = len(small_posets(5, 1))
    ok = bad == 0 and full == n5
    report(capsys, 7, "product sigma-algebra from rectangles; upper sets generate the powerset", ok, f"{bad} pair mismatches, {full}/{n5} full")


def test_ac08_twarr(capsys):
    found = [twarr_counterexample(chain(n)).found for n in range(2, 8)]
    report(capsys, 8, "twisted-arrow unit fails monotonicity on chains of length 2..7", all(found))


# -- EV end to end ---------------------------------------------------------


def _level(a):
    return int(next(iter(a.members))) if len(a) else None


def _library_query(c, f, monad):
    out = {}
    for u, res in query_cell(c, f).items():
        if monad == "identity":
            out[u] = _level(res.antichain)
        elif monad == "interval":
            out[u] = (_level(res.pessimistic), _level(res.optimistic))
        elif monad == "powerset":
            out[u] = {_level(a) for a in res.antichains}
        else:
            out[u] = {_level(a): w for a, w in res.dist.items()}
            assert res.p_feasible == 1 - out[u].get(None, 0)
    return out


OBJECTIVES_FOR = {
    "identity": ("expected", "worst_case", "optimistic"),
    "interval": ("worst_case", "optimistic"),
    "powerset": ("worst_case", "optimistic"),
    "dist": ("expected",),
}
WIRING_FOR = {"identity": "ev", "interval": "ev_interval", "powerset": "ev_powerset", "dist": "ev_dist"}


def test_ac09_ev_matches_enumeration_oracle(capsys, ev_path, ev_model):
    t0 = time.perf_counter()
    oracle = EVOracle(ev_path)
    mismatches = []
    compared = 0
    for monad, wiring in WIRING_FOR.items():
        c = ev_model.cell(wiring)
        for v, l in itertools.product(oracle.V, oracle.L):
            f = (str(v), str(l))
            want = oracle.query(monad, v, l)
            got = _library_query(c, f, monad)
            compared += 1
            if got != want:
                mismatches.append(("query", monad, f))
            for objective in OBJECTIVES_FOR[monad]:
                for cost_name in ("price", "price_steep"):
                    for penalty in (None, Fraction(40)):
                        scores, best = oracle.decide(monad, objective, v, l, oracle.cost(cost_name), penalty)
                        compared += 1
                        try:
                            rep = decide(c, f, objective, ev_model.costs[cost_name], penalty)
                        except NoFeasibleParameter:
                            if best is not None:
                                mismatches.append(("decide", monad, objective, cost_name, penalty, f))
                            continue
                        if rep.values != scores or rep.chosen != best:
                            mismatches.append(("decide", monad, objective, cost_name, penalty, f))
    dt = time.perf_counter() - t0
    ok = not mismatches and dt < 60
    report(capsys, 9, f"EV query/decide equal the enumeration oracle on {compared} comparisons", ok, f"{len(mismatches)} mismatches, {dt:.1f}s")


def test_ac10_interval_composite(capsys, ev_model):
    rng = np.random.default_rng(10)
    bad = 0
    pairs = []
    for _ in range(30):
        P, Q, R = _poset(rng, 1, 3), _poset(rng, 1, 3), _poset(rng, 1, 3)
        pairs.append((random_cell(rng, INTERVAL, P, Q, [chain(2)]), random_cell(rng, INTERVAL, Q, R, [chain(3)])))
    pairs.append((ev_model.cells["chassis_interval"], ev_model.cells["battery_interval"]))
    for a, b in pairs:
        ab = cell_compose(a, b)
        for (u1, v1), (u2, v2) in itertools.product(a.table.items(), b.table.items()):
            bad += ab.table[u1 + u2] != Interval(dp_compose(v1.lo, v2.lo), dp_compose(v1.hi, v2.hi))
    report(capsys, 10, "interval composite is [lo;lo, hi;hi] per parameter pair", bad == 0, f"{bad} mismatches")


def test_ac11_bayes_sequential(capsys, ev_model):
    rng = np.random.default_rng(11)
    P = chain(3)
    bad = checked = 0
    for _ in range(120):
        kernel = {}
        for h in ("h0", "h1", "h2"):
            a, b = random_dp(rng, P, P, 0.4), random_dp(rng, P, P, 0.4)
            w = Fraction(int(rng.integers(1, 6)), 6)
            kernel[h] = Dist([(a, w), (b, 1 - w)])
        obs = [Observation(str(rng.integers(3)), str(rng.integers(3)), bool(rng.integers(2))) for _ in range(4)]
        prior = Dist.uniform(["h0", "h1", "h2"])
        try:
            batch = bayes_update(prior, kernel, obs)
        except ZeroEvidence:
            continue
        seq = prior
        for o in obs:
            seq = bayes_update(seq, kernel, [o]).dist
        bad += seq != batch.dist
        lik = {h: math.prod(likelihood(kernel, h, o) for o in obs) for h in prior.support()}
        z = sum(lik.values())
        bad += any(batch.dist[h] != lik[h] / z for h in lik)
        checked += 1
    spec = ev_model.bayes["chassis"]
    space, prior = ev_model.priors[spec["prior"]]
    kern = ev_model.cells[spec["kernel"]]
    whole = bayes_update(prior, kern, spec["observations"]).dist
    step = prior
    for o in spec["observations"]:
        step = bayes_update(step, kern, [o]).dist
    bad += step != whole
    ok = bad == 0 and checked >= 30
    report(capsys, 11, "batch update equals sequential updates; uniform prior gives normalised likelihoods", ok, f"{bad} mismatches over {checked} runs")


def test_ac12_cli_determinism(capsys, ev_path, tmp_path):
    ev = str(ev_path)
    bad_model = tmp_path / "bad.json"
    bad_model.write_text(json.dumps({"posets": {"A": {"chain": 2}}, "cells": {"c": {"source": "A", "target": "Nope"}}}))
    cases = [
        (["validate", ev], 0),
        (["check-laws", "dist", "--max-size", "2", "--seed", "3"], 0),
        (["check-laws", "full_powerset", "--max-size", "2"], 0),
        (["check-laws", "twarr"], 0),
        (["eval", ev, "--cell", "ev_dist"], 0),
        (["query", ev, "--cell", "ev_powerset", "--fun", "(v=1,l=2)"], 0),
        (["decide", ev, "--cell", "ev_interval", "--fun", "(1,2)", "--objective", "worst_case", "--cost", "price"], 0),
        (["fit", ev, "--fit", "chassis_fit_constrained"], 0),
        (["bayes", ev, "--config", "chassis", "--render-decimal"], 0),
        (["validate", str(bad_model)], 1),
        (["decide", ev, "--cell", "ev_dist", "--fun", "(1,2)", "--objective", "worst_case", "--cost", "price"], 1),
        (["query", ev, "--cell", "ev"], 2),
    ]
    problems = []
    for argv, want in cases:
        runs = [
            subprocess.run([sys.executable, "-m", "codesign", *argv], capture_output=True, env=dict(os.environ, PYTHONHASHSEED=str(s)))
            for s in (0, 1)
        ]
        if runs[0].stdout != runs[1].stdout or runs[0].returncode != runs[1].returncode:
            problems.append(("nondeterministic", argv[0]))
        if runs[0].returncode != want:
            problems.append(("exit", argv[0], runs[0].returncode, want))
    report(capsys, 12, f"CLI output byte-identical and exit codes correct over {len(cases)} commands", not problems, str(problems) if problems else "")
