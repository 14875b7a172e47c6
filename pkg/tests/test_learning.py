from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from codesign.dp import dp_empty, dp_full, dp_identity
from codesign.errors import CodesignError, MonadMismatch, NoFeasibleTheta, ZeroEvidence
from codesign.generators import random_dp
from codesign.learning import Observation, bayes_update, grid_fit, likelihood
from codesign.monads import Dist, Point, Subset
from codesign.param import ParamCell, ParamSpace
from codesign.poset import MonotoneMap, antichain, chain

P = chain(3)


def _uniform(keys):
    return Dist({k: Fraction(1, len(keys)) for k in keys})


def test_zero_likelihood_eliminates_hypothesis():
    kernel = {"d1": Point(dp_identity(P)), "d2": Point(dp_empty(P, P))}
    post = bayes_update(_uniform(["d1", "d2"]), kernel, [Observation("1", "1")])
    assert post.dist == Dist.point("d1")


def test_uniform_prior_reproduces_normalised_likelihoods():
    half = {dp_full(P, P): Fraction(4, 5), dp_empty(P, P): Fraction(1, 5)}
    kernel = {"a": Dist(half), "b": Dist({dp_full(P, P): Fraction(1, 5), dp_empty(P, P): Fraction(4, 5)})}
    post = bayes_update(_uniform(["a", "b"]), kernel, [Observation("0", "0")])
    assert post.dist == Dist({"a": Fraction(4, 5), "b": Fraction(1, 5)})
    assert post.evidence == Fraction(1, 2)


def test_infeasible_observation_uses_complement():
    kernel = {"a": Dist({dp_full(P, P): Fraction(1, 3), dp_empty(P, P): Fraction(2, 3)})}
    assert likelihood(kernel, "a", Observation("0", "0", feasible=False)) == Fraction(2, 3)


def test_zero_evidence():
    kernel = {"a": Point(dp_empty(P, P))}
    with pytest.raises(ZeroEvidence):
        bayes_update(Dist.point("a"), kernel, [Observation("0", "2")])


def test_powerset_kernel_rejected():
    kernel = {"a": Subset(frozenset([dp_empty(P, P)]))}
    with pytest.raises(MonadMismatch):
        bayes_update(Dist.point("a"), kernel, [Observation("0", "2")])


def _random_kernel(rng, hyps):
    out = {}
    for h in hyps:
        a, b = random_dp(rng, P, P, 0.4), random_dp(rng, P, P, 0.4)
        w = Fraction(int(rng.integers(1, 5)), 5)
        out[h] = Dist([(a, w), (b, 1 - w)])
    return out


def _random_obs(rng, n):
    return [
        Observation(P.elements[int(rng.integers(3))], P.elements[int(rng.integers(3))], bool(rng.integers(2)))
        for _ in range(n)
    ]


def _hand_bayes(prior, kernel, obs):
    """Product of likelihoods computed by direct enumeration of each kernel's support."""
    raw = {}
    for h, p in prior.items():
        w = p
        for o in obs:
            feas = sum((q for d, q in kernel[h].items() if bool(d.table[P.index(o.f), P.index(o.r)])), Fraction(0))
            w *= feas if o.feasible else 1 - feas
        raw[h] = w
    z = sum(raw.values())
    return {h: w / z for h, w in raw.items()}


def test_matches_hand_oracle():
    rng = np.random.default_rng(0)
    hyps = ["h0", "h1", "h2"]
    done = 0
    for _ in range(40):
        kernel, obs = _random_kernel(rng, hyps), _random_obs(rng, 3)
        prior = Dist({"h0": Fraction(1, 2), "h1": Fraction(1, 3), "h2": Fraction(1, 6)})
        try:
            post = bayes_update(prior, kernel, obs)
        except ZeroEvidence:
            continue
        want = _hand_bayes(prior, kernel, obs)
        assert all(post.dist[h] == want[h] for h in hyps)
        done += 1
    assert done > 20


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 5), st.randoms(use_true_random=False))
def test_sequential_equals_batch_and_order_free(seed, split, rnd):
    rng = np.random.default_rng(seed)
    hyps = ["h0", "h1", "h2"]
    kernel, obs = _random_kernel(rng, hyps), _random_obs(rng, 5)
    prior = _uniform(hyps)
    try:
        batch = bayes_update(prior, kernel, obs)
    except ZeroEvidence:
        return
    first = bayes_update(prior, kernel, obs[:split])
    second = bayes_update(first.dist, kernel, obs[split:])
    assert second.dist == batch.dist
    shuffled = list(obs)
    rnd.shuffle(shuffled)
    assert bayes_update(prior, kernel, shuffled).dist == batch.dist


def test_empty_observations_return_prior():
    prior = Dist({"a": Fraction(1, 3), "b": Fraction(2, 3)})
    kernel = {"a": Point(dp_empty(P, P)), "b": Point(dp_full(P, P))}
    assert bayes_update(prior, kernel, []).dist == prior


def test_point_prior_is_fixed():
    rng = np.random.default_rng(1)
    kernel = _random_kernel(rng, ["h0", "h1"])
    obs = [o for o in _random_obs(rng, 4) if likelihood(kernel, "h0", o) > 0]
    assert bayes_update(Dist.point("h0"), kernel, obs).dist == Dist.point("h0")


def test_kernel_with_decisions():
    S = ParamSpace([antichain("hk"), antichain("xy")])
    table = {
        ("h", "x"): Point(dp_full(P, P)),
        ("h", "y"): Point(dp_empty(P, P)),
        ("k", "x"): Point(dp_empty(P, P)),
        ("k", "y"): Point(dp_full(P, P)),
    }
    cell = ParamCell(P, P, S, "identity", table)
    obs = [Observation("0", "0", True, ("x",)), Observation("0", "0", False, ("y",))]
    assert bayes_update(_uniform([("h",), ("k",)]), cell, obs).dist == Dist.point(("h",))


# -- grid fits ---------------------------------------------------------------

F, R = chain(4), chain(6)
EMB = {r: Fraction(int(r)) for r in R.elements}


def _family(offsets):
    return {
        f"t{k}": MonotoneMap.from_function(F, R, lambda f, k=k: str(min(5, int(f) + k))) for k in offsets
    }


def test_exact_data_recovers_theta():
    fam = _family([0, 1, 2])
    data = [Observation(f, str(int(f) + 1)) for f in F.elements]
    res = grid_fit(fam, data, embedding=EMB)
    assert res.theta == "t1" and res.score == 0


def test_constrained_excludes_violators():
    fam = _family([0, 1, 2])
    data = [Observation("1", "2"), Observation("3", "4")]
    res = grid_fit(fam, data, "constrained", EMB, {"t0": 3, "t1": 0}, lam=1)
    assert res.theta == "t1"
    assert [row[2] is None for row in res.rows] == [False, False, True]
    assert grid_fit(fam, data, "constrained", EMB, {"t0": 0, "t1": 5}, lam=1).theta == "t0"


def test_constrained_no_feasible_theta():
    fam = _family([2, 3])
    with pytest.raises(NoFeasibleTheta):
        grid_fit(fam, [Observation("1", "1")], "constrained", EMB)


def test_fit_argument_errors():
    fam = _family([0])
    with pytest.raises(CodesignError):
        grid_fit(fam, [], embedding=EMB)
    with pytest.raises(CodesignError):
        grid_fit(fam, [Observation("0", "0", False)], embedding=EMB)
    with pytest.raises(CodesignError):
        grid_fit(fam, [Observation("0", "0")], "magic", EMB)


def test_noisy_fit_matches_exhaustive_oracle():
    rng = np.random.default_rng(2)
    offsets = [0, 1, 2, 3]
    fam = _family(offsets)
    for _ in range(20):
        k = int(rng.choice(offsets))
        data = [
            Observation(f, str(int(np.clip(int(f) + k + rng.integers(-1, 2), 0, 5))))
            for f in rng.choice(F.elements, size=5)
        ]
        losses = [
            sum((Fraction(min(5, int(o.f) + t)) - int(o.r)) ** 2 for o in data) for t in offsets
        ]
        best = min(range(len(offsets)), key=lambda i: (losses[i], i))
        res = grid_fit(fam, data, embedding=EMB)
        assert res.theta == f"t{offsets[best]}" and res.score == losses[best]
