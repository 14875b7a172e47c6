"""Learning parametrized design problems from feasibility observations.

``bayes_update`` conditions a prior over hypotheses on observed
(functionality, resource, outcome) records with exact rational arithmetic.
``grid_fit`` picks a threshold parameter from a finite grid, either by least
squares or under the constraint that every observation stays feasible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import CodesignError, MonadMismatch, NoFeasibleTheta, ZeroEvidence
from .monads import Dist, Point
from .param import ParamCell
from .poset import MonotoneMap, format_element


@dataclass(frozen=True)
class Observation:
    f: object
    r: object
    feasible: bool = True
    decision: tuple = ()


@dataclass(frozen=True)
class Posterior:
    dist: Dist
    evidence: Fraction


def _kernel_value(kernel, d, decision):
    key = tuple(d) + tuple(decision) if decision else d
    if isinstance(kernel, ParamCell):
        key = key if isinstance(key, tuple) else (key,)
        return kernel.table[key]
    return kernel[key]


def likelihood(kernel, d, obs: Observation) -> Fraction:
    """Probability under hypothesis ``d`` that the sampled design problem matches ``obs``."""
    v = _kernel_value(kernel, d, obs.decision)
    if isinstance(v, Point):
        v = Dist.point(v.value)
    if not isinstance(v, Dist):
        raise MonadMismatch("bayesian updating needs distribution-valued (or deterministic) kernels")
    p = v.prob(lambda phi: phi(obs.f, obs.r))
    return p if obs.feasible else 1 - p


def bayes_update(prior: Dist, kernel, observations) -> Posterior:
    """Posterior proportional to prior times the product of per-observation likelihoods."""
    weights = {}
    for d, w in prior.items():
        for obs in observations:
            if w == 0:
                break
            w *= likelihood(kernel, d, obs)
        weights[d] = w
    evidence = sum(weights.values(), Fraction(0))
    if evidence == 0:
        raise ZeroEvidence("the observations have zero probability under every hypothesis")
    return Posterior(Dist({d: w / evidence for d, w in weights.items()}), evidence)


@dataclass(frozen=True)
class FitResult:
    theta: object
    score: Fraction
    rows: tuple  # (theta, loss, score or None when the constraint fails)


def squared_loss(phi: MonotoneMap, data, embedding: Mapping) -> Fraction:
    return sum(
        ((Fraction(embedding[phi(o.f)]) - Fraction(embedding[o.r])) ** 2 for o in data),
        Fraction(0),
    )


def grid_fit(family: Mapping, data, mode: str = "least_squares", embedding=None, complexity=None, lam=0) -> FitResult:
    """Choose ``theta`` from a finite grid of threshold maps ``phi_theta: F -> R``.

    least_squares: minimise the squared gap between ``phi_theta(f_i)`` and
    ``r_i`` under ``embedding``. constrained: keep the thetas with
    ``phi_theta(f_i) <= r_i`` for all i and minimise loss + lam * complexity.
    Ties go to the first theta in grid order.
    """
    data = list(data)
    if not data:
        raise CodesignError("grid_fit needs at least one observation")
    if any(not o.feasible for o in data):
        raise CodesignError("grid_fit uses feasible observations only")
    if mode not in ("least_squares", "constrained"):
        raise CodesignError(f"unknown fit mode {mode!r}")
    if embedding is None:
        raise CodesignError("grid_fit needs a numeric embedding of resource elements")
    complexity = complexity or {}
    lam = Fraction(lam)
    rows = []
    best = None
    for theta, phi in family.items():
        loss = squared_loss(phi, data, embedding)
        if mode == "least_squares":
            score = loss
        elif all(phi.codomain.leq(phi(o.f), o.r) for o in data):
            score = loss + lam * Fraction(complexity.get(theta, 0))
        else:
            score = None
        rows.append((theta, loss, score))
        if score is not None and (best is None or score < best[1]):
            best = (theta, score)
    if best is None:
        raise NoFeasibleTheta("no parameter on the grid satisfies every observation")
    return FitResult(best[0], best[1], tuple(rows))


def describe_observation(o: Observation) -> str:
    tag = "feasible" if o.feasible else "infeasible"
    return f"({format_element(o.f)}, {format_element(o.r)}, {tag})"
