"""Random parametrized cells for tests."""

from fractions import Fraction

from codesign.dp import DesignProblem, dp_leq
from codesign.generators import random_dp
from codesign.monads import Dist, get_monad
from codesign.param import ParamCell, ParamSpace


def random_value(rng, M, F, R, density=0.3):
    M = get_monad(M)
    d = random_dp(rng, F, R, density)
    if M.name == "identity":
        return M.unit(d)
    if M.name == "interval":
        hi = DesignProblem(F, R, d.table | random_dp(rng, F, R, density).table)
        return M.make(d, hi, dp_leq)
    if M.name == "powerset":
        return M.make([d, random_dp(rng, F, R, density)][: int(rng.integers(1, 3))])
    e = random_dp(rng, F, R, density)
    w = Fraction(int(rng.integers(1, 4)), 4)
    return Dist([(d, w), (e, 1 - w)])


def random_cell(rng, M, F, R, factors, density=0.3):
    space = ParamSpace(factors)
    table = {u: random_value(rng, M, F, R, density) for u in space.carrier}
    return ParamCell(F, R, space, M, table)
