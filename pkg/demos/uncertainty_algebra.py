"""Small tour of the uncertainty monads acting on design problems."""

from fractions import Fraction

from codesign import (
    DIST,
    INTERVAL,
    Dist,
    ParamCell,
    ParamSpace,
    cell_compose,
    cell_tensor,
    chain,
    check_2cell,
    tensorator,
)
from codesign.dp import DesignProblem, dp_identity, dp_leq
from codesign.laws import check_monad_laws, twarr_counterexample

P = chain(3)
shift = DesignProblem.from_predicate(P, P, lambda f, r: int(r) >= min(2, int(f) + 1))
ident = dp_identity(P)

# shift needs more resource than the identity, so it is the pessimistic end
c = ParamCell(P, P, ParamSpace(), INTERVAL, {(): INTERVAL.make(shift, ident, dp_leq)})
cc = cell_compose(c, c)
print("interval composite feasible pairs (lo):", sorted(cc(()).lo.feasible_pairs()))

# a fair coin between the two, composed with itself
coin = Dist({ident: Fraction(1, 2), shift: Fraction(1, 2)})
d = ParamCell(P, P, ParamSpace([chain(2)]), DIST, {("0",): coin, ("1",): Dist.point(shift)})
dd = cell_compose(d, d)
for u, v in dd.table.items():
    print("dist composite at", u, "->", len(v.support()), "outcomes")

# interchange needs the parameter permutation
first = cell_compose(cell_tensor(d, d), cell_tensor(d, d))
second = cell_tensor(cell_compose(d, d), cell_compose(d, d))
print("interchange as raw equality:", first == second)
print("interchange after reparametrization:", check_2cell(tensorator(d, d, d, d), first, second))

print()
print(check_monad_laws("full_powerset", max_size=2).format())
print()
print(twarr_counterexample().explain())
