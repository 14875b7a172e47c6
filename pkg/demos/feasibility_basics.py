"""Plain design problems: posets, series/parallel composition, feedback, Pareto queries."""

from codesign import chain, dp_compose, dp_tensor, dp_threshold, dp_trace, fix_fun_min_res, poset_product
from codesign.dp import dp_identity, snake_left
from codesign.param import cell_lift
from codesign.poset import antichain, upper_sets
from codesign.wiring import Compose, Prim, evaluate

speed, power, cost = chain(3), chain(4), chain(5)

# motor: speed s needs power >= s + 1 (top speed needs the top level)
motor = dp_threshold(speed, power, {"0": "1", "1": "2", "2": "3"})
# supply: power p costs at least p, power 3 is only reachable at cost 4
supply = dp_threshold(power, cost, {"0": "0", "1": "1", "2": "2", "3": "4"})

series = dp_compose(motor, supply)
for s in speed.elements:
    print(f"speed {s}: minimal cost {sorted(fix_fun_min_res(series, s).members)}")

# two motors side by side need a pair of power levels
pair = dp_tensor(motor, motor)
front = fix_fun_min_res(pair, ("1", "2"))
print("two motors at speeds (1, 2):", sorted(front.members))

# a two-resource front: power levels against an antichain of suppliers
vendors = antichain(["north", "south"])
R = poset_product(power, vendors)
mix = dp_threshold(speed, R, {"0": ("1", "north"), "1": ("2", "north"), "2": None})
print("speed 2 with one vendor:", sorted(fix_fun_min_res(mix, "2").members) or "infeasible")

# feedback: closing an identity loop on the second factor leaves the first
loop = dp_trace(dp_identity(poset_product(speed, power)), power)
print("trace of the identity is the identity:", loop == dp_identity(speed))
print("snake equation on the power chain:", snake_left(power) == dp_identity(power))
print("upper sets of the speed chain:", len(upper_sets(speed)))

# the same series system written as a wiring expression over lifted cells
env = {"motor": cell_lift(motor), "supply": cell_lift(supply)}
cell = evaluate(env, Compose(Prim("motor"), Prim("supply")))
print("wiring matches direct composition:", cell.table[()].value == series)
