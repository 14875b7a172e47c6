"""Walk through the electric-vehicle fixture: query, decide, learn.

Run with ``python3 demos/ev_queries.py``.
"""

from codesign.learning import bayes_update, grid_fit
from codesign.model import fixture_path, load_model
from codesign.poset import format_element
from codesign.queries import decide, query_cell

model = load_model(fixture_path("ev.json"))
f = ("1", "2")  # velocity level 1, payload level 2

print("minimal cost level per (chassis, battery) parameter")
for u, res in query_cell(model.cell("ev"), f).items():
    level = ", ".join(res.antichain.sorted()) or "infeasible"
    print(f"  {format_element(u):10s} {level}")

print("\ninterval cells: pessimistic vs optimistic")
for u, res in query_cell(model.cell("ev_interval"), f).items():
    lo = ", ".join(res.pessimistic.sorted()) or "-"
    hi = ", ".join(res.optimistic.sorted()) or "-"
    print(f"  {format_element(u):10s} worst {lo:3s} best {hi}")

for wiring, objective in (("ev_interval", "worst_case"), ("ev_powerset", "optimistic")):
    rep = decide(model.cell(wiring), f, objective, model.costs["price"])
    print(f"\n{objective} on {wiring}: pick {format_element(rep.chosen)} at cost {rep.chosen_value}")

# with a finite penalty, parameters that are sometimes infeasible still get a score
rep = decide(model.cell("ev_dist"), f, "expected", model.costs["price"], infeasible_penalty=10)
for row in rep.rows:
    print(f"  expected cost {format_element(row.param):10s} {row.value}")
print(f"expected: pick {format_element(rep.chosen)} at {rep.chosen_value}")

spec = model.bayes["chassis"]
space, prior = model.priors[spec["prior"]]
post = bayes_update(prior, model.cells[spec["kernel"]], spec["observations"])
print("\nposterior over chassis parameter after the bench runs")
for u in space.carrier:
    print(f"  {format_element(u):4s} prior {prior[u]}  posterior {post.dist[u]}")

fit = model.fits["chassis_fit"]
res = grid_fit(fit["family"], fit["observations"], "least_squares", fit["embedding"])
print(f"\nleast-squares threshold fit: {res.theta} (loss {res.score})")
