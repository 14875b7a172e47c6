"""Loading co-design models from JSON files.

A model file is one JSON object with optional sections

    posets, maps, design_problems, cells, reparams, wiring,
    costs, priors, observations, bayes, fits

Objects refer to each other by name. Everything is validated on load; all
problems found are collected and raised together as a ``ModelError``.
Elements of product posets are written ``"(a,b)"`` (optionally ``"(v=a,l=b)"``)
or as JSON lists.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .dp import DesignProblem, dp_compose, dp_identity, dp_lift_monotone, dp_threshold
from .errors import CodesignError, ModelError, UnboundName
from .learning import Observation
from .monads import Dist, get_monad
from .param import ParamCell, ParamSpace, Reparam
from .poset import (
    FinitePoset,
    MonotoneMap,
    antichain,
    chain,
    format_element,
    poset_opposite,
    poset_product,
)
from .queries import CostMap
from .wiring import evaluate, parse_wiring, typecheck

SECTIONS = (
    "posets",
    "maps",
    "design_problems",
    "cells",
    "reparams",
    "wiring",
    "costs",
    "priors",
    "observations",
    "bayes",
    "fits",
)


# -- small parsers ---------------------------------------------------------


def parse_rational(x) -> Fraction:
    if isinstance(x, bool):
        raise CodesignError(f"not a rational: {x!r}")
    if isinstance(x, dict) and set(x) == {"num", "den"}:
        return Fraction(int(x["num"]), int(x["den"]))
    if isinstance(x, float):
        return Fraction(str(x))
    if isinstance(x, (int, str)):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError):
            pass
    raise CodesignError(f"not a rational: {x!r}")


def _parse_text(text: str):
    pos = 0

    def item():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos < len(text) and text[pos] == "(":
            pos += 1
            parts = []
            while True:
                while pos < len(text) and text[pos].isspace():
                    pos += 1
                if pos < len(text) and text[pos] == ")" and not parts:
                    pos += 1
                    return ()
                parts.append(item())
                while pos < len(text) and text[pos].isspace():
                    pos += 1
                if pos >= len(text):
                    raise CodesignError(f"unbalanced parentheses in {text!r}")
                if text[pos] == ",":
                    pos += 1
                elif text[pos] == ")":
                    pos += 1
                    return tuple(parts)
                else:
                    raise CodesignError(f"unexpected {text[pos]!r} in {text!r}")
        start = pos
        while pos < len(text) and text[pos] not in ",()":
            pos += 1
        atom = text[start:pos].strip()
        if "=" in atom:
            atom = atom.split("=", 1)[1].strip()
        if not atom:
            raise CodesignError(f"empty element in {text!r}")
        return atom

    out = item()
    if text[pos:].strip():
        raise CodesignError(f"trailing text in element {text!r}")
    return out


def parse_element(x):
    """``"(a,(b,c))"`` / ``["a", ["b", "c"]]`` / ``"a"`` -> label or nested tuple."""
    if isinstance(x, list):
        return tuple(parse_element(y) for y in x)
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return str(x)
    if isinstance(x, str):
        return _parse_text(x)
    raise CodesignError(f"cannot read element {x!r}")


def element_in(P: FinitePoset, x):
    e = parse_element(x)
    P.index(e)
    return e


def param_key(space: ParamSpace, x):
    """Parameter tuples may be written without parentheses for one-factor spaces."""
    e = parse_element(x)
    carrier = set(space.carrier)
    if len(space.factors) == 1 and (e,) in carrier:
        e = (e,)
    if e not in carrier:
        raise CodesignError(f"{x!r} is not a parameter of the space")
    return e


# -- the model -------------------------------------------------------------


@dataclass
class Model:
    posets: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)  # poset name -> element -> Fraction
    maps: dict = field(default_factory=dict)
    map_targets: dict = field(default_factory=dict)
    design_problems: dict = field(default_factory=dict)
    cells: dict = field(default_factory=dict)
    reparams: dict = field(default_factory=dict)
    wiring: dict = field(default_factory=dict)
    costs: dict = field(default_factory=dict)
    priors: dict = field(default_factory=dict)
    observations: dict = field(default_factory=dict)
    bayes: dict = field(default_factory=dict)
    fits: dict = field(default_factory=dict)

    def env(self) -> dict:
        out = {}
        out.update(self.posets)
        out.update(self.maps)
        out.update(self.cells)
        out.update(self.reparams)
        return out

    def cell(self, name) -> ParamCell:
        """A declared cell, or the evaluation of a wiring expression."""
        if name in self.cells:
            return self.cells[name]
        if name in self.wiring:
            return evaluate(self.env(), self.wiring[name])
        raise UnboundName(f"no cell or wiring named {name!r}")

    def summary(self) -> list:
        return [(s, len(getattr(self, s))) for s in SECTIONS]


class _Loader:
    def __init__(self, data):
        self.data = data
        self.model = Model()
        self.problems = []
        self._resolving = set()

    def problem(self, where, err):
        self.problems.append(f"{where}: {err}")

    def section(self, name):
        sec = self.data.get(name, {})
        if name == "observations" and isinstance(sec, dict):
            return sec
        if not isinstance(sec, dict):
            self.problem(name, "section must be a JSON object")
            return {}
        return sec

    def run(self) -> Model:
        unknown = sorted(set(self.data) - set(SECTIONS) - {"version", "description"})
        for k in unknown:
            self.problem(k, "unknown section")
        for name in self.section("posets"):
            try:
                self.poset_ref(name)
            except CodesignError:
                pass  # already recorded
        steps = (
            ("maps", self.load_map),
            ("design_problems", self.load_dp),
            ("cells", self.load_cell),
            ("reparams", self.load_reparam),
            ("wiring", self.load_wiring),
            ("costs", self.load_cost),
            ("priors", self.load_prior),
            ("observations", self.load_observations),
            ("bayes", self.load_bayes),
            ("fits", self.load_fit),
        )
        for sec, fn in steps:
            for name, spec in self.section(sec).items():
                try:
                    fn(name, spec)
                except (CodesignError, KeyError, TypeError, ValueError) as e:
                    self.problem(f"{sec}.{name}", _describe(e))
        self.check_collisions()
        if self.problems:
            raise ModelError(f"model has {len(self.problems)} problem(s)", self.problems)
        return self.model

    def check_collisions(self):
        seen = {}
        for sec in ("posets", "maps", "cells", "reparams"):
            for name in getattr(self.model, sec):
                if name in seen:
                    self.problem(f"{sec}.{name}", f"name already used in {seen[name]}")
                seen[name] = sec

    # -- posets
    def poset_ref(self, ref) -> FinitePoset:
        if isinstance(ref, dict):
            return self.build_poset(None, ref)
        if ref in self.model.posets:
            return self.model.posets[ref]
        specs = self.section("posets")
        if ref not in specs:
            raise UnboundName(f"unknown poset {ref!r}")
        if ref in self._resolving:
            raise CodesignError(f"poset {ref!r} is defined in terms of itself")
        self._resolving.add(ref)
        try:
            P = self.build_poset(ref, specs[ref])
        except UnboundName as e:
            if str(e) != f"unknown poset {ref!r}":
                self.problem(f"posets.{ref}", _describe(e))
            raise UnboundName(f"poset {ref!r} failed to load") from None
        except (CodesignError, KeyError, TypeError, ValueError) as e:
            self.problem(f"posets.{ref}", _describe(e))
            raise UnboundName(f"poset {ref!r} failed to load") from None
        finally:
            self._resolving.discard(ref)
        self.model.posets[ref] = P
        return P

    def build_poset(self, name, spec) -> FinitePoset:
        if "chain" in spec:
            n = spec["chain"]
            labels = spec.get("labels")
            P = chain(n, labels) if labels else chain(n)
        elif "antichain" in spec:
            P = antichain(spec["antichain"])
        elif "product" in spec:
            a, b = spec["product"]
            P = poset_product(self.poset_ref(a), self.poset_ref(b))
        elif "opposite" in spec:
            P = poset_opposite(self.poset_ref(spec["opposite"]))
        elif "elements" in spec:
            P = FinitePoset.from_pairs(spec["elements"], [tuple(p) for p in spec.get("leq_pairs", [])])
        else:
            raise CodesignError("a poset needs chain, antichain, product, opposite or elements")
        if "values" in spec and name is not None:
            vals = [parse_rational(v) for v in spec["values"]]
            if len(vals) != len(P):
                raise CodesignError("values must list one number per element")
            emb = dict(zip(P.elements, vals))
            for a, b in P.pairs():
                if emb[a] > emb[b]:
                    raise CodesignError(
                        f"values are not monotone: {format_element(a)} <= {format_element(b)}"
                    )
            self.model.values[name] = emb
        return P

    def values_of(self, name):
        if not name:
            raise CodesignError("numeric values need a map with a declared target poset")
        if name not in self.model.values:
            P = self.poset_ref(name)
            if P.factors is not None or not all(isinstance(x, str) for x in P.elements):
                raise CodesignError(f"poset {name!r} has no numeric values")
            try:
                return {x: Fraction(x) for x in P.elements}
            except ValueError:
                raise CodesignError(f"poset {name!r} has no numeric values") from None
        return self.model.values[name]

    # -- maps
    def load_map(self, name, spec):
        if "saturating_sum" in spec:
            a, b = spec["saturating_sum"]
            A, B, C = self.poset_ref(a), self.poset_ref(b), self.poset_ref(spec["to"])
            for P in (A, B, C):
                if P.factors is not None or len(P.pairs()) != len(P) * (len(P) + 1) // 2:
                    raise CodesignError("saturating_sum needs chains")
            top = len(C) - 1
            g = MonotoneMap.from_function(
                poset_product(A, B),
                C,
                lambda p: C.elements[min(top, A.index(p[0]) + B.index(p[1]))],
            )
            target = spec["to"]
        elif "associator" in spec:
            from .dp import map_associator

            g = map_associator(*(self.poset_ref(r) for r in spec["associator"]))
            target = None
        elif "swap" in spec:
            from .dp import map_swap

            g = map_swap(*(self.poset_ref(r) for r in spec["swap"]))
            target = None
        elif "table" in spec:
            A, B = self.poset_ref(spec["from"]), self.poset_ref(spec["to"])
            table = {element_in(A, k): element_in(B, v) for k, v in spec["table"].items()}
            g = MonotoneMap(A, B, table)
            target = spec["to"]
        else:
            raise CodesignError("a map needs saturating_sum, associator, swap or table")
        self.model.maps[name] = g
        self.model.map_targets[name] = target

    # -- design problems
    def dp_ref(self, ref, F=None, R=None) -> DesignProblem:
        if isinstance(ref, str):
            if ref not in self.model.design_problems:
                spec = self.section("design_problems").get(ref)
                if spec is None:
                    raise UnboundName(f"unknown design problem {ref!r}")
                self.load_dp(ref, spec)
            d = self.model.design_problems[ref]
        else:
            d = self.build_dp(ref)
        if F is not None and (d.fun != F or d.res != R):
            raise CodesignError("design problem has the wrong functionality/resource posets")
        return d

    def build_dp(self, spec) -> DesignProblem:
        if "identity" in spec:
            return dp_identity(self.poset_ref(spec["identity"]))
        if "lift" in spec:
            return dp_lift_monotone(self.map_ref(spec["lift"]))
        if "compose" in spec:
            out = self.dp_ref(spec["compose"][0])
            for r in spec["compose"][1:]:
                out = dp_compose(out, self.dp_ref(r))
            return out
        F, R = self.poset_ref(spec["fun"]), self.poset_ref(spec["res"])
        if "feasible" in spec:
            pairs = [(element_in(F, f), element_in(R, r)) for f, r in spec["feasible"]]
            return DesignProblem.from_pairs(F, R, pairs)
        if "threshold" in spec:
            th = spec["threshold"]
            table = {}
            for k, v in th.items():
                table[element_in(F, k)] = None if v is None else element_in(R, v)
            missing = [f for f in F.elements if f not in table]
            if missing:
                raise CodesignError(f"threshold undefined at {format_element(missing[0])}")
            return dp_threshold(F, R, table)
        if "threshold_map" in spec:
            # d(f, r) = value(g(f)) <= value(r) on declared numeric values
            name = spec["threshold_map"]
            g = self.map_ref(name)
            if g.domain != F:
                raise CodesignError("threshold map has the wrong domain")
            src = self.values_of(self.model.map_targets.get(name) or "")
            dst = self.values_of(spec["res"])
            offset = parse_rational(spec.get("offset", 0))
            return DesignProblem.from_predicate(F, R, lambda f, r: src[g(f)] + offset <= dst[r])
        raise CodesignError("a design problem needs feasible, threshold, threshold_map, identity, lift or compose")

    def load_dp(self, name, spec):
        if name in self.model.design_problems:
            return
        self.model.design_problems[name] = self.build_dp(spec)

    def map_ref(self, ref) -> MonotoneMap:
        if ref not in self.model.maps:
            spec = self.section("maps").get(ref)
            if spec is None:
                raise UnboundName(f"unknown map {ref!r}")
            self.load_map(ref, spec)
        return self.model.maps[ref]

    # -- cells and reparams
    def space(self, refs) -> ParamSpace:
        return ParamSpace(self.poset_ref(r) for r in refs)

    def uncertain_dp(self, M, v, F, R):
        if M.name == "identity":
            return M.unit(self.dp_ref(v, F, R))
        if M.name == "powerset":
            return M.make(self.dp_ref(x, F, R) for x in v)
        if M.name == "interval":
            lo, hi = self.dp_ref(v["lo"], F, R), self.dp_ref(v["hi"], F, R)
            return M.make(lo, hi, None)
        return Dist([(self.dp_ref(x, F, R), parse_rational(w)) for x, w in v])

    def load_cell(self, name, spec):
        F, R = self.poset_ref(spec["source"]), self.poset_ref(spec["target"])
        M = get_monad(spec["monad"])
        space = self.space(spec.get("space", []))
        table = {}
        for k, v in spec["entries"].items():
            table[param_key(space, k)] = self.uncertain_dp(M, v, F, R)
        missing = [u for u in space.carrier if u not in table]
        if missing:
            raise CodesignError(f"no entry for parameter {format_element(missing[0])}")
        self.model.cells[name] = ParamCell(F, R, space, M, table)

    def load_reparam(self, name, spec):
        M = get_monad(spec["monad"])
        src, dst = self.space(spec["from"]), self.space(spec["to"])
        table = {}
        for k, v in spec["table"].items():
            u = param_key(src, k)
            if M.name == "identity":
                table[u] = M.unit(param_key(dst, v))
            elif M.name == "powerset":
                table[u] = M.make(param_key(dst, x) for x in v)
            elif M.name == "interval":
                table[u] = M.make(param_key(dst, v["lo"]), param_key(dst, v["hi"]), dst.leq)
            else:
                table[u] = Dist([(param_key(dst, x), parse_rational(w)) for x, w in v])
        missing = [u for u in src.carrier if u not in table]
        if missing:
            raise CodesignError(f"no entry for parameter {format_element(missing[0])}")
        self.model.reparams[name] = Reparam(src, dst, M, table)

    def load_wiring(self, name, spec):
        expr = parse_wiring(spec)
        typecheck(self.model.env(), expr)
        self.model.wiring[name] = expr

    # -- decisions and learning
    def load_cost(self, name, spec):
        P = self.poset_ref(spec["poset"])
        if "table" in spec:
            vals = {element_in(P, k): parse_rational(v) for k, v in spec["table"].items()}
        else:
            vals = self.values_of(spec["poset"])
        self.model.costs[name] = CostMap(P, vals)

    def load_prior(self, name, spec):
        space = self.space(spec["space"])
        if spec.get("uniform"):
            self.model.priors[name] = (space, Dist.uniform(space.carrier))
            return
        weights = [(param_key(space, k), parse_rational(w)) for k, w in spec["weights"].items()]
        self.model.priors[name] = (space, Dist(weights))

    def load_observations(self, name, rows):
        self.model.observations[name] = rows  # checked against posets where used

    def load_bayes(self, name, spec):
        kernel = self.model.cells.get(spec["kernel"])
        if kernel is None:
            raise UnboundName(f"unknown cell {spec['kernel']!r}")
        if kernel.monad.name not in ("dist", "identity"):
            raise CodesignError("a bayes kernel must be a dist or identity cell")
        if spec["prior"] not in self.model.priors:
            raise UnboundName(f"unknown prior {spec['prior']!r}")
        rows = self.obs_rows(spec.get("observations", []))
        obs = read_observations(kernel.source, kernel.target, rows)
        self.model.bayes[name] = {"kernel": spec["kernel"], "prior": spec["prior"], "observations": obs}

    def obs_rows(self, ref):
        if isinstance(ref, str):
            if ref not in self.model.observations:
                raise UnboundName(f"unknown observation list {ref!r}")
            return self.model.observations[ref]
        return ref

    def load_fit(self, name, spec):
        family = {}
        target = None
        for theta, mname in spec["family"].items():
            g = self.map_ref(mname)
            family[theta] = g
            t = self.model.map_targets.get(mname)
            if target is None:
                target = t
            elif t != target:
                raise CodesignError("all maps of a fit family must share a declared target poset")
        if not family:
            raise CodesignError("empty fit family")
        first = next(iter(family.values()))
        for g in family.values():
            if g.domain != first.domain or g.codomain != first.codomain:
                raise CodesignError("all maps of a fit family must share domain and codomain")
        emb = self.values_of(target or "")
        rows = self.obs_rows(spec.get("observations", []))
        obs = read_observations(first.domain, first.codomain, rows)
        complexity = {k: parse_rational(v) for k, v in spec.get("complexity", {}).items()}
        unknown = set(complexity) - set(family)
        if unknown:
            raise CodesignError(f"complexity given for unknown theta {sorted(unknown)[0]!r}")
        self.model.fits[name] = {
            "family": family,
            "embedding": emb,
            "complexity": complexity,
            "observations": obs,
            "mode": spec.get("mode", "least_squares"),
            "lam": parse_rational(spec.get("lam", 0)),
        }


def read_observations(F: FinitePoset, R: FinitePoset, rows) -> list:
    """Rows ``[f, r, outcome]`` or objects ``{f, r, outcome, decision?}``."""
    out = []
    for row in rows:
        if isinstance(row, dict):
            f, r, outcome = row["f"], row["r"], row.get("outcome", "feasible")
            decision = tuple(parse_element(x) for x in row.get("decision", []))
        else:
            f, r, outcome = row[0], row[1], row[2] if len(row) > 2 else "feasible"
            decision = ()
        if outcome not in ("feasible", "infeasible"):
            raise CodesignError(f"outcome must be feasible or infeasible, got {outcome!r}")
        out.append(Observation(element_in(F, f), element_in(R, r), outcome == "feasible", decision))
    return out


def _describe(e) -> str:
    if isinstance(e, KeyError):
        return f"missing field {e.args[0]!r}"
    if isinstance(e, CodesignError):
        return f"{type(e).__name__}: {e}"
    return str(e)


def load_model_data(data) -> Model:
    if not isinstance(data, dict):
        raise ModelError("a model file must contain a JSON object", ["top level is not an object"])
    return _Loader(data).run()


def fixture_path(name: str = "ev.json") -> Path:
    """Path of a model file shipped with the package."""
    return Path(__file__).parent / "data" / name


def load_model(path) -> Model:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelError(
            f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}",
            [f"line {e.lineno}, column {e.colno}: {e.msg}"],
        ) from None
    return load_model_data(data)
