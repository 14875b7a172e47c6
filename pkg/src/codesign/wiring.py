"""Wiring expressions: series, parallel, feedback, lifts and reparametrizations.

An expression tree is typechecked against an environment of named cells,
posets, monotone maps and reparams, then evaluated to a single ``ParamCell``.
``Id`` and ``LiftMonotone`` leaves are monad-polymorphic; they take whatever
monad the rest of the expression fixes (identity if nothing does).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .dp import dp_identity, dp_lift_monotone, dp_trace
from .errors import CodesignError, LoopFactorMissing, MonadMismatch, ObjectMismatch, UnboundName
from .monads import IDENTITY, get_monad
from .param import (
    UNIT_SPACE,
    ParamCell,
    ParamSpace,
    Reparam as ReparamArrow,
    cell_compose,
    cell_lift,
    cell_map,
    cell_reparam,
    cell_tensor,
)
from .poset import FinitePoset, MonotoneMap, poset_product


@dataclass(frozen=True)
class Prim:
    name: str


@dataclass(frozen=True)
class Id:
    poset: object


@dataclass(frozen=True)
class Compose:
    first: object
    second: object


@dataclass(frozen=True)
class Tensor:
    left: object
    right: object


@dataclass(frozen=True)
class Loop:
    body: object
    poset: object


@dataclass(frozen=True)
class LiftMonotone:
    map: object


@dataclass(frozen=True)
class Reparam:
    reparam: object
    body: object


@dataclass(frozen=True)
class Typed:
    """A node annotated with its source, target, parameter space and monad (None if polymorphic)."""

    expr: object
    source: FinitePoset
    target: FinitePoset
    space: ParamSpace
    monad: object
    children: tuple = ()


def _fail(cls, path, msg):
    err = cls(f"at {path}: {msg}")
    err.path = path
    return err


def _lookup(env, ref, kind, path):
    if not isinstance(ref, str):
        if isinstance(ref, kind):
            return ref
        raise _fail(ObjectMismatch, path, f"expected a {kind.__name__}, got {type(ref).__name__}")
    try:
        obj = env[ref]
    except KeyError:
        raise _fail(UnboundName, path, f"unbound name {ref!r}") from None
    if not isinstance(obj, kind):
        raise _fail(ObjectMismatch, path, f"{ref!r} is a {type(obj).__name__}, not a {kind.__name__}")
    return obj


def _join_monads(a, b, path):
    if a is None:
        return b
    if b is None or a.name == b.name:
        return a
    raise _fail(MonadMismatch, path, f"cannot combine {a.name} and {b.name}")


def typecheck(env: Mapping, expr, path: str = "root") -> Typed:
    """Infer types bottom-up; the first error names the offending node path."""
    if isinstance(expr, Prim):
        c = _lookup(env, expr.name, ParamCell, path)
        return Typed(expr, c.source, c.target, c.space, c.monad)
    if isinstance(expr, Id):
        P = _lookup(env, expr.poset, FinitePoset, path)
        return Typed(expr, P, P, UNIT_SPACE, None)
    if isinstance(expr, LiftMonotone):
        g = _lookup(env, expr.map, MonotoneMap, path)
        return Typed(expr, g.domain, g.codomain, UNIT_SPACE, None)
    if isinstance(expr, Compose):
        a = typecheck(env, expr.first, path + ".compose[0]")
        b = typecheck(env, expr.second, path + ".compose[1]")
        if a.target != b.source:
            raise _fail(ObjectMismatch, path, "compose: target of the first part differs from source of the second")
        m = _join_monads(a.monad, b.monad, path)
        return Typed(expr, a.source, b.target, a.space.concat(b.space), m, (a, b))
    if isinstance(expr, Tensor):
        a = typecheck(env, expr.left, path + ".tensor[0]")
        b = typecheck(env, expr.right, path + ".tensor[1]")
        m = _join_monads(a.monad, b.monad, path)
        return Typed(
            expr,
            poset_product(a.source, b.source),
            poset_product(a.target, b.target),
            a.space.concat(b.space),
            m,
            (a, b),
        )
    if isinstance(expr, Loop):
        body = typecheck(env, expr.body, path + ".loop")
        P = _lookup(env, expr.poset, FinitePoset, path)
        for side, Q in (("source", body.source), ("target", body.target)):
            if Q.factors is None or len(Q.factors) != 2 or Q.factors[1] != P:
                raise _fail(LoopFactorMissing, path, f"loop: the looped poset is not the last factor of the {side}")
        return Typed(expr, body.source.factors[0], body.target.factors[0], body.space, body.monad, (body,))
    if isinstance(expr, Reparam):
        body = typecheck(env, expr.body, path + ".reparam")
        phi = _lookup(env, expr.reparam, ReparamArrow, path)
        if phi.to_space != body.space:
            raise _fail(ObjectMismatch, path, "reparam: target space differs from the parameter space of its body")
        m = _join_monads(body.monad, phi.monad, path)
        return Typed(expr, body.source, body.target, phi.from_space, m, (body,))
    raise _fail(CodesignError, path, f"unknown wiring node {expr!r}")


def evaluate(env: Mapping, expr, monad=None) -> ParamCell:
    """Evaluate to a single cell. Polymorphic leaves use ``monad`` or the inferred one."""
    typed = typecheck(env, expr)
    M = typed.monad
    if monad is not None:
        monad = get_monad(monad)
        M = _join_monads(M, monad, "root")
    return _eval(env, typed, M or IDENTITY)


def _eval(env, t: Typed, M) -> ParamCell:
    e = t.expr
    if isinstance(e, Prim):
        return env[e.name] if isinstance(e.name, str) else e.name
    if isinstance(e, Id):
        return cell_lift(dp_identity(t.source), M)
    if isinstance(e, LiftMonotone):
        g = env[e.map] if isinstance(e.map, str) else e.map
        return cell_lift(dp_lift_monotone(g), M)
    if isinstance(e, Compose):
        return cell_compose(_eval(env, t.children[0], M), _eval(env, t.children[1], M))
    if isinstance(e, Tensor):
        return cell_tensor(_eval(env, t.children[0], M), _eval(env, t.children[1], M))
    if isinstance(e, Loop):
        body = _eval(env, t.children[0], M)
        P = body.source.factors[1]
        return cell_map(body, lambda d: dp_trace(d, P), t.source, t.target)
    if isinstance(e, Reparam):
        phi = env[e.reparam] if isinstance(e.reparam, str) else e.reparam
        return cell_reparam(phi, _eval(env, t.children[0], M))
    raise CodesignError(f"unknown wiring node {e!r}")


_ARITY = {"prim": 1, "id": 1, "lift": 1, "compose": 2, "tensor": 2, "loop": 2, "reparam": 2}


def parse_wiring(data, path: str = "root"):
    """Nested-array form: ``["compose", e1, e2]``, ``["loop", e, "P"]``, ``["prim", "name"]``, ..."""
    if not isinstance(data, list) or not data or data[0] not in _ARITY:
        raise _fail(CodesignError, path, f"malformed wiring expression {data!r}")
    head, args = data[0], data[1:]
    if len(args) != _ARITY[head]:
        raise _fail(CodesignError, path, f"{head} takes {_ARITY[head]} arguments, got {len(args)}")
    if head == "prim":
        return Prim(args[0])
    if head == "id":
        return Id(args[0])
    if head == "lift":
        return LiftMonotone(args[0])
    if head == "compose":
        return Compose(parse_wiring(args[0], path + ".compose[0]"), parse_wiring(args[1], path + ".compose[1]"))
    if head == "tensor":
        return Tensor(parse_wiring(args[0], path + ".tensor[0]"), parse_wiring(args[1], path + ".tensor[1]"))
    if head == "loop":
        return Loop(parse_wiring(args[0], path + ".loop"), args[1])
    return Reparam(args[0], parse_wiring(args[1], path + ".reparam"))
