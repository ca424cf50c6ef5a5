"""Tupled abstract machine for the source calculus.

States carry a focus and a control stack. The focus is either an
unevaluated term paired with an environment, or a machine value
(a closure over an abstraction, or a tuple of machine values).
Environments are tuples of (Var, value) bindings, innermost first, so
lookup is a linear scan and shadowing is positional.

The stack entry kinds mirror the four evaluation contexts: a function
waiting for its evaluated argument, an already-evaluated argument
waiting for its function, a pending projection, and a partially
evaluated tuple. Tuples evaluate right to left, so a partial tuple
keeps the not-yet-visited prefix (with its environment) and the
already-evaluated suffix in original order.

Environment copies are counted at the three transitions that
duplicate an environment into a new stack entry (function push, tuple
open, tuple continue); beta extends an environment instead and is
charged only for the fresh bindings.
"""

from __future__ import annotations

from dataclasses import dataclass

from .calculi import DEFAULT_FUEL, ClashKind
from .machine_common import Cost, MachineFinal, MachineInvariantError, RunRecord, Transition, run_loop
from .terms import Abs, App, Proj, SourceTerm, Tuple, Var, free_vars, shared_size_source

Env = tuple  # of (Var, value) pairs, innermost binding first


@dataclass(frozen=True, slots=True)
class SClos:
    abs: Abs
    env: Env


@dataclass(frozen=True, slots=True)
class STup:
    items: tuple


SValue = SClos | STup


@dataclass(frozen=True, slots=True)
class Unev:
    term: SourceTerm
    env: Env


@dataclass(frozen=True, slots=True)
class PendingFn:
    term: SourceTerm
    env: Env


@dataclass(frozen=True, slots=True)
class ArgVal:
    value: SValue


@dataclass(frozen=True, slots=True)
class ProjFrame:
    index: int


@dataclass(frozen=True, slots=True)
class PartialTuple:
    pending: tuple  # source terms still to evaluate, original order
    env: Env
    done: tuple  # evaluated items, original order


@dataclass(frozen=True, slots=True)
class SState:
    focus: object  # Unev or SValue
    stack: tuple


def init_stam(t: SourceTerm) -> SState:
    free = free_vars(t)
    if free:
        raise ValueError(f"term is not closed, free: {', '.join(v.name for v in free)}")
    return SState(Unev(t, ()), ())


def step_stam(s: SState) -> Transition | MachineFinal:
    f = s.focus
    if isinstance(f, Unev):
        t, env = f.term, f.env
        match t:
            case App(fn=fn, arg=arg):
                entry = PendingFn(fn, env)
                return Transition(
                    "usea1",
                    SState(Unev(arg, env), s.stack + (entry,)),
                    Cost(1 + len(env), env_copy=len(env)),
                )
            case Proj(index=i, arg=arg):
                return Transition(
                    "usea2", SState(Unev(arg, env), s.stack + (ProjFrame(i),)), Cost(1)
                )
            case Tuple(items=items) if items:
                entry = PartialTuple(items[:-1], env, ())
                return Transition(
                    "usea3",
                    SState(Unev(items[-1], env), s.stack + (entry,)),
                    Cost(1 + len(env) + len(items), env_copy=len(env)),
                )
            case Tuple(items=()):
                # The environment is dropped: an empty tuple is already a value.
                return Transition("usea4", SState(STup(()), s.stack), Cost(1))
            case Abs():
                return Transition("usea5", SState(SClos(t, env), s.stack), Cost(1))
            case Var(name=name):
                for pos, (var, val) in enumerate(env, start=1):
                    if var.name == name:
                        return Transition(
                            "usub",
                            SState(val, s.stack),
                            Cost(1 + pos, lookup=pos, subv_lookup=pos),
                        )
                raise MachineInvariantError(f"unbound variable {name}")
        raise MachineInvariantError(f"not a source term in focus: {t!r}")

    if not s.stack:
        return MachineFinal("successful")
    head = s.stack[-1]
    rest = s.stack[:-1]
    match head:
        case PendingFn(term=t, env=env):
            return Transition(
                "esea1", SState(Unev(t, env), rest + (ArgVal(f),)), Cost(1)
            )
        case PartialTuple(pending=pending, env=env, done=done):
            if pending:
                entry = PartialTuple(pending[:-1], env, (f,) + done)
                return Transition(
                    "esea6",
                    SState(Unev(pending[-1], env), rest + (entry,)),
                    Cost(1 + len(env), env_copy=len(env)),
                )
            items = (f,) + done
            return Transition("esea3", SState(STup(items), rest), Cost(1 + len(items)))
        case ProjFrame(index=i):
            if isinstance(f, STup) and 1 <= i <= len(f.items):
                return Transition("epi", SState(f.items[i - 1], rest), Cost(1))
            return MachineFinal("clash", ClashKind.PROJECTION)
        case ArgVal(value=v):
            if isinstance(f, STup):
                return MachineFinal("clash", ClashKind.TUPLE)
            if isinstance(f, SClos):
                params = f.abs.params
                if isinstance(v, STup) and len(v.items) == len(params):
                    new_env = tuple(zip(params, v.items)) + f.env
                    return Transition(
                        "ebeta",
                        SState(Unev(f.abs.body, new_env), rest),
                        Cost(1 + len(params)),
                    )
                return MachineFinal("clash", ClashKind.ABS_OR_CLOSURE)
    raise MachineInvariantError(f"unrecognized stack entry: {head!r}")


def readback_value(v: SValue, memo: dict | None = None) -> SourceTerm:
    if memo is None:
        memo = {}
    key = id(v)
    hit = memo.get(key)
    if hit is not None:
        return hit
    match v:
        case SClos(abs=ab, env=env):
            out = _env_subst(ab, env, memo)
        case STup(items=items):
            out = Tuple(tuple(readback_value(i, memo) for i in items))
        case _:
            raise MachineInvariantError(f"not a machine value: {v!r}")
    memo[key] = out
    return out


def _env_subst(t: SourceTerm, env: Env, memo: dict) -> SourceTerm:
    """Resolve env bindings inside t, innermost binding first.

    Values in environments are closed once read back, so a single
    shadow-aware pass agrees with applying the bindings one at a time.
    """

    def walk(t: SourceTerm, shadow: frozenset) -> SourceTerm:
        match t:
            case Var(name=name):
                if name in shadow:
                    return t
                for var, val in env:
                    if var.name == name:
                        return readback_value(val, memo)
                return t
            case Abs(params=params, body=body):
                inner = shadow | {p.name for p in params}
                return Abs(params, walk(body, inner))
            case App(fn=fn, arg=arg):
                return App(walk(fn, shadow), walk(arg, shadow))
            case Proj(index=i, arg=arg):
                return Proj(i, walk(arg, shadow))
            case Tuple(items=items):
                return Tuple(tuple(walk(i, shadow) for i in items))
        raise MachineInvariantError(f"not a source term: {t!r}")

    if not env:
        return t
    return walk(t, frozenset())


def readback_stam(s: SState) -> SourceTerm:
    memo: dict = {}
    f = s.focus
    if isinstance(f, Unev):
        term = _env_subst(f.term, f.env, memo)
    else:
        term = readback_value(f, memo)
    for entry in reversed(s.stack):
        match entry:
            case PendingFn(term=t, env=env):
                term = App(_env_subst(t, env, memo), term)
            case ArgVal(value=v):
                term = App(term, readback_value(v, memo))
            case ProjFrame(index=i):
                term = Proj(i, term)
            case PartialTuple(pending=pending, env=env, done=done):
                items = (
                    tuple(_env_subst(p, env, memo) for p in pending)
                    + (term,)
                    + tuple(readback_value(d, memo) for d in done)
                )
                term = Tuple(items)
            case _:
                raise MachineInvariantError(f"unrecognized stack entry: {entry!r}")
    return term


def measure_stam(s: SState) -> int:
    """Overhead measure: total size of unevaluated source material."""
    total = 0
    f = s.focus
    if isinstance(f, Unev):
        total += shared_size_source(f.term)
    for entry in s.stack:
        match entry:
            case PendingFn(term=t):
                total += shared_size_source(t)
            case PartialTuple(pending=pending):
                total += len(pending)
                total += sum(shared_size_source(p) for p in pending)
            case _:
                pass
    return total


def run_stam(t: SourceTerm, fuel: int = DEFAULT_FUEL, record_measure: bool = False) -> RunRecord:
    return run_loop(step_stam, measure_stam, init_stam(t), fuel, record_measure)
