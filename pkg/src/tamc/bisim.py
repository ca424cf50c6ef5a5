"""Six-way differential checker.

For one closed source term u, six executions exist: the three
interpreters on u, wrap(u), closure_convert(u), and the three
machines on the same inputs. bisim_check runs all of them and checks

  (a) the three interpreter label sequences are identical;
  (b) each machine implements its own calculus: overhead transitions
      keep the readback fixed, principal transitions advance it by
      exactly one interpreter step with the same label;
  (c) the reverse translations commute stepwise: unwrap of the k-th
      intermediate reduct is the k-th source reduct, naming of the
      k-th target reduct is alpha-equal to the k-th intermediate one;
  (d) all terminal classifications agree (value versus clash, and the
      clash kind).

unwrap commutation is checked with plain equality: the intermediate
reduction uses the same names as the source one, so nothing weaker is
needed. naming mints fresh names, hence the alpha comparison there.

Fuel counts calculus steps for interpreters and transitions for
machines, so machines get a generous multiple; if an interpreter run
exhausts its fuel the machine walks check the common prefix and stop.
"""

from __future__ import annotations

from dataclasses import dataclass

from .calculi import (
    ClashOutcome,
    FuelExhausted,
    OpenStuckOutcome,
    Stepped,
    ValueOutcome,
    step_int,
    step_source,
    step_target,
)
from .machine_common import MachineFinal
from .machine_int import init_itam, readback_itam, step_itam
from .machine_source import init_stam, readback_stam, step_stam
from .machine_target import init_ttam, readback_ttam, step_ttam
from .syntax import print_source
from .terms import SourceTerm, alpha_eq_int
from .transforms import FreshSupply, closure_convert, naming, unwrap, wrap

DEFAULT_BISIM_FUEL = 10_000


@dataclass(frozen=True, slots=True)
class BisimReport:
    term: SourceTerm
    ok: bool
    failures: tuple[str, ...]
    outcome: str  # "value", "clash:<kind>", or "fuel"
    beta: int
    pi: int

    def summary(self) -> str:
        status = "ok" if self.ok else "FAIL"
        head = print_source(self.term)
        if len(head) > 60:
            head = head[:57] + "..."
        return f"{status} {self.outcome} beta={self.beta} pi={self.pi} {head}"


def _interp_trajectory(stepf, t, fuel: int):
    """Terms and labels of a fueled interpreter run, plus its outcome."""
    terms = [t]
    labels = []
    outcome = ("fuel", None)
    for _ in range(fuel + 1):
        r = stepf(t)
        match r:
            case Stepped(label=label, term=nxt):
                if len(labels) == fuel:
                    break
                labels.append(label)
                terms.append(nxt)
                t = nxt
            case ValueOutcome():
                outcome = ("value", None)
                break
            case ClashOutcome(kind):
                outcome = ("clash", kind)
                break
            case OpenStuckOutcome():
                outcome = ("open", None)
                break
            case FuelExhausted():  # pragma: no cover - not produced by step
                break
    return terms, tuple(labels), outcome


def _outcome_str(outcome) -> str:
    kind, clash = outcome
    if kind == "clash":
        return f"clash:{clash.value}"
    return kind


def _machine_walk(init, stepf, readback, terms, labels, outcome, fuel, name):
    """Drive one machine against its interpreter trajectory.

    Returns (failures, clash_kind_or_None, finished: bool).
    """
    failures = []
    state = init
    j = 0
    rb = readback(state)
    if rb != terms[0]:
        failures.append(f"{name}: initial readback differs")
        return failures, None, False
    for _ in range(fuel):
        r = stepf(state)
        if isinstance(r, MachineFinal):
            if j != len(labels):
                failures.append(
                    f"{name}: stopped after {j} principal steps, interpreter took {len(labels)}"
                )
            if r.status == "successful" and outcome[0] != "value":
                failures.append(f"{name}: successful but interpreter ended {outcome[0]}")
            if r.status == "clash":
                if outcome[0] != "clash":
                    failures.append(f"{name}: clash but interpreter ended {outcome[0]}")
                elif r.clash is not outcome[1]:
                    failures.append(
                        f"{name}: clash kind {r.clash.value} vs interpreter {outcome[1].value}"
                    )
            return failures, r.clash, True
        nxt_rb = readback(r.state)
        if r.name in ("ebeta", "epi"):
            want = "beta" if r.name == "ebeta" else "pi"
            if j >= len(labels):
                # interpreter ran out of fuel here; prefix agreed, stop
                if outcome[0] == "fuel":
                    return failures, None, False
                failures.append(f"{name}: extra principal step {want} at index {j}")
                return failures, None, False
            if labels[j].value != want:
                failures.append(
                    f"{name}: step {j} label {want} vs interpreter {labels[j].value}"
                )
                return failures, None, False
            j += 1
            if nxt_rb != terms[j]:
                failures.append(f"{name}: readback after principal step {j} differs")
                return failures, None, False
        else:
            if nxt_rb != rb:
                failures.append(f"{name}: overhead transition {r.name} changed readback")
                return failures, None, False
        state = r.state
        rb = nxt_rb
    if outcome[0] != "fuel":
        failures.append(f"{name}: ran out of machine fuel on a terminating term")
    return failures, None, False


def bisim_check(
    u: SourceTerm, fuel: int = DEFAULT_BISIM_FUEL, machine_fuel: int | None = None
) -> BisimReport:
    if machine_fuel is None:
        machine_fuel = 20 * fuel + 10_000
    failures = []

    wu = wrap(u)
    cu = closure_convert(u)
    s_terms, s_labels, s_out = _interp_trajectory(step_source, u, fuel)
    i_terms, i_labels, i_out = _interp_trajectory(step_int, wu, fuel)
    t_terms, t_labels, t_out = _interp_trajectory(step_target, cu, fuel)

    # (a) identical label sequences
    if not (s_labels == i_labels == t_labels):
        failures.append(
            f"label sequences differ: source {len(s_labels)}, int {len(i_labels)}, target {len(t_labels)}"
        )

    # (d) terminal classifications agree
    if not (s_out == i_out == t_out):
        failures.append(
            f"outcomes differ: source {_outcome_str(s_out)}, int {_outcome_str(i_out)}, "
            f"target {_outcome_str(t_out)}"
        )

    # (c) stepwise commutation through the reverse translations
    if not failures:
        for k, (st, it) in enumerate(zip(s_terms, i_terms)):
            if unwrap(it) != st:
                failures.append(f"unwrap of intermediate reduct {k} is not source reduct {k}")
                break
        for k, (it, tt) in enumerate(zip(i_terms, t_terms)):
            if not alpha_eq_int(naming(tt, (), (), FreshSupply()), it):
                failures.append(f"naming of target reduct {k} is not intermediate reduct {k}")
                break

    # (b) machine implementation, one machine at a time
    mtraj = (
        (init_stam(u), step_stam, readback_stam, s_terms, s_labels, s_out, "source machine"),
        (init_itam(wu), step_itam, readback_itam, i_terms, i_labels, i_out, "int machine"),
        (init_ttam(cu), step_ttam, readback_ttam, t_terms, t_labels, t_out, "target machine"),
    )
    for init, stepf, readback, terms, labels, outcome, name in mtraj:
        fs, _, _ = _machine_walk(init, stepf, readback, terms, labels, outcome, machine_fuel, name)
        failures.extend(fs)

    beta = sum(1 for l in s_labels if l.value == "beta")
    return BisimReport(
        term=u,
        ok=not failures,
        failures=tuple(failures),
        outcome=_outcome_str(s_out),
        beta=beta,
        pi=len(s_labels) - beta,
    )
