"""Pieces shared by the three tupled abstract machines.

Each machine exposes a step function from states to either a
Transition (name, successor state, instrumented cost) or a
MachineFinal (successful stop or clash). The run loop below drives a
step function for at most `fuel` transitions and accumulates a
RunRecord.

Costs are counted, never measured: each transition reports
1 + env-copy length + tuple/bag width where applicable, so runs are
deterministic and machine-independent. Lookup cost is the scan
position (or 1 for positional access); subv_lookup isolates the cost
of plain variable lookups so per-lookup trends can be compared across
machines.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .calculi import ClashKind, StepLabel


class MachineInvariantError(Exception):
    """An internal machine invariant broke; reachable states never raise this."""


@dataclass(frozen=True, slots=True)
class Cost:
    elem: int
    env_copy: int = 0
    lookup: int = 0
    subv_lookup: int = 0


@dataclass(frozen=True, slots=True)
class Transition:
    name: str
    state: object
    cost: Cost


@dataclass(frozen=True, slots=True)
class MachineFinal:
    status: str  # "successful" or "clash"
    clash: ClashKind | None = None


_PRINCIPAL = {"ebeta": StepLabel.BETA, "epi": StepLabel.PI}


@dataclass(frozen=True)
class RunRecord:
    """Everything observed along one machine run."""

    labels: tuple[str, ...]
    counts: dict
    final: str  # "successful", "clash", or "fuel"
    clash: ClashKind | None
    final_state: object
    elem_ops: int
    env_copy_ops: int
    lookup_ops: int
    subv_lookup_ops: int
    measures: tuple[int, ...] | None = None
    elem_by_name: dict = field(default_factory=dict)

    @property
    def steps(self) -> int:
        return len(self.labels)

    @property
    def beta(self) -> int:
        return self.counts.get("ebeta", 0)

    @property
    def pi(self) -> int:
        return self.counts.get("epi", 0)

    @property
    def principal_labels(self) -> tuple[StepLabel, ...]:
        return tuple(_PRINCIPAL[n] for n in self.labels if n in _PRINCIPAL)


def run_loop(step, measure, state, fuel: int, record_measure: bool = False) -> RunRecord:
    labels: list[str] = []
    counts: dict = {}
    elem_by_name: dict = {}
    elem = env_copy = lookup = subv = 0
    measures = [measure(state)] if record_measure else None

    def finish(final: str, clash):
        return RunRecord(
            labels=tuple(labels),
            counts=counts,
            final=final,
            clash=clash,
            final_state=state,
            elem_ops=elem,
            env_copy_ops=env_copy,
            lookup_ops=lookup,
            subv_lookup_ops=subv,
            measures=tuple(measures) if measures is not None else None,
            elem_by_name=elem_by_name,
        )

    for _ in range(fuel):
        r = step(state)
        if isinstance(r, MachineFinal):
            return finish(r.status, r.clash)
        labels.append(r.name)
        counts[r.name] = counts.get(r.name, 0) + 1
        c = r.cost
        elem += c.elem
        elem_by_name[r.name] = elem_by_name.get(r.name, 0) + c.elem
        env_copy += c.env_copy
        lookup += c.lookup
        subv += c.subv_lookup
        state = r.state
        if measures is not None:
            measures.append(measure(state))
    r = step(state)
    if isinstance(r, MachineFinal):
        return finish(r.status, r.clash)
    return finish("fuel", None)
