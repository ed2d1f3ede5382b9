"""
Group epsilon-stability: can an agent gain more than one good's worth by
declaring a different group (or none) before the mechanism runs?

Every single-agent deviation is simulated by re-running the mechanism on the
modified partition.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .algorithms import run_iwrr, run_sm_iwrr
from .model import ALL_COMMON, InputError, Instance, PreconditionError, value_to_json

NEW_GROUP = "new"

MECHANISMS = {
    "iwrr": run_iwrr,
    "sm_iwrr": run_sm_iwrr,
}


def _mechanism(name: str):
    key = name.replace("-", "_").lower()
    if key not in MECHANISMS:
        raise InputError(f"unknown mechanism {name!r}; choose from {sorted(MECHANISMS)}")
    return key, MECHANISMS[key]


@dataclass(frozen=True)
class Deviation:
    """Agent ``agent`` leaves its group for ``target``: a group index or :data:`NEW_GROUP`."""

    agent: int
    target: Union[int, str]


def deviations(inst: Instance) -> list:
    """All single-agent deviations, in (agent, target) order; a fresh singleton comes first."""
    out = []
    for i in range(inst.n):
        out.append(Deviation(i, NEW_GROUP))
        out.extend(Deviation(i, k) for k in range(inst.num_groups) if k != inst.group_of[i])
    return out


def deviated_instance(inst: Instance, dev: Deviation) -> Instance:
    """Partition after the deviation; groups left empty are dropped and the
    fresh singleton, if any, is appended last."""
    own = inst.group_of[dev.agent]
    if dev.target != NEW_GROUP and (dev.target == own or not 0 <= dev.target < inst.num_groups):
        raise InputError(f"invalid deviation target {dev.target!r} for agent {dev.agent}")
    groups = [[i for i in grp if i != dev.agent] for grp in inst.groups]
    if dev.target == NEW_GROUP:
        groups.append([dev.agent])
    else:
        groups[dev.target].append(dev.agent)
    return inst.with_groups(g for g in groups if g)


@dataclass(frozen=True)
class LedgerEntry:
    agent: int
    target: Union[int, str]
    original_value: Fraction
    deviated_value: Fraction
    removed_good: Optional[int]
    passed: bool

    def to_json(self, inst: Instance) -> dict:
        return {
            "agent": inst.agents[self.agent],
            "target": self.target,
            "original_value": value_to_json(self.original_value),
            "deviated_value": value_to_json(self.deviated_value),
            "removed_good": inst.goods[self.removed_good] if self.removed_good is not None else None,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class StabilityVerdict:
    passed: bool
    ledger: tuple
    identity_rerun_ok: bool

    def violations(self) -> list:
        return [e for e in self.ledger if not e.passed]

    def ledger_jsonl(self, inst: Instance) -> str:
        return "".join(json.dumps(e.to_json(inst)) + "\n" for e in self.ledger)


def _entry(inst: Instance, agent: int, target, original: tuple, deviated: tuple) -> LedgerEntry:
    row = inst.valuations[agent]
    own = sum((row[g] for g in original), Fraction(0))
    other = sum((row[g] for g in deviated), Fraction(0))
    removed = min(deviated, key=lambda g: (-row[g], g)) if deviated else None
    rhs = other - (row[removed] if removed is not None else 0)
    return LedgerEntry(agent, target, own, other, removed, own >= rhs)


def check_group_epsilon_stability(inst: Instance, mechanism: str) -> StabilityVerdict:
    """Re-run ``mechanism`` under every single-agent group deviation.

    An agent passes a deviation if its original bundle is worth at least the
    bundle it would get after deviating, minus that bundle's best good (in its
    own eyes).
    """
    key, run = _mechanism(mechanism)
    if key == "sm_iwrr" and inst.valuation_class != ALL_COMMON:
        raise PreconditionError("sm_iwrr stability needs an all-common instance")
    base, _ = run(inst)
    rerun, _ = run(inst.with_groups(inst.groups))
    ledger = []
    for dev in deviations(inst):
        alloc, _ = run(deviated_instance(inst, dev))
        ledger.append(_entry(inst, dev.agent, dev.target,
                             base.bundles[dev.agent], alloc.bundles[dev.agent]))
    ledger = tuple(ledger)
    return StabilityVerdict(all(e.passed for e in ledger), ledger, rerun == base)
