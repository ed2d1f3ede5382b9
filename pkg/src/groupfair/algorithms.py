"""
Sequential allocation procedures and their pick traces.

* :func:`run_sm` -- sequential maximin for a common valuation.
* :func:`run_iwrr` -- iterative weighted round robin (any valuation class).
* :func:`run_sm_iwrr` -- SM bundles redistributed by IWRR over representative goods.
* :func:`run_weighted_greedy` -- group-level greedy by weighted bundle value.

Tie-breaks are fixed so every run is reproducible: lowest agent / good / group
index wins unless a rule below says otherwise.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .model import (
    ALL_COMMON,
    Allocation,
    GroupAllocation,
    Instance,
    PreconditionError,
)

SM = "sm"
IWRR = "iwrr"
WEIGHTED_GREEDY = "weighted-greedy"
REPRESENTATIVE = "representative"


@dataclass(frozen=True)
class PickEvent:
    step: int
    round: int
    group: int
    agent: Optional[int]
    good: int
    reason: str

    def to_json(self) -> dict:
        return {"step": self.step, "round": self.round, "group": self.group,
                "agent": self.agent, "good": self.good, "reason": self.reason}


@dataclass(frozen=True)
class PickTrace:
    """Ordered selections made by a sequential procedure.

    ``round`` of an event is the number of earlier picks by the same agent
    (by the same group for group-level procedures), so it starts at 0.
    For events tagged ``representative`` the ``good`` field indexes the
    representative good, which is the index of the SM bundle it stands for.
    """

    events: tuple = ()

    def __len__(self):
        return len(self.events)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e.to_json()) + "\n" for e in self.events)


class _TraceRecorder:
    def __init__(self):
        self.events = []
        self.step = 0
        self._counts = {}

    def record(self, group, agent, good, reason):
        key = ("a", agent) if agent is not None else ("g", group)
        r = self._counts.get(key, 0)
        self._counts[key] = r + 1
        self.events.append(PickEvent(self.step, r, group, agent, good, reason))
        self.step += 1

    def trace(self) -> PickTrace:
        return PickTrace(tuple(self.events))


def _require_all_common(inst: Instance, name: str) -> None:
    if inst.valuation_class != ALL_COMMON:
        raise PreconditionError(f"{name} requires an all-common instance, got {inst.valuation_class}")


def _goods_by_common_value(inst: Instance) -> list:
    row = inst.valuations[0]
    return sorted(range(inst.m), key=lambda g: (-row[g], g))


def run_sm(inst: Instance) -> tuple:
    """Sequential maximin: the most valuable unassigned good goes to the poorest agent.

    Ties among least-valued bundles go to the lowest agent index, ties among
    goods to the lowest good index.

    >>> inst = Instance([[3, 2, 1], [3, 2, 1]], [[0, 1]], "all-common")
    >>> run_sm(inst)[0].bundles
    ((0,), (1, 2))
    """
    _require_all_common(inst, "SM")
    row = inst.valuations[0]
    bundles = [[] for _ in range(inst.n)]
    heap = [(Fraction(0), i) for i in range(inst.n)]
    rec = _TraceRecorder()
    for g in _goods_by_common_value(inst):
        value, i = heapq.heappop(heap)
        bundles[i].append(g)
        rec.record(inst.group_of[i], i, g, SM)
        heapq.heappush(heap, (value + row[g], i))
    return Allocation(bundles), rec.trace()


def run_iwrr(inst: Instance, reason: str = IWRR) -> tuple:
    """Iterative weighted round robin.

    Each step the group with the smallest ``|B_k| / w_k`` picks (lowest group
    index on ties); inside it the member with the fewest goods picks, ties going
    to the member whose favourite unassigned good is worth the most to it and
    then to the lowest agent index. The picker takes its favourite unassigned
    good (lowest good index on ties).
    """
    n, m = inst.n, inst.m
    weights = inst.weights
    prefs = [sorted(range(m), key=lambda g, row=row: (-row[g], g)) for row in inst.valuations]
    cursor = [0] * n
    taken = [False] * m
    sizes = [0] * n
    group_sizes = [0] * inst.num_groups
    bundles = [[] for _ in range(n)]
    rec = _TraceRecorder()

    def favourite(i):
        c = cursor[i]
        pref = prefs[i]
        while taken[pref[c]]:
            c += 1
        cursor[i] = c
        return pref[c]

    for _ in range(m):
        k = min(range(inst.num_groups), key=lambda k: (Fraction(group_sizes[k], weights[k]), k))
        members = inst.groups[k]
        fewest = min(sizes[i] for i in members)
        best_i, best_g = None, None
        for i in members:
            if sizes[i] != fewest:
                continue
            g = favourite(i)
            if best_i is None or inst.valuations[i][g] > inst.valuations[best_i][best_g]:
                best_i, best_g = i, g
        taken[best_g] = True
        sizes[best_i] += 1
        group_sizes[k] += 1
        bundles[best_i].append(best_g)
        rec.record(k, best_i, best_g, reason)
    return Allocation(bundles), rec.trace()


@dataclass(frozen=True)
class RepresentativeGoods:
    """One synthetic good per SM bundle, worth that bundle minus the poorest bundle."""

    values: tuple
    source_bundles: tuple


def representative_goods(inst: Instance, sm_alloc: Allocation) -> RepresentativeGoods:
    row = inst.valuations[0]
    bundle_values = [sum((row[g] for g in b), Fraction(0)) for b in sm_alloc.bundles]
    floor = min(bundle_values)
    return RepresentativeGoods(tuple(v - floor for v in bundle_values), sm_alloc.bundles)


def run_sm_iwrr(inst: Instance) -> tuple:
    """SM bundles handed out by IWRR, each bundle treated as one good.

    Every agent ends up with exactly one SM bundle, so the output is a
    reassignment of the SM allocation. The trace holds the SM picks followed
    by the IWRR picks over representative goods.
    """
    sm_alloc, sm_trace = run_sm(inst)
    reps = representative_goods(inst, sm_alloc)
    rep_inst = Instance([reps.values] * inst.n, inst.groups, ALL_COMMON, inst.agents,
                        tuple(f"r{i + 1}" for i in range(inst.n)))
    rep_alloc, rep_trace = run_iwrr(rep_inst, reason=REPRESENTATIVE)
    bundles = [reps.source_bundles[b[0]] for b in rep_alloc.bundles]
    offset = len(sm_trace)
    shifted = tuple(PickEvent(e.step + offset, e.round, e.group, e.agent, e.good, e.reason)
                    for e in rep_trace.events)
    return Allocation(bundles), PickTrace(sm_trace.events + shifted)


def run_weighted_greedy(inst: Instance) -> tuple:
    """Goods in decreasing common value, each to the group with least ``v(B_k) / w_k``."""
    _require_all_common(inst, "weighted greedy")
    row = inst.valuations[0]
    weights = inst.weights
    totals = [Fraction(0)] * inst.num_groups
    bundles = [[] for _ in range(inst.num_groups)]
    rec = _TraceRecorder()
    for g in _goods_by_common_value(inst):
        k = min(range(inst.num_groups), key=lambda k: (totals[k] / weights[k], k))
        bundles[k].append(g)
        totals[k] += row[g]
        rec.record(k, None, g, WEIGHTED_GREEDY)
    return GroupAllocation(bundles), rec.trace()


@dataclass(frozen=True)
class StructureVerdict:
    ok: bool
    step: Optional[int] = None
    message: str = ""


def check_trace_structure(trace: PickTrace, inst: Instance, k: int, k2: int) -> StructureVerdict:
    """Check the consecutive-selection pattern of two groups in an IWRR trace.

    Restricted to picks by ``k`` and ``k2``, the lighter group never picks twice
    in a row and each run of the heavier group has length
    ``floor(w_heavy / w_light)`` or ``ceil(w_heavy / w_light)``. Two runs are
    exempt from the lower bound: a run that ends the trace (goods ran out) and a
    run that opens it before the lighter group's first pick, which has length 1
    when a tie at zero goes to the heavier group.
    """
    if any(e.reason not in (IWRR, REPRESENTATIVE) for e in trace.events):
        raise PreconditionError("trace structure is defined for IWRR traces only")
    if k == k2:
        raise PreconditionError("need two distinct groups")
    w = inst.weights
    light, heavy = (k, k2) if w[k] <= w[k2] else (k2, k)
    lo = w[heavy] // w[light]
    hi = -(-w[heavy] // w[light])
    events = [e for e in trace.events if e.group in (light, heavy)]

    runs = []  # (group, length, first step)
    for e in events:
        if runs and runs[-1][0] == e.group:
            g, length, start = runs[-1]
            runs[-1] = (g, length + 1, start)
        else:
            runs.append((e.group, 1, e.step))

    for idx, (g, length, start) in enumerate(runs):
        is_last = idx == len(runs) - 1
        is_head = idx == 0
        if g == light:
            # equal weights make both groups "light"; both bounds are then 1
            if length > 1:
                return StructureVerdict(False, start, f"group {g} picked {length} times in a row")
            continue
        if length > hi:
            return StructureVerdict(False, start, f"group {g} run of {length} exceeds {hi}")
        if length < lo and not (is_last or is_head):
            return StructureVerdict(False, start, f"group {g} run of {length} below {lo}")
    return StructureVerdict(True)

