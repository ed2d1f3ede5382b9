"""
Fairness checkers for individual and group envy notions.

Every checker returns a :class:`Verdict`; a failed verdict carries a witness
naming the offending pair and the good whose removal was tried, together with
the two sides of the violated inequality.

"Up to one good" is decided by removing the good the viewer values most;
"up to any good" by removing the good the viewer values least. For additive
valuations these single removals are exact.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .model import (
    GENERAL,
    Allocation,
    GroupAllocation,
    InputError,
    Instance,
    PreconditionError,
    averaged_group_view,
    bundle_value,
    group_bundle,
    group_utility,
    to_value,
    value_to_json,
)

INFINITY = math.inf
DEFAULT_GAMMA = Fraction(3)


@dataclass(frozen=True)
class Verdict:
    passed: bool
    witness: Optional[dict] = None

    def __bool__(self):
        return self.passed

    def to_json(self, inst: Instance = None) -> dict:
        out = {"pass": self.passed}
        if self.witness is not None:
            out["witness"] = _witness_json(self.witness, inst)
        return out


def _witness_json(w: dict, inst: Optional[Instance]) -> dict:
    out = {}
    for key, val in w.items():
        if key == "removed_good" and val is not None and inst is not None:
            out[key] = inst.goods[val]
        elif isinstance(val, Fraction):
            out[key] = value_to_json(val)
        else:
            out[key] = val
    return out


# individual envy

def _pairwise_envy(inst: Instance, alloc: Allocation, removal: Optional[str]) -> Verdict:
    own = [bundle_value(inst, i, alloc.bundles[i]) for i in range(inst.n)]
    for i in range(inst.n):
        row = inst.valuations[i]
        for j in range(inst.n):
            other = alloc.bundles[j]
            if i == j or not other:
                continue
            envied = sum((row[g] for g in other), Fraction(0))
            removed = None
            if removal == "max":
                removed = min(other, key=lambda g: (-row[g], g))
            elif removal == "min":
                removed = min(other, key=lambda g: (row[g], g))
            rhs = envied - (row[removed] if removed is not None else 0)
            if own[i] < rhs:
                return Verdict(False, {"envious_agent": i, "envied_agent": j,
                                       "removed_good": removed, "lhs": own[i], "rhs": rhs})
    return Verdict(True)


def check_ef(inst: Instance, alloc: Allocation) -> Verdict:
    return _pairwise_envy(inst, alloc, None)


def check_ef1(inst: Instance, alloc: Allocation) -> Verdict:
    """Envy-free up to one good.

    >>> inst = Instance([[1, 1, 1]] * 2, [[0], [1]], "all-common")
    >>> check_ef1(inst, Allocation([[], [0, 1, 2]])).passed
    False
    """
    return _pairwise_envy(inst, alloc, "max")


def check_efx(inst: Instance, alloc: Allocation) -> Verdict:
    """Envy-free up to any good, zero-valued goods included."""
    return _pairwise_envy(inst, alloc, "min")


# group envy under a group-wide valuation

def _require_group_valuation(inst: Instance) -> None:
    if inst.valuation_class == GENERAL:
        raise PreconditionError(
            "WEF-family notions need all-common or group-common valuations; "
            "use check_exante_wef1 for general instances")


def _group_bundles(inst: Instance, alloc) -> tuple:
    if isinstance(alloc, GroupAllocation):
        return alloc.group_bundles
    return alloc.group_bundles(inst)


def _weighted_envy(inst: Instance, alloc, removal: Optional[str]) -> Verdict:
    _require_group_valuation(inst)
    bundles = _group_bundles(inst, alloc)
    w = inst.weights
    for k in range(inst.num_groups):
        row = inst.valuations[inst.groups[k][0]]
        own = sum((row[g] for g in bundles[k]), Fraction(0)) / w[k]
        for k2 in range(inst.num_groups):
            other = bundles[k2]
            if k == k2 or not other:
                continue
            removed = None
            if removal == "max":
                removed = min(other, key=lambda g: (-row[g], g))
            elif removal == "min":
                removed = min(other, key=lambda g: (row[g], g))
            envied = sum((row[g] for g in other), Fraction(0))
            rhs = (envied - (row[removed] if removed is not None else 0)) / w[k2]
            if own < rhs:
                return Verdict(False, {"envious_group": k, "envied_group": k2,
                                       "removed_good": removed, "lhs": own, "rhs": rhs})
    return Verdict(True)


def check_wef(inst: Instance, alloc) -> Verdict:
    return _weighted_envy(inst, alloc, None)


def check_wef1(inst: Instance, alloc) -> Verdict:
    """Weighted envy-free up to one good between groups.

    Accepts an :class:`Allocation` or a :class:`GroupAllocation`; general
    instances are refused.
    """
    return _weighted_envy(inst, alloc, "max")


def check_wefx(inst: Instance, alloc) -> Verdict:
    return _weighted_envy(inst, alloc, "min")


# ex-ante weighted envy

def _exante_sides(inst: Instance, alloc, k: int, k2: int) -> tuple:
    """(lhs, rhs, removed good) for the viewer/target pair, before any factor."""
    w = inst.weights
    lhs = group_utility(alloc, inst, k) / w[k]
    target = group_bundle(alloc, inst, k2)
    if not target:
        return lhs, Fraction(0), None
    members = inst.groups[k]
    removed = max(target, key=lambda g: (sum(inst.valuations[i][g] for i in members), -g))
    view = averaged_group_view(alloc, inst, k, k2)
    view -= sum((inst.valuations[i][removed] for i in members), Fraction(0)) / len(members)
    return lhs, view / w[k2], removed


def check_exante_wef1(inst: Instance, alloc, gamma=DEFAULT_GAMMA) -> Verdict:
    """Ex-ante weighted envy-free up to one good, relaxed by a factor ``1/gamma``.

    A group compares its per-member utility with the members' average view of
    another group's bundle, per unit weight, after dropping the good its members
    value most in total.
    """
    gamma = to_value(gamma)
    if gamma <= 0:
        raise InputError("gamma must be positive")
    for k in range(inst.num_groups):
        for k2 in range(inst.num_groups):
            if k == k2:
                continue
            lhs, rhs, removed = _exante_sides(inst, alloc, k, k2)
            if gamma * lhs < rhs:
                return Verdict(False, {"envious_group": k, "envied_group": k2,
                                       "removed_good": removed, "lhs": lhs, "rhs": rhs / gamma})
    return Verdict(True)


def min_feasible_gamma(inst: Instance, alloc) -> Union[Fraction, float]:
    """Smallest ``gamma`` for which the allocation is ex-ante WEF1 up to ``1/gamma``.

    Returns ``0`` when no pair has residual envy (every positive gamma works)
    and ``math.inf`` when a group with zero utility has positive residual envy.
    """
    worst = Fraction(0)
    for k in range(inst.num_groups):
        for k2 in range(inst.num_groups):
            if k == k2:
                continue
            lhs, rhs, _ = _exante_sides(inst, alloc, k, k2)
            if rhs == 0:
                continue
            if lhs == 0:
                return INFINITY
            worst = max(worst, rhs / lhs)
    return worst


# proportionality

def _up_to_one_added(inst: Instance, i: int, own_bundle, pool, target: Fraction):
    """``None`` if agent ``i`` reaches ``target`` with at most one good from ``pool``."""
    row = inst.valuations[i]
    own = sum((row[g] for g in own_bundle), Fraction(0))
    if own >= target:
        return None
    best = min(pool, key=lambda g: (-row[g], g)) if pool else None
    if best is not None and own + row[best] >= target:
        return None
    return {"lhs": own + (row[best] if best is not None else 0), "rhs": target,
            "removed_good": best}


def check_pef1(inst: Instance, alloc: Allocation) -> Verdict:
    """Proportionally envy-free up to one good.

    Agent ``i`` passes against group ``k`` if its bundle plus one good of
    ``B_k`` outside its own bundle is worth ``v_i(B_k) / w_k``; an empty choice
    set passes only when the bundle alone suffices.
    """
    w = inst.weights
    bundles = alloc.group_bundles(inst)
    for i in range(inst.n):
        mine = set(alloc.bundles[i])
        for k in range(inst.num_groups):
            target = bundle_value(inst, i, bundles[k]) / w[k]
            pool = [g for g in bundles[k] if g not in mine]
            fail = _up_to_one_added(inst, i, alloc.bundles[i], pool, target)
            if fail is not None:
                fail = {"agent": i, "group": k, "added_good": fail.pop("removed_good"), **fail}
                return Verdict(False, fail)
    return Verdict(True)


def check_iprop1(inst: Instance, alloc: Allocation) -> Verdict:
    """Individually proportional up to one good."""
    for i in range(inst.n):
        mine = set(alloc.bundles[i])
        target = bundle_value(inst, i, range(inst.m)) / inst.n
        pool = [g for g in range(inst.m) if g not in mine]
        fail = _up_to_one_added(inst, i, alloc.bundles[i], pool, target)
        if fail is not None:
            fail = {"agent": i, "added_good": fail.pop("removed_good"), **fail}
            return Verdict(False, fail)
    return Verdict(True)


# notion registry, used by the oracle and the CLI

INDIVIDUAL_NOTIONS = ("EF", "EF1", "EFX", "PEF1", "IPROP1")
GROUP_NOTIONS = ("WEF", "WEF1", "WEFX")
_EXANTE = re.compile(r"^EXANTE_WEF1(?:\((?P<gamma>[^)]+)\))?$")

_CHECKS = {
    "EF": check_ef, "EF1": check_ef1, "EFX": check_efx,
    "WEF": check_wef, "WEF1": check_wef1, "WEFX": check_wefx,
    "PEF1": check_pef1, "IPROP1": check_iprop1,
}


def normalize_notion(tag: str) -> str:
    """Canonical spelling of a notion tag; ``EXANTE_WEF1`` defaults to gamma 3."""
    name, paren, rest = tag.strip().upper().partition("(")
    name = name.strip().replace("-", "_")
    name = {"I_PROP1": "IPROP1", "IPROP_1": "IPROP1"}.get(name, name)
    tag = name + paren + rest
    if tag in _CHECKS:
        return tag
    match = _EXANTE.match(tag)
    if match:
        gamma = to_value(match.group("gamma") or DEFAULT_GAMMA)
        if gamma <= 0:
            raise InputError("gamma must be positive")
        return f"EXANTE_WEF1({value_to_json(gamma)})"
    raise InputError(f"unknown fairness notion {tag!r}")


def check_notion(inst: Instance, alloc, tag: str) -> Verdict:
    tag = normalize_notion(tag)
    if tag in _CHECKS:
        return _CHECKS[tag](inst, alloc)
    return check_exante_wef1(inst, alloc, tag[len("EXANTE_WEF1("):-1])


# full report

@dataclass
class FairnessReport:
    ef: Verdict
    ef1: Verdict
    efx: Verdict
    pef1: Verdict
    iprop1: Verdict
    exante_gamma: Fraction
    exante_wef1: Verdict
    min_feasible_gamma: Union[Fraction, float]
    wef: Optional[Verdict] = None
    wef1: Optional[Verdict] = None
    wefx: Optional[Verdict] = None
    inst: Instance = field(default=None, repr=False, compare=False)

    def verdict(self, tag: str) -> Optional[Verdict]:
        tag = normalize_notion(tag)
        if tag.startswith("EXANTE_WEF1"):
            if to_value(tag[len("EXANTE_WEF1("):-1]) != self.exante_gamma:
                return None
            return self.exante_wef1
        return getattr(self, tag.lower())

    def to_json(self) -> dict:
        out = {}
        for name in ("ef", "ef1", "efx", "wef", "wef1", "wefx", "pef1", "iprop1"):
            v = getattr(self, name)
            out[name] = v.to_json(self.inst) if v is not None else {"skipped": "general valuations"}
        gamma_min = self.min_feasible_gamma
        out["exante_wef1"] = {
            **self.exante_wef1.to_json(self.inst),
            "gamma": value_to_json(self.exante_gamma),
            "min_feasible_gamma": "inf" if gamma_min == INFINITY else value_to_json(gamma_min),
        }
        return out


def audit(inst: Instance, alloc: Allocation, gamma=DEFAULT_GAMMA) -> FairnessReport:
    """Evaluate every notion on a complete allocation.

    The implication chain between notions is re-checked on the result; a
    broken implication means a checker bug and raises ``AssertionError``.
    """
    alloc.validate(inst)
    gamma = to_value(gamma)
    report = FairnessReport(
        ef=check_ef(inst, alloc), ef1=check_ef1(inst, alloc), efx=check_efx(inst, alloc),
        pef1=check_pef1(inst, alloc), iprop1=check_iprop1(inst, alloc),
        exante_gamma=gamma, exante_wef1=check_exante_wef1(inst, alloc, gamma),
        min_feasible_gamma=min_feasible_gamma(inst, alloc), inst=inst,
    )
    if inst.valuation_class != GENERAL:
        report.wef = check_wef(inst, alloc)
        report.wef1 = check_wef1(inst, alloc)
        report.wefx = check_wefx(inst, alloc)
    _assert_implications(inst, report)
    return report


def _assert_implications(inst: Instance, r: FairnessReport) -> None:
    assert not r.ef or r.efx, "EF without EFX"
    assert not r.efx or r.ef1, "EFX without EF1"
    assert not r.ef1 or r.pef1, "EF1 without PEF1"
    if len(set(inst.weights)) == 1:
        assert not r.pef1 or r.iprop1, "PEF1 without i-PROP1 under equal group sizes"
    if r.wef is not None:
        assert not r.wef or r.wefx, "WEF without WEFX"
        assert not r.wefx or r.wef1, "WEFX without WEF1"
    feasible = r.min_feasible_gamma <= r.exante_gamma
    assert feasible == r.exante_wef1.passed, "gamma verdict disagrees with min_feasible_gamma"
