"""
Small hand-made instances on which individual and group fairness notions
separate, and exhaustive certifications of those separations.

``c`` is the large good value in each construction. Each separation holds once
``c`` clears a threshold set by the defining inequalities:

* ``prop2`` (goods ``c,1,1,1``, two groups of two): no EF1 allocation is WEFX
  iff ``c > 2``;
* ``prop3a`` (goods ``c,c,1,1``, two groups of two): the one-good-each
  allocation with both ``c`` goods in one group is EFX but not WEF1 iff ``c > 2``;
* ``prop3b`` (goods ``c,1,1``, groups of sizes 2 and 1): ``({g1}, {g2, g3})``
  is WEF1 but not EF1 iff ``c >= 2``;
* ``example_s2`` (five goods of value ``c`` for groups of sizes 1 and 2):
  scale-free, any ``c > 0``.

Shipped JSON files use ``c = 100`` (``c = 1`` for ``example_s2``).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from importlib import resources

from ..algorithms import run_sm_iwrr
from ..audit import check_ef1, check_efx, check_wef1, check_wefx
from ..model import (
    ALL_COMMON,
    Allocation,
    Instance,
    allocation_from_json,
    allocation_to_json,
    instance_from_json,
    instance_to_json,
    to_value,
)
from ..oracle import Query, enumerate_allocations

DEFAULT_C = 100
SWEEP = (2, 10, 100, 10 ** 6)


def example_s2(c=1) -> tuple:
    """One agent in the first group, two in the second, five goods worth ``c``.

    Returns the instance and the allocation giving ``p1`` one good and
    ``p2``, ``p3`` two goods each.
    """
    c = to_value(c)
    inst = Instance([[c] * 5] * 3, [[0], [1, 2]], ALL_COMMON)
    return inst, Allocation([[0], [1, 2], [3, 4]])


def prop2(c=DEFAULT_C) -> Instance:
    c = to_value(c)
    return Instance([[c, 1, 1, 1]] * 4, [[0, 1], [2, 3]], ALL_COMMON)


def prop3a(c=DEFAULT_C) -> tuple:
    """Instance plus the allocation ``p_i <- g_i`` (both valuable goods to the first group)."""
    c = to_value(c)
    inst = Instance([[c, c, 1, 1]] * 4, [[0, 1], [2, 3]], ALL_COMMON)
    return inst, Allocation([[0], [1], [2], [3]])


def prop3b(c=DEFAULT_C) -> tuple:
    """Instance plus the allocation with group bundles ``({g1}, {g2, g3})``."""
    c = to_value(c)
    inst = Instance([[c, 1, 1]] * 3, [[0, 1], [2]], ALL_COMMON)
    return inst, Allocation([[0], [], [1, 2]])


def build_all(c=None) -> dict:
    """Fixture name -> instance or (instance, allocation)."""
    return {
        "example_s2": example_s2(1 if c is None else c),
        "prop2": prop2(DEFAULT_C if c is None else c),
        "prop3a": prop3a(DEFAULT_C if c is None else c),
        "prop3b": prop3b(DEFAULT_C if c is None else c),
    }


def write_fixtures(directory, c=None) -> None:
    os.makedirs(directory, exist_ok=True)
    for name, item in build_all(c).items():
        inst, alloc = item if isinstance(item, tuple) else (item, None)
        with open(os.path.join(directory, f"{name}.json"), "w") as fh:
            json.dump(instance_to_json(inst), fh, indent=2)
            fh.write("\n")
        if alloc is not None:
            with open(os.path.join(directory, f"{name}_alloc.json"), "w") as fh:
                json.dump(allocation_to_json(alloc, inst), fh, indent=2)
                fh.write("\n")


def load_fixtures(directory=None) -> dict:
    """Read fixture files from ``directory`` (default: the packaged copies)."""
    if directory is None:
        root = resources.files(__name__)
        read = lambda fname: root.joinpath(fname).read_text()  # noqa: E731
    else:
        read = lambda fname: open(os.path.join(directory, fname)).read()  # noqa: E731
    out = {}
    for name in ("example_s2", "prop2", "prop3a", "prop3b"):
        inst = instance_from_json(json.loads(read(f"{name}.json")))
        if name == "prop2":
            out[name] = inst
        else:
            alloc = allocation_from_json(json.loads(read(f"{name}_alloc.json")), inst)
            out[name] = (inst, alloc)
    return out


@dataclass(frozen=True)
class Certification:
    name: str
    ok: bool
    detail: str

    def line(self) -> str:
        return f"{'CERTIFIED' if self.ok else 'FAILED':9} {self.name}: {self.detail}"


def _exists(inst, required, forbidden=()):
    return enumerate_allocations(inst, Query(frozenset(required), frozenset(forbidden)))


def certify(fixtures: dict) -> list:
    """Run every certification on a fixture set and return one record per claim."""
    out = []

    inst, alloc = fixtures["example_s2"]
    ef1, wef1, wefx = check_ef1(inst, alloc), check_wef1(inst, alloc), check_wefx(inst, alloc)
    out.append(Certification("example_s2 allocation is EF1 but neither WEF1 nor WEFX",
                             ef1.passed and not wef1.passed and not wefx.passed,
                             f"EF1={ef1.passed} WEF1={wef1.passed} WEFX={wefx.passed}"))

    res = _exists(fixtures["prop2"], {"EF1", "WEFX"})
    out.append(Certification("prop2 has no EF1 and WEFX allocation",
                             res.verdict == "none" and res.allocations_examined == 256,
                             f"{res.verdict} after {res.allocations_examined} allocations"))

    inst, alloc = fixtures["prop3a"]
    res = _exists(inst, {"EFX"}, {"WEF1"})
    out.append(Certification("prop3a has an EFX allocation that is not WEF1",
                             res.verdict == "exists", f"{res.verdict} after {res.allocations_examined}"))
    res = _exists(inst, {"EFX", "WEF1"})
    out.append(Certification("prop3a has an EFX and WEF1 allocation",
                             res.verdict == "exists", f"{res.verdict} after {res.allocations_examined}"))
    sm_alloc, _ = run_sm_iwrr(inst)
    ok = check_efx(inst, sm_alloc).passed and check_wef1(inst, sm_alloc).passed
    out.append(Certification("prop3a SM-IWRR output is EFX and WEF1", ok, str(sm_alloc.bundles)))
    ok = check_efx(inst, alloc).passed and not check_wef1(inst, alloc).passed
    out.append(Certification("prop3a one-good-each allocation is EFX but not WEF1", ok,
                             str(alloc.bundles)))

    inst3b, alloc3b = fixtures["prop3b"]
    res = _exists(inst3b, {"WEF1"}, {"EFX"})
    out.append(Certification("prop3b has a WEF1 allocation that is not EFX",
                             res.verdict == "exists", f"{res.verdict} after {res.allocations_examined}"))
    ok = check_wef1(inst3b, alloc3b).passed and not check_ef1(inst3b, alloc3b).passed
    out.append(Certification("prop3b allocation is WEF1 but not EF1", ok, str(alloc3b.bundles)))

    res = _exists(inst, {"EF1"}, {"WEF1"})
    out.append(Certification("prop3a has an EF1 allocation that is not WEF1",
                             res.verdict == "exists", f"{res.verdict} after {res.allocations_examined}"))
    res = _exists(inst3b, {"WEF1"}, {"EF1"})
    out.append(Certification("prop3b has a WEF1 allocation that is not EF1",
                             res.verdict == "exists", f"{res.verdict} after {res.allocations_examined}"))
    return out
