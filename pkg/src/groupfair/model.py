"""
Problem instances, allocations and the derived quantities every other module uses.

Values are kept as :class:`fractions.Fraction` throughout so that every
comparison made by an algorithm or a checker is exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Sequence, Union

ALL_COMMON = "all-common"
GROUP_COMMON = "group-common"
GENERAL = "general"
VALUATION_CLASSES = (ALL_COMMON, GROUP_COMMON, GENERAL)

Number = Union[int, str, Fraction, Decimal, float]


class InputError(ValueError):
    """Malformed instance, allocation or parameter."""


class PreconditionError(ValueError):
    """An operation was called on an input class it does not support."""


def to_value(x: Number) -> Fraction:
    """Convert an int, decimal string, ``"p/q"`` string or Fraction to an exact value.

    Floats are converted through their shortest decimal repr, so ``0.1`` becomes
    ``1/10`` rather than the binary expansion.

    >>> to_value("2.5"), to_value("7/3"), to_value(4)
    (Fraction(5, 2), Fraction(7, 3), Fraction(4, 1))
    """
    if isinstance(x, bool):
        raise InputError(f"boolean is not a value: {x!r}")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        x = repr(x)
    try:
        return Fraction(x)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not an exact number: {x!r}") from exc


def value_to_json(v: Fraction) -> Union[int, str]:
    """Integers stay integers; everything else is written as ``"p/q"``."""
    if v.denominator == 1:
        return v.numerator
    return f"{v.numerator}/{v.denominator}"


def infer_valuation_class(valuations: Sequence[Sequence[Fraction]],
                          groups: Sequence[Sequence[int]]) -> str:
    """Most specific class the valuation matrix belongs to."""
    rows = [tuple(r) for r in valuations]
    if all(r == rows[0] for r in rows):
        return ALL_COMMON
    if all(all(rows[i] == rows[grp[0]] for i in grp) for grp in groups):
        return GROUP_COMMON
    return GENERAL


@dataclass(frozen=True)
class Instance:
    """Agents, goods, a partition of the agents into groups and additive valuations.

    Parameters
    ----------
    valuations
        ``n x m`` matrix; ``valuations[i][j]`` is agent ``i``'s value for good ``j``.
    groups
        Partition of ``range(n)`` into non-empty groups. A group's weight is its size.
    valuation_class
        Declared class, one of ``"all-common"``, ``"group-common"``, ``"general"``.
        It is checked against the matrix, never trusted.
    agents, goods
        Optional display names; default to ``p1..pn`` and ``g1..gm``.

    >>> inst = Instance([[1, 2], [1, 2]], [[0], [1]], "all-common")
    >>> inst.n, inst.m, inst.weights
    (2, 2, (1, 1))
    """

    valuations: tuple
    groups: tuple
    valuation_class: str = GENERAL
    agents: tuple = None
    goods: tuple = None
    group_of: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rows = tuple(tuple(to_value(x) for x in row) for row in self.valuations)
        if not rows:
            raise InputError("instance needs at least one agent")
        m = len(rows[0])
        if any(len(r) != m for r in rows):
            raise InputError("valuation rows have different lengths")
        if any(x < 0 for r in rows for x in r):
            raise InputError("valuations must be non-negative")
        n = len(rows)

        groups = tuple(tuple(int(i) for i in grp) for grp in self.groups)
        if any(len(grp) == 0 for grp in groups):
            raise InputError("groups must be non-empty")
        owner = [-1] * n
        for k, grp in enumerate(groups):
            for i in grp:
                if not 0 <= i < n:
                    raise InputError(f"group {k} names unknown agent index {i}")
                if owner[i] != -1:
                    raise InputError(f"agent {i} appears in more than one group")
                owner[i] = k
        if -1 in owner:
            raise InputError(f"agent {owner.index(-1)} belongs to no group")

        if self.valuation_class not in VALUATION_CLASSES:
            raise InputError(f"unknown valuation class {self.valuation_class!r}")
        actual = infer_valuation_class(rows, groups)
        if self.valuation_class == ALL_COMMON and actual != ALL_COMMON:
            raise InputError("declared all-common but valuation rows differ")
        if self.valuation_class == GROUP_COMMON and actual == GENERAL:
            raise InputError("declared group-common but rows differ within a group")

        agents = tuple(self.agents) if self.agents is not None else tuple(f"p{i + 1}" for i in range(n))
        goods = tuple(self.goods) if self.goods is not None else tuple(f"g{j + 1}" for j in range(m))
        if len(agents) != n or len(set(agents)) != n:
            raise InputError("agent names must be unique and match the matrix")
        if len(goods) != m or len(set(goods)) != m:
            raise InputError("good names must be unique and match the matrix")

        object.__setattr__(self, "valuations", rows)
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "goods", goods)
        object.__setattr__(self, "group_of", tuple(owner))

    @property
    def n(self) -> int:
        return len(self.valuations)

    @property
    def m(self) -> int:
        return len(self.valuations[0])

    @property
    def num_groups(self) -> int:
        return len(self.groups)

    @property
    def weights(self) -> tuple:
        return tuple(len(grp) for grp in self.groups)

    def value(self, agent: int, good: int) -> Fraction:
        return self.valuations[agent][good]

    def with_groups(self, groups: Iterable[Iterable[int]]) -> "Instance":
        """Same agents, goods and valuations under a different partition.

        The class tag is kept when it still holds and downgraded otherwise
        (moving an agent between groups can break group-common valuations).
        """
        groups = tuple(tuple(sorted(g)) for g in groups)
        cls = self.valuation_class
        if cls == GROUP_COMMON and infer_valuation_class(self.valuations, groups) == GENERAL:
            cls = GENERAL
        return Instance(self.valuations, groups, cls, self.agents, self.goods)


@dataclass(frozen=True)
class Allocation:
    """One bundle of good indices per agent (bundles are stored sorted)."""

    bundles: tuple

    def __post_init__(self):
        object.__setattr__(self, "bundles", tuple(tuple(sorted(int(g) for g in b)) for b in self.bundles))

    @classmethod
    def from_owners(cls, owners: Sequence[int], n: int) -> "Allocation":
        """Build from ``owners[j]`` = agent receiving good ``j``."""
        bundles = [[] for _ in range(n)]
        for good, agent in enumerate(owners):
            bundles[agent].append(good)
        return cls(bundles)

    def validate(self, inst: Instance) -> None:
        """Raise :class:`InputError` unless the allocation is complete and disjoint."""
        if len(self.bundles) != inst.n:
            raise InputError(f"allocation has {len(self.bundles)} bundles for {inst.n} agents")
        seen = sorted(g for b in self.bundles for g in b)
        if seen != list(range(inst.m)):
            raise InputError("bundles must partition the goods")

    def group_bundles(self, inst: Instance) -> tuple:
        return tuple(tuple(sorted(g for i in grp for g in self.bundles[i])) for grp in inst.groups)


@dataclass(frozen=True)
class GroupAllocation:
    """Goods assigned to groups without a split among members."""

    group_bundles: tuple

    def __post_init__(self):
        object.__setattr__(self, "group_bundles",
                           tuple(tuple(sorted(int(g) for g in b)) for b in self.group_bundles))

    def validate(self, inst: Instance) -> None:
        if len(self.group_bundles) != inst.num_groups:
            raise InputError("one bundle per group required")
        seen = sorted(g for b in self.group_bundles for g in b)
        if seen != list(range(inst.m)):
            raise InputError("group bundles must partition the goods")


def _check_agent(inst: Instance, i: int) -> None:
    if not 0 <= i < inst.n:
        raise InputError(f"agent index {i} out of range")


def _check_group(inst: Instance, k: int) -> None:
    if not 0 <= k < inst.num_groups:
        raise InputError(f"group index {k} out of range")


def bundle_value(inst: Instance, viewer: int, bundle: Iterable[int]) -> Fraction:
    """Additive value of ``bundle`` to agent ``viewer``."""
    _check_agent(inst, viewer)
    row = inst.valuations[viewer]
    total = Fraction(0)
    for g in bundle:
        if not 0 <= g < inst.m:
            raise InputError(f"good index {g} out of range")
        total += row[g]
    return total


def group_bundle(alloc: Allocation, inst: Instance, k: int) -> tuple:
    """Union of the bundles of group ``k``'s members."""
    _check_group(inst, k)
    if isinstance(alloc, GroupAllocation):
        return alloc.group_bundles[k]
    return tuple(sorted(g for i in inst.groups[k] for g in alloc.bundles[i]))


def group_utility(alloc: Allocation, inst: Instance, k: int) -> Fraction:
    """Sum over members of each member's value for its own bundle.

    A :class:`GroupAllocation` has no member split, so it is only accepted when
    members share a valuation, in which case the split does not matter.
    """
    _check_group(inst, k)
    if isinstance(alloc, GroupAllocation):
        if inst.valuation_class == GENERAL:
            raise PreconditionError("group-level allocations need common valuations within groups")
        return bundle_value(inst, inst.groups[k][0], alloc.group_bundles[k])
    return sum((bundle_value(inst, i, alloc.bundles[i]) for i in inst.groups[k]), Fraction(0))


def averaged_group_view(alloc: Allocation, inst: Instance, viewer_group: int,
                        target_group: int) -> Fraction:
    """Mean over ``viewer_group``'s members of their value for ``target_group``'s bundle."""
    _check_group(inst, viewer_group)
    target = group_bundle(alloc, inst, target_group)
    members = inst.groups[viewer_group]
    total = sum((bundle_value(inst, i, target) for i in members), Fraction(0))
    return total / len(members)


# JSON

def instance_to_json(inst: Instance) -> dict:
    return {
        "agents": list(inst.agents),
        "goods": list(inst.goods),
        "groups": [[inst.agents[i] for i in grp] for grp in inst.groups],
        "valuations": [[value_to_json(x) for x in row] for row in inst.valuations],
        "class": inst.valuation_class,
    }


def instance_from_json(data: dict) -> Instance:
    try:
        agents = list(data["agents"])
        goods = list(data["goods"])
        index = {a: i for i, a in enumerate(agents)}
        groups = []
        for grp in data["groups"]:
            try:
                groups.append([index[a] for a in grp])
            except KeyError as exc:
                raise InputError(f"group names unknown agent {exc.args[0]!r}") from None
        for row in data["valuations"]:
            if any(isinstance(x, float) for x in row):
                raise InputError("values must be integers or decimal strings, not JSON floats")
        return Instance(data["valuations"], groups, data.get("class", GENERAL), agents, goods)
    except KeyError as exc:
        raise InputError(f"instance is missing field {exc.args[0]!r}") from None
    except TypeError as exc:
        raise InputError(f"malformed instance: {exc}") from None


def allocation_to_json(alloc: Allocation, inst: Instance) -> dict:
    return {"bundles": {inst.agents[i]: [inst.goods[g] for g in b] for i, b in enumerate(alloc.bundles)}}


def group_allocation_to_json(alloc: GroupAllocation, inst: Instance) -> dict:
    return {"group_bundles": [[inst.goods[g] for g in b] for b in alloc.group_bundles]}


def allocation_from_json(data: dict, inst: Instance) -> Allocation:
    """Parse an allocation file against ``inst``; the result is validated."""
    try:
        named = data["bundles"]
    except (KeyError, TypeError):
        raise InputError("allocation is missing field 'bundles'") from None
    unknown = set(named) - set(inst.agents)
    if unknown:
        raise InputError(f"allocation names unknown agents {sorted(unknown)}")
    good_index = {g: j for j, g in enumerate(inst.goods)}
    bundles = []
    for a in inst.agents:
        try:
            bundles.append([good_index[g] for g in named.get(a, [])])
        except KeyError as exc:
            raise InputError(f"allocation names unknown good {exc.args[0]!r}") from None
    alloc = Allocation(bundles)
    alloc.validate(inst)
    return alloc


def load_instance(path) -> Instance:
    with open(path) as fh:
        return instance_from_json(json.load(fh))


def load_allocation(path, inst: Instance) -> Allocation:
    with open(path) as fh:
        return allocation_from_json(json.load(fh), inst)
