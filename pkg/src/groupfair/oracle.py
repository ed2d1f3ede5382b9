"""
Exhaustive search over all ``n ** m`` complete allocations of a small instance.

Allocations are visited good-major: the owner of good 0 is the most
significant digit, so witnesses are reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .audit import GROUP_NOTIONS, check_notion, normalize_notion
from .harness import generate
from .model import GENERAL, Allocation, InputError, Instance, PreconditionError

DEFAULT_BUDGET = 10 ** 7
MODES = ("exists", "forall", "count")


class BudgetExceeded(InputError):
    def __init__(self, required: int, budget: int):
        super().__init__(f"enumeration needs {required} allocations, budget is {budget}")
        self.required = required
        self.budget = budget


@dataclass(frozen=True)
class Query:
    """Allocations that pass every ``required`` notion and fail every ``forbidden`` one.

    ``mode`` is ``"exists"`` (first match), ``"forall"`` (first non-match) or
    ``"count"``.
    """

    required: frozenset = frozenset()
    forbidden: frozenset = frozenset()
    mode: str = "exists"

    def __post_init__(self):
        if self.mode not in MODES:
            raise InputError(f"mode must be one of {MODES}")
        object.__setattr__(self, "required", frozenset(normalize_notion(t) for t in self.required))
        object.__setattr__(self, "forbidden", frozenset(normalize_notion(t) for t in self.forbidden))

    def matches(self, inst: Instance, alloc: Allocation) -> bool:
        # sorted so that cheap checks run in a stable order
        return (all(check_notion(inst, alloc, t) for t in sorted(self.required))
                and not any(check_notion(inst, alloc, t) for t in sorted(self.forbidden)))


@dataclass(frozen=True)
class OracleResult:
    """``verdict`` is ``"exists"``/``"none"`` for exists-queries, ``"holds"``/``"fails"``
    for forall-queries and ``"count"`` for counting. ``witness`` is the matching
    (exists) or non-matching (forall) allocation."""

    verdict: str
    allocations_examined: int
    witness: Optional[Allocation] = None
    count: Optional[int] = None


def all_allocations(n: int, m: int):
    for owners in itertools.product(range(n), repeat=m):
        yield Allocation.from_owners(owners, n)


def enumerate_allocations(inst: Instance, query: Query, budget: int = DEFAULT_BUDGET) -> OracleResult:
    """Decide ``query`` on ``inst`` by brute force.

    >>> inst = Instance([[1, 1]], [[0]], "all-common")
    >>> enumerate_allocations(inst, Query({"EF1"}, mode="count")).count
    1
    """
    if inst.valuation_class == GENERAL and (query.required | query.forbidden) & set(GROUP_NOTIONS):
        raise PreconditionError("WEF-family notions need all-common or group-common valuations")
    total = inst.n ** inst.m
    if total > budget:
        raise BudgetExceeded(total, budget)
    examined = 0
    count = 0
    for alloc in all_allocations(inst.n, inst.m):
        examined += 1
        hit = query.matches(inst, alloc)
        if query.mode == "exists" and hit:
            return OracleResult("exists", examined, alloc)
        if query.mode == "forall" and not hit:
            return OracleResult("fails", examined, alloc)
        count += hit
    if query.mode == "exists":
        return OracleResult("none", examined)
    if query.mode == "forall":
        return OracleResult("holds", examined)
    return OracleResult("count", examined, count=count)


@dataclass
class FalsifyResult:
    """First (instance, allocation) passing the premise but failing the conclusion."""

    trials_completed: int
    instance: Optional[Instance] = None
    allocation: Optional[Allocation] = None
    seed: Optional[int] = None
    failed_notion: Optional[str] = None
    partial: bool = False
    allocations_examined: int = 0

    @property
    def found(self) -> bool:
        return self.allocation is not None


def falsify_implication(family, premise, conclusion, trials: int,
                        budget: int = DEFAULT_BUDGET) -> FalsifyResult:
    """Search ``trials`` instances from ``family`` for a counterexample to
    "premise implies conclusion" (both are sets of notion tags).

    ``family`` is a :class:`groupfair.harness.GeneratorSpec`; trial ``t`` uses
    seed ``family.seed + t``. ``budget`` caps the total number of allocations
    examined; when it runs out the result is marked partial.
    """
    premise = sorted(normalize_notion(t) for t in premise)
    conclusion = sorted(normalize_notion(t) for t in conclusion)
    result = FalsifyResult(0)
    for t in range(trials):
        seed = family.seed + t
        inst = generate(family.with_seed(seed))
        size = inst.n ** inst.m
        if result.allocations_examined + size > budget:
            result.partial = True
            return result
        for alloc in all_allocations(inst.n, inst.m):
            result.allocations_examined += 1
            if not all(check_notion(inst, alloc, p) for p in premise):
                continue
            for c in conclusion:
                if not check_notion(inst, alloc, c):
                    result.instance, result.allocation = inst, alloc
                    result.seed, result.failed_notion = seed, c
                    result.trials_completed = t + 1
                    return result
        result.trials_completed = t + 1
    return result
