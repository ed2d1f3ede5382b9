from fractions import Fraction

import pytest
from hypothesis import given

from groupfair import Instance, PreconditionError, run_iwrr
from groupfair.model import InputError
from groupfair.stability import (
    NEW_GROUP,
    Deviation,
    check_group_epsilon_stability,
    deviated_instance,
    deviations,
)

from conftest import instances, random_instances


def test_single_agent_vacuous():
    inst = Instance([[1, 2]], [[0]])
    verdict = check_group_epsilon_stability(inst, "iwrr")
    assert verdict.passed and verdict.identity_rerun_ok
    assert [(e.agent, e.target) for e in verdict.ledger] == [(0, NEW_GROUP)]


def test_deviated_partition():
    inst = Instance([[1] * 3] * 4, [[0, 1], [2], [3]], "all-common")
    moved = deviated_instance(inst, Deviation(2, 0))
    assert moved.groups == ((0, 1, 2), (3,))
    alone = deviated_instance(inst, Deviation(0, NEW_GROUP))
    assert alone.groups == ((1,), (2,), (3,), (0,))
    with pytest.raises(InputError):
        deviated_instance(inst, Deviation(0, 0))


def test_deviation_downgrades_group_common():
    inst = Instance([[1, 2], [1, 2], [5, 0]], [[0, 1], [2]], "group-common")
    moved = deviated_instance(inst, Deviation(2, 0))
    assert moved.valuation_class == "general"
    assert moved.weights == (3,)


@given(instances())
def test_deviation_count_and_ledger_soundness(inst):
    verdict = check_group_epsilon_stability(inst, "iwrr")
    assert len(verdict.ledger) == inst.n * inst.num_groups == len(deviations(inst))
    assert verdict.identity_rerun_ok
    base, _ = run_iwrr(inst)
    for e in verdict.ledger:
        row = inst.valuations[e.agent]
        assert e.original_value == sum((row[g] for g in base.bundles[e.agent]), Fraction(0))
        alloc, _ = run_iwrr(deviated_instance(inst, Deviation(e.agent, e.target)))
        got = alloc.bundles[e.agent]
        assert e.deviated_value == sum((row[g] for g in got), Fraction(0))
        best = max((row[g] for g in got), default=0)
        assert e.passed == (e.original_value >= e.deviated_value - best)


def test_iwrr_gain_from_moving_ahead_in_the_group_order():
    # Four singleton groups; agent 3 picks last. Joining group 0 makes its new
    # group win the opening tie, so it takes g1 (10) and later g2 (5), while
    # staying put leaves it only g3 (4): 15 - 10 > 4.
    inst = Instance([[5, 4, 4, 6, 7], [9, 10, 3, 3, 7], [1, 10, 5, 3, 8], [1, 10, 5, 4, 9]],
                    [[0], [1], [2], [3]])
    verdict = check_group_epsilon_stability(inst, "iwrr")
    assert not verdict.passed and verdict.identity_rerun_ok
    (bad,) = verdict.violations()
    assert (bad.agent, bad.target, bad.original_value, bad.deviated_value) == (3, 0, 4, 15)
    assert run_iwrr(deviated_instance(inst, Deviation(3, 0)))[0].bundles[3] == (1, 2)


def test_iwrr_stability_rate_group_common():
    # violations exist but are rare on uniformly random instances
    insts = random_instances("group-common", 300, seed=61, n=(1, 6), m=(1, 12))
    failed = sum(not check_group_epsilon_stability(inst, "iwrr").passed for inst in insts)
    assert failed == 1


@given(instances(classes=("all-common",)))
def test_sm_iwrr_always_stable(inst):
    # a deviation only changes which SM bundle an agent receives, and SM is EFX
    assert check_group_epsilon_stability(inst, "sm_iwrr").passed


def test_sm_iwrr_stable_all_common():
    for inst in random_instances("all-common", 300, seed=71, n=(1, 6), m=(1, 12)):
        assert check_group_epsilon_stability(inst, "sm_iwrr").passed


def test_sm_iwrr_needs_all_common():
    inst = Instance([[1, 2], [2, 1]], [[0], [1]])
    with pytest.raises(PreconditionError):
        check_group_epsilon_stability(inst, "sm-iwrr")
    with pytest.raises(InputError):
        check_group_epsilon_stability(inst, "greedy")


def test_ledger_jsonl():
    inst = Instance([[3, 1]] * 2, [[0], [1]], "all-common")
    lines = check_group_epsilon_stability(inst, "iwrr").ledger_jsonl(inst).splitlines()
    assert len(lines) == 4
    assert lines[0].startswith('{"agent": "p1", "target": "new"')
