import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from groupfair import (
    Allocation,
    GroupAllocation,
    InputError,
    Instance,
    PreconditionError,
    averaged_group_view,
    bundle_value,
    group_bundle,
    group_utility,
)
from groupfair.model import (
    allocation_from_json,
    allocation_to_json,
    instance_from_json,
    instance_to_json,
    to_value,
)

from conftest import instance_and_allocation, instances


def test_bundle_value_example_two_goods(s2_example):
    inst, _ = s2_example
    assert bundle_value(inst, 0, [1, 2]) == 2


def test_bundle_value_empty():
    inst = Instance([[3, 4]], [[0]])
    assert bundle_value(inst, 0, []) == 0


def test_bundle_value_matches_matrix_sum():
    inst = Instance([[5, 1, 7, 2], [0, 3, 3, 9], [4, 4, 0, 1]], [[0, 1], [2]])
    assert bundle_value(inst, 0, [0, 2]) == 5 + 7


def test_bundle_value_bad_index():
    inst = Instance([[1, 2]], [[0]])
    with pytest.raises(InputError):
        bundle_value(inst, 0, [2])
    with pytest.raises(InputError):
        bundle_value(inst, 1, [0])


def test_group_bundle_and_utility_example(s2_example):
    inst, alloc = s2_example
    assert len(group_bundle(alloc, inst, 1)) == 4
    assert group_utility(alloc, inst, 1) == 4
    assert averaged_group_view(alloc, inst, 0, 1) == 4


def test_group_bundle_singleton_group():
    inst = Instance([[1, 2, 3]] * 2, [[0], [1]], "all-common")
    alloc = Allocation([[2], [0, 1]])
    assert group_bundle(alloc, inst, 1) == (0, 1)


def test_group_utility_empty_bundles():
    inst = Instance([[]] * 3, [[0, 2], [1]])
    assert group_utility(Allocation([[], [], []]), inst, 0) == 0


def test_group_index_errors(s2_example):
    inst, alloc = s2_example
    for fn in (group_bundle, group_utility):
        with pytest.raises(InputError):
            fn(alloc, inst, 2)
    with pytest.raises(InputError):
        averaged_group_view(alloc, inst, 0, 5)


def test_group_utility_is_own_bundles_not_group_bundle():
    # agent 0 likes what agent 1 holds; only own-bundle values count
    inst = Instance([[1, 10], [10, 1]], [[0, 1]])
    alloc = Allocation([[0], [1]])
    assert group_utility(alloc, inst, 0) == 2


def test_averaged_group_view_double_sum():
    inst = Instance([[1, 2, 3, 4], [4, 0, 0, 8], [5, 5, 5, 5]], [[0, 1], [2]])
    alloc = Allocation([[0], [1], [2, 3]])
    expected = Fraction((3 + 4) + (0 + 8), 2)
    assert averaged_group_view(alloc, inst, 0, 1) == expected
    assert averaged_group_view(alloc, inst, 1, 0) == 10


@given(instance_and_allocation())
def test_group_union_and_utility_properties(data):
    inst, alloc = data
    for k, grp in enumerate(inst.groups):
        union = set()
        for i in grp:
            union |= set(alloc.bundles[i])
        assert set(group_bundle(alloc, inst, k)) == union
        own = sum(bundle_value(inst, i, alloc.bundles[i]) for i in grp)
        assert group_utility(alloc, inst, k) == own


@given(instance_and_allocation(classes=("all-common", "group-common")))
def test_common_rows_collapse(data):
    inst, alloc = data
    for k, grp in enumerate(inst.groups):
        rep = grp[-1]
        assert group_utility(alloc, inst, k) == bundle_value(inst, rep, group_bundle(alloc, inst, k))
        for k2 in range(inst.num_groups):
            assert averaged_group_view(alloc, inst, k, k2) == bundle_value(inst, rep, group_bundle(alloc, inst, k2))


@given(instances(), st.data())
def test_additivity(inst, data):
    if inst.m == 0:
        return
    i = data.draw(st.integers(0, inst.n - 1))
    g = data.draw(st.integers(0, inst.m - 1))
    rest = data.draw(st.sets(st.integers(0, inst.m - 1)))
    rest.discard(g)
    assert bundle_value(inst, i, rest | {g}) == bundle_value(inst, i, rest) + inst.value(i, g)


def test_instance_validation():
    with pytest.raises(InputError):
        Instance([[1, -1]], [[0]])
    with pytest.raises(InputError):
        Instance([[1], [1]], [[0]])  # agent 1 missing
    with pytest.raises(InputError):
        Instance([[1], [1]], [[0, 1], [1]])
    with pytest.raises(InputError):
        Instance([[1], [1]], [[0, 1], []])
    with pytest.raises(InputError):
        Instance([[1], [2]], [[0, 1]], "all-common")
    with pytest.raises(InputError):
        Instance([[1], [2]], [[0, 1]], "group-common")
    with pytest.raises(InputError):
        Instance([[1], [2]], [[0], [1]], "bogus")
    Instance([[1], [2]], [[0], [1]], "group-common")


def test_weights_are_group_sizes():
    inst = Instance([[1]] * 6, [[0, 3, 5], [1], [2, 4]])
    assert inst.weights == (3, 1, 2)
    assert inst.group_of == (0, 1, 2, 0, 2, 0)


def test_exact_values():
    assert to_value("0.1") + to_value("0.2") == to_value("0.3")
    assert to_value(0.1) == Fraction(1, 10)
    assert to_value("2/6") == Fraction(1, 3)
    with pytest.raises(InputError):
        to_value("abc")
    with pytest.raises(InputError):
        to_value(True)


def test_allocation_validation():
    inst = Instance([[1, 1, 1]] * 2, [[0, 1]])
    Allocation([[0, 2], [1]]).validate(inst)
    with pytest.raises(InputError):
        Allocation([[0], [1]]).validate(inst)
    with pytest.raises(InputError):
        Allocation([[0, 1], [1, 2]]).validate(inst)
    with pytest.raises(InputError):
        GroupAllocation([[0, 1]]).validate(Instance([[1, 1]] * 2, [[0], [1]]))


def test_group_allocation_needs_common_rows():
    inst = Instance([[1, 2], [2, 1]], [[0, 1]])
    with pytest.raises(PreconditionError):
        group_utility(GroupAllocation([[0, 1]]), inst, 0)


def test_with_groups_downgrades_class():
    inst = Instance([[1, 2], [1, 2], [3, 3]], [[0, 1], [2]], "group-common")
    moved = inst.with_groups([[0], [1, 2]])
    assert moved.valuation_class == "general"
    assert inst.with_groups([[0], [1], [2]]).valuation_class == "group-common"


def test_json_round_trip(s2_example):
    inst, alloc = s2_example
    inst2 = instance_from_json(json.loads(json.dumps(instance_to_json(inst))))
    assert inst2 == inst
    alloc2 = allocation_from_json(json.loads(json.dumps(allocation_to_json(alloc, inst))), inst)
    assert alloc2 == alloc


def test_json_decimal_strings_and_rationals():
    data = {"agents": ["a", "b"], "goods": ["x", "y"], "groups": [["a"], ["b"]],
            "valuations": [["1.5", 2], ["1/3", 0]], "class": "general"}
    inst = instance_from_json(data)
    assert inst.valuations[0][0] == Fraction(3, 2)
    assert instance_to_json(inst)["valuations"][1][0] == "1/3"
    data["valuations"][0][0] = 1.5
    with pytest.raises(InputError):
        instance_from_json(data)


def test_json_errors():
    inst = Instance([[1, 1]], [[0]])
    with pytest.raises(InputError):
        allocation_from_json({"bundles": {"p9": []}}, inst)
    with pytest.raises(InputError):
        allocation_from_json({"bundles": {"p1": ["g1"]}}, inst)
    with pytest.raises(InputError):
        instance_from_json({"agents": ["a"]})
