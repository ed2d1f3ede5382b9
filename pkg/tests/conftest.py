import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from groupfair import Allocation, Instance
from groupfair.harness import GeneratorSpec, generate

settings.register_profile("default", max_examples=150, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

CLASSES = ("all-common", "group-common", "general")


@st.composite
def instances(draw, classes=CLASSES, max_n=5, max_m=7, max_groups=3, max_value=20):
    n = draw(st.integers(1, max_n))
    ell = draw(st.integers(1, min(max_groups, n)))
    m = draw(st.integers(0, max_m))
    owner = [k for k in range(ell)] + draw(st.lists(st.integers(0, ell - 1), min_size=n - ell, max_size=n - ell))
    owner = draw(st.permutations(owner))
    groups = [[i for i in range(n) if owner[i] == k] for k in range(ell)]
    cls = draw(st.sampled_from(classes))
    row = st.lists(st.integers(0, max_value), min_size=m, max_size=m)
    if cls == "all-common":
        r = draw(row)
        rows = [r] * n
    elif cls == "group-common":
        per_group = [draw(row) for _ in range(ell)]
        rows = [per_group[owner[i]] for i in range(n)]
    else:
        rows = [draw(row) for _ in range(n)]
    return Instance(rows, groups, cls)


@st.composite
def instance_and_allocation(draw, **kw):
    inst = draw(instances(**kw))
    owners = draw(st.lists(st.integers(0, inst.n - 1), min_size=inst.m, max_size=inst.m))
    return inst, Allocation.from_owners(owners, inst.n)


def random_instances(cls, count, seed=0, n=(1, 8), m=(1, 20), groups=(1, 4)):
    spec = GeneratorSpec(n=n, m=m, num_groups=groups, valuation_class=cls, seed=seed)
    return [generate(spec.with_seed(seed + t)) for t in range(count)]


@pytest.fixture
def s2_example():
    inst = Instance([[1] * 5] * 3, [[0], [1, 2]], "all-common")
    return inst, Allocation([[0], [1, 2], [3, 4]])


# acceptance criteria report: one line per criterion, printed after the run

def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
