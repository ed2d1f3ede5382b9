import csv
import io
import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from groupfair import InputError
from groupfair.harness import (
    GeneratorSpec,
    SplitMix64,
    certify_batch,
    certify_instance,
    gamma_frontier,
    generate,
    runtime_ladder,
)
from groupfair.model import infer_valuation_class, instance_to_json


def test_splitmix64_reference_value():
    rng = SplitMix64(0)
    assert rng.next_u64() == 16294208416658607535


@given(st.integers(0, 2 ** 64 - 1), st.integers(0, 50), st.integers(0, 50))
def test_randint_in_range(seed, a, b):
    lo, hi = min(a, b), max(a, b)
    rng = SplitMix64(seed)
    assert all(lo <= rng.randint(lo, hi) <= hi for _ in range(20))


def test_randint_is_roughly_uniform():
    rng = SplitMix64(42)
    counts = [0] * 6
    for _ in range(6000):
        counts[rng.randint(0, 5)] += 1
    assert all(800 < c < 1200 for c in counts)


@pytest.mark.parametrize("cls", ["all-common", "group-common", "general"])
def test_generate_is_deterministic_and_respects_class(cls):
    spec = GeneratorSpec(n=(1, 8), m=(0, 20), num_groups=(1, 4), valuation_class=cls, seed=3)
    for s in range(50):
        a, b = generate(spec.with_seed(s)), generate(spec.with_seed(s))
        assert instance_to_json(a) == instance_to_json(b)
        assert 1 <= a.n <= 8 and 0 <= a.m <= 20 and 1 <= a.num_groups <= min(4, a.n)
        order = ["all-common", "group-common", "general"]
        assert order.index(infer_valuation_class(a.valuations, a.groups)) <= order.index(cls)


def test_partitions_and_distributions():
    inst = generate(GeneratorSpec(n=6, m=4, num_groups=3, partition="balanced"))
    assert inst.groups == ((0, 3), (1, 4), (2, 5))
    inst = generate(GeneratorSpec(n=6, m=4, num_groups=2, partition=(1, 5)))
    assert inst.weights == (1, 5)
    inst = generate(GeneratorSpec(n=3, m=200, distribution=("zipf", 1.5, 10)))
    values = [int(v) for row in inst.valuations for v in row]
    assert min(values) >= 1 and max(values) <= 10
    assert values.count(1) > values.count(10)
    with pytest.raises(InputError):
        generate(GeneratorSpec(n=6, num_groups=2, partition=(2, 2)))
    with pytest.raises(InputError):
        generate(GeneratorSpec(valuation_class="weird"))
    with pytest.raises(InputError):
        generate(GeneratorSpec(n=2, num_groups=3))


def test_certify_batch_report():
    spec = GeneratorSpec(n=(2, 6), m=(1, 12), num_groups=(1, 3), valuation_class="all-common", seed=5)
    report = certify_batch(spec, 30)
    assert report.ok and len(report.outcomes) == 30
    data = report.to_json()
    assert data["count"] == 30 and data["failures"] == []
    assert set(data["pass_rates"]) >= {"sm_iwrr.efx", "sm_iwrr.wef1", "weighted_greedy.wefx",
                                       "iwrr.trace_structure", "sm_iwrr.representative_bound"}
    rows = list(csv.DictReader(io.StringIO(report.to_csv())))
    assert rows and all(r["pass"] == "1" for r in rows)
    again = certify_batch(spec, 30).to_json()
    data.pop("timing_seconds"), again.pop("timing_seconds")
    assert json.dumps(data) == json.dumps(again)


def test_certify_batch_empty():
    report = certify_batch(GeneratorSpec(), 0)
    assert report.ok and report.to_json()["count"] == 0 and report.max_gamma is None


def test_certify_instance_general_uses_exante():
    props, gamma, _ = certify_instance(generate(GeneratorSpec(seed=2)))
    assert "iwrr.exante_wef1@3" in props and "iwrr.wef1" not in props
    assert all(props.values()) and gamma <= 3


def test_gamma_frontier():
    worst, seed = gamma_frontier(GeneratorSpec(n=(2, 6), m=(2, 12), num_groups=(2, 3)), 100)
    assert isinstance(worst, Fraction) and 0 <= worst <= 3
    assert 0 <= seed < 100
    assert gamma_frontier(GeneratorSpec(), 0) == (None, None)


def test_runtime_ladder_shape():
    out = runtime_ladder(ms=(16, 32, 64), n=4, num_groups=2, repeats=1)
    assert [r["m"] for r in out["rows"]] == [16, 32, 64]
    assert set(out["slopes"]) == {"sm_iwrr", "iwrr"}


def test_reproduction_bundle(tmp_path, monkeypatch):
    import groupfair.harness as h
    real = h.certify_instance

    def broken(inst, timing=None):
        props, gamma, artifacts = real(inst, timing)
        props["iwrr.ef1"] = False
        return props, gamma, artifacts

    monkeypatch.setattr(h, "certify_instance", broken)
    report = h.certify_batch(GeneratorSpec(seed=9), 2, repro_dir=tmp_path)
    assert report.failures == [(9, "iwrr.ef1"), (10, "iwrr.ef1")]
    files = sorted(p.name for p in (tmp_path / "seed_9").iterdir())
    assert "instance.json" in files and "iwrr.trace.jsonl" in files
