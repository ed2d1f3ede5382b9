from fractions import Fraction

import pytest

from groupfair.fixtures import SWEEP, build_all, certify, load_fixtures

# certifications that need the large value strictly above 2
NEEDS_C_ABOVE_2 = {
    "prop2 has no EF1 and WEFX allocation",
    "prop3a has an EFX allocation that is not WEF1",
    "prop3a one-good-each allocation is EFX but not WEF1",
    "prop3a has an EF1 allocation that is not WEF1",
}


def test_shipped_fixtures_certify():
    results = certify(load_fixtures())
    assert len(results) == 10
    assert all(r.ok for r in results), [r.line() for r in results if not r.ok]


@pytest.mark.parametrize("c", [c for c in SWEEP if c > 2] + [Fraction(201, 100)])
def test_sweep_above_threshold(c):
    assert all(r.ok for r in certify(build_all(c)))


def test_at_threshold_exactly_the_strict_claims_fail():
    failed = {r.name for r in certify(build_all(2)) if not r.ok}
    assert failed == NEEDS_C_ABOVE_2


def test_prop2_first_ef1_wefx_at_threshold():
    from groupfair.oracle import Query, enumerate_allocations
    res = enumerate_allocations(build_all(2)["prop2"], Query({"EF1", "WEFX"}))
    assert (res.verdict, res.allocations_examined) == ("exists", 28)
    # one good each: the second group sees (2 + 1 - 1) / 2 = 1 against its own 2 / 2
    assert res.witness.bundles == ((0,), (1,), (2,), (3,))


def test_certification_lines():
    line = certify(build_all())[0].line()
    assert line.startswith("CERTIFIED example_s2")
