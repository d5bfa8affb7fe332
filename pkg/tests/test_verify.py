import pytest

from hilbert_geom.verify import SUITE_NAMES, first_counterexample, run_suite

SMALL = {"metric": 60, "duality": 4, "faces": 0, "projection": 200, "simplex": 300, "group": 20}


@pytest.mark.parametrize("suite", SUITE_NAMES)
def test_suite_passes_small(suite):
    rep = run_suite(suite, samples=SMALL[suite], seed=7)
    assert rep["passed"], first_counterexample(rep)
    assert rep["suite"] == suite and rep["seed"] == 7
    assert all(c["failures"] == 0 for c in rep["checks"])


def test_tight_tolerance_fails_with_witness():
    rep = run_suite("metric", samples=30, seed=1, tol=1e-20)
    assert not rep["passed"]
    ce = first_counterexample(rep)
    assert ce["counterexample"] is not None


def test_jobs_do_not_change_report():
    one = run_suite("metric", samples=300, seed=5, jobs=1)
    three = run_suite("metric", samples=300, seed=5, jobs=3)
    assert one == three


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope")
