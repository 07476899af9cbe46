import json

import numpy as np
import pytest

from gtcorners.errors import ResourceError
from gtcorners.verify import (
    SUITES,
    check_discrete,
    corner_identity_rhs,
    default_spectrum,
    enumerate_patterns,
    run_suite,
)
from gtcorners.density import hciz


def test_default_spectrum():
    np.testing.assert_array_equal(default_spectrum(4), [0, 1, 3, 7])
    assert default_spectrum(8).size == 8 and np.all(np.diff(default_spectrum(8)) > 0)
    with pytest.raises(ResourceError):
        default_spectrum(9)


def test_enumerate_patterns():
    pats = list(enumerate_patterns((0, 1, 2)))
    assert len(pats) == 8
    assert all(len(p) == 2 and len(p[0]) == 2 and len(p[1]) == 1 for p in pats)


def test_corner_identity_two_by_two():
    x = np.array([0.0, 1.5])
    zt = np.array([0.7 - 0.2j])
    assert corner_identity_rhs(x, zt) == pytest.approx(hciz(x, [zt[0], 0.0]), rel=1e-12)
    with pytest.raises(ValueError):
        corner_identity_rhs([1.0], zt)


@pytest.mark.parametrize("suite", ["splines", "kernel", "volume", "recurrence", "discrete"])
def test_fast_suites_pass(suite):
    report = run_suite(suite, n=4, seed=3, samples=20_000)
    assert report["pass"], [c for c in report["checks"] if not c["pass"]]
    assert report["suite"] == suite and report["params"]["n"] == 4
    json.dumps(report)


def test_theorem_and_hciz_suites_small():
    for suite in ("theorem", "hciz"):
        report = run_suite(suite, n=3, seed=11, samples=20_000)
        assert report["pass"], [c for c in report["checks"] if not c["pass"]]


def test_all_runs_every_suite():
    report = run_suite("all", n=3, seed=2, samples=10_000)
    assert report["pass"]
    names = " ".join(c["test"] for c in report["checks"])
    for word in ("spline", "kernel", "K=1", "volume", "HCIZ", "composition", "scheme"):
        assert word in names
    assert set(SUITES) >= {"splines", "discrete"}


def test_budgets():
    with pytest.raises(ResourceError):
        run_suite("discrete", n=6)
    with pytest.raises(ResourceError):
        run_suite("kernel", n=9)
    with pytest.raises(ValueError):
        run_suite("bogus")


def test_discrete_check_detects_nothing_wrong_at_small_sizes():
    checks = check_discrete(max_n=3, max_coord=3)
    assert all(c.passed for c in checks)
    assert checks[-1].detail["differences"][0] > checks[-1].detail["differences"][-1]
