import math

import mpmath
import pytest

from stoplight.asymptotics import (catalan_constant, convergence_report, limit_constants,
                                   sech_sum)
from stoplight.errors import ResourceLimitError, ValidationError


def test_catalan_against_mpmath():
    assert catalan_constant() == pytest.approx(float(mpmath.catalan), abs=1e-15)


def test_limit_constants():
    first, second = limit_constants()
    assert first == pytest.approx(0.62665707, abs=1e-8)
    assert second == pytest.approx(0.45798280, abs=1e-8)


def test_sech_sum():
    assert sech_sum(0.01) == pytest.approx(math.pi / 2 - 0.005, abs=1e-4)
    assert sech_sum(10) == pytest.approx(10 / math.cosh(10) + 10 / math.cosh(20), rel=1e-8)
    assert sech_sum(0.1, 0.2, 0.2) == pytest.approx(0.1 / math.cosh(0.2))
    assert sech_sum(0.1, 5, 1) == 0.0
    with pytest.raises(ValidationError):
        sech_sum(0)


def test_sech_sum_approaches_half_pi():
    errs = [abs(sech_sum(t) + t / 2 - math.pi / 2) for t in (0.5, 0.1, 0.02)]
    assert errs[0] < 1e-3 and errs[2] < 1e-10


def test_dp_report_small_n():
    r = convergence_report("1/2", 1, [400, 4, 50])
    assert [row.n for row in r.rows] == [4, 50, 400]
    assert r.rows[0].estimate_first == pytest.approx(0.875 / 2)
    assert r.shrinking()
    assert "not a proof" in r.note


def test_report_requires_fair_coin_for_deltas():
    r = convergence_report("1/3", 1, [10])
    assert not r.comparable
    with pytest.raises(ValidationError):
        r.deltas()
    assert r.to_rows()[0]["rel_delta_first"] is None


def test_mc_report_has_stderr():
    r = convergence_report("1/2", 2, [200], method="mc", reps=2048, seed=3)
    assert r.rows[0].stderr_first > 0


def test_dp_refuses_huge_n():
    with pytest.raises(ResourceLimitError):
        convergence_report("1/2", 1, [10 ** 6])
