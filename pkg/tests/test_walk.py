from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stoplight.errors import ResourceLimitError, TruncationError, ValidationError
from stoplight.walk import (EXACT, FLOAT, PhaseKind, arrival_count, iter_joint, joint_dist,
                            make_params, max_dist, moment, phase_of, s_marginal, validate_params)

from conftest import enumerate_paths

probs = st.sampled_from([Fraction(1, 3), Fraction(1, 2), Fraction(2, 5), Fraction(1, 7), Fraction(3, 10)])


def test_two_steps_joint_table():
    t = joint_dist(make_params("1/3", 1), 2)
    assert t.entries() == {(0, 0): Fraction(2, 3), (0, 1): Fraction(2, 9), (1, 1): Fraction(1, 9)}


def test_max_law_four_steps():
    d = max_dist(joint_dist(make_params("1/3", 1), 4))
    assert d.values == [Fraction(4, 9), Fraction(14, 27), Fraction(1, 27)]


def test_mean_max_four_steps_fair():
    assert moment(max_dist(joint_dist(make_params("1/2", 1), 4)), 1) == Fraction(7, 8)


def test_phases():
    assert [phase_of(i, 2) for i in range(1, 6)] == [
        PhaseKind.ARRIVAL, PhaseKind.ARRIVAL, PhaseKind.DEPARTURE, PhaseKind.DEPARTURE,
        PhaseKind.ARRIVAL]
    assert arrival_count(7, 2) == 4


@pytest.mark.parametrize("ell", [1, 2, 3])
@pytest.mark.parametrize("n", [0, 1, 5, 9])
def test_matches_enumeration(ell, n):
    assert joint_dist(make_params("2/5", ell), n).entries() == enumerate_paths("2/5", ell, n)


@pytest.mark.parametrize("bad", [(2, 3, 1), (0, 1, 1), (1, 3, 0), (-1, 3, 1)])
def test_validation(bad):
    with pytest.raises(ValidationError):
        validate_params(*bad)


def test_validation_message():
    with pytest.raises(ValidationError, match="violates p<=q"):
        make_params("2/3", 1)
    with pytest.raises(ValidationError):
        make_params("1/3", 1, "decimal")


def test_exact_truncation_is_an_error():
    with pytest.raises(TruncationError):
        joint_dist(make_params("1/2", 1), 20, a_cap=2)


def test_float_truncation_tracks_lost_mass():
    t = joint_dist(make_params("1/2", 1, FLOAT), 40, a_cap=3)
    assert t.lost_mass > 0
    assert t.total() + t.lost_mass == pytest.approx(1.0, abs=1e-14)


def test_resource_guard():
    with pytest.raises(ResourceLimitError):
        next(iter_joint(make_params("1/2", 1), 20_000))


@given(p=probs, ell=st.integers(1, 4), n=st.integers(0, 30))
def test_mass_and_support(p, ell, n):
    t = joint_dist(make_params(p, ell), n)
    assert t.total() == 1
    bound = arrival_count(n, ell)
    for (x, a), v in t.entries().items():
        assert 0 <= x <= a <= bound and v > 0


@given(p=probs, ell=st.integers(1, 3), n=st.integers(1, 30), level=st.integers(0, 10))
def test_max_tail_is_monotone_in_n(p, ell, n, level):
    prev, cur = (max_dist(joint_dist(make_params(p, ell), k)) for k in (n - 1, n))
    tail = lambda d: sum(d.values[level:], Fraction(0))
    assert tail(cur) >= tail(prev)


@given(p=probs, ell=st.integers(1, 3), n=st.integers(0, 60))
def test_float_agrees_with_exact(p, ell, n):
    ex = joint_dist(make_params(p, ell, EXACT), n)
    fl = joint_dist(make_params(p, ell, FLOAT), n)
    assert fl.lost_mass == 0
    a = np.array(ex.grid, dtype=float)
    assert np.max(np.abs(a - fl.grid[: a.shape[0], : a.shape[1]])) < 1e-13


def test_marginals_sum_to_one():
    t = joint_dist(make_params("1/3", 2), 11)
    assert sum(s_marginal(t).values) == 1 == sum(max_dist(t).values)
