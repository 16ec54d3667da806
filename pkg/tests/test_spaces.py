from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from klab.spaces import GridFunction, Space, SpectrumPoint, grid_nodes, lattice_quotient_seminorm, midrange_seminorm, node_count, sup_norm

finite = st.floats(-100, 100, allow_nan=False)


def test_node_counts():
    assert node_count(Space.INTERVAL, 8) == 9
    assert node_count(Space.CIRCLE, 8) == 8
    assert node_count(Space.POINT, 8) == 1
    assert grid_nodes(Space.CIRCLE, 4).tolist() == [0.0, 0.25, 0.5, 0.75]


def test_circle_point_reduced():
    assert SpectrumPoint.circle(Fraction(5, 4)).coordinate == Fraction(1, 4)
    with pytest.raises(ValueError):
        SpectrumPoint.interval(Fraction(3, 2))


def test_sup_norm_sine_against_dense_resampling():
    f = GridFunction.from_callable(Space.CIRCLE, 1024, lambda x: np.sin(2 * np.pi * x))
    dense = f(np.linspace(0, 1, 10**6, endpoint=False))
    assert abs(sup_norm(f) - 1.0) <= 1e-4
    assert abs(np.abs(dense).max() - 1.0) <= 1e-4


def test_midrange_of_ramp():
    assert midrange_seminorm(GridFunction.from_callable(Space.INTERVAL, 64, lambda t: t)) == 0.5


def test_midrange_of_sine_against_shift_search():
    f = GridFunction.from_callable(Space.CIRCLE, 1024, lambda x: np.sin(2 * np.pi * x))
    shifts = np.linspace(-1, 1, 10**5)
    brute = min(np.abs(f.samples - c).max() for c in shifts[::50])
    assert abs(midrange_seminorm(f) - 1.0) <= 1e-4
    assert brute >= midrange_seminorm(f) - 1e-12


def test_lattice_seminorm_ramp_quarter():
    f = GridFunction.from_callable(Space.INTERVAL, 64, lambda t: t)
    brute = min(np.abs(f.samples - c / 4).max() for c in range(-8, 9))
    assert abs(lattice_quotient_seminorm(f, Fraction(1, 4)) - brute) <= 1e-12


@given(arrays(np.float64, st.integers(2, 40), elements=finite), st.sampled_from([Fraction(1, 4), Fraction(1, 3), Fraction(1)]))
def test_lattice_seminorm_brute_force(samples, step):
    f = GridFunction(Space.CIRCLE, samples)
    s = float(step)
    mid = 0.5 * (samples.max() + samples.min())
    ks = np.arange(np.floor(mid / s) - 3, np.ceil(mid / s) + 4)
    brute = min(np.abs(samples - k * s).max() for k in ks)
    assert abs(lattice_quotient_seminorm(f, step) - brute) <= 1e-9
    assert lattice_quotient_seminorm(f, step) >= midrange_seminorm(f) - 1e-12


@given(arrays(np.float64, st.integers(2, 30), elements=finite), finite)
def test_midrange_shift_invariant(samples, c):
    f = GridFunction(Space.CIRCLE, samples)
    assert abs(midrange_seminorm(f + c) - midrange_seminorm(f)) <= 1e-9


@given(arrays(np.float64, 17, elements=finite), st.fractions(0, 1))
def test_exact_evaluation_matches_interp(samples, t):
    f = GridFunction(Space.INTERVAL, samples)
    assert abs(f.at(t) - float(f(float(t)))) <= 1e-9 * (1 + np.abs(samples).max())


def test_grid_function_is_immutable():
    f = GridFunction.zeros(Space.CIRCLE, 8)
    with pytest.raises(AttributeError):
        f.samples = np.ones(8)


@settings(max_examples=50)
@given(arrays(np.float64, st.integers(3, 30), elements=finite))
def test_lipschitz_is_max_slope(samples):
    f = GridFunction(Space.INTERVAL, samples)
    n = len(samples) - 1
    assert f.lipschitz() == pytest.approx(np.abs(np.diff(samples)).max() * n)
