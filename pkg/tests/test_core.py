import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lowdim_saddle.core import (
    BallDomain,
    BoxDomain,
    CallCounter,
    FirstOrderOracle,
    ParameterError,
    RunReport,
    SaddleConstants,
    SimplexDomain,
    delta_oracle_gap_bound,
    project_box,
    quadratic_prox,
    spectral_norm,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("delta,L,expected", [(0.0, 5.0, 0.0), (2.0, 1.0, 1.0), (0.08, 4.0, 0.4)])
def test_gap_bound_examples(delta, L, expected):
    assert delta_oracle_gap_bound(delta, L) == pytest.approx(expected)


def test_gap_bound_rejects_bad_L():
    with pytest.raises(ParameterError):
        delta_oracle_gap_bound(1.0, 0.0)


@given(st.floats(0, 1e6), st.floats(0, 1e6), st.floats(1e-6, 1e6), st.floats(1e-6, 1e6))
def test_gap_bound_monotone(d1, d2, L1, L2):
    lo_d, hi_d = sorted((d1, d2))
    lo_L, hi_L = sorted((L1, L2))
    assert delta_oracle_gap_bound(lo_d, lo_L) <= delta_oracle_gap_bound(hi_d, lo_L)
    assert delta_oracle_gap_bound(lo_d, lo_L) <= delta_oracle_gap_bound(lo_d, hi_L)


@pytest.mark.parametrize(
    "x,lo,hi,expected",
    [([2, -1], [0, 0], [1, 1], [1, 0]), ([0.5, 0.5], [0, 0], [1, 1], [0.5, 0.5]), ([-3], [-1], [4], [-1])],
)
def test_project_box_examples(x, lo, hi, expected):
    Q = BoxDomain(np.array(lo, float), np.array(hi, float))
    assert np.allclose(project_box(np.array(x, float), Q), expected)


def test_project_box_dimension_mismatch():
    with pytest.raises(ValueError):
        project_box(np.zeros(3), BoxDomain(np.zeros(2), np.ones(2)))


@given(arrays(float, 3, elements=finite), arrays(float, 3, elements=finite))
def test_box_projection_is_nearest_point(x, probe):
    Q = BoxDomain(np.array([-1.0, 0.0, 2.0]), np.array([1.0, 0.5, 5.0]))
    p = Q.project(x)
    assert Q.contains(p)
    q = Q.project(probe)
    assert np.linalg.norm(x - p) <= np.linalg.norm(x - q) + 1e-9


@given(arrays(float, 4, elements=finite))
def test_ball_projection(x):
    B = BallDomain(np.ones(4), 2.0)
    p = B.project(x)
    assert B.contains(p, tol=1e-9)
    if B.contains(x):
        assert np.allclose(p, x)


@given(arrays(float, 3, elements=st.floats(-10, 10)))
def test_simplex_projection_feasible_and_optimal(x):
    S = SimplexDomain(3, 2.0)
    p = S.project(x)
    assert S.contains(p, tol=1e-9)
    # optimality: the projection beats the vertices and the center
    for v in [np.zeros(3), 2.0 * np.eye(3)[0], 2.0 * np.eye(3)[1], 2.0 * np.eye(3)[2], S.inner_center()]:
        assert np.linalg.norm(x - p) <= np.linalg.norm(x - v) + 1e-9


def test_separation_hyperplanes():
    Q = BoxDomain(np.zeros(2), np.ones(2))
    x = np.array([2.0, 0.5])
    w = Q.separate(x)
    # every point of Q lies on the nonpositive side of the cut through x
    corners = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], float)
    assert np.all((corners - x) @ w <= 0)
    S = SimplexDomain(2, 1.0)
    w = S.separate(np.array([1.0, 1.0]))
    assert np.all((np.array([[0, 0], [1, 0], [0, 1]], float) - 1.0) @ w <= 0)


def test_simplex_geometry():
    S = SimplexDomain(2, 1.0)
    ball = S.bounding_ball()
    for v in [np.zeros(2), np.eye(2)[0], np.eye(2)[1]]:
        assert ball.contains(v, tol=1e-12)
    c, r = S.inner_center(), S.inner_radius()
    # the inscribed ball touches all three sides
    assert c[0] == pytest.approx(r) and c[1] == pytest.approx(r)
    assert (1.0 - c.sum()) / math.sqrt(2) == pytest.approx(r)


def test_box_diameter_and_radius():
    Q = BoxDomain(np.zeros(2), np.array([3.0, 4.0]))
    assert Q.diameter == pytest.approx(5.0)
    assert Q.inner_radius() == pytest.approx(1.5)
    assert Q.bounding_ball().radius == pytest.approx(2.5)


def test_box_rejects_inverted_bounds():
    with pytest.raises(ValueError):
        BoxDomain(np.ones(2), np.zeros(2))


@given(arrays(float, 3, elements=finite), st.floats(0, 100), st.floats(0.01, 10))
def test_quadratic_prox_closed_form(c1, c2, mu):
    r = quadratic_prox(mu)
    assert np.allclose(r.prox_step(c1, c2), -c1 / (mu + 2.0 * c2), atol=1e-10, rtol=0)


def test_quadratic_prox_on_box_is_projection():
    Q = BoxDomain(-np.ones(2), np.ones(2))
    r = quadratic_prox(1.0, domain=Q)
    assert np.allclose(r.prox_step(np.array([-10.0, 0.5]), 0.0), [1.0, -0.5])


def test_call_counter():
    cc = CallCounter()
    cc.add("grad_x", 3)
    cc.add("value")
    assert cc["grad_x"] == 3 and cc.total() == 4
    snap = cc.snapshot()
    cc.reset()
    assert snap["grad_x"] == 3 and cc.total() == 0
    with pytest.raises(KeyError):
        cc.add("hessian")


def test_first_order_oracle_counts_and_validates():
    cc = CallCounter()
    o = FirstOrderOracle(lambda x: (float(x @ x), 2 * x), counter=cc)
    v, g = o(np.ones(2))
    assert v == 2.0 and np.allclose(g, 2.0) and cc["grad_x"] == 1
    with pytest.raises(ParameterError):
        FirstOrderOracle(lambda x: (0.0, x), delta=0.1)
    with pytest.raises(ParameterError):
        FirstOrderOracle(lambda x: (0.0, x), mode="noisy")


def test_constants_validation():
    with pytest.raises(ParameterError):
        SaddleConstants(mu_x=-1.0)
    with pytest.raises(ParameterError):
        SaddleConstants(B=0.0)


def test_run_report_flags_are_unique():
    r = RunReport()
    r.flag("a")
    r.flag("a")
    assert r.flags == ["a"]


@settings(max_examples=25)
@given(st.integers(0, 10_000))
def test_spectral_norm_matches_svd(seed):
    M = np.random.default_rng(seed).standard_normal((6, 4))
    assert spectral_norm(M) == pytest.approx(np.linalg.norm(M, 2), rel=1e-6)
