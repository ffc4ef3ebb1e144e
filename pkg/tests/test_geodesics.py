import math

import numpy as np
import pytest

from lks import geodesics as geo
from lks.errors import LksError
from lks.fnprofile import FunctionProfile, find_zeros

SIN2 = FunctionProfile.from_text("sin(2*x)", "periodic:pi")
CP = FunctionProfile.from_text("sin(2*x)+1.2", "periodic:pi")
FLAT = FunctionProfile.from_text("1", "periodic:1")


def test_rhs_and_first_integrals():
    s = np.array([0.3, 0.0, 0.4, -0.7])
    f, df = math.sin(0.6), 2 * math.cos(0.6)
    np.testing.assert_allclose(geo.geodesic_rhs(s, SIN2),
                               [0.4, -0.7, -df * -0.7 * (0.4 + 0.5 * f * -0.7), 0.5 * df * 0.49])
    assert geo.clairaut(SIN2, s) == pytest.approx(f * -0.7 + 0.4)
    assert geo.energy(SIN2, s) == pytest.approx(f * 0.49 + 2 * 0.4 * -0.7)


@pytest.mark.parametrize("seed", range(5))
def test_conservation_on_random_geodesics(seed):
    rng = np.random.default_rng(seed)
    s0 = np.array([rng.uniform(-1, 1), 0.0, *(0.3 * rng.normal(size=2))])
    tr = geo.integrate(s0, SIN2, 5.0, blow_up=1e6, max_steps=20000)
    if tr.status != geo.COMPLETED:
        pytest.skip(f"geodesic left the chart: {tr.status}")
    assert tr.drift_C < 1e-9 and tr.drift_E < 1e-9
    C, E = tr.C[0], tr.E[0]
    x, p = tr.states[:, 0], tr.states[:, 2]
    assert np.max(np.abs(p * p - (C * C - E * SIN2.f(x)))) < 1e-8


def test_initial_state_reduced_equation():
    s = geo.initial_state(CP, 0.4, 0.0, 1, 2.0)
    tr = geo.integrate(s, CP, 3.0)
    assert tr.status == geo.COMPLETED
    assert tr.E[0] == pytest.approx(1.0) and tr.C[0] == pytest.approx(2.0)
    assert tr.reduced_residual(CP, 1, 2.0) < 1e-9
    with pytest.raises(LksError):
        geo.initial_state(CP, 0.4, 0.0, 1, 0.1)


def test_integrate_rejects_bad_state():
    with pytest.raises(LksError):
        geo.integrate([0.0, 0.0, math.nan, 1.0], SIN2, 1.0)
    with pytest.raises(LksError):
        geo.integrate([5.0, 0.0, 0.0, 1.0], FunctionProfile.from_text("x", "interval:-1,1"), 1.0)


def test_exit_from_interval():
    p = FunctionProfile.from_text("1", "interval:-1,1")
    tr = geo.integrate([0.0, 0.0, 1.0, 0.0], p, 5.0)
    assert tr.status == geo.EXITED and tr.t_stop == pytest.approx(1.0, abs=1e-10)
    assert tr.states[-1, 0] == pytest.approx(1.0, abs=1e-10)


def test_table_format():
    tr = geo.integrate([0.1, 0.0, 0.2, 0.1], SIN2, 1.0, n_samples=5)
    lines = tr.table().splitlines()
    assert lines[0] == "t x y p q C E" and len(lines) == 6
    assert len(lines[1].split()) == 7


@pytest.mark.parametrize("f, d", [("sin(2*x)", "periodic:pi"), ("x^3-x", "interval:-inf,inf")])
def test_light_leaves_blow_up_on_one_side(f, d):
    p = FunctionProfile.from_text(f, d)
    for z in find_zeros(p):
        for q0 in (1.0, -1.0):
            tr = geo.integrate([z.x0, 0.0, 0.0, q0], p, 1000.0, n_samples=11)
            if z.lam * q0 > 0:
                assert tr.status == geo.BLEW_UP
                assert tr.t_stop == pytest.approx(2 / (z.lam * q0), rel=1e-3)
            else:
                assert tr.status == geo.COMPLETED


def test_conjugate_points_found():
    r = geo.conjugate_search(CP, 1, 1.0)
    assert r.status == geo.FOUND
    assert r.relative_gap <= 1e-5
    # turning points sit on the level eps f = C^2
    assert abs(CP.f(r.a) - 1.0) < 1e-12 and abs(CP.f(r.b) - 1.0) < 1e-12
    assert r.x_arrival == pytest.approx(r.b, abs=1e-6)
    assert r.trajectory.drift_C < 1e-9


def test_conjugate_geodesic_is_symmetric_at_turning_point():
    r = geo.conjugate_search(CP, 1, 1.0)
    back = r.trajectory
    fwd = geo.integrate(back.states[-1], CP, r.t_b, n_samples=len(back.t))
    # x(t_b + s) = x(t_b - s)
    np.testing.assert_allclose(fwd.states[:, 0], back.states[::-1, 0], atol=1e-6)


def test_conjugate_not_found_for_constant():
    assert geo.conjugate_search(FLAT, 1, 1.0).status == geo.NOT_FOUND


def test_conjugate_argument_checks():
    with pytest.raises(LksError):
        geo.conjugate_search(CP, 0, 1.0)
    with pytest.raises(LksError):
        geo.conjugate_search(CP, 1, 0.0)


def test_arrival_time_matches_closed_form():
    # f = x^2, eps = 1, C = 1: p^2 = 1 - x^2, crossing time pi
    p = FunctionProfile.from_text("x^2", "interval:-inf,inf")
    assert geo.arrival_time(p, 1, 1.0, -1.0, 1.0) == pytest.approx(math.pi, rel=1e-10)


def test_cp_conditions():
    T = math.pi
    ok = geo.cp_conditions(SIN2, [T / 4, 3 * T / 4])
    assert ok.holds and not ok.failures
    one = geo.cp_conditions(SIN2, [T / 4])
    assert not one.holds and one.failures[0].startswith("(2)")
    wiggly = FunctionProfile.from_text("sin(2*x) + 0.6*sin(6*x)", "periodic:pi")
    res = geo.cp_conditions(wiggly, [T / 4, 3 * T / 4])
    assert any(m.startswith("(4)") for m in res.failures)
    flat = geo.cp_conditions(FunctionProfile.from_text("2+sin(2*x)", "periodic:pi"), [])
    assert flat.failures[0].startswith("(1)")
