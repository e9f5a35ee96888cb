import io
import math

import numpy as np
import pytest

from lie_kam import presets as pr
from lie_kam import rigidbody as rb
from lie_kam import series as fts
from lie_kam.operators import AlgebraParams

RHO = 2.0
ASYM = rb.InertiaSpec(1.0, 2.0, 3.0)


def static_field(inertia):
    return lambda t, y: rb.euler_field(y, inertia)


# -- fields -------------------------------------------------------------------


def test_euler_field_principal_axes_are_fixed_points():
    for axis in range(3):
        m = np.zeros(3)
        m[axis] = RHO
        assert np.all(rb.euler_field(m, ASYM) == 0.0)


def test_euler_field_spherical_top_is_free():
    sphere = rb.InertiaSpec(2.0, 2.0, 2.0)
    for m in rb.sample_sphere(50, RHO, 3):
        assert np.max(np.abs(rb.euler_field(m, sphere))) <= 1e-15


def test_euler_field_frozen_example():
    # M = (0, m, m) with I = (1, 2, 3) evolves as (m^2/2 - m^2/3, 0, 0)
    m = 1.3
    out = rb.euler_field(np.array([0.0, m, m]), ASYM)
    assert abs(out[0] - m * m / 6.0) <= 1e-15
    assert out[1] == 0.0 and out[2] == 0.0


def test_euler_field_orthogonal_to_momentum():
    rng = np.random.default_rng(11)
    for m in rb.sample_sphere(200, RHO, rng):
        assert abs(float(rb.euler_field(m, ASYM) @ m)) <= 1e-13


def test_throbbing_field_orthogonal_to_momentum():
    inertia = pr.preset_inertia("fig2", eps=1.0)
    rng = np.random.default_rng(12)
    ts = rng.uniform(0.0, 20.0, size=1000)
    for m, t in zip(rb.sample_sphere(1000, RHO, rng), ts):
        assert abs(float(rb.throbbing_field(m, t, inertia) @ m)) <= 1e-13


def test_throbbing_field_reduces_to_static():
    inertia = pr.preset_inertia("fig2", eps=0.4)
    m = np.array([0.3, 1.1, -0.7])
    # cos(t) vanishes at t = pi/2, leaving the static moments
    off = rb.throbbing_field(m, math.pi / 2.0, inertia)
    assert np.max(np.abs(off - rb.euler_field(m, ASYM))) <= 1e-15
    # zero amplitude matches the unmodulated top at every t
    zero = rb.InertiaSpec(1.0, 2.0, 3.0,
                          modulation=((0.0, 0.0, 0.0),) * 3)
    for t in (0.0, 0.7, 4.2):
        assert np.all(rb.throbbing_field(m, t, zero)
                      == rb.euler_field(m, ASYM))


def test_inertia_validation():
    with pytest.raises(ValueError):
        rb.InertiaSpec(1.0, -2.0, 3.0)
    with pytest.raises(ValueError):
        rb.InertiaSpec(1.0, 0.0, 3.0)
    # |amp| >= 1/I_2 makes an inverse moment vanish somewhere
    with pytest.raises(ValueError):
        rb.InertiaSpec(1.0, 2.0, 3.0,
                       modulation=((0.0, 0.0, 0.0), (0.5, 1.0, 0.0),
                                   (0.0, 0.0, 0.0)))
    ok = rb.InertiaSpec(1.0, 2.0, 3.0,
                        modulation=((0.0, 0.0, 0.0), (0.49, 1.0, 0.0),
                                    (0.0, 0.0, 0.0)))
    inv = ok.inverse_moments(0.0)
    assert abs(inv[1] - (0.5 + 0.49)) <= 1e-15
    assert not ok.is_symmetric
    assert rb.InertiaSpec(2.0, 2.0, 3.0).is_symmetric


# -- integrator ---------------------------------------------------------------


def test_rk4_static_conservation():
    y0 = rb.sample_sphere(1, RHO, 42)[0]
    traj = rb.rk4_integrate(y0, static_field(ASYM), 0.001, 20.0, stride=20)
    rep = rb.conservation_report(traj, ASYM)
    assert rep["rho_drift_max"] <= 1e-8
    assert rep["energy_drift_max"] <= 1e-8
    assert rep["in_band"]


def test_rk4_convergence_is_fourth_order():
    # coarse steps keep the error above the rounding floor so halving h
    # shows the h^4 factor
    for seed in (7, 123):
        y0 = rb.sample_sphere(1, RHO, seed)[0]
        ref = rb.rk4_integrate(y0, static_field(ASYM), 0.00125, 10.0).y[-1]
        e1 = np.max(np.abs(
            rb.rk4_integrate(y0, static_field(ASYM), 0.02, 10.0).y[-1] - ref))
        e2 = np.max(np.abs(
            rb.rk4_integrate(y0, static_field(ASYM), 0.01, 10.0).y[-1] - ref))
        assert 12.0 <= e1 / e2 <= 20.0


def test_rk4_zero_span_returns_initial_sample():
    y0 = np.array([1.0, 2.0, 3.0])
    traj = rb.rk4_integrate(y0, static_field(ASYM), 0.1, 0.0, t0=5.0)
    assert len(traj) == 1
    assert traj.t[0] == 5.0
    assert np.all(traj.y[0] == y0)
    assert not traj.aborted


def test_rk4_aborts_on_nonfinite_state():
    def blowup(t, y):
        with np.errstate(over="ignore", invalid="ignore"):
            return y ** 3
    traj = rb.rk4_integrate(np.array([5.0]), blowup, 0.5, 10.0)
    assert traj.aborted
    assert len(traj) >= 1
    assert np.all(np.isfinite(traj.y))


def test_rk4_validation():
    f = static_field(ASYM)
    with pytest.raises(ValueError):
        rb.rk4_integrate(np.zeros(3), f, -0.1, 1.0)
    with pytest.raises(ValueError):
        rb.rk4_integrate(np.zeros(3), f, 0.1, -1.0)
    with pytest.raises(ValueError):
        rb.rk4_integrate(np.zeros(3), f, 0.1, 1.0, stride=0)


# -- chart --------------------------------------------------------------------


def test_chart_round_trip():
    rng = np.random.default_rng(5)
    pts = rb.sample_sphere(200, RHO, rng)
    pts = pts[np.abs(pts[:, 2] / RHO) < 0.95]
    assert len(pts) > 50
    x_big, theta = rb.to_reduced(pts, RHO)
    back = rb.from_reduced(x_big, theta, RHO)
    assert np.max(np.abs(back - pts)) <= 1e-12


def test_chart_equator_and_rejections():
    x_big, theta = rb.to_reduced(np.array([RHO, 0.0, 0.0]), RHO)
    assert x_big == 0.0 and theta == 0.0
    with pytest.raises(ValueError):
        rb.to_reduced(np.array([0.0, 0.0, RHO]), RHO)
    with pytest.raises(ValueError):
        rb.to_reduced(np.array([0.0, 0.0, -RHO]), RHO)
    with pytest.raises(ValueError):
        rb.to_reduced(np.array([1.5, 0.0, 0.0]), RHO)
    with pytest.raises(ValueError):
        rb.from_reduced(1.0, 0.3, RHO)


def test_params_from_inertia():
    p = rb.params_from_inertia(rb.InertiaSpec(2.0, 2.0, 3.0), RHO, 0.25)
    assert p.rho == RHO and p.x0 == 0.25
    assert abs(p.delta - (1.0 / 3.0 - 1.0 / 2.0)) <= 1e-15
    with pytest.raises(ValueError):
        rb.params_from_inertia(ASYM, RHO, 0.25)


# -- reduced field ------------------------------------------------------------


def test_reduced_field_unperturbed():
    p = AlgebraParams()
    xd, td = rb.reduced_field(0.0, 0.3, 0.0, p)
    assert xd == 0.0
    assert abs(td - p.omega) <= 1e-15
    xd, td = rb.reduced_field(0.1, 2.0, 5.0, p)
    assert xd == 0.0
    assert abs(td - p.rho * p.delta * (p.x0 + 0.1)) <= 1e-15


def test_reduced_field_matches_dense_evaluation():
    # the compiled per-term evaluator must agree with the dense series path
    p = AlgebraParams()
    v = pr.reduced_drive_series(2e-3)
    vx = fts.partial_x(v)
    vth = fts.partial_theta(v)
    fieldfn = rb.make_reduced_field(p, v)
    rng = np.random.default_rng(8)
    for _ in range(20):
        x = rng.uniform(-0.2, 0.2)
        th = rng.uniform(0.0, 2.0 * math.pi)
        t = rng.uniform(0.0, 10.0)
        out = fieldfn(t, np.array([x, th]))
        assert abs(out[0] - (-fts.evaluate(vth, x, th, t) / p.rho)) <= 1e-15
        want = (p.rho * p.delta * (p.x0 + x)
                + fts.evaluate(vx, x, th, t) / p.rho)
        assert abs(out[1] - want) <= 1e-14


def test_reduced_field_rejects_domain_exit():
    p = AlgebraParams()
    fieldfn = rb.make_reduced_field(p, pr.reduced_drive_series(1e-3))
    with pytest.raises(ValueError):
        fieldfn(0.0, np.array([0.9, 0.3]))


def test_cross_integrator_agreement():
    # the Cartesian throbbing top and the reduced chart flow are the same
    # dynamics written in two charts
    eps = 1e-3
    inertia = pr.preset_inertia("pert1", eps=eps)
    p = rb.params_from_inertia(inertia, RHO, AlgebraParams().x0)
    x_loc0, th0 = 0.05, 1.2
    h, t_final = 0.001, 10.0

    m0 = rb.from_reduced(p.x0 + x_loc0, th0, RHO)
    traj_c = rb.rk4_integrate(
        m0, lambda t, y: rb.throbbing_field(y, t, inertia), h, t_final,
        stride=1000)
    x_c, th_c = rb.to_reduced(traj_c.y[-1], RHO)

    fieldfn = rb.make_reduced_field(p, pr.reduced_drive_series(eps))
    traj_r = rb.rk4_integrate(np.array([x_loc0, th0]), fieldfn, h, t_final,
                              stride=1000)
    x_r = p.x0 + traj_r.y[-1, 0]
    th_r = traj_r.y[-1, 1] % (2.0 * math.pi)
    dth = abs(th_c - th_r)
    dth = min(dth, 2.0 * math.pi - dth)
    assert abs(x_c - x_r) <= 1e-6
    assert dth <= 1e-6


# -- sections and diagnostics -------------------------------------------------


def test_poincare_unperturbed_reduced_is_flat():
    p = AlgebraParams()
    fieldfn = rb.make_reduced_field(p)
    traj = rb.rk4_integrate(np.array([0.07, 0.4]), fieldfn, 0.01, 50.0)
    sec = rb.poincare_section(traj, 2.0 * math.pi)
    assert len(sec) == 8
    assert np.max(np.abs(sec[:, 0] - 0.07)) <= 1e-9


def test_poincare_static_section_conserves_energy():
    # near the middle-axis separatrix the section still sits on the
    # energy level of the initial condition
    ang = 0.08
    y0 = np.array([RHO * math.sin(ang), RHO * math.cos(ang), 0.0])
    traj = rb.rk4_integrate(y0, static_field(ASYM), 0.002, 100.0)
    sec = rb.poincare_section(traj, 2.0 * math.pi, rho=RHO)
    m_sec = rb.from_reduced(sec[:, 0], sec[:, 1], RHO)
    inv = ASYM.static_inverse()
    e0 = 0.5 * float(y0 * y0 @ inv)
    e_sec = 0.5 * np.sum(m_sec * m_sec * inv, axis=-1)
    assert len(sec) >= 15
    assert np.max(np.abs(e_sec - e0)) <= 1e-6


def test_poincare_throbbing_smears_symmetric_section():
    # a strong drive moves X across the sphere; the static symmetric top
    # keeps the section at a single X
    y0 = np.array([RHO * math.sin(0.9), 0.0, RHO * math.cos(0.9)])
    inertia = pr.preset_inertia("fig2", eps=1.0)
    traj = rb.rk4_integrate(
        y0, lambda t, y: rb.throbbing_field(y, t, inertia), 0.002, 50.0)
    spread = np.ptp(rb.poincare_section(traj, 2.0 * math.pi, rho=RHO)[:, 0])

    sym = rb.InertiaSpec(2.0, 2.0, 3.0)
    traj_s = rb.rk4_integrate(y0, static_field(sym), 0.002, 50.0)
    spread_s = np.ptp(rb.poincare_section(traj_s, 2.0 * math.pi,
                                          rho=RHO)[:, 0])
    assert spread > 0.5
    assert spread_s <= 1e-9


def test_poincare_validation():
    traj = rb.rk4_integrate(np.array([0.0, 0.1]),
                            rb.make_reduced_field(AlgebraParams()), 0.1, 2.0)
    with pytest.raises(ValueError):
        rb.poincare_section(traj, -1.0)
    with pytest.raises(ValueError):
        rb.poincare_section(traj, 10.0)
    traj3 = rb.rk4_integrate(rb.sample_sphere(1, RHO, 1)[0],
                             static_field(ASYM), 0.1, 10.0)
    with pytest.raises(ValueError):
        rb.poincare_section(traj3, 2.0 * math.pi)


def test_conservation_report_band():
    y0 = rb.sample_sphere(1, RHO, 9)[0]
    traj = rb.rk4_integrate(y0, static_field(ASYM), 0.001, 5.0, stride=10)
    rep = rb.conservation_report(traj, ASYM)
    assert abs(rep["band_lo"] - 2.0 / 3.0) <= 1e-12
    assert abs(rep["band_hi"] - 2.0) <= 1e-12
    assert rep["in_band"]

    sphere = rb.InertiaSpec(2.0, 2.0, 2.0)
    traj_s = rb.rk4_integrate(y0, static_field(sphere), 0.01, 1.0)
    rep_s = rb.conservation_report(traj_s, sphere)
    assert abs(rep_s["band_lo"] - rep_s["band_hi"]) <= 1e-12
    assert rep_s["energy_drift_max"] <= 1e-12


def test_sample_sphere_norms_and_determinism():
    pts = rb.sample_sphere(100, RHO, 77)
    assert pts.shape == (100, 3)
    assert np.max(np.abs(np.sqrt(np.sum(pts * pts, axis=-1)) - RHO)) <= 1e-12
    assert np.all(pts == rb.sample_sphere(100, RHO, 77))


# -- CSV ----------------------------------------------------------------------


def test_csv_round_trip_cartesian():
    y0 = rb.sample_sphere(1, RHO, 4)[0]
    traj = rb.rk4_integrate(y0, static_field(ASYM), 0.01, 1.0)
    cfg = {"preset": "fig1", "seed": 4, "h": 0.01, "T": 1.0}
    buf = io.StringIO()
    rb.write_trajectory_csv(buf, traj, "cartesian", config=cfg)
    text = buf.getvalue()
    assert text.splitlines()[0].startswith("# config:")
    assert text.splitlines()[1] == "t,M1,M2,M3"
    back, cfg_back = rb.read_trajectory_csv(io.StringIO(text))
    assert cfg_back == cfg
    assert np.all(back.t == traj.t)
    assert np.all(back.y == traj.y)


def test_csv_round_trip_reduced_without_config():
    traj = rb.rk4_integrate(np.array([0.02, 0.3]),
                            rb.make_reduced_field(AlgebraParams()), 0.1, 2.0)
    buf = io.StringIO()
    rb.write_trajectory_csv(buf, traj, "reduced")
    back, cfg = rb.read_trajectory_csv(io.StringIO(buf.getvalue()))
    assert cfg is None
    assert buf.getvalue().splitlines()[0] == "t,X,theta"
    assert np.all(back.y == traj.y)


def test_csv_empty_trajectory_keeps_header():
    traj = rb.Trajectory(t=np.empty(0), y=np.empty((0, 3)))
    buf = io.StringIO()
    rb.write_trajectory_csv(buf, traj, "cartesian", config={"T": 0.0})
    lines = buf.getvalue().splitlines()
    assert lines[1] == "t,M1,M2,M3"
    assert len(lines) == 2
    back, cfg = rb.read_trajectory_csv(io.StringIO(buf.getvalue()))
    assert len(back) == 0
    assert cfg == {"T": 0.0}


def test_csv_kind_validation():
    traj = rb.Trajectory(t=np.zeros(1), y=np.zeros((1, 3)))
    with pytest.raises(ValueError):
        rb.write_trajectory_csv(io.StringIO(), traj, "spherical")
    with pytest.raises(ValueError):
        rb.write_trajectory_csv(io.StringIO(), traj, "reduced")
