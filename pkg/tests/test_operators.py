import math
import random

import numpy as np
import pytest

import _oracle as oracle
from lie_kam import operators as ops
from lie_kam import series as fts
from lie_kam.operators import AlgebraParams, DiophantineParams, ResonanceError
from lie_kam.series import TruncationSpec

PARAMS = AlgebraParams()  # rho=2, i_perp=2, i_3=3, golden x0
TR = TruncationSpec(n_x=6, l_theta=8, l_t=8, pad=2)


def oracle_q(params):
    q0 = params.rho ** 2 * params.delta
    return {
        (0, 0, 0): complex(q0, 0.0),
        (0, 1, 0): 0.03 + 0.01j, (0, -1, 0): 0.03 - 0.01j,
        (1, 0, 0): -0.02 + 0.04j, (-1, 0, 0): -0.02 - 0.04j,
        (1, 1, 0): 0.01 - 0.02j, (-1, -1, 0): 0.01 + 0.02j,
    }


def rand_f(rng):
    return oracle.rand_real_series(rng, lmax=2, mmax=3, nmax=3)


def as_series(d):
    return oracle.series_from_dict(d, TR, PARAMS.rho)


Q_SERIES = ops.generic_curvature(PARAMS)
Q_DICT = oracle_q(PARAMS)


# -- parameter objects --------------------------------------------------------


def test_params_derived_values():
    p = AlgebraParams(rho=2.0, i_perp=2.0, i_3=3.0, x0=0.5)
    assert p.delta == pytest.approx(1 / 3 - 1 / 2)
    assert p.omega == pytest.approx(-1 / 6)
    assert p.curvature0 == pytest.approx(-2 / 3)


def test_params_cross_validation():
    AlgebraParams(x0=0.5, omega=-1 / 6)  # consistent values pass
    with pytest.raises(ValueError):
        AlgebraParams(x0=0.5, omega=-0.2)
    with pytest.raises(ValueError):
        AlgebraParams(x0=0.5, delta=0.25)
    with pytest.raises(ValueError):
        AlgebraParams(rho=-1.0)
    with pytest.raises(ValueError):
        AlgebraParams(x0=1.5)


def test_diophantine_params_validation():
    d = DiophantineParams(gamma=0.1, tau=1.0)
    assert d.floor(2, 3) == pytest.approx(0.1 / 5.0)
    with pytest.raises(ValueError):
        DiophantineParams(gamma=-1.0, tau=1.0)
    with pytest.raises(ValueError):
        DiophantineParams(gamma=0.1, tau=1.0, q=1.5)


# -- projections --------------------------------------------------------------


def test_projections_match_oracle():
    rng = random.Random(3)
    for _ in range(15):
        d = rand_f(rng)
        s = as_series(d)
        assert oracle.diff_norm(oracle.avg(d), ops.average_op(s)) < 1e-14
        assert oracle.diff_norm(oracle.fluct(d), ops.fluctuation_op(s)) < 1e-14
        assert oracle.diff_norm(oracle.pdeg(d, 1), ops.project_degree(s, 1)) < 1e-14
        assert oracle.diff_norm(oracle.pdeg_le(d, 1), ops.project_degree_le(s, 1)) < 1e-14
        assert oracle.diff_norm(oracle.pdeg_ge(d, 2), ops.project_degree_ge(s, 2)) < 1e-14
        assert oracle.diff_norm(oracle.r_s(d), ops.basic_resonant(s)) < 1e-14
        assert oracle.diff_norm(oracle.n_s(d), ops.basic_solvable(s)) < 1e-14


def test_small_divisor_solve_matches_oracle():
    rng = random.Random(5)
    for _ in range(15):
        d = rand_f(rng)
        ref = oracle.g_s(d, PARAMS.omega)
        got = ops.small_divisor_solve(as_series(d), PARAMS)
        assert oracle.diff_norm(ref, got) < 1e-13


def test_small_divisor_frozen_example():
    # omega = -1/6: mode e^{i(theta + t)} picks divisor 1 - 1/6 = 5/6
    p = AlgebraParams(x0=0.5)
    f = fts.from_terms([(1, 1, 0, 1.0)], TR, p.rho)
    got = ops.small_divisor_solve(f, p)
    assert got.coeff(1, 1, 0) == pytest.approx(-1.2j)


def test_translation_coefficient_matches_oracle():
    rng = random.Random(7)
    for _ in range(15):
        d = rand_f(rng)
        ref = oracle.a_op(d, Q_DICT, PARAMS.rho, PARAMS.omega)
        got = ops.translation_coefficient(as_series(d), Q_SERIES, PARAMS)
        assert abs(ref - got) < 1e-13 * max(1.0, abs(ref))


def test_translation_frozen_example():
    # f = x against constant curvature: a = rho / q00
    q0 = fts.from_real_terms([(0, 0, 0, PARAMS.curvature0)],
                             TruncationSpec(0, 1, 1), PARAMS.rho)
    x = fts.from_real_terms([(0, 0, 1, 1.0)], TR, PARAMS.rho)
    got = ops.translation_coefficient(x, q0, PARAMS)
    assert got == pytest.approx(PARAMS.rho / PARAMS.curvature0)
    g = ops.homological_derivation(x, x, q0, PARAMS)
    assert g.coeff(0, 0, 0) == pytest.approx(-1.0 / PARAMS.curvature0)


def test_projection_correction_matches_oracle():
    rng = random.Random(11)
    for _ in range(15):
        d = rand_f(rng)
        ref = oracle.restrict(oracle.k_op(d, Q_DICT, PARAMS.rho, PARAMS.omega),
                              TR.l_t, TR.l_theta, TR.n_x)
        got = ops.projection_correction(as_series(d), Q_SERIES, PARAMS)
        assert oracle.diff_norm(ref, got) < 1e-13


def test_full_projections_match_oracle():
    rng = random.Random(13)
    for _ in range(10):
        d = rand_f(rng)
        s = as_series(d)
        ref_r = oracle.restrict(oracle.r_proj(d, Q_DICT, PARAMS.rho, PARAMS.omega),
                                TR.l_t, TR.l_theta, TR.n_x)
        ref_n = oracle.restrict(oracle.n_proj(d, Q_DICT, PARAMS.rho, PARAMS.omega),
                                TR.l_t, TR.l_theta, TR.n_x)
        assert oracle.diff_norm(ref_r, ops.resonant_projection(s, Q_SERIES, PARAMS)) < 1e-13
        assert oracle.diff_norm(ref_n, ops.solvable_projection(s, Q_SERIES, PARAMS)) < 1e-13


def test_hamiltonian_apply_matches_oracle():
    rng = random.Random(17)
    for _ in range(10):
        d = rand_f(rng)
        ref = oracle.restrict(oracle.ham(d, Q_DICT, PARAMS.rho, PARAMS.omega),
                              TR.l_t, TR.l_theta, TR.n_x)
        got = ops.hamiltonian_apply(as_series(d), Q_SERIES, PARAMS)
        assert oracle.diff_norm(ref, got) < 1e-13


def test_homological_derivation_matches_oracle():
    rng = random.Random(19)
    probes = ops.probe_basket(TR, PARAMS.rho)
    for _ in range(8):
        d = rand_f(rng)
        f = as_series(d)
        for g in probes:
            dg = oracle.dict_from_series(g)
            ref = oracle.restrict(
                oracle.gamma_apply(d, dg, Q_DICT, PARAMS.rho, PARAMS.omega),
                TR.l_t, TR.l_theta, TR.n_x)
            got = ops.homological_derivation(f, g, Q_SERIES, PARAMS)
            assert oracle.diff_norm(ref, got) < 1e-13


def test_curvature_lift_requires_degree0():
    bad = fts.from_real_terms([(0, 0, 1, 1.0)], TruncationSpec(1, 1, 1), PARAMS.rho)
    with pytest.raises(ValueError):
        ops.half_curvature_x2(bad)
    with pytest.raises(ValueError):
        ops.translation_coefficient(
            fts.constant(1.0, TR, PARAMS.rho), bad, PARAMS)


def test_translation_requires_nonzero_average():
    q = fts.from_real_terms([(0, 1, 0, 0.1)], TruncationSpec(0, 1, 1), PARAMS.rho)
    with pytest.raises(ValueError):
        ops.translation_coefficient(fts.constant(1.0, TR, PARAMS.rho), q, PARAMS)


# -- resonance handling --------------------------------------------------------


def test_resonance_raises():
    # omega = -1/6 makes (l, m) = (1, 6) an exact resonance
    p = AlgebraParams(x0=0.5)
    f = fts.from_terms([(1, 6, 0, 1.0)], TR, p.rho)
    with pytest.raises(ResonanceError):
        ops.small_divisor_solve(f, p)
    # modes the series does not populate are never touched
    g = fts.from_terms([(1, 1, 0, 1.0)], TR, p.rho)
    ops.small_divisor_solve(g, p)


def test_small_divisor_warning():
    dio = DiophantineParams(gamma=10.0, tau=1.0)  # absurdly demanding floor
    f = fts.from_terms([(1, 1, 0, 1.0)], TR, PARAMS.rho)
    with pytest.warns(ops.SmallDivisorWarning):
        ops.small_divisor_solve(f, PARAMS, dio=dio)


def test_estimate_diophantine_resonant_case():
    gamma_hat, mode = ops.estimate_diophantine(0.5, tau=1.0, k_scan=50)
    assert gamma_hat == 0.0
    assert mode == (-1, 2)


def test_estimate_diophantine_default_omega():
    gamma_hat, mode = ops.estimate_diophantine(PARAMS.omega, tau=1.0, k_scan=50)
    assert gamma_hat > 0.05
    l, m = mode
    assert 0 < abs(l) + abs(m) <= 50


# -- identity suite -------------------------------------------------------------


def test_identity_suite_residuals_are_noise():
    reports = ops.run_identity_suite(PARAMS, n_trials=10, seed=42)
    names = {r["identity"] for r in reports}
    assert "homological" in names and "resonant_idempotent" in names
    for r in reports:
        assert r["trials"] == 10
        assert r["max_residual"] < 1e-12, r["identity"]


def test_identity_suite_rejects_tiny_box():
    with pytest.raises(ValueError):
        ops.run_identity_suite(PARAMS, trunc=TruncationSpec(2, 3, 3), n_trials=1)


def test_verify_homological_single_generator():
    rng = np.random.default_rng(7)
    win = ops._suite_window(TR)
    f = fts.random_real_series(TR, PARAMS.rho, rng, n_terms=20,
                               l_t_max=win["l_t"], l_theta_max=win["l_theta"],
                               n_x_max=win["n_x"])
    assert ops.verify_homological(f, Q_SERIES, PARAMS) < 1e-9
    const = fts.constant(3.0, TR, PARAMS.rho)
    assert ops.verify_homological(const, Q_SERIES, PARAMS) == 0.0


def test_verify_gr_zero_single_generator():
    rng = np.random.default_rng(8)
    win = ops._suite_window(TR)
    f = fts.random_real_series(TR, PARAMS.rho, rng, n_terms=20,
                               l_t_max=win["l_t"], l_theta_max=win["l_theta"],
                               n_x_max=win["n_x"])
    assert ops.verify_gr_zero(f, Q_SERIES, PARAMS) < 1e-9
    # x^2 e^{it} sits in the basic resonant range already
    g2 = fts.from_real_terms({(1, 0, 2): 0.5}, TR, PARAMS.rho)
    assert ops.verify_gr_zero(g2, Q_SERIES, PARAMS) < 1e-9
