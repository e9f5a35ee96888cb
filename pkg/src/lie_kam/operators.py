"""Projection and homological-solver operators for the driven top.

The linearized problem splits a perturbation f into a part that can be
removed by a near-identity change of coordinates (the solvable part) and a
part that stays in the normal form (the resonant part). This module builds
that splitting and the derivation that realizes the removal:

- ``basic_resonant`` / ``basic_solvable``: the splitting that ignores the
  curvature coupling (time-angle average of degree 0, plus everything of
  degree >= 2, against the fluctuating degree-0 and all degree-1 terms).
- ``small_divisor_solve``: inverts the drift ``omega d_theta + d_t`` on
  fluctuating modes of degree <= 1, the only place small divisors appear.
- ``translation_coefficient`` / ``projection_correction``: the curvature-aware
  corrections. The full projections ``resonant_projection`` and
  ``solvable_projection`` differ from the basic ones exactly by the latter.
- ``homological_derivation``: the derivation Gamma_f with
  H(Gamma_f g) - Gamma_f(H g) = {solvable_projection(f), g} for the
  generator ``H = omega d_theta + d_t + {Q x^2 / 2, .}``.

``run_identity_suite`` verifies all of the exact operator identities on
randomized inputs whose support is kept far enough inside the truncation
box that no identity can fail by truncation alone.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import series as fts
from .series import DEFAULT_DOMAIN, DomainConfig, FourierTaylorSeries, TruncationSpec

__all__ = [
    "AlgebraParams",
    "DiophantineParams",
    "ResonanceError",
    "SmallDivisorWarning",
    "average_op",
    "fluctuation_op",
    "project_degree",
    "project_degree_le",
    "project_degree_ge",
    "basic_resonant",
    "basic_solvable",
    "small_divisor_solve",
    "translation_coefficient",
    "projection_correction",
    "resonant_projection",
    "solvable_projection",
    "half_curvature_x2",
    "hamiltonian_apply",
    "homological_derivation",
    "estimate_diophantine",
    "probe_basket",
    "generic_curvature",
    "verify_homological",
    "run_identity_suite",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class ResonanceError(ArithmeticError):
    """A required small divisor is numerically zero."""


class SmallDivisorWarning(RuntimeWarning):
    """A divisor fell below the configured Diophantine floor."""


@dataclass(frozen=True)
class AlgebraParams:
    """Physical parameters of the reduced system.

    rho is the conserved momentum magnitude, i_perp and i_3 the transverse
    and symmetry-axis moments of inertia, x0 the relative equilibrium around
    which the angle chart is centered. delta and omega are derived
    (delta = 1/i_3 - 1/i_perp, omega = rho * delta * x0); passing them
    explicitly just cross-checks the values.
    """

    rho: float = 2.0
    i_perp: float = 2.0
    i_3: float = 3.0
    x0: float = _GOLDEN
    delta: float = None
    omega: float = None

    def __post_init__(self):
        if self.rho <= 0 or self.i_perp <= 0 or self.i_3 <= 0:
            raise ValueError("rho and moments of inertia must be positive")
        if not -1.0 < self.x0 < 1.0:
            raise ValueError("x0 must lie strictly inside (-1, 1)")
        d = 1.0 / self.i_3 - 1.0 / self.i_perp
        if self.delta is None:
            object.__setattr__(self, "delta", d)
        elif abs(self.delta - d) > 1e-12 * max(1.0, abs(d)):
            raise ValueError(f"delta = {self.delta} inconsistent with inertia values ({d})")
        w = self.rho * self.delta * self.x0
        if self.omega is None:
            object.__setattr__(self, "omega", w)
        elif abs(self.omega - w) > 1e-12 * max(1.0, abs(w)):
            raise ValueError(f"omega = {self.omega} inconsistent with rho*delta*x0 = {w}")

    @property
    def curvature0(self) -> float:
        """Flat-system curvature coefficient rho^2 * delta."""
        return self.rho * self.rho * self.delta


@dataclass(frozen=True)
class DiophantineParams:
    """Non-resonance constants: |omega m + l| >= gamma / (|l|+|m|)^tau."""

    gamma: float
    tau: float
    q: float = 0.5
    k_scan: int = 50

    def __post_init__(self):
        if self.gamma <= 0 or self.tau <= 0:
            raise ValueError("gamma and tau must be positive")
        if not 0.0 < self.q < 1.0:
            raise ValueError("q must lie in (0, 1)")
        if self.k_scan < 1:
            raise ValueError("k_scan must be at least 1")

    def floor(self, l: int, m: int) -> float:
        return self.gamma / (abs(l) + abs(m)) ** self.tau


# -- projections -------------------------------------------------------------


def _rebox(coeffs, like: FourierTaylorSeries) -> FourierTaylorSeries:
    return FourierTaylorSeries(coeffs, like.trunc, like.rho)


def average_op(f: FourierTaylorSeries) -> FourierTaylorSeries:
    """Keep only the time-angle average (the (l, m) = (0, 0) modes)."""
    t = f.trunc
    c = np.zeros(t.shape, dtype=np.complex128)
    c[t.l_t, t.l_theta, :] = f.coeffs[t.l_t, t.l_theta, :]
    return _rebox(c, f)


def fluctuation_op(f: FourierTaylorSeries) -> FourierTaylorSeries:
    t = f.trunc
    c = np.array(f.coeffs)
    c[t.l_t, t.l_theta, :] = 0.0
    return _rebox(c, f)


def project_degree(f: FourierTaylorSeries, n: int) -> FourierTaylorSeries:
    c = np.zeros(f.trunc.shape, dtype=np.complex128)
    if 0 <= n <= f.trunc.n_x:
        c[:, :, n] = f.coeffs[:, :, n]
    return _rebox(c, f)


def project_degree_le(f: FourierTaylorSeries, n: int) -> FourierTaylorSeries:
    c = np.zeros(f.trunc.shape, dtype=np.complex128)
    top = min(n, f.trunc.n_x)
    if top >= 0:
        c[:, :, : top + 1] = f.coeffs[:, :, : top + 1]
    return _rebox(c, f)


def project_degree_ge(f: FourierTaylorSeries, n: int) -> FourierTaylorSeries:
    c = np.zeros(f.trunc.shape, dtype=np.complex128)
    if n <= f.trunc.n_x:
        c[:, :, max(n, 0):] = f.coeffs[:, :, max(n, 0):]
    return _rebox(c, f)


def basic_resonant(f: FourierTaylorSeries) -> FourierTaylorSeries:
    """Averaged degree-0 part plus everything of degree >= 2."""
    return average_op(project_degree(f, 0)) + project_degree_ge(f, 2)


def basic_solvable(f: FourierTaylorSeries) -> FourierTaylorSeries:
    """Fluctuating degree-0 part plus the full degree-1 part."""
    return fluctuation_op(project_degree(f, 0)) + project_degree(f, 1)


# -- small divisors ----------------------------------------------------------


def _divisor_grid(trunc: TruncationSpec, omega: float):
    ls = np.arange(-trunc.l_t, trunc.l_t + 1, dtype=np.float64)
    ms = np.arange(-trunc.l_theta, trunc.l_theta + 1, dtype=np.float64)
    return ls[:, None] + omega * ms[None, :]


def _check_divisors(modes, omega: float, dio: DiophantineParams,
                    min_divisor: float):
    """modes: iterable of (l, m) actually divided by. Raises / warns."""
    for l, m in modes:
        div = abs(omega * m + l)
        if div < min_divisor:
            raise ResonanceError(
                f"divisor |omega*{m} + {l}| = {div:.3e} below {min_divisor:.1e}")
        if dio is not None and div < dio.floor(l, m):
            warnings.warn(
                f"divisor at (l={l}, m={m}) is {div:.3e}, below the "
                f"Diophantine floor {dio.floor(l, m):.3e}",
                SmallDivisorWarning, stacklevel=3)


def small_divisor_solve(f: FourierTaylorSeries, params: AlgebraParams,
                        dio: DiophantineParams = None,
                        min_divisor: float = 1e-13) -> FourierTaylorSeries:
    """Invert the drift omega*d_theta + d_t on fluctuating modes of degree <= 1.

    Modes of degree >= 2 and the time-angle average are dropped; the result u
    satisfies (omega*d_theta + d_t) u = fluctuating part of degree <= 1 of f.
    Divisors are only formed at modes f actually populates.
    """
    t = f.trunc
    top = min(1, t.n_x)
    src = np.array(f.coeffs[:, :, : top + 1])
    src[t.l_t, t.l_theta, :] = 0.0
    li, mi, _ = np.nonzero(src)
    modes = {(int(a - t.l_t), int(b - t.l_theta)) for a, b in zip(li, mi)}
    _check_divisors(modes, params.omega, dio, min_divisor)
    d = _divisor_grid(t, params.omega)
    d = np.where(np.abs(d) < min_divisor, 1.0, d)  # masked entries have src == 0
    c = np.zeros(t.shape, dtype=np.complex128)
    c[:, :, : top + 1] = -1j * src / d[:, :, None]
    return _rebox(c, f)


def estimate_diophantine(omega: float, tau: float, k_scan: int = 50):
    """Smallest |omega m + l| (|l| + |m|)^tau over 0 < |l| + |m| <= k_scan.

    Returns (gamma_hat, (l, m)) for the minimizing mode, scanning one
    representative of each +/- pair (m > 0, or m = 0 and l > 0). A zero
    gamma_hat means omega is resonant inside the scanned block.
    """
    best = math.inf
    arg = None
    for m in range(0, k_scan + 1):
        lo = 1 if m == 0 else -(k_scan - m)
        for l in range(lo, k_scan - m + 1):
            if m == 0 and l <= 0:
                continue
            val = abs(omega * m + l) * (abs(l) + abs(m)) ** tau
            if val < best:
                best = val
                arg = (l, m)
    return best, arg


# -- curvature-aware operators -----------------------------------------------


def _require_degree0(q: FourierTaylorSeries):
    if q.trunc.n_x > 0 and np.any(q.coeffs[:, :, 1:] != 0):
        raise ValueError("curvature series must be purely degree 0")


def half_curvature_x2(q: FourierTaylorSeries) -> FourierTaylorSeries:
    """Lift a degree-0 curvature series Q(theta, t) to Q x^2 / 2."""
    _require_degree0(q)
    t = q.trunc
    nt = TruncationSpec(n_x=2, l_theta=t.l_theta, l_t=t.l_t,
                        pad=min(t.pad, 2, t.l_theta, t.l_t))
    c = np.zeros(nt.shape, dtype=np.complex128)
    c[:, :, 2] = 0.5 * q.coeffs[:, :, 0]
    return FourierTaylorSeries(c, nt, q.rho)


def _lift_degree(f: FourierTaylorSeries) -> FourierTaylorSeries:
    """Multiply by x, growing the box when the top slice is occupied."""
    t = f.trunc
    if np.any(f.coeffs[:, :, t.n_x] != 0):
        nt = TruncationSpec(n_x=t.n_x + 1, l_theta=t.l_theta, l_t=t.l_t, pad=t.pad)
        c = np.zeros(nt.shape, dtype=np.complex128)
        c[:, :, 1:] = f.coeffs
        return FourierTaylorSeries(c, nt, f.rho)
    c = np.zeros(t.shape, dtype=np.complex128)
    c[:, :, 1:] = f.coeffs[:, :, :-1]
    return _rebox(c, f)


def _strip_imag(z: complex, what: str) -> float:
    if abs(z.imag) > 1e-10 * max(1.0, abs(z)):
        raise fts.RealityError(f"{what} should be real, got {z!r}")
    return z.real


def translation_coefficient(f: FourierTaylorSeries, q: FourierTaylorSeries,
                            params: AlgebraParams,
                            dio: DiophantineParams = None,
                            min_divisor: float = 1e-13) -> float:
    """Coefficient of the x-translation that kills the averaged linear term.

    Solves the degree-1 average obstruction: the returned scalar a satisfies
    average(deg-1 of (f - a/rho * Q x - ...)) = 0 once the fluctuating
    degree-0 part has been absorbed by the small-divisor solver.
    """
    _require_degree0(q)
    q00 = q.coeff(0, 0, 0)
    if q00 == 0:
        raise ValueError("curvature series must have a nonzero average")
    t = f.trunc
    f0 = f.coeffs[:, :, 0]
    li, mi = np.nonzero(f0)
    acc = 0.0 + 0.0j
    modes = []
    for a, b in zip(li, mi):
        l, m = int(a - t.l_t), int(b - t.l_theta)
        if l == 0 and m == 0:
            continue
        qc = q.coeff(-l, -m, 0)
        if qc == 0:
            continue
        modes.append((l, m))
        acc += m * qc * f0[a, b] / (params.omega * m + l)
    _check_divisors(modes, params.omega, dio, min_divisor)
    out = (params.rho * f.coeff(0, 0, 1) - acc) / q00
    return _strip_imag(out, "translation coefficient") if f.is_real and q.is_real else out


def _inner_drive(f, q, params, af, dio, min_divisor,
                 domain: DomainConfig = DEFAULT_DOMAIN):
    """Q * (a_f + d_theta G_s P0 f), the source shared by Gamma and K."""
    v0 = small_divisor_solve(project_degree(f, 0), params, dio, min_divisor)
    return fts.scale(q, af) + fts.multiply(q, fts.partial_theta(v0), domain)


def projection_correction(f: FourierTaylorSeries, q: FourierTaylorSeries,
                          params: AlgebraParams,
                          dio: DiophantineParams = None,
                          min_divisor: float = 1e-13,
                          domain: DomainConfig = DEFAULT_DOMAIN) -> FourierTaylorSeries:
    """Curvature correction K moving terms between the basic projections."""
    af = translation_coefficient(f, q, params, dio, min_divisor)
    const = fts.from_terms([(0, 0, 0, params.rho * params.omega * af)], f.trunc, f.rho)
    u = project_degree(fts.partial_x(f), 0)
    inner = _inner_drive(f, q, params, af, dio, min_divisor, domain)
    w = small_divisor_solve(u + fts.scale(inner, -1.0 / params.rho),
                            params, dio, min_divisor)
    return const + fts.poisson_bracket(half_curvature_x2(q), _lift_degree(w), domain)


def resonant_projection(f: FourierTaylorSeries, q: FourierTaylorSeries,
                        params: AlgebraParams,
                        dio: DiophantineParams = None,
                        min_divisor: float = 1e-13,
                        domain: DomainConfig = DEFAULT_DOMAIN) -> FourierTaylorSeries:
    """Part of f that survives into the normal form."""
    return basic_resonant(f) - projection_correction(f, q, params, dio, min_divisor, domain)


def solvable_projection(f: FourierTaylorSeries, q: FourierTaylorSeries,
                        params: AlgebraParams,
                        dio: DiophantineParams = None,
                        min_divisor: float = 1e-13,
                        domain: DomainConfig = DEFAULT_DOMAIN) -> FourierTaylorSeries:
    """Part of f removed by the homological derivation; complements the resonant part."""
    return basic_solvable(f) + projection_correction(f, q, params, dio, min_divisor, domain)


def hamiltonian_apply(g: FourierTaylorSeries, q: FourierTaylorSeries,
                      params: AlgebraParams,
                      domain: DomainConfig = DEFAULT_DOMAIN) -> FourierTaylorSeries:
    """Generator H g = omega d_theta g + d_t g + {Q x^2 / 2, g}."""
    lin = fts.scale(fts.partial_theta(g), params.omega) + fts.partial_t(g)
    return lin + fts.poisson_bracket(half_curvature_x2(q), g, domain)


def homological_derivation(f: FourierTaylorSeries, g: FourierTaylorSeries,
                           q: FourierTaylorSeries, params: AlgebraParams,
                           dio: DiophantineParams = None,
                           min_divisor: float = 1e-13,
                           domain: DomainConfig = DEFAULT_DOMAIN) -> FourierTaylorSeries:
    """Apply the derivation Gamma_f to g.

    Gamma_f = {G_s f, .} - (a_f / rho) d_x - {x W_f, .} with W_f built from
    the curvature drive; it satisfies the operator identity
    H(Gamma_f g) - Gamma_f(H g) = {solvable_projection(f), g}.
    """
    gsf = small_divisor_solve(f, params, dio, min_divisor)
    af = translation_coefficient(f, q, params, dio, min_divisor)
    t1 = fts.poisson_bracket(gsf, g, domain)
    t2 = fts.scale(fts.partial_x(g), -af / params.rho)
    inner = _inner_drive(f, q, params, af, dio, min_divisor, domain)
    xw = _lift_degree(small_divisor_solve(
        fts.scale(inner, 1.0 / params.rho), params, dio, min_divisor))
    t3 = fts.scale(fts.poisson_bracket(xw, g, domain), -1.0)
    return t1 + t2 + t3


# -- verification -------------------------------------------------------------


def probe_basket(trunc: TruncationSpec, rho: float):
    """Low-degree real probes used to test operator identities weakly."""
    return [
        fts.from_real_terms([(0, 0, 1, 1.0)], trunc, rho),            # x
        fts.from_real_terms([(0, 1, 0, 0.5)], trunc, rho),            # cos(theta)
        fts.from_real_terms([(1, 1, 1, 0.5j)], trunc, rho),           # -x sin(theta + t)
        fts.from_real_terms([(1, 0, 2, 0.5)], trunc, rho),            # x^2 cos(t)
    ]


def generic_curvature(params: AlgebraParams, trunc: TruncationSpec = None) -> FourierTaylorSeries:
    """Constant curvature plus small fluctuating harmonics.

    The fluctuating part is what distinguishes the curvature-aware operators
    from the basic ones, so verification defaults to this rather than to the
    flat constant.
    """
    if trunc is None:
        trunc = TruncationSpec(n_x=0, l_theta=1, l_t=1, pad=0)
    return fts.from_real_terms([
        (0, 0, 0, params.curvature0),
        (0, 1, 0, 0.03 + 0.01j),
        (1, 0, 0, -0.02 + 0.04j),
        (1, 1, 0, 0.01 - 0.02j),
    ], trunc, params.rho)


def _l1(s: FourierTaylorSeries) -> float:
    return float(np.sum(np.abs(s.coeffs)))


def _suite_window(trunc: TruncationSpec):
    # the identity basket grows harmonic support by at most 3 and degree by
    # at most 3, so random inputs must stay that far inside the box
    return {
        "l_t": max(trunc.l_t - 3, 0),
        "l_theta": max(trunc.l_theta - 3, 0),
        "n_x": max(trunc.n_x - 3, 0),
    }


def run_identity_suite(params: AlgebraParams, q: FourierTaylorSeries = None,
                       trunc: TruncationSpec = None, n_trials: int = 50,
                       seed: int = 0, dio: DiophantineParams = None,
                       domain: DomainConfig = DEFAULT_DOMAIN):
    """Measure every exact operator identity on random real series.

    Returns a list of dicts {identity, trials, max_residual, window, seed}.
    Residuals are relative (coefficient l1, normalized by the inputs) and
    are floating-point noise when the implementation is correct: random
    supports stay far enough inside the truncation box that no product or
    bracket in any identity can be clipped.
    """
    if trunc is None:
        trunc = TruncationSpec(n_x=6, l_theta=8, l_t=8, pad=2)
    if q is None:
        q = generic_curvature(params)
    win = _suite_window(trunc)
    if min(win.values()) < 1:
        raise ValueError(f"truncation box {trunc} too small for the identity suite")
    rng = np.random.default_rng(seed)
    probes = probe_basket(trunc, params.rho)
    names = [
        "resonant_idempotent",
        "solvable_after_resonant",
        "derivation_after_resonant",
        "homological",
        "partition_of_identity",
        "drift_inverse_on_low_degree",
        "basic_solver_kills_basic_resonant",
        "translation_kills_basic_resonant",
    ]
    worst = dict.fromkeys(names, 0.0)

    for _ in range(n_trials):
        f = fts.random_real_series(trunc, params.rho, rng, n_terms=30,
                                   l_t_max=win["l_t"], l_theta_max=win["l_theta"],
                                   n_x_max=win["n_x"])
        nf = max(_l1(f), 1e-300)
        rf = resonant_projection(f, q, params, dio, domain=domain)
        kf = projection_correction(f, q, params, dio, domain=domain)
        solv = basic_solvable(f) + kf

        worst["resonant_idempotent"] = max(
            worst["resonant_idempotent"],
            _l1(resonant_projection(rf, q, params, dio, domain=domain) - rf) / max(_l1(rf), 1e-300))
        worst["solvable_after_resonant"] = max(
            worst["solvable_after_resonant"],
            _l1(solvable_projection(rf, q, params, dio, domain=domain)) / nf)
        worst["partition_of_identity"] = max(
            worst["partition_of_identity"], _l1(rf + solv - f) / nf)

        gs = small_divisor_solve(f, params, dio)
        drift = fts.scale(fts.partial_theta(gs), params.omega) + fts.partial_t(gs)
        target = fluctuation_op(project_degree_le(f, 1))
        worst["drift_inverse_on_low_degree"] = max(
            worst["drift_inverse_on_low_degree"], _l1(drift - target) / nf)

        rsf = basic_resonant(f)
        worst["basic_solver_kills_basic_resonant"] = max(
            worst["basic_solver_kills_basic_resonant"],
            _l1(small_divisor_solve(rsf, params, dio)) / nf)
        worst["translation_kills_basic_resonant"] = max(
            worst["translation_kills_basic_resonant"],
            abs(translation_coefficient(rsf, q, params, dio)) / nf)

        for g in probes:
            ng = max(_l1(g), 1e-300)
            worst["derivation_after_resonant"] = max(
                worst["derivation_after_resonant"],
                _l1(homological_derivation(rf, g, q, params, dio, domain=domain)) / (nf * ng))
            lhs = hamiltonian_apply(
                homological_derivation(f, g, q, params, dio, domain=domain), q, params, domain)
            rhs = homological_derivation(
                f, hamiltonian_apply(g, q, params, domain), q, params, dio, domain=domain)
            commutator = lhs - rhs
            want = fts.poisson_bracket(solv, g, domain)
            worst["homological"] = max(
                worst["homological"], _l1(commutator - want) / (nf * ng))

    return [
        {"identity": name, "trials": n_trials, "max_residual": worst[name],
         "window": dict(win), "seed": seed}
        for name in names
    ]


def verify_homological(f: FourierTaylorSeries, q: FourierTaylorSeries,
                       params: AlgebraParams, probes=None,
                       dio: DiophantineParams = None, working_r: float = 0.5,
                       domain: DomainConfig = DEFAULT_DOMAIN) -> float:
    """Residual of the commutator identity for one generator f.

    Measures ``|| H(Gamma_f g) - Gamma_f(H g) - {Nf, g} ||`` (majorant at
    ``working_r``) over a probe basket, relative to ``||f|| ||g||``.  The
    support of f must stay 3 harmonics and 3 degrees inside its own box,
    otherwise products clip and the residual reflects truncation error.
    """
    if probes is None:
        probes = probe_basket(f.trunc, params.rho)
    nf = max(fts.majorant_norm(f, working_r, domain), 1e-300)
    solv = solvable_projection(f, q, params, dio, domain=domain)
    worst = 0.0
    for g in probes:
        ng = max(fts.majorant_norm(g, working_r, domain), 1e-300)
        lhs = hamiltonian_apply(
            homological_derivation(f, g, q, params, dio, domain=domain), q, params, domain)
        rhs = homological_derivation(
            f, hamiltonian_apply(g, q, params, domain), q, params, dio, domain=domain)
        want = fts.poisson_bracket(solv, g, domain)
        resid = (lhs - rhs) - want
        worst = max(worst, fts.majorant_norm(resid, working_r, domain) / (nf * ng))
    return worst


def verify_gr_zero(f: FourierTaylorSeries, q: FourierTaylorSeries,
                   params: AlgebraParams, probes=None,
                   dio: DiophantineParams = None, working_r: float = 0.5,
                   domain: DomainConfig = DEFAULT_DOMAIN) -> float:
    """Residual of Gamma annihilating the resonant range, for one f.

    Measures ``|| Gamma_{Rf} g ||`` relative to ``||f|| ||g||`` over a probe
    basket.  Same support caveat as `verify_homological`.
    """
    if probes is None:
        probes = probe_basket(f.trunc, params.rho)
    nf = max(fts.majorant_norm(f, working_r, domain), 1e-300)
    rf = resonant_projection(f, q, params, dio, domain=domain)
    worst = 0.0
    for g in probes:
        ng = max(fts.majorant_norm(g, working_r, domain), 1e-300)
        resid = homological_derivation(rf, g, q, params, dio, domain=domain)
        worst = max(worst, fts.majorant_norm(resid, working_r, domain) / (nf * ng))
    return worst
