"""Quantitative normal-form step and iteration for the reduced top.

One step conjugates the generator ``H + {V, .}`` by ``exp(Gamma_V)`` and
returns the transformed perturbation ``V_*`` together with the resonant
part it banked into the normal form and the updated curvature coefficient.
Around the step this module provides the explicit bound constants of the
derivation estimate, a hypothesis/margin certifier, the smallness
threshold and step sequences of the convergence schedule, and a driver
that runs several steps while checking quadratic contraction.

Norms below are the majorant norm of :mod:`lie_kam.series`; all bounds are
one-sided coefficient-sum certificates, not sharp operator norms.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import series as fts
from . import operators as ops
from .series import (
    DEFAULT_DOMAIN,
    DomainConfig,
    FourierTaylorSeries,
    TruncationSpec,
)
from .operators import AlgebraParams, DiophantineParams

__all__ = [
    "DivergenceError",
    "HypothesisError",
    "IterationError",
    "BoundConstants",
    "LieTransformResult",
    "IterationState",
    "compute_bound_constants",
    "certify_bounds",
    "lie_exp_apply",
    "compute_v_star",
    "conjugacy_residual",
    "eps0_threshold",
    "schedule_sequences",
    "kam_iterate",
    "iteration_ledger",
]

_E = math.e
_Q_FLOOR_DROP = 2.0 ** (-math.pi ** 2 / 3.0)


class DivergenceError(ArithmeticError):
    """Exponential Lie series failed to contract."""


class HypothesisError(ValueError):
    """A quantitative hypothesis of the bound package is violated."""


class IterationError(RuntimeError):
    """Iteration lost contraction; carries the states computed so far."""

    def __init__(self, message, states=None):
        super().__init__(message)
        self.states = list(states) if states is not None else []


# -- bound constants ----------------------------------------------------------


@dataclass(frozen=True)
class BoundConstants:
    """Explicit constants of the derivation and projection estimates.

    Parameters
    ----------
    c1, c2, c3, c4 : float
        Term-by-term constants of the derivation bound; ``c`` combines
        them so that ``||Gamma_w z|| <= lam(d, delta) ||w|| ||z||`` with
        the norms taken at radii ``r``, ``r - delta`` and ``r - d - delta``.
    c : float
        Combined derivation constant.
    c_tilde : float
        Projection constant: ``||N w||, ||R w|| <= xi(delta) ||w||_r`` at
        radius ``r - delta``.
    q, tau, gamma, rho : float
        Hypothesis floor for the curvature average, Diophantine exponent
        and constant, and the Casimir radius they were computed for.
    r, d, delta : float
        Analyticity radius and the two losses the constants were built at.
    x_half : float
        Half-width of the real slow-variable domain (enters through the
        polynomial weight base R(r) = x_half + r).
    """

    c1: float
    c2: float
    c3: float
    c4: float
    c: float
    c_tilde: float
    q: float
    tau: float
    gamma: float
    rho: float
    r: float
    d: float
    delta: float
    x_half: float

    def lam(self, d: float = None, delta: float = None) -> float:
        """Derivation bound factor C / (q^3 d (d + delta)^(2 tau + 2))."""
        d = self.d if d is None else d
        delta = self.delta if delta is None else delta
        if d <= 0 or delta <= 0:
            raise ValueError("losses must be positive")
        s = d + delta
        return self.c / (self.q ** 3 * d * s ** (2.0 * self.tau + 2.0))

    def xi(self, delta: float = None) -> float:
        """Projection bound factor C~ / (q^3 delta^(2 tau + 3))."""
        delta = self.delta if delta is None else delta
        if delta <= 0:
            raise ValueError("loss must be positive")
        return self.c_tilde / (self.q ** 3 * delta ** (2.0 * self.tau + 3.0))

    def eps_mu(self, mu: float) -> float:
        """Smallness budget q^3 mu^(2 tau + 3) / (2 C) for a step of loss mu."""
        if mu < 0:
            raise ValueError("mu must be nonnegative")
        return self.q ** 3 * mu ** (2.0 * self.tau + 3.0) / (2.0 * self.c)


def compute_bound_constants(params: AlgebraParams, dio: DiophantineParams,
                            r: float, d: float, delta: float,
                            domain: DomainConfig = DEFAULT_DOMAIN) -> BoundConstants:
    """Evaluate the explicit constants of the one-step estimates.

    All constants are monotone consequences of three hypotheses: the
    Diophantine floor ``|omega m + l| >= gamma (|l| + |m|)^(-tau)``, the
    average floor ``|Q_00| >= q``, and the norm cap ``||Q||_r <= 1/q``
    (the cap is substituted for every curvature norm below).

    Parameters
    ----------
    params : AlgebraParams
        Reduced-system parameters; only rho and omega enter.
    dio : DiophantineParams
        gamma, tau and the average floor q.
    r : float
        Analyticity radius the bounds certify; must not exceed
        ``domain.r_max``.
    d, delta : float
        Derivation losses, ``d + delta < r``. The projection bound is
        evaluated at the single loss ``delta``.
    domain : DomainConfig
        Supplies the weight base R(r) = x_half + r.

    Returns
    -------
    BoundConstants

    Examples
    --------
    >>> import math
    >>> p = AlgebraParams()
    >>> dd = DiophantineParams(gamma=0.1, tau=1.0)
    >>> bc = compute_bound_constants(p, dd, r=0.5, d=0.1, delta=0.1)
    >>> math.isclose(bc.c1, 5.0 / (0.2 * math.e ** 2))
    True
    """
    if not (d > 0 and delta > 0):
        raise ValueError("losses d and delta must be positive")
    if not d + delta < r:
        raise ValueError("need d + delta < r")
    if r > domain.r_max:
        raise ValueError(f"r={r} exceeds domain r_max={domain.r_max}")
    tau, gamma, q, rho = dio.tau, dio.gamma, dio.q, params.rho
    s = d + delta
    big_r = domain.radius(r)
    tt = tau ** tau
    t1 = (tau + 1.0) ** (tau + 1.0)
    e1 = rho * gamma * _E ** (tau + 1.0)

    def c2_at(loss: float) -> float:
        # average part: |A w| / rho <= c2_at(loss) ||w||_r / (q^2 loss^(tau+1))
        return loss ** tau + t1 / e1

    c1 = (tt + t1) / e1
    c2 = c2_at(s)
    c3 = c1 * c2 * big_r
    c4 = ((2.0 * tau) ** tau * (2.0 * (tau + 1.0)) ** (tau + 1.0)
          + big_r * (2.0 * (tau + 1.0)) ** (2.0 * tau + 2.0) / s) \
        / (rho ** 2 * gamma ** 2 * _E ** (2.0 * tau + 2.0))
    c = (c1 * q ** 3 + c2 * q) * s ** (tau + 1.0) + c3 + s * q ** 2 * c4

    # projection constant: identity part, average recentering, and the
    # three divisor-solve pieces of the curvature correction
    c2d = c2_at(delta)
    two_tau = (2.0 * tau / _E) ** tau
    c_tilde = (q ** 3 * delta ** (2.0 * tau + 3.0)
               + rho ** 2 * abs(params.omega) * c2d * q * delta ** (tau + 2.0)
               + (2.0 * big_r ** 2 / (rho * _E * gamma)) * two_tau
               * q ** 2 * delta ** (tau + 1.0)
               + (2.0 * big_r ** 3 / (rho * _E * gamma * q)) * c2d * two_tau
               + (2.0 * big_r ** 3 * q / (rho ** 2 * gamma ** 2 * _E))
               * (4.0 * tau / _E) ** tau
               * (4.0 * (tau + 1.0) / _E) ** (tau + 1.0))
    return BoundConstants(c1=c1, c2=c2, c3=c3, c4=c4, c=c, c_tilde=c_tilde,
                          q=q, tau=tau, gamma=gamma, rho=rho,
                          r=r, d=d, delta=delta, x_half=domain.x_half)


def certify_bounds(w: FourierTaylorSeries, z: FourierTaylorSeries,
                   q: FourierTaylorSeries, params: AlgebraParams,
                   dio: DiophantineParams, r: float, d: float, delta: float,
                   domain: DomainConfig = DEFAULT_DOMAIN) -> dict:
    """Check the bound hypotheses and measure the certified margins.

    Verifies the three hypotheses behind :func:`compute_bound_constants`
    on the concrete data (scanned Diophantine constant over every mode
    the boxes can produce, curvature average floor, curvature norm cap)
    and then compares the measured majorant norms of ``Gamma_w z``,
    ``N w`` and ``R w`` against the certified bounds.

    Parameters
    ----------
    w, z : FourierTaylorSeries
        Generator and probe of the derivation estimate; ``w`` is also the
        input of the projection estimates.
    q : FourierTaylorSeries
        Curvature coefficient series (degree-0 box).
    params, dio, r, d, delta, domain
        As in :func:`compute_bound_constants`.

    Returns
    -------
    dict
        ``constants`` (the BoundConstants), ``hypotheses`` (measured
        gamma_hat, worst mode, |Q_00|, ||Q||_r), and ``bounds`` mapping
        each estimate to ``{"measured", "bound", "margin"}`` with
        ``margin = bound - measured``.

    Raises
    ------
    HypothesisError
        If any of the three hypotheses fails on the data.
    """
    bc = compute_bound_constants(params, dio, r, d, delta, domain)
    boxes = [w.trunc, z.trunc, q.trunc]
    k_need = max(t.l_t + t.l_theta for t in boxes)
    k_eff = max(dio.k_scan, k_need)
    gamma_hat, worst = ops.estimate_diophantine(params.omega, dio.tau, k_eff)
    if gamma_hat < dio.gamma:
        raise HypothesisError(
            f"scanned Diophantine constant {gamma_hat:.6g} at mode {worst} "
            f"is below the assumed gamma={dio.gamma}")
    q00 = abs(q.coeff(0, 0, 0))
    if q00 < dio.q:
        raise HypothesisError(f"|Q_00|={q00:.6g} is below the floor q={dio.q}")
    qn = fts.majorant_norm(q, r, domain)
    if qn > 1.0 / dio.q:
        raise HypothesisError(
            f"||Q||_r={qn:.6g} exceeds the cap 1/q={1.0 / dio.q:.6g}")

    nw = fts.majorant_norm(w, r, domain)
    nz = fts.majorant_norm(z, r - delta, domain)
    gz = ops.homological_derivation(w, z, q, params, dio, domain=domain)
    measured_g = fts.majorant_norm(gz, r - d - delta, domain)
    bound_g = bc.lam() * nw * nz

    solv = ops.solvable_projection(w, q, params, dio, domain=domain)
    res = ops.resonant_projection(w, q, params, dio, domain=domain)
    measured_n = fts.majorant_norm(solv, r - delta, domain)
    measured_r = fts.majorant_norm(res, r - delta, domain)
    bound_p = bc.xi() * nw

    def row(measured, bound):
        return {"measured": measured, "bound": bound,
                "margin": bound - measured}

    return {
        "constants": bc,
        "hypotheses": {
            "gamma_hat": gamma_hat,
            "worst_mode": worst,
            "k_scan": k_eff,
            "q00": q00,
            "q_norm": qn,
        },
        "bounds": {
            "derivation": row(measured_g, bound_g),
            "solvable_projection": row(measured_n, bound_p),
            "resonant_projection": row(measured_r, bound_p),
        },
    }


# -- exponential of the derivation -------------------------------------------


def lie_exp_apply(f: FourierTaylorSeries, g: FourierTaylorSeries,
                  q: FourierTaylorSeries, params: AlgebraParams,
                  dio: DiophantineParams = None, tol: float = 1e-12,
                  max_terms: int = 40,
                  domain: DomainConfig = DEFAULT_DOMAIN) -> FourierTaylorSeries:
    """Apply ``exp(Gamma_f)`` to g by summing the Lie series.

    Terms are added until the majorant weight of the next term falls
    below ``tol`` times the weight of g (absolute when g has weight 0).
    Five consecutive non-decreasing term weights raise
    :class:`DivergenceError`; hitting ``max_terms`` warns and returns the
    partial sum.
    """
    out = g
    term = g
    scale_ = max(fts.majorant_norm(g, 0.0, domain), 1.0)
    prev = math.inf
    rises = 0
    for k in range(1, max_terms + 1):
        term = fts.scale(
            ops.homological_derivation(f, term, q, params, dio, domain=domain),
            1.0 / k)
        tn = fts.majorant_norm(term, 0.0, domain)
        out = out + term
        if tn <= tol * scale_:
            return out
        if tn >= prev:
            rises += 1
            if rises >= 5:
                raise DivergenceError(
                    f"Lie series failed to contract: term {k} has weight "
                    f"{tn:.3g} after {rises} non-decreasing steps")
        else:
            rises = 0
        prev = tn
    warnings.warn(f"Lie series truncated at {max_terms} terms with last "
                  f"term weight {prev:.3g}", RuntimeWarning)
    return out


# -- one normal-form step ------------------------------------------------------


@dataclass(frozen=True)
class LieTransformResult:
    """Output of a single normal-form step.

    Attributes
    ----------
    v_star : FourierTaylorSeries
        Transformed perturbation (quadratically small in the input).
    rv : FourierTaylorSeries
        Resonant part banked into the normal form.
    q_star : FourierTaylorSeries
        Updated curvature coefficient after absorbing rv.
    series_terms_used : int
        Lie-series terms summed before the tolerance was met.
    tail_norm : float
        Majorant weight dropped outside the index box while building v_star.
    """

    v_star: FourierTaylorSeries
    rv: FourierTaylorSeries
    q_star: FourierTaylorSeries
    series_terms_used: int
    tail_norm: float


def _curvature_update(q: FourierTaylorSeries,
                      rv: FourierTaylorSeries) -> FourierTaylorSeries:
    """Q* = Q + second x-derivative of the banked resonant part.

    The resonant range is spanned by degree <= 2 terms; the update reads
    the degree-2 slice of rv (coefficient of x^2, so the second derivative
    contributes a factor 2) into the degree-0 curvature box.
    """
    trm = q.trunc.merge(rv.trunc)
    c = np.zeros(trm.shape, dtype=np.complex128)
    lt, lth = trm.l_t - q.trunc.l_t, trm.l_theta - q.trunc.l_theta
    c[lt:lt + 2 * q.trunc.l_t + 1, lth:lth + 2 * q.trunc.l_theta + 1, 0] = \
        q.coeffs[:, :, 0]
    if rv.trunc.n_x >= 2:
        lt, lth = trm.l_t - rv.trunc.l_t, trm.l_theta - rv.trunc.l_theta
        c[lt:lt + 2 * rv.trunc.l_t + 1, lth:lth + 2 * rv.trunc.l_theta + 1, 0] += \
            2.0 * rv.coeffs[:, :, 2]
    return FourierTaylorSeries(c, trm, q.rho,
                               tail_norm=q.tail_norm + rv.tail_norm)


def compute_v_star(v: FourierTaylorSeries, q: FourierTaylorSeries,
                   params: AlgebraParams, tol: float = 1e-12,
                   dio: DiophantineParams = None, max_terms: int = 40,
                   constants: BoundConstants = None, mu: float = None,
                   domain: DomainConfig = DEFAULT_DOMAIN) -> LieTransformResult:
    """Run one normal-form step on the perturbation v.

    Splits v into its resonant part (banked into the curvature) and the
    solvable rest, and sums the transformed perturbation

        V_* = sum_{k>=1} Gamma_V^k V / k! - sum_{k>=1} Gamma_V^k (N V) / (k+1)!

    so that ``exp(Gamma_V) (H + {V, .}) exp(-Gamma_V) = H' + {V_*, .}``
    with H' the generator carrying curvature ``q_star`` and drift
    ``R V``.

    Parameters
    ----------
    v : FourierTaylorSeries
        Perturbation Hamiltonian.
    q : FourierTaylorSeries
        Current curvature coefficient (degree-0 box).
    params : AlgebraParams
    tol : float
        Relative majorant tolerance for stopping the Lie series.
    dio : DiophantineParams, optional
        Divisor floor certificate for the small-divisor solves.
    max_terms : int
        Lie-series term cap; exceeding it warns and truncates.
    constants : BoundConstants, optional
        When given together with an implied loss, the input norm is
        checked against the smallness budget ``constants.eps_mu(mu)``
        and a RuntimeWarning is emitted if it exceeds the budget.
    mu : float, optional
        Loss for the budget check; defaults to ``constants.delta``.
    domain : DomainConfig

    Returns
    -------
    LieTransformResult

    Examples
    --------
    >>> tr = TruncationSpec(n_x=6, l_theta=8, l_t=8, pad=2)
    >>> p = AlgebraParams()
    >>> qs = ops.generic_curvature(p, tr)
    >>> v0 = fts.zeros(tr, p.rho)
    >>> out = compute_v_star(v0, qs, p)
    >>> fts.majorant_norm(out.v_star, 0.0, DEFAULT_DOMAIN)
    0.0
    """
    if constants is not None:
        budget = constants.eps_mu(constants.delta if mu is None else mu)
        nv = fts.majorant_norm(v, constants.r, domain)
        if nv > budget:
            warnings.warn(
                f"input norm {nv:.3g} exceeds the smallness budget "
                f"{budget:.3g}; the quantitative contraction is not certified",
                RuntimeWarning)
    rv = ops.resonant_projection(v, q, params, dio, domain=domain)
    nv0 = ops.solvable_projection(v, q, params, dio, domain=domain)
    scale_ = max(fts.majorant_norm(v, 0.0, domain), 1.0)

    out = fts.zeros(v.trunc, v.rho)
    gv = v
    gn = nv0
    terms = 0
    prev = math.inf
    rises = 0
    fact = 1.0
    for k in range(1, max_terms + 1):
        gv = ops.homological_derivation(v, gv, q, params, dio, domain=domain)
        gn = ops.homological_derivation(v, gn, q, params, dio, domain=domain)
        fact *= k
        step = fts.scale(gv, 1.0 / fact) - fts.scale(gn, 1.0 / (fact * (k + 1)))
        out = out + step
        terms = k
        tn = fts.majorant_norm(step, 0.0, domain)
        if tn <= tol * scale_:
            break
        if tn >= prev:
            rises += 1
            if rises >= 5:
                raise DivergenceError(
                    f"normal-form series failed to contract at term {k} "
                    f"(weight {tn:.3g})")
        else:
            rises = 0
        prev = tn
    else:
        warnings.warn(f"normal-form series truncated at {max_terms} terms",
                      RuntimeWarning)
    q_star = _curvature_update(q, rv)
    return LieTransformResult(v_star=out, rv=rv, q_star=q_star,
                              series_terms_used=terms,
                              tail_norm=out.tail_norm)


def conjugacy_residual(v: FourierTaylorSeries, q: FourierTaylorSeries,
                       params: AlgebraParams, g: FourierTaylorSeries,
                       tol: float = 1e-12, dio: DiophantineParams = None,
                       max_terms: int = 40,
                       domain: DomainConfig = DEFAULT_DOMAIN) -> float:
    """Majorant weight of the conjugacy defect on one probe g.

    Measures ``exp(Gamma_V)((H + {V, .}) exp(-Gamma_V) g) - (H g +
    {R V + V_*, g})`` at radius 0, normalized by the probe weight. Exact
    arithmetic would give zero for supports that stay far enough inside
    the index box.
    """
    res = compute_v_star(v, q, params, tol, dio, max_terms, domain=domain)
    inner = lie_exp_apply(fts.scale(v, -1.0), g, q, params, dio, tol,
                          max_terms, domain)
    mid = ops.hamiltonian_apply(inner, q, params, domain) \
        + fts.poisson_bracket(v, inner, domain)
    lhs = lie_exp_apply(v, mid, q, params, dio, tol, max_terms, domain)
    rhs = ops.hamiltonian_apply(g, q, params, domain) \
        + fts.poisson_bracket(res.rv + res.v_star, g, domain)
    ng = max(fts.majorant_norm(g, 0.0, domain), 1e-300)
    return fts.majorant_norm(lhs - rhs, 0.0, domain) / ng


# -- convergence schedule ------------------------------------------------------


def eps0_threshold(q0: float, c: float, r: float, tau: float) -> float:
    """Largest starting size for which the step sequences close.

    The threshold makes the analytic bound on the total radius loss equal
    to r/3; any eps0 at or below it keeps every radius positive.
    """
    if not 0.0 < q0 < 1.0:
        raise ValueError("q0 must lie in (0, 1)")
    if c <= 0 or r <= 0 or tau <= 0:
        raise ValueError("c, r and tau must be positive")
    return (q0 ** 3 / c) * (r / math.pi ** 2) ** (2.0 * tau + 3.0) \
        * 2.0 ** (2.0 * tau + 2.0 - math.pi ** 2)


def schedule_sequences(eps0: float, q0: float, tau: float, c: float,
                       c_tilde: float, r: float, max_steps: int = 20) -> dict:
    """Build the step sequences of the convergence schedule and check them.

    Produces ``max_steps`` rows of the sequences

        eps_i = eps0 / (i + 1)^(2 (2 tau + 3)),
        q_i   = q0 prod_{j<=i} (1 - 1/(j+1)^2) = q0 (i + 2) / (2 (i + 1)),
        mu_i  = (2 c eps_i / q_i^3)^(1 / (2 tau + 3)),
        r_{i+1} = r_i - mu_i,

    and records, per step, the six side conditions of the convergence
    theorem: (a) the smallness identity eps_i = q_i^3 mu_i^(2 tau + 3) /
    (2 c); (b) the curvature floor q_i >= c_tilde / (c r_i^2); (c)
    0 < mu_i < r_i / 3; (d) the radius budget (partial sums below r and
    the analytic bound on the full sum below r / 3); (e) strict decrease
    of eps_i; (f) q_inf < q_i < 1 with q_inf = q0 2^(-pi^2 / 3).

    Returns
    -------
    dict
        ``valid`` (no recorded failure), ``steps`` (one dict per step
        with i, eps, mu, q, r and the per-condition booleans),
        ``failures`` (condition name and step index, step None for the
        eps0 / r preconditions), ``q_inf``, ``mu_sum``,
        ``mu_analytic_bound``, ``eps0_max`` and ``r_floor``.
    """
    if not 0.0 < q0 < 1.0:
        raise ValueError("q0 must lie in (0, 1)")
    if tau <= 0 or c <= 0 or c_tilde <= 0 or r <= 0:
        raise ValueError("tau, c, c_tilde and r must be positive")
    if eps0 < 0:
        raise ValueError("eps0 must be nonnegative")
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    twot3 = 2.0 * tau + 3.0
    q_inf = q0 * _Q_FLOOR_DROP
    thr = eps0_threshold(q0, c, r, tau)
    r_floor = math.sqrt(c_tilde / c)
    failures = []
    if eps0 > thr:
        failures.append({"condition": "eps0", "step": None})
    if r < r_floor:
        failures.append({"condition": "r_floor", "step": None})
    analytic = (math.pi ** 2 / 6.0) \
        * (2.0 * c * eps0 / q_inf ** 3) ** (1.0 / twot3)
    if not analytic < r / 3.0:
        failures.append({"condition": "d", "step": None})

    steps = []
    q_i = q0
    r_i = r
    mu_sum = 0.0
    eps_prev = math.inf
    for i in range(max_steps):
        if i > 0:
            q_i *= 1.0 - 1.0 / (i + 1) ** 2
        eps_i = eps0 / (i + 1) ** (2.0 * twot3)
        mu_i = (2.0 * c * eps_i / q_i ** 3) ** (1.0 / twot3)
        conds = {
            "a": math.isclose(eps_i, q_i ** 3 * mu_i ** twot3 / (2.0 * c),
                              rel_tol=1e-9, abs_tol=0.0) or eps_i == mu_i == 0.0,
            "b": q_i >= c_tilde / (c * r_i ** 2),
            "c": 0.0 < mu_i < r_i / 3.0,
            "d": mu_sum + mu_i < r and analytic < r / 3.0,
            "e": eps_i < eps_prev,
            "f": q_inf < q_i < 1.0,
        }
        steps.append({"i": i, "eps": eps_i, "mu": mu_i, "q": q_i, "r": r_i,
                      "conditions": conds})
        for name in "abcdef":
            if not conds[name]:
                failures.append({"condition": name, "step": i})
        mu_sum += mu_i
        r_i -= mu_i
        eps_prev = eps_i
    return {
        "valid": not failures,
        "steps": steps,
        "failures": failures,
        "q_inf": q_inf,
        "mu_sum": mu_sum,
        "mu_analytic_bound": analytic,
        "eps0_max": thr,
        "r_floor": r_floor,
    }


# -- iteration driver ----------------------------------------------------------


@dataclass(frozen=True)
class IterationState:
    """Snapshot of the iteration after i normal-form steps.

    ``mu_i`` is the radius loss actually consumed producing the next
    state (capped at r_i / 6 so measured norms stay inside the domain
    budget); ``mu_schedule`` is the uncapped schedule value the side
    conditions refer to. ``conditions`` carries the schedule booleans
    for this step plus ``q_star`` (updated curvature average above its
    certified floor) for states produced by a step.
    """

    i: int
    v: FourierTaylorSeries
    curvature: FourierTaylorSeries
    r_i: float
    eps_i: float
    mu_i: float
    mu_schedule: float
    q_i: float
    measured_v_norm: float
    contraction_ratio: float
    tail_norm: float
    conditions: dict
    absorbed: tuple = field(repr=False, default=())


def kam_iterate(v0: FourierTaylorSeries, q0: FourierTaylorSeries,
                params: AlgebraParams, dio: DiophantineParams, r: float,
                steps: int = 3, tol: float = 1e-12, d: float = None,
                delta: float = None, max_terms: int = 40,
                domain: DomainConfig = DEFAULT_DOMAIN) -> list:
    """Run several normal-form steps with schedule bookkeeping.

    Parameters
    ----------
    v0 : FourierTaylorSeries
        Starting perturbation.
    q0 : FourierTaylorSeries
        Starting curvature coefficient.
    params, dio : AlgebraParams, DiophantineParams
    r : float
        Starting analyticity radius (must not exceed ``domain.r_max``).
    steps : int
        Number of normal-form steps; returns steps + 1 states.
    tol, max_terms : float, int
        Lie-series controls, as in :func:`compute_v_star`.
    d, delta : float, optional
        Losses for the bound constants; default r / 6 each.
    domain : DomainConfig

    Returns
    -------
    list of IterationState
        States 0..steps. State i holds V_i measured at radius r_i; the
        contraction ratio on state i + 1 is
        ``||V_{i+1}||_{r_{i+1}} / ||V_i||_{r_i}^2``.

    Raises
    ------
    IterationError
        If a step increases the measured norm; the states computed so
        far are attached to the exception.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    d = r / 6.0 if d is None else d
    delta = r / 6.0 if delta is None else delta
    bc = compute_bound_constants(params, dio, r, d, delta, domain)
    eps0 = fts.majorant_norm(v0, r, domain)
    sched = schedule_sequences(max(eps0, 0.0), dio.q, dio.tau, bc.c,
                               bc.c_tilde, r, max_steps=steps + 1)

    states = []
    v, qs = v0, q0
    r_i = r
    prev_norm = None
    absorbed = []
    tail_in = 0.0
    ratio = None
    extra = {}
    for i in range(steps + 1):
        row = sched["steps"][i]
        measured = fts.majorant_norm(v, r_i, domain)
        if prev_norm is not None and measured > prev_norm:
            raise IterationError(
                f"step {i} increased the measured norm: {measured:.3g} > "
                f"{prev_norm:.3g}", states)
        conds = dict(row["conditions"])
        conds.update(extra)
        mu_sched = row["mu"]
        mu_used = min(mu_sched, r_i / 6.0)
        states.append(IterationState(
            i=i, v=v, curvature=qs, r_i=r_i, eps_i=row["eps"],
            mu_i=mu_used, mu_schedule=mu_sched, q_i=row["q"],
            measured_v_norm=measured, contraction_ratio=ratio,
            tail_norm=tail_in, conditions=conds, absorbed=tuple(absorbed)))
        if i == steps:
            break
        res = compute_v_star(v, qs, params, tol, dio, max_terms,
                             domain=domain)
        absorbed.append(res.rv)
        # certified floor for the updated average; guard mu = 0
        if mu_sched > 0.0:
            floor = row["q"] - measured * bc.c_tilde \
                / (row["q"] ** 3 * mu_sched ** (2.0 * dio.tau + 5.0))
        else:
            floor = -math.inf
        extra = {"q_star": abs(res.q_star.coeff(0, 0, 0)) >= floor}
        tail_in = res.tail_norm
        prev_norm = measured
        v, qs = res.v_star, res.q_star
        r_i = r_i - mu_used
        next_norm = fts.majorant_norm(v, r_i, domain)
        if measured > 0.0:
            ratio = next_norm / measured ** 2
        else:
            ratio = 0.0 if next_norm == 0.0 else None
    return states


def iteration_ledger(states: list) -> list:
    """JSON-ready per-step summary of an iteration run."""
    out = []
    for st in states:
        out.append({
            "i": st.i,
            "r_i": st.r_i,
            "eps_i": st.eps_i,
            "mu_i": st.mu_i,
            "mu_schedule": st.mu_schedule,
            "q_i": st.q_i,
            "measured_norm": st.measured_v_norm,
            "contraction_ratio": st.contraction_ratio,
            "tail_norm": st.tail_norm,
            "conditions": dict(st.conditions),
        })
    return out
