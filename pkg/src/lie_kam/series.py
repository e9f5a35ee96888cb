"""Truncated Fourier-Taylor series on the reduced phase space of a spinning body.

A series is a finite sum

    F(x, theta, t) = sum_{l,m,n} c_{l,m,n} x^n exp(i (l t + m theta))

with wave numbers l in [-L_t, L_t], m in [-L_theta, L_theta] and polynomial
degree n in [0, N_x]. Coefficients are stored densely over that index box.
A series representing a real-valued function satisfies the reality condition
c_{-l,-m,n} = conj(c_{l,m,n}); reality is re-checked after every arithmetic
operation to catch index-mapping bugs early.

Norms are measured by the one-sided coefficient majorant

    ||F||_r = sum_{l,m} B_{l,m}(r) exp(r (|l| + |m|)),
    B_{l,m}(r) = sum_n |c_{l,m,n}| R(r)^n,   R(r) = x_half + r,

an upper bound for the analytic sup norm on the complex strip of width r
around the real domain |x| <= x_half. All classical Cauchy estimates hold
for this majorant coefficient-wise, which is what makes the bound
certification in :mod:`lie_kam.normalform` meaningful.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .backend import convolve_nonzeros

__all__ = [
    "TruncationSpec",
    "DomainConfig",
    "NormEstimate",
    "FourierTaylorSeries",
    "RealityError",
    "DEFAULT_DOMAIN",
    "zeros",
    "from_terms",
    "from_real_terms",
    "constant",
    "add",
    "scale",
    "multiply",
    "partial_x",
    "partial_theta",
    "partial_t",
    "poisson_bracket",
    "evaluate",
    "majorant_norm",
    "sampled_norm",
    "norm_estimate",
    "cauchy_bound_check",
    "random_real_series",
    "max_coeff_diff",
    "to_json",
    "from_json",
]

# reality defect threshold, scaled by max(1, max |coefficient|)
_REALITY_TOL = 1e-12


class RealityError(ValueError):
    """An operation on real series produced a non-real result."""


@dataclass(frozen=True)
class TruncationSpec:
    """Index box of a truncated series.

    Parameters
    ----------
    n_x : int
        Maximum polynomial degree in x.
    l_theta : int
        Maximum |m| wave number in the body angle.
    l_t : int
        Maximum |l| wave number in time.
    pad : int
        Safety margin used when verifying identities on an inner window.
    """

    n_x: int
    l_theta: int
    l_t: int
    pad: int = 0

    def __post_init__(self):
        if min(self.n_x, self.l_theta, self.l_t) < 0:
            raise ValueError("truncation orders must be non-negative")
        if not 0 <= self.pad <= min(self.n_x, self.l_theta, self.l_t):
            raise ValueError("pad must satisfy 0 <= pad <= min(N_x, L_theta, L_t)")

    @property
    def shape(self):
        return (2 * self.l_t + 1, 2 * self.l_theta + 1, self.n_x + 1)

    def merge(self, other: "TruncationSpec") -> "TruncationSpec":
        """Elementwise max of two boxes (pad included)."""
        return TruncationSpec(
            n_x=max(self.n_x, other.n_x),
            l_theta=max(self.l_theta, other.l_theta),
            l_t=max(self.l_t, other.l_t),
            pad=min(max(self.pad, other.pad),
                    min(max(self.n_x, other.n_x),
                        max(self.l_theta, other.l_theta),
                        max(self.l_t, other.l_t))),
        )


@dataclass(frozen=True)
class DomainConfig:
    """Real domain half-width and analyticity budget for norms.

    R(r) = x_half + r is the polynomial weight base of the majorant norm;
    r above r_max raises instead of silently extrapolating.
    """

    x_half: float = 0.25
    r_max: float = 8.0

    def __post_init__(self):
        if self.x_half <= 0 or self.r_max <= 0:
            raise ValueError("domain widths must be positive")

    def radius(self, r: float) -> float:
        return self.x_half + r


DEFAULT_DOMAIN = DomainConfig()


@dataclass(frozen=True)
class NormEstimate:
    """A norm value tagged with its index r and how it was obtained."""

    r: float
    value: float
    kind: str  # "majorant" or "sampled"


class FourierTaylorSeries:
    """Dense coefficient box with the algebra operations of this module.

    Instances are immutable; operations return new series. The coefficient
    array has shape (2*L_t+1, 2*L_theta+1, N_x+1), axes (l, m, n), with wave
    numbers offset so that index 0 is -L_t (resp. -L_theta).

    Attributes
    ----------
    coeffs : complex ndarray
    trunc : TruncationSpec
    rho : float
        Casimir radius of the momentum sphere the reduced coordinates live on.
    tail_norm : float
        Majorant weight (at r = 0) of whatever the operation that produced
        this series dropped outside the index box. Zero for exact operations.
    """

    __slots__ = ("coeffs", "trunc", "rho", "tail_norm", "_herm_defect")

    def __init__(self, coeffs, trunc: TruncationSpec, rho: float, tail_norm: float = 0.0):
        coeffs = np.array(coeffs, dtype=np.complex128, order="C", copy=True)
        if coeffs.shape != trunc.shape:
            raise ValueError(f"coefficient shape {coeffs.shape} != box {trunc.shape}")
        if not rho > 0:
            raise ValueError("rho must be positive")
        coeffs.flags.writeable = False
        self.coeffs = coeffs
        self.trunc = trunc
        self.rho = float(rho)
        self.tail_norm = float(tail_norm)
        mirror = np.conj(coeffs[::-1, ::-1, :])
        self._herm_defect = float(np.max(np.abs(coeffs - mirror))) if coeffs.size else 0.0

    # -- basic queries ---------------------------------------------------

    @property
    def hermitian_defect(self) -> float:
        """Max |c_{l,m,n} - conj(c_{-l,-m,n})| over the box."""
        return self._herm_defect

    @property
    def is_real(self) -> bool:
        scale_ = max(1.0, float(np.max(np.abs(self.coeffs)))) if self.coeffs.size else 1.0
        return self._herm_defect <= _REALITY_TOL * scale_

    def coeff(self, l: int, m: int, n: int) -> complex:
        """Coefficient c_{l,m,n}; indices outside the box are zero."""
        t = self.trunc
        if abs(l) > t.l_t or abs(m) > t.l_theta or not 0 <= n <= t.n_x:
            return 0.0 + 0.0j
        return complex(self.coeffs[l + t.l_t, m + t.l_theta, n])

    def nonzero_terms(self):
        """Iterate (l, m, n, value) over nonzero coefficients."""
        t = self.trunc
        li, mi, ni = np.nonzero(self.coeffs)
        for a, b, c in zip(li, mi, ni):
            yield int(a - t.l_t), int(b - t.l_theta), int(c), complex(self.coeffs[a, b, c])

    def __repr__(self):
        t = self.trunc
        nnz = int(np.count_nonzero(self.coeffs))
        return (f"FourierTaylorSeries(N_x={t.n_x}, L_theta={t.l_theta}, "
                f"L_t={t.l_t}, rho={self.rho}, nnz={nnz})")

    # -- operator sugar ---------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(other, -1.0))

    def __neg__(self):
        return scale(self, -1.0)

    def __mul__(self, other):
        if isinstance(other, FourierTaylorSeries):
            return multiply(self, other)
        return scale(self, other)

    __rmul__ = __mul__


# -- construction ----------------------------------------------------------


def zeros(trunc: TruncationSpec, rho: float) -> FourierTaylorSeries:
    return FourierTaylorSeries(np.zeros(trunc.shape, dtype=np.complex128), trunc, rho)


def from_terms(terms, trunc: TruncationSpec, rho: float) -> FourierTaylorSeries:
    """Series from an iterable of (l, m, n, value) or a {(l,m,n): value} dict.

    Raises if any index falls outside the box.
    """
    if isinstance(terms, dict):
        terms = [(l, m, n, v) for (l, m, n), v in terms.items()]
    c = np.zeros(trunc.shape, dtype=np.complex128)
    for l, m, n, v in terms:
        if abs(l) > trunc.l_t or abs(m) > trunc.l_theta or not 0 <= n <= trunc.n_x:
            raise ValueError(f"term ({l},{m},{n}) outside truncation box")
        c[l + trunc.l_t, m + trunc.l_theta, n] += v
    return FourierTaylorSeries(c, trunc, rho)


def from_real_terms(terms, trunc: TruncationSpec, rho: float) -> FourierTaylorSeries:
    """Real series from half-lattice terms; mirror coefficients are implied.

    Terms must have l > 0, or l = 0 and m >= 0. Coefficients at l = m = 0
    must be real. The conjugate mirror of every off-center term is added
    automatically, so the result is exactly hermitian.
    """
    if isinstance(terms, dict):
        terms = [(l, m, n, v) for (l, m, n), v in terms.items()]
    full = []
    for l, m, n, v in terms:
        if l < 0 or (l == 0 and m < 0):
            raise ValueError("pass half-lattice terms only (l > 0, or l = 0 and m >= 0)")
        v = complex(v)
        if l == 0 and m == 0:
            if abs(v.imag) > _REALITY_TOL * max(1.0, abs(v)):
                raise RealityError("center coefficients of a real series must be real")
            full.append((l, m, n, complex(v.real, 0.0)))
        else:
            full.append((l, m, n, v))
            full.append((-l, -m, n, v.conjugate()))
    return from_terms(full, trunc, rho)


def constant(value, trunc: TruncationSpec, rho: float) -> FourierTaylorSeries:
    return from_terms([(0, 0, 0, value)], trunc, rho)


def random_real_series(trunc: TruncationSpec, rho: float, rng, n_terms: int = 30,
                       l_t_max=None, l_theta_max=None, n_x_max=None) -> FourierTaylorSeries:
    """Seeded random real series with support limited to a sub-window.

    Used by the identity suites; limiting the support keeps composite
    operator chains inside the truncation box so identities hold exactly.
    """
    lt = trunc.l_t if l_t_max is None else int(l_t_max)
    lm = trunc.l_theta if l_theta_max is None else int(l_theta_max)
    nx = trunc.n_x if n_x_max is None else int(n_x_max)
    c = np.zeros(trunc.shape, dtype=np.complex128)
    for _ in range(n_terms):
        l = int(rng.integers(0, lt + 1))
        m = int(rng.integers(-lm, lm + 1))
        n = int(rng.integers(0, nx + 1))
        if l == 0 and m < 0:
            m = -m
        v = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        if l == 0 and m == 0:
            v = complex(v.real, 0.0)
        c[l + trunc.l_t, m + trunc.l_theta, n] += v
        if l != 0 or m != 0:
            c[-l + trunc.l_t, -m + trunc.l_theta, n] += v.conjugate()
    return FourierTaylorSeries(c, trunc, rho)


# -- arithmetic -------------------------------------------------------------


def _check_rho(a: FourierTaylorSeries, b: FourierTaylorSeries):
    if abs(a.rho - b.rho) > 1e-12 * max(1.0, abs(a.rho)):
        raise ValueError(f"rho mismatch: {a.rho} vs {b.rho}")


def _embed(a: FourierTaylorSeries, trunc: TruncationSpec):
    """Coefficients of a placed inside a larger box."""
    if a.trunc == trunc:
        return a.coeffs
    out = np.zeros(trunc.shape, dtype=np.complex128)
    ta = a.trunc
    sl = slice(trunc.l_t - ta.l_t, trunc.l_t + ta.l_t + 1)
    sm = slice(trunc.l_theta - ta.l_theta, trunc.l_theta + ta.l_theta + 1)
    out[sl, sm, : ta.n_x + 1] = a.coeffs
    return out


def _guard_reality(out: FourierTaylorSeries, *inputs) -> FourierTaylorSeries:
    """Raise if real inputs produced a non-real output.

    Rounding-level defects (the convolution kernel sums mirror cells in
    different orders) are measured against the input magnitude, since
    cancellation can leave an output far smaller than the inputs; surviving
    outputs are re-symmetrized so defects never accumulate along a chain.
    """
    if not all(s.is_real for s in inputs):
        return out
    if out.hermitian_defect == 0.0:
        return out
    scale_ = max([1.0] + [float(np.max(np.abs(s.coeffs))) for s in inputs])
    if out.hermitian_defect > _REALITY_TOL * scale_:
        raise RealityError(
            f"operation broke the reality condition (defect {out.hermitian_defect:.3e})")
    sym = 0.5 * (out.coeffs + np.conj(out.coeffs[::-1, ::-1, :]))
    return FourierTaylorSeries(sym, out.trunc, out.rho, tail_norm=out.tail_norm)


def add(a: FourierTaylorSeries, b: FourierTaylorSeries) -> FourierTaylorSeries:
    """Sum on the merged truncation box. Exact, no tail."""
    _check_rho(a, b)
    trunc = a.trunc.merge(b.trunc)
    out = FourierTaylorSeries(_embed(a, trunc) + _embed(b, trunc), trunc, a.rho)
    return _guard_reality(out, a, b)


def scale(a: FourierTaylorSeries, c) -> FourierTaylorSeries:
    out = FourierTaylorSeries(a.coeffs * c, a.trunc, a.rho)
    if isinstance(c, (int, float)) or (isinstance(c, complex) and c.imag == 0.0):
        return _guard_reality(out, a)
    return out


def multiply(a: FourierTaylorSeries, b: FourierTaylorSeries,
             domain: DomainConfig = DEFAULT_DOMAIN) -> FourierTaylorSeries:
    """Truncated product on the merged box.

    Products falling outside the box are dropped; their majorant weight at
    r = 0 (so abs(value) * x_half^degree) is reported on the result's
    tail_norm attribute.
    """
    _check_rho(a, b)
    trunc = a.trunc.merge(b.trunc)
    ia = np.nonzero(a.coeffs)
    ib = np.nonzero(b.coeffs)
    ta, tb = a.trunc, b.trunc
    la = ia[0].astype(np.int64) - ta.l_t
    ma = ia[1].astype(np.int64) - ta.l_theta
    na = ia[2].astype(np.int64)
    lb = ib[0].astype(np.int64) - tb.l_t
    mb = ib[1].astype(np.int64) - tb.l_theta
    nb = ib[2].astype(np.int64)
    xpow = domain.x_half ** np.arange(ta.n_x + tb.n_x + 1, dtype=np.float64)
    out, tail = convolve_nonzeros(
        la, ma, na, np.ascontiguousarray(a.coeffs[ia]),
        lb, mb, nb, np.ascontiguousarray(b.coeffs[ib]),
        trunc.l_t, trunc.l_theta, trunc.n_x, xpow)
    res = FourierTaylorSeries(out, trunc, a.rho, tail_norm=tail)
    return _guard_reality(res, a, b)


def partial_x(a: FourierTaylorSeries) -> FourierTaylorSeries:
    c = np.zeros_like(a.coeffs)
    n = np.arange(1, a.trunc.n_x + 1)
    c[:, :, :-1] = a.coeffs[:, :, 1:] * n
    return _guard_reality(FourierTaylorSeries(c, a.trunc, a.rho), a)


def partial_theta(a: FourierTaylorSeries) -> FourierTaylorSeries:
    m = np.arange(-a.trunc.l_theta, a.trunc.l_theta + 1)
    c = a.coeffs * (1j * m)[None, :, None]
    return _guard_reality(FourierTaylorSeries(c, a.trunc, a.rho), a)


def partial_t(a: FourierTaylorSeries) -> FourierTaylorSeries:
    l = np.arange(-a.trunc.l_t, a.trunc.l_t + 1)
    c = a.coeffs * (1j * l)[:, None, None]
    return _guard_reality(FourierTaylorSeries(c, a.trunc, a.rho), a)


def poisson_bracket(a: FourierTaylorSeries, b: FourierTaylorSeries,
                    domain: DomainConfig = DEFAULT_DOMAIN) -> FourierTaylorSeries:
    """Reduced bracket {a, b} = (d_x a d_theta b - d_theta a d_x b) / rho."""
    _check_rho(a, b)
    p = multiply(partial_x(a), partial_theta(b), domain)
    q = multiply(partial_theta(a), partial_x(b), domain)
    out = scale(add(p, scale(q, -1.0)), 1.0 / a.rho)
    return FourierTaylorSeries(out.coeffs, out.trunc, out.rho,
                               tail_norm=(p.tail_norm + q.tail_norm) / a.rho)


# -- evaluation and norms ---------------------------------------------------


def _evaluate_raw(a: FourierTaylorSeries, x, theta, t):
    x = np.asarray(x)
    theta = np.asarray(theta)
    t = np.asarray(t)
    shape = np.broadcast_shapes(x.shape, theta.shape, t.shape)
    xb = np.broadcast_to(x, shape).ravel()
    thb = np.broadcast_to(theta, shape).ravel()
    tb = np.broadcast_to(t, shape).ravel()
    tr = a.trunc
    ls = np.arange(-tr.l_t, tr.l_t + 1)
    ms = np.arange(-tr.l_theta, tr.l_theta + 1)
    ns = np.arange(tr.n_x + 1)
    et = np.exp(1j * tb[:, None] * ls[None, :])
    em = np.exp(1j * thb[:, None] * ms[None, :])
    xn = xb[:, None] ** ns[None, :]
    val = np.einsum("lmn,sl,sm,sn->s", a.coeffs, et, em, xn, optimize=True)
    return val.reshape(shape) if shape else val[()]


def evaluate(a: FourierTaylorSeries, x, theta, t,
             domain: DomainConfig = DEFAULT_DOMAIN):
    """Evaluate the series at real points.

    |x| must stay within the configured domain half-width. For a real series
    the imaginary part of the result is checked against 1e-12 (scaled) and
    discarded; complex series return complex values.
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(x) > domain.x_half * (1 + 1e-12) + 1e-15):
        raise ValueError(
            f"evaluation outside domain radius |x| <= {domain.x_half}")
    val = _evaluate_raw(a, x, theta, t)
    if a.is_real:
        scale_ = max(1.0, float(np.max(np.abs(val))))
        if float(np.max(np.abs(np.imag(val)))) > 1e-12 * scale_:
            raise RealityError("real series evaluated to a complex value")
        return np.real(val)
    return val


def majorant_norm(a: FourierTaylorSeries, r: float,
                  domain: DomainConfig = DEFAULT_DOMAIN) -> float:
    """One-sided analytic-norm surrogate at strip width r (see module docs)."""
    if r < 0:
        raise ValueError("r must be non-negative")
    if r > domain.r_max:
        raise ValueError(f"r = {r} exceeds the analyticity budget {domain.r_max}")
    tr = a.trunc
    radius = domain.radius(r)
    b = np.abs(a.coeffs) @ (radius ** np.arange(tr.n_x + 1))
    ls = np.abs(np.arange(-tr.l_t, tr.l_t + 1))
    ms = np.abs(np.arange(-tr.l_theta, tr.l_theta + 1))
    w = np.exp(r * (ls[:, None] + ms[None, :]))
    return float(np.sum(b * w))


def sampled_norm(a: FourierTaylorSeries, r: float,
                 domain: DomainConfig = DEFAULT_DOMAIN,
                 n_angle: int = 12, n_x_samples: int = 7) -> float:
    """Max |F| over a sample of the complex strip of width r.

    A lower bound for the sup norm, hence always <= the majorant norm. The
    sample covers real angle grids combined with imaginary angle excursions
    of size r and x on the circle of radius x_half + r.
    """
    if r < 0 or r > domain.r_max:
        raise ValueError("r out of range")
    ang = np.linspace(0.0, 2 * np.pi, n_angle, endpoint=False)
    shifts = np.array([-r, 0.0, r])
    phases = np.linspace(0.0, 2 * np.pi, n_x_samples, endpoint=False)
    best = 0.0
    radius = domain.radius(r)
    for s_th in shifts:
        for s_t in shifts:
            th = ang[:, None, None] + 1j * s_th
            tt = ang[None, :, None] + 1j * s_t
            xx = radius * np.exp(1j * phases)[None, None, :]
            val = _evaluate_raw(a, xx, th, tt)
            best = max(best, float(np.max(np.abs(val))))
    return best


def norm_estimate(a: FourierTaylorSeries, r: float, kind: str = "majorant",
                  domain: DomainConfig = DEFAULT_DOMAIN) -> NormEstimate:
    if kind == "majorant":
        return NormEstimate(r=r, value=majorant_norm(a, r, domain), kind=kind)
    if kind == "sampled":
        return NormEstimate(r=r, value=sampled_norm(a, r, domain), kind=kind)
    raise ValueError(f"unknown norm kind {kind!r}")


def cauchy_bound_check(w: FourierTaylorSeries, r: float, d: float,
                       delta: float = 0.0, partner: FourierTaylorSeries = None,
                       domain: DomainConfig = DEFAULT_DOMAIN) -> dict:
    """Measured derivative and bracket norms against their Cauchy bounds.

    Returns a dict with entries 'partial_x', 'partial_theta' and (when a
    partner series Z is given) 'bracket', each holding measured value, bound
    and margin = bound - measured. Margins are non-negative in exact
    arithmetic; the checks exist to keep it that way in floating point.
    """
    if d <= 0 or r - d < 0:
        raise ValueError("need 0 < d <= r")
    if partner is not None and (delta <= 0 or r - d - delta < 0):
        raise ValueError("need 0 < delta and d + delta <= r")
    nw = majorant_norm(w, r, domain)
    report = {}
    meas = majorant_norm(partial_x(w), r - d, domain)
    bound = nw / d
    report["partial_x"] = {"measured": meas, "bound": bound, "margin": bound - meas}
    meas = majorant_norm(partial_theta(w), r - d, domain)
    bound = nw / (math.e * d)
    report["partial_theta"] = {"measured": meas, "bound": bound, "margin": bound - meas}
    if partner is not None:
        z = partner
        meas = majorant_norm(poisson_bracket(w, z, domain), r - d - delta, domain)
        bound = 2.0 / (w.rho * math.e * d * (d + delta)) * nw * majorant_norm(z, r - delta, domain)
        report["bracket"] = {"measured": meas, "bound": bound, "margin": bound - meas}
    return report


def max_coeff_diff(a: FourierTaylorSeries, b: FourierTaylorSeries) -> float:
    """Max |c_a - c_b| over the merged box."""
    trunc = a.trunc.merge(b.trunc)
    return float(np.max(np.abs(_embed(a, trunc) - _embed(b, trunc))))


# -- serialization ----------------------------------------------------------


def to_json_dict(a: FourierTaylorSeries) -> dict:
    """Half-lattice JSON form of a real series.

    Stores nonzero coefficients with l > 0 or (l = 0, m >= 0); the reality
    condition supplies the rest on load. Raises for non-real series. The
    stored coefficients are the hermitian-symmetrized ones, so a load
    followed by a dump reproduces the document byte for byte.
    """
    if not a.is_real:
        raise RealityError("only real series serialize to the half-lattice form")
    t = a.trunc
    sym = 0.5 * (a.coeffs + np.conj(a.coeffs[::-1, ::-1, :]))
    coeffs = []
    li, mi, ni = np.nonzero(sym)
    for ia, ib, ic in zip(li, mi, ni):
        l, m, n = int(ia - t.l_t), int(ib - t.l_theta), int(ic)
        if l < 0 or (l == 0 and m < 0):
            continue
        v = sym[ia, ib, ic]
        re = float(v.real)
        im = 0.0 if (l == 0 and m == 0) else float(v.imag)
        coeffs.append({"l": l, "m": m, "n": n, "re": re, "im": im})
    coeffs.sort(key=lambda e: (e["l"], e["m"], e["n"]))
    return {
        "rho": a.rho,
        "trunc": {"N_x": t.n_x, "L_theta": t.l_theta, "L_t": t.l_t, "pad": t.pad},
        "coeffs": coeffs,
    }


def from_json_dict(doc: dict) -> FourierTaylorSeries:
    t = doc["trunc"]
    trunc = TruncationSpec(n_x=int(t["N_x"]), l_theta=int(t["L_theta"]),
                           l_t=int(t["L_t"]), pad=int(t.get("pad", 0)))
    c = np.zeros(trunc.shape, dtype=np.complex128)
    for e in doc["coeffs"]:
        l, m, n = int(e["l"]), int(e["m"]), int(e["n"])
        if l < 0 or (l == 0 and m < 0):
            raise ValueError("serialized series must store the half-lattice only")
        v = complex(float(e["re"]), float(e["im"]))
        c[l + trunc.l_t, m + trunc.l_theta, n] = v
        if l != 0 or m != 0:
            c[-l + trunc.l_t, -m + trunc.l_theta, n] = v.conjugate()
    return FourierTaylorSeries(c, trunc, float(doc["rho"]))


def to_json(a: FourierTaylorSeries) -> str:
    return json.dumps(to_json_dict(a), sort_keys=True, separators=(",", ":"))


def from_json(text: str) -> FourierTaylorSeries:
    return from_json_dict(json.loads(text))
