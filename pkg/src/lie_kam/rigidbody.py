"""Direct dynamics of the free and throbbing top on the momentum sphere.

Cartesian fields integrate the angular momentum 3-vector M with a classical
fixed-step RK4; the reduced chart (X, theta) on the sphere of radius rho
drives the same dynamics through the series algebra, so the two integrators
cross-validate each other. Sections, chart transforms, conservation
diagnostics and CSV emission live here too.
"""

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import series as fts
from .series import DEFAULT_DOMAIN, DomainConfig, FourierTaylorSeries
from .operators import AlgebraParams

__all__ = [
    "InertiaSpec",
    "Trajectory",
    "euler_field",
    "throbbing_field",
    "rk4_integrate",
    "to_reduced",
    "from_reduced",
    "reduced_field",
    "make_reduced_field",
    "params_from_inertia",
    "poincare_section",
    "conservation_report",
    "energy_series",
    "sample_sphere",
    "write_trajectory_csv",
    "read_trajectory_csv",
]

_POLE_TOL = 1e-12


@dataclass(frozen=True)
class InertiaSpec:
    """Moments of inertia with an optional periodic diagonal modulation.

    The modulated inverse inertia is ``1/I_i + A_ii(t)`` with
    ``A_ii(t) = amp_i cos(freq_i t + phase_i)``; ``modulation`` is a
    3-tuple of (amp, freq, phase) triples, or None for the static top.
    Positivity of every modulated inverse moment is checked analytically
    (|amp_i| < 1/I_i) and on a grid covering the slowest period.

    Attributes
    ----------
    i1, i2, i3 : float
        Principal moments of inertia, strictly positive.
    modulation : tuple or None
        Per-axis (amplitude, frequency, phase) of the inverse-moment
        modulation.
    """

    i1: float
    i2: float
    i3: float
    modulation: tuple = None

    def __post_init__(self):
        if min(self.i1, self.i2, self.i3) <= 0:
            raise ValueError("moments of inertia must be positive")
        if self.modulation is None:
            return
        mod = tuple(tuple(float(v) for v in row) for row in self.modulation)
        if len(mod) != 3 or any(len(row) != 3 for row in mod):
            raise ValueError("modulation must be three (amp, freq, phase) triples")
        object.__setattr__(self, "modulation", mod)
        inv = self.static_inverse()
        for i, (amp, freq, _) in enumerate(mod):
            if abs(amp) >= inv[i]:
                raise ValueError(
                    f"modulation amplitude {amp} on axis {i + 1} drives the "
                    f"inverse moment {inv[i]} non-positive")
        freqs = [abs(row[1]) for row in mod if row[1] != 0.0]
        period = 2.0 * math.pi / min(freqs) if freqs else 2.0 * math.pi
        grid = np.linspace(0.0, 4.0 * period, 2049)
        if np.min(self.inverse_moments(grid)) <= 0.0:
            raise ValueError("modulated inverse moments must stay positive")

    @property
    def is_symmetric(self) -> bool:
        return self.i1 == self.i2

    def static_inverse(self):
        """Inverse moments (1/I1, 1/I2, 1/I3) without modulation."""
        return np.array([1.0 / self.i1, 1.0 / self.i2, 1.0 / self.i3])

    def inverse_moments(self, t):
        """Modulated inverse moments at time(s) t, shape (3,) + shape(t)."""
        base = self.static_inverse()
        t = np.asarray(t, dtype=np.float64)
        out = np.broadcast_to(base.reshape((3,) + (1,) * t.ndim),
                              (3,) + t.shape).copy()
        if self.modulation is not None:
            for i, (amp, freq, phase) in enumerate(self.modulation):
                if amp != 0.0:
                    out[i] += amp * np.cos(freq * t + phase)
        return out


def _cross(a, b):
    # cross product on the last axis, written out to keep ufunc overhead low
    out = np.empty(np.broadcast_shapes(a.shape, b.shape), dtype=np.float64)
    out[..., 0] = a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1]
    out[..., 1] = a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2]
    out[..., 2] = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    return out


def euler_field(m, inertia: InertiaSpec):
    """Free-top field (LM) x M of the momentum-sphere bracket.

    Orthogonal to both M and LM, so the Casimir |M| and the energy are
    conserved by the exact flow. The orientation is fixed by the chart
    convention theta_dot = rho Delta X of the reduced system.

    Parameters
    ----------
    m : array_like, shape (..., 3)
        Angular momentum vector(s).
    inertia : InertiaSpec

    Returns
    -------
    ndarray, shape (..., 3)

    Examples
    --------
    >>> euler_field(np.array([0.0, 1.0, 1.0]), InertiaSpec(1.0, 2.0, 3.0))
    array([0.16666667, 0.        , 0.        ])
    """
    m = np.asarray(m, dtype=np.float64)
    return _cross(m * inertia.static_inverse(), m)


def throbbing_field(m, t, inertia: InertiaSpec):
    """Driven-top field ((L + A(t)) M) x M with periodic inverse moments.

    Still orthogonal to M, so the Casimir is conserved by the exact flow
    while the energy breathes inside the rigid-body band.
    """
    m = np.asarray(m, dtype=np.float64)
    inv = inertia.static_inverse().copy()
    if inertia.modulation is not None:
        for i, (amp, freq, phase) in enumerate(inertia.modulation):
            if amp != 0.0:
                inv[i] += amp * math.cos(freq * t + phase)
    return _cross(m * inv, m)


@dataclass
class Trajectory:
    """Sampled solution: times t (k,), states y (k, ...), abort flag."""

    t: np.ndarray
    y: np.ndarray
    aborted: bool = False
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)


def rk4_integrate(y0, fieldfn, h, t_final, t0=0.0, stride=1) -> Trajectory:
    """Classical fixed-step RK4 for dy/dt = fieldfn(t, y).

    Integrates ``round(t_final / h)`` whole steps of size h and samples
    every ``stride`` steps (the final state is always included). A
    non-finite state aborts the run and returns the samples collected up
    to the last good state with ``aborted=True``.

    Parameters
    ----------
    y0 : array_like
        Initial state (any shape; fields act on the last axis).
    fieldfn : callable
        ``fieldfn(t, y) -> dy/dt`` with the shape of y.
    h : float
        Step size, positive.
    t_final : float
        Integration span measured from t0; 0 yields the bare initial sample.
    t0 : float
        Initial time.
    stride : int
        Sampling stride in steps.

    Returns
    -------
    Trajectory
    """
    if h <= 0:
        raise ValueError("h must be positive")
    if t_final < 0:
        raise ValueError("t_final must be nonnegative")
    if stride < 1:
        raise ValueError("stride must be at least 1")
    y = np.array(y0, dtype=np.float64)
    n = int(round(t_final / h))
    ts = [t0]
    ys = [y.copy()]
    aborted = False
    half = 0.5 * h
    sixth = h / 6.0
    for i in range(n):
        t = t0 + i * h
        k1 = fieldfn(t, y)
        k2 = fieldfn(t + half, y + half * k1)
        k3 = fieldfn(t + half, y + half * k2)
        k4 = fieldfn(t + h, y + h * k3)
        y = y + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        if not np.all(np.isfinite(y)):
            aborted = True
            break
        if (i + 1) % stride == 0 or i + 1 == n:
            ts.append(t0 + (i + 1) * h)
            ys.append(y.copy())
    return Trajectory(t=np.asarray(ts), y=np.stack(ys), aborted=aborted)


# -- chart transforms ---------------------------------------------------------


def to_reduced(m, rho: float):
    """Map momentum vector(s) to the sphere chart (X, theta).

    X = M3 / rho and theta = atan2(M2, M1) in [0, 2 pi). Requires |M| =
    rho within 1e-10 (relative) and rejects the poles |X| = 1 where the
    chart degenerates.
    """
    m = np.asarray(m, dtype=np.float64)
    norms = np.sqrt(np.sum(m * m, axis=-1))
    if np.any(np.abs(norms - rho) > 1e-10 * max(1.0, rho)):
        raise ValueError("input does not lie on the momentum sphere")
    x_big = m[..., 2] / rho
    if np.any(np.abs(x_big) >= 1.0 - _POLE_TOL):
        raise ValueError("pole input: the (X, theta) chart excludes |X| = 1")
    theta = np.mod(np.arctan2(m[..., 1], m[..., 0]), 2.0 * math.pi)
    return x_big, theta


def from_reduced(x_big, theta, rho: float):
    """Inverse chart map; |X| < 1 required."""
    x_big, theta = np.broadcast_arrays(np.asarray(x_big, dtype=np.float64),
                                       np.asarray(theta, dtype=np.float64))
    if np.any(np.abs(x_big) >= 1.0):
        raise ValueError("|X| must be strictly below 1")
    s = rho * np.sqrt(1.0 - x_big * x_big)
    return np.stack([s * np.cos(theta), s * np.sin(theta), rho * x_big],
                    axis=-1)


def params_from_inertia(inertia: InertiaSpec, rho: float,
                        x0: float) -> AlgebraParams:
    """Reduced-system parameters for a symmetric top; rejects i1 != i2."""
    if not inertia.is_symmetric:
        raise ValueError("the reduced chart needs a symmetric top (I1 = I2)")
    return AlgebraParams(rho=rho, i_perp=inertia.i1, i_3=inertia.i3, x0=x0)


def reduced_field(x, theta, t, params: AlgebraParams,
                  v_series: FourierTaylorSeries = None,
                  domain: DomainConfig = DEFAULT_DOMAIN):
    """Chart velocities (dx/dt, dtheta/dt) at localized x (X = x0 + x).

    Unperturbed: dx/dt = 0 and dtheta/dt = rho Delta X (uniform rotation).
    A perturbation series adds the bracket terms -(1/rho) dV/dtheta and
    +(1/rho) dV/dx.

    Examples
    --------
    >>> p = AlgebraParams()
    >>> xd, td = reduced_field(0.0, 0.3, 0.0, p)
    >>> (xd, abs(td - p.omega) < 1e-15)
    (0.0, True)
    """
    f = make_reduced_field(params, v_series, domain)
    out = f(t, np.stack([np.asarray(x, dtype=np.float64),
                         np.asarray(theta, dtype=np.float64)], axis=-1))
    return out[..., 0], out[..., 1]


def _compile_terms(series: FourierTaylorSeries, domain: DomainConfig):
    """Nonzero-term evaluator; orders faster than the dense path for the
    few-term drive series the integrator sees."""
    if not series.is_real:
        raise ValueError("reduced fields need real perturbation series")
    terms = [(l, m, n, v) for l, m, n, v in series.nonzero_terms()]
    x_cap = domain.x_half * (1 + 1e-12) + 1e-15

    if not terms:
        return lambda x, th, t: np.zeros(np.broadcast_shapes(
            np.shape(x), np.shape(th), np.shape(t)))

    def ev(x, th, t):
        if np.any(np.abs(x) > x_cap):
            raise ValueError(
                f"evaluation outside domain radius |x| <= {domain.x_half}")
        acc = 0.0
        for l, m, n, c in terms:
            # per-term real parts sum to the real value on a hermitian box
            acc = acc + (c * np.exp(1j * (l * t + m * th))).real * x ** n
        return acc
    return ev


def make_reduced_field(params: AlgebraParams,
                       v_series: FourierTaylorSeries = None,
                       domain: DomainConfig = DEFAULT_DOMAIN):
    """Compile the reduced velocity field into an RK4-ready closure."""
    rho, delta, x0 = params.rho, params.delta, params.x0
    if v_series is None:
        def fieldfn(t, y):
            out = np.zeros_like(y)
            out[..., 1] = rho * delta * (x0 + y[..., 0])
            return out
        return fieldfn
    ev_x = _compile_terms(fts.partial_x(v_series), domain)
    ev_th = _compile_terms(fts.partial_theta(v_series), domain)

    def fieldfn(t, y):
        x = y[..., 0]
        th = y[..., 1]
        out = np.empty_like(y)
        out[..., 0] = -ev_th(x, th, t) / rho
        out[..., 1] = rho * delta * (x0 + x) + ev_x(x, th, t) / rho
        return out
    return fieldfn


# -- diagnostics --------------------------------------------------------------


def poincare_section(traj: Trajectory, period: float, rho: float = None):
    """Chart samples at the stroboscopic times t = k * period.

    Works on reduced trajectories (y shape (k, 2), columns x or X and
    theta) and on Cartesian ones (y shape (k, 3), mapped through
    to_reduced; rho required). X is interpolated linearly between the
    bracketing samples and theta through its unwrapped lift.

    Returns
    -------
    ndarray, shape (k, 2)
        Rows (X, theta) in crossing order, starting at t = t0.
    """
    if period <= 0:
        raise ValueError("period must be positive")
    if len(traj) < 2 or traj.t[-1] - traj.t[0] < period:
        raise ValueError("trajectory spans less than one period")
    if traj.y.ndim != 2:
        raise ValueError("need a flat trajectory (one state per row)")
    if traj.y.shape[1] == 3:
        if rho is None:
            raise ValueError("rho is required to reduce a Cartesian trajectory")
        x_big, theta = to_reduced(traj.y, rho)
    elif traj.y.shape[1] == 2:
        x_big, theta = traj.y[:, 0], traj.y[:, 1]
    else:
        raise ValueError("trajectory states must be 2- or 3-dimensional")
    theta_lift = np.unwrap(np.asarray(theta, dtype=np.float64))
    t0, t1 = traj.t[0], traj.t[-1]
    k0 = int(math.ceil((t0 - 1e-12) / period))
    k1 = int(math.floor((t1 + 1e-12) / period))
    times = [k * period for k in range(k0, k1 + 1)
             if t0 - 1e-12 <= k * period <= t1 + 1e-12]
    xs = np.interp(times, traj.t, x_big)
    ths = np.mod(np.interp(times, traj.t, theta_lift), 2.0 * math.pi)
    return np.stack([xs, ths], axis=-1)


def energy_series(traj: Trajectory, inertia: InertiaSpec):
    """Kinetic energy (static inverse moments) along a Cartesian trajectory."""
    if traj.y.ndim != 2 or traj.y.shape[1] != 3:
        raise ValueError("energy needs a Cartesian trajectory")
    inv = inertia.static_inverse()
    return 0.5 * np.sum(traj.y * traj.y * inv, axis=-1)


def conservation_report(traj: Trajectory, inertia: InertiaSpec) -> dict:
    """Casimir drift and rigid-body energy band occupancy.

    The band is rho^2 / (2 I_max) <= E <= rho^2 / (2 I_min) with E the
    kinetic energy of the static moments; it holds for every point of
    the exact sphere, so in_band failing beyond the 1e-9 slack flags an
    integrator problem, not physics.
    """
    rho_t = np.sqrt(np.sum(traj.y * traj.y, axis=-1))
    rho0 = float(rho_t[0])
    energy = energy_series(traj, inertia)
    lo = rho0 ** 2 / (2.0 * max(inertia.i1, inertia.i2, inertia.i3))
    hi = rho0 ** 2 / (2.0 * min(inertia.i1, inertia.i2, inertia.i3))
    e_min, e_max = float(np.min(energy)), float(np.max(energy))
    return {
        "rho0": rho0,
        "rho_drift_max": float(np.max(np.abs(rho_t - rho0))),
        "energy_min": e_min,
        "energy_max": e_max,
        "energy_drift_max": float(np.max(np.abs(energy - energy[0]))),
        "band_lo": lo,
        "band_hi": hi,
        "in_band": bool(e_min >= lo - 1e-9 and e_max <= hi + 1e-9),
    }


def sample_sphere(n: int, rho: float, rng) -> np.ndarray:
    """n points uniform on the sphere of radius rho (seeded Generator)."""
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    out = np.empty((n, 3))
    k = 0
    while k < n:
        v = rng.normal(size=3)
        s = float(np.sqrt(v @ v))
        if s < 1e-12:
            continue
        out[k] = rho * v / s
        k += 1
    return out


# -- CSV emission -------------------------------------------------------------


def _format_row(vals):
    return ",".join(f"{v:.17g}" for v in vals)


def write_trajectory_csv(path, traj: Trajectory, kind: str,
                         config: dict = None):
    """Write `t,M1,M2,M3` or `t,X,theta` rows with a config comment line.

    kind is "cartesian" or "reduced"; the resolved run configuration is
    embedded as a leading `# config: {...}` JSON comment for provenance.
    """
    if kind == "cartesian":
        header = "t,M1,M2,M3"
        width = 3
    elif kind == "reduced":
        header = "t,X,theta"
        width = 2
    else:
        raise ValueError("kind must be 'cartesian' or 'reduced'")
    if len(traj) and traj.y.shape[1] != width:
        raise ValueError(f"{kind} rows need {width} state columns")
    buf = io.StringIO()
    if config is not None:
        buf.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
    buf.write(header + "\n")
    for t, row in zip(traj.t, traj.y):
        buf.write(_format_row([t, *row]) + "\n")
    text = buf.getvalue()
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def read_trajectory_csv(path):
    """Inverse of write_trajectory_csv: (Trajectory, config_dict_or_None)."""
    if hasattr(path, "read"):
        lines = path.read().splitlines()
    else:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    config = None
    idx = 0
    if lines and lines[0].startswith("# config:"):
        config = json.loads(lines[0][len("# config:"):])
        idx = 1
    if idx >= len(lines):
        raise ValueError("missing CSV header")
    idx += 1  # header
    rows = [tuple(float(v) for v in ln.split(",")) for ln in lines[idx:] if ln]
    if rows:
        arr = np.asarray(rows)
        traj = Trajectory(t=arr[:, 0], y=arr[:, 1:])
    else:
        traj = Trajectory(t=np.empty(0), y=np.empty((0, 0)))
    return traj, config
