"""Time-delay coincidence analysis for fragment pairs and N-fragment events.

Arrival-time differences at fixed total energy pin down the initial
fragment momenta: the two-particle case has a closed form, the general
case a damped Newton solver.  A two-Gaussian momentum model (relative
width sigma, center-of-mass width Sigma) maps through the imaging
relations to a coincidence-rate curve P(DeltaT), which can be synthesized
with Poisson noise and fit back.

In strict back-to-back geometry the curve depends on (sigma, Sigma) only
through kappa = 1/Sigma^2 - 1/(4 sigma^2) plus an overall scale, so the
fit works in (kappa, log scale) and resolves the flat direction by holding
Sigma at its initial value.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, least_squares

from .errors import DomainError, FitError, InfeasibleError

NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 200


@dataclass(frozen=True)
class DelayObservation:
    """Arrival-delay measurement: N fragments, delays relative to detector 1."""

    masses: np.ndarray
    distances: np.ndarray
    energy: float
    delays: np.ndarray

    def __post_init__(self):
        m = np.atleast_1d(np.asarray(self.masses, dtype=float))
        r = np.atleast_1d(np.asarray(self.distances, dtype=float))
        d = np.atleast_1d(np.asarray(self.delays, dtype=float))
        if np.any(m <= 0) or np.any(r <= 0) or self.energy <= 0:
            raise DomainError("masses, distances and energy must be positive")
        if len(d) != len(m) - 1 or len(r) != len(m):
            raise DomainError("need one distance per fragment and N-1 delays")
        if not np.all(np.isfinite(d)):
            raise DomainError("delays must be finite")
        for a in (m, r, d):
            a.setflags(write=False)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "distances", r)
        object.__setattr__(self, "delays", d)

    @property
    def n_particles(self) -> int:
        return len(self.masses)


@dataclass(frozen=True)
class PairModelParams:
    """Widths of the two-Gaussian pair momentum model, both in a.u."""

    sigma: float
    Sigma: float

    def __post_init__(self):
        if self.sigma <= 0 or self.Sigma <= 0:
            raise DomainError("model widths must be positive")


@dataclass(frozen=True)
class PairGeometry:
    """Back-to-back pair geometry: equal masses, equal detector distances."""

    mass: float
    distance: float

    def __post_init__(self):
        if self.mass <= 0 or self.distance <= 0:
            raise DomainError("mass and distance must be positive")


@dataclass(frozen=True)
class CoincidenceDataset:
    delta_t: np.ndarray
    counts: np.ndarray
    geometry: PairGeometry
    energy: float
    normalization: float = 1.0

    def __post_init__(self):
        dt = np.atleast_1d(np.asarray(self.delta_t, dtype=float))
        c = np.atleast_1d(np.asarray(self.counts))
        if np.any(np.diff(dt) <= 0):
            raise DomainError("delta_t must be strictly increasing")
        if np.any(np.asarray(c) < 0):
            raise DomainError("counts must be nonnegative")
        dt.setflags(write=False)
        c = np.asarray(c, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "delta_t", dt)
        object.__setattr__(self, "counts", c)


def characteristic_time(m: float, r: float, E: float) -> float:
    """Natural delay scale t = sqrt(m r^2 / E)."""
    if m <= 0 or r <= 0 or E <= 0:
        raise DomainError("m, r and E must be positive")
    return math.sqrt(m * r * r / E)


def invert_delays_pair(tau: float, m: float = 1.0, E: float = 1.0) -> tuple[float, float]:
    """Momenta (p1', p2') of an equal-mass pair from the scaled delay tau.

    tau = DeltaT / sqrt(m r^2 / E) with DeltaT = m r / p2' - m r / p1',
    subject to p1'^2 + p2'^2 = 2 m E.  Closed form:

        p_{1,2}' = sqrt(mE) (∓1 ± s + u) / (2 tau),
        s = sqrt(1 + 2 tau^2),  u = sqrt(2) sqrt(tau^2 + s - 1),

    evaluated at |tau| (negative delays swap the pair).  Dividing the
    bracket by tau analytically, (s - 1)/(2 tau) = tau/(1 + s) and
    u/(2 tau) = sqrt(2 + 4/(1 + s))/2, keeps the formula stable down to
    tau = 0, where both momenta reduce to sqrt(mE).
    """
    if m <= 0 or E <= 0:
        raise DomainError("m and E must be positive")
    if not math.isfinite(tau):
        raise DomainError("tau must be finite")
    p0 = math.sqrt(m * E)
    a = abs(tau)
    s = math.sqrt(1.0 + 2.0 * a * a)
    half_s_minus_1 = a / (1.0 + s)
    half_u = 0.5 * math.sqrt(2.0 + 4.0 / (1.0 + s))
    p1 = p0 * (half_s_minus_1 + half_u)
    p2 = p0 * (-half_s_minus_1 + half_u)
    if tau < 0:
        p1, p2 = p2, p1
    return p1, p2


def _pair_residual(tau: float, p1: float, p2: float, m: float, E: float) -> float:
    """Scaled delay equation residual for diagnostics and tests."""
    return (math.sqrt(m * E) * (1.0 / p2 - 1.0 / p1) - tau) / max(1.0, abs(tau))


def invert_delays_numeric(obs: DelayObservation) -> np.ndarray:
    """Solve the N delay equations for the fragment momenta.

    The delay equations express every momentum through the first,
    p_n' = m_n r_n / (DeltaT_n + m_1 r_1 / p_1'), so the system reduces to
    the single energy equation h(p_1') = sum p_n'^2 / 2 m_n - E = 0.  Each
    p_n' grows with p_1', so h is strictly increasing and runs from -E at
    p_1' -> 0 to a positive value at the upper end of the admissible
    interval; the unique root is bracketed and found with Brent's method,
    and that root is the branch continuously connected to the equal-energy
    point.
    """
    m = obs.masses
    r = obs.distances
    E = obs.energy
    t1 = m[0] * r[0]

    def momenta(p1: float) -> np.ndarray:
        rest = m[1:] * r[1:] / (obs.delays + t1 / p1)
        return np.concatenate(([p1], rest))

    def h(p1: float) -> float:
        p = momenta(p1)
        return float(np.sum(p * p / (2.0 * m))) - E

    # upper limit: each denominator DeltaT_n + t1/p1 must stay positive
    hi = math.sqrt(2.0 * m[0] * E)
    neg = obs.delays[obs.delays < 0]
    if len(neg):
        hi = min(hi, float(np.min(t1 / -neg)))
    # back off the bound until h is finite and positive
    shrink = 1e-12
    while shrink < 0.5 and not (math.isfinite(h(hi * (1.0 - shrink)))
                                and h(hi * (1.0 - shrink)) > 0.0):
        shrink *= 4.0
    hi_eff = hi * (1.0 - shrink)
    if not (math.isfinite(h(hi_eff)) and h(hi_eff) > 0.0):
        raise InfeasibleError("no positive-momentum solution brackets the energy shell")
    lo = hi_eff * 1e-12
    if h(lo) >= 0.0:
        raise InfeasibleError("no positive-momentum solution brackets the energy shell")
    p1 = brentq(h, lo, hi_eff, xtol=1e-300, rtol=8.881784197001252e-16,
                maxiter=NEWTON_MAX_ITER)
    p = momenta(p1)
    if np.any(p <= 0) or abs(h(p1)) > NEWTON_TOL * max(1.0, E):
        raise InfeasibleError("delay inversion did not converge")
    return p


def pair_model_momentum_density(p1_vec, p2_vec, params: PairModelParams) -> float:
    """Two-Gaussian pair momentum density at 3-vectors (p1', p2'):

    |Phi|^2 = N(p'; sigma) N(P'; Sigma) with relative p' = (p1' - p2')/2 and
    total P' = p1' + p2', each a normalized 3-D Gaussian.
    """
    p1 = np.atleast_1d(np.asarray(p1_vec, dtype=float))
    p2 = np.atleast_1d(np.asarray(p2_vec, dtype=float))
    rel = (p1 - p2) / 2.0
    tot = p1 + p2
    s2 = params.sigma ** 2
    S2 = params.Sigma ** 2
    norm = (2.0 * math.pi * s2) ** -1.5 * (2.0 * math.pi * S2) ** -1.5
    return float(norm * math.exp(
        -float(np.dot(rel, rel)) / (2.0 * s2) - float(np.dot(tot, tot)) / (2.0 * S2)
    ))


def coincidence_curve(geometry: PairGeometry, params: PairModelParams, E: float,
                      delta_t, normalize: bool = True):
    """Back-to-back coincidence rate P(DeltaT) on a delay grid.

    Each delay is inverted to (p1', p2'); the rate is the phase-space
    factor (p1' p2' / r^2)^3 times the model momentum density evaluated at
    the back-to-back vectors p1' z, -p2' z.  Returns (delta_t, p1, p2, P);
    with ``normalize`` the peak is scaled to 1 (the overall scale is
    arbitrary).
    """
    delta_t = np.atleast_1d(np.asarray(delta_t, dtype=float))
    t0 = characteristic_time(geometry.mass, geometry.distance, E)
    zhat = np.array([0.0, 0.0, 1.0])
    p1 = np.empty_like(delta_t)
    p2 = np.empty_like(delta_t)
    prob = np.empty_like(delta_t)
    for k, dt in enumerate(delta_t):
        a, b = invert_delays_pair(dt / t0, geometry.mass, E)
        p1[k], p2[k] = a, b
        dens = pair_model_momentum_density(a * zhat, -b * zhat, params)
        prob[k] = (a * b / geometry.distance ** 2) ** 3 * dens
    if normalize and prob.max() > 0:
        prob = prob / prob.max()
    return delta_t, p1, p2, prob


def synthesize_dataset(geometry: PairGeometry, params: PairModelParams, E: float,
                       n_events: float, seed: int, delta_t=None) -> CoincidenceDataset:
    """Poisson-sampled coincidence histogram, reproducible for a fixed seed.

    Expected counts are proportional to P(DeltaT) with total ``n_events``.
    The default delay grid spans ±6 characteristic times in 121 bins.
    """
    if n_events <= 0:
        raise DomainError("n_events must be positive")
    if delta_t is None:
        t0 = characteristic_time(geometry.mass, geometry.distance, E)
        delta_t = np.linspace(-6.0 * t0, 6.0 * t0, 121)
    dt, _, _, prob = coincidence_curve(geometry, params, E, delta_t, normalize=False)
    expected = n_events * prob / prob.sum()
    rng = np.random.default_rng(seed)
    counts = rng.poisson(expected)
    return CoincidenceDataset(dt, counts, geometry, E)


def _reduced_curve(dataset: CoincidenceDataset, kappa: float, log_scale: float) -> np.ndarray:
    """Back-to-back model in its identifiable parametrization.

    On the energy shell p1^2 + p2^2 = 2mE the two Gaussian exponents
    collapse to kappa * p1 p2 plus constants, kappa = 1/Sigma^2 - 1/(4 sigma^2).
    """
    g = dataset.geometry
    t0 = characteristic_time(g.mass, g.distance, dataset.energy)
    out = np.empty_like(dataset.delta_t)
    for k, dt in enumerate(dataset.delta_t):
        p1, p2 = invert_delays_pair(dt / t0, g.mass, dataset.energy)
        out[k] = math.exp(log_scale + kappa * p1 * p2) * (p1 * p2 / g.distance ** 2) ** 3
    return out


def _kappa(params: PairModelParams) -> float:
    return 1.0 / params.Sigma ** 2 - 1.0 / (4.0 * params.sigma ** 2)


def fit_pair_model(dataset: CoincidenceDataset, initial: PairModelParams):
    """Weighted least-squares fit of the pair model to a coincidence histogram.

    Counting weights are 1/sqrt(max(count, 1)).  Because back-to-back data
    constrain only kappa and the scale, the optimizer works in those two
    parameters; sigma is then recovered holding Sigma at its initial value
    (or Sigma is moved if that leaves no positive sigma^2).  Returns
    (params, scale, result dict) with the (sigma, Sigma, scale) covariance
    from the pseudo-inverse of the full-model Jacobian; the flat direction
    shows up there as a large variance on Sigma.
    """
    if len(dataset.delta_t) < 5:
        raise FitError("need at least 5 histogram rows to fit")
    counts = dataset.counts
    if counts.max() <= 0:
        raise FitError("dataset has no counts")
    w = 1.0 / np.sqrt(np.maximum(counts, 1.0))

    kappa0 = _kappa(initial)
    model0 = _reduced_curve(dataset, kappa0, 0.0)
    scale0 = math.log(max(counts.max() / model0.max(), 1e-300))

    def resid(x):
        return w * (_reduced_curve(dataset, x[0], x[1]) - counts)

    sol = least_squares(resid, x0=[kappa0, scale0], method="lm", xtol=1e-14,
                        ftol=1e-14, gtol=1e-14, max_nfev=2000)
    if not sol.success:
        raise FitError(f"least squares did not converge: {sol.message}")
    kappa_hat, log_scale_hat = sol.x

    # back out widths, pinning the flat direction at the initial Sigma
    inv4s2 = 1.0 / initial.Sigma ** 2 - kappa_hat
    if inv4s2 > 0:
        params = PairModelParams(sigma=0.5 / math.sqrt(inv4s2), Sigma=initial.Sigma)
    else:
        invS2 = kappa_hat + 1.0 / (4.0 * initial.sigma ** 2)
        if invS2 <= 0:
            raise FitError("fitted kappa is incompatible with positive widths")
        params = PairModelParams(sigma=initial.sigma, Sigma=1.0 / math.sqrt(invS2))

    scale = math.exp(log_scale_hat)
    chi2 = float(np.sum(resid(sol.x) ** 2))
    dof = max(len(counts) - 2, 1)

    # covariance of (sigma, Sigma, scale) from the full-model Jacobian
    def full_curve(sigma, Sigma, sc):
        p = PairModelParams(sigma, Sigma)
        kap = _kappa(p)
        # energy-shell constant and Gaussian normalizations, relative to
        # their values at the fitted point so full_curve(theta_hat) matches
        def shell(s, S):
            return math.exp(-dataset.energy * dataset.geometry.mass
                            * (1.0 / (4.0 * s ** 2) + 1.0 / S ** 2)) / (s * S) ** 3
        return sc * shell(sigma, Sigma) / shell(params.sigma, params.Sigma) \
            * _reduced_curve(dataset, kap, 0.0)

    theta = np.array([params.sigma, params.Sigma, scale])
    jac = np.empty((len(counts), 3))
    for j in range(3):
        h = 1e-6 * max(abs(theta[j]), 1e-6)
        tp, tm = theta.copy(), theta.copy()
        tp[j] += h
        tm[j] -= h
        jac[:, j] = (full_curve(*tp) - full_curve(*tm)) / (2.0 * h) * w
    cov = np.linalg.pinv(jac.T @ jac, rcond=1e-12)

    report = {
        "sigma": params.sigma,
        "Sigma": params.Sigma,
        "scale": scale,
        "kappa": kappa_hat,
        "chi2": chi2,
        "chi2_per_dof": chi2 / dof,
        "covariance": cov.tolist(),
        "n_rows": int(len(counts)),
    }
    return params, scale, report


# ---------------------------------------------------------------------------
# serialization

def dataset_to_csv(dataset: CoincidenceDataset, path, comment: str | None = None) -> None:
    with open(path, "w") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        fh.write("delta_t_au,count\n")
        for dt, c in zip(dataset.delta_t, dataset.counts):
            fh.write(f"{dt:.17g},{int(round(c))}\n")


def dataset_from_csv(path, geometry: PairGeometry, energy: float) -> CoincidenceDataset:
    dts, counts = [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("delta_t_au"):
                continue
            a, b = line.split(",")
            dts.append(float(a))
            counts.append(float(b))
    return CoincidenceDataset(np.array(dts), np.array(counts), geometry, energy)


def curve_to_csv(delta_t, p1, p2, prob, path, comment: str | None = None) -> None:
    with open(path, "w") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        fh.write("delta_t_au,p1_au,p2_au,probability\n")
        for row in zip(delta_t, p1, p2, prob):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def fit_report_to_json(report: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
