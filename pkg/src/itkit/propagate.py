"""Grid time evolution (exact free, split-operator) and semiclassical kernels.

The split-operator stepper handles a uniform extraction field plus an
arbitrary sampled short-range potential.  The semiclassical side provides
the mixed (momentum-to-position) and position-space kernels for free and
uniform-field motion and a stationary-phase evaluator for the momentum
integral that produces the asymptotic wave function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft
from scipy.interpolate import RegularGridInterpolator, make_interp_spline

from .classical import (
    action_S_tilde_uniform,
    action_S_uniform,
    stationary_momentum,
)
from .core import (
    HBAR,
    MOMENTUM,
    POSITION,
    ComplexField,
    Grid,
    UniformField,
    check_boundary,
    to_momentum,
    to_position,
)
from .errors import (
    CausticError,
    DomainError,
    RepresentationError,
    ShapeError,
    StabilityError,
    SupportError,
)

MAX_KICK_PHASE = 0.1


@dataclass(frozen=True)
class EvolutionSpec:
    """Parameters of one grid propagation run."""

    mass: float
    t_start: float
    t_end: float
    n_steps: int
    field: UniformField | None = None
    potential: np.ndarray | None = None

    def __post_init__(self):
        if self.t_end <= self.t_start:
            raise DomainError("t_end must exceed t_start")
        if self.n_steps < 1:
            raise DomainError("need at least one step")
        if self.mass <= 0:
            raise DomainError("mass must be positive")
        if self.potential is not None:
            v = np.asarray(self.potential, dtype=float)
            v.setflags(write=False)
            object.__setattr__(self, "potential", v)

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / self.n_steps


def evolve_free_exact(field: ComplexField, m: float, T: float) -> ComplexField:
    """Multiply the momentum representation by exp(-i p^2 T / (2 m hbar)).

    Accepts either representation and returns the same one.  Unitary by
    construction.
    """
    if T < 0:
        raise DomainError("T must be nonnegative")
    if field.representation == MOMENTUM:
        p2 = _p_squared(field.grid)
        out = field.values * np.exp(-1j * p2 * T / (2.0 * m * HBAR))
        return field.with_values(out, field.time_label + T)
    phi = to_momentum(field)
    phi = evolve_free_exact(phi, m, T)
    psi = to_position(phi, field.grid)
    check_boundary(psi, "evolve_free_exact output")
    return psi


def _p_squared(pgrid: Grid) -> np.ndarray:
    axes = pgrid.meshgrid()
    return sum(a ** 2 for a in axes)


def _total_potential(grid: Grid, spec: EvolutionSpec) -> np.ndarray:
    v = np.zeros(tuple(grid.n))
    if spec.field is not None:
        axes = grid.meshgrid()
        if len(spec.field.force) != grid.dimension:
            raise ShapeError("field dimension does not match grid")
        for ax in range(grid.dimension):
            v = v - spec.field.force[ax] * axes[ax]
    if spec.potential is not None:
        if spec.potential.shape != tuple(grid.n):
            raise ShapeError("sampled potential shape does not match grid")
        v = v + spec.potential
    return v


def evolve_split_operator(field: ComplexField, spec: EvolutionSpec) -> ComplexField:
    """Strang-split propagation under H = p^2/(2m) - F.r + V(r).

    Pattern: half potential kick, full kinetic drift, half kick, repeated.
    Requires max|V| dt / hbar < 0.1 so the kick phase stays well resolved.
    """
    if field.representation != POSITION:
        raise RepresentationError("split-operator evolution starts from a position field")
    v = _total_potential(field.grid, spec)
    dt = spec.dt
    vmax = float(np.max(np.abs(v)))
    if vmax * dt / HBAR >= MAX_KICK_PHASE:
        raise StabilityError(
            f"max|V| dt / hbar = {vmax * dt:.3g} >= {MAX_KICK_PHASE}; increase n_steps"
        )
    check_boundary(field, "evolve_split_operator input")
    half_kick = np.exp(-1j * v * dt / (2.0 * HBAR))
    full_kick = half_kick * half_kick
    pgrid = field.grid.conjugate()
    # the drift phase is diagonal in p and commutes with the transform's
    # origin phases, so raw unshifted FFTs are exact here and cheaper
    drift = np.fft.ifftshift(np.exp(-1j * _p_squared(pgrid) * dt / (2.0 * spec.mass * HBAR)))
    norm_in = field.norm()
    vals = field.values * half_kick
    for step in range(spec.n_steps):
        vals = scipy.fft.ifftn(scipy.fft.fftn(vals) * drift)
        if step + 1 < spec.n_steps:
            vals = vals * full_kick
    vals = vals * half_kick
    out = field.with_values(vals, field.time_label + (spec.t_end - spec.t_start))
    check_boundary(out, "evolve_split_operator output")
    if abs(out.norm() - norm_in) > 1e-9 * max(norm_in, 1.0):
        raise StabilityError("norm drifted during split-operator evolution")
    return out


def kernel_mixed_semiclassical(r, p, t: float, tau: float, m: float, F=None) -> complex:
    """Momentum-to-position transition kernel (2 pi hbar)^{-d/2} e^{i S~ / hbar}.

    The mixed-action determinant is unity for free and uniform-field motion,
    so the modulus equals the plane-wave normalization; exact (not merely
    semiclassical) in both cases.
    """
    T = t - tau
    if T < 0:
        raise DomainError("t must not precede tau")
    r = np.atleast_1d(np.asarray(r, dtype=float))
    d = len(r)
    f = np.zeros(d) if F is None else np.atleast_1d(np.asarray(F, dtype=float))
    s = action_S_tilde_uniform(r, p, T, m, f)
    return (2.0 * np.pi * HBAR) ** (-d / 2.0) * np.exp(1j * s / HBAR)


def kernel_position_semiclassical(r, r_prime, t: float, tau: float, m: float, F=None) -> complex:
    """Position-space kernel [m/(2 pi i hbar T)]^{d/2} e^{i S / hbar}."""
    T = t - tau
    if T <= 0:
        raise DomainError("t must exceed tau")
    r = np.atleast_1d(np.asarray(r, dtype=float))
    d = len(r)
    f = np.zeros(d) if F is None else np.atleast_1d(np.asarray(F, dtype=float))
    s = action_S_uniform(r, r_prime, T, m, f)
    pref = (m / (2.0 * np.pi * 1j * HBAR * T)) ** (d / 2.0)
    return pref * np.exp(1j * s / HBAR)


def interpolate_field(field: ComplexField, points: np.ndarray,
                      fill: complex | None = None) -> np.ndarray:
    """Deterministic cubic interpolation of field values at off-grid points.

    Points outside the grid raise a support error unless ``fill`` is given
    (useful when the field has decayed to zero at its edges).
    """
    if field.grid.dimension == 1:
        # a true spline: much more accurate than the local tensor method
        axis = field.grid.axes()[0]
        q = np.asarray(points)[..., 0]
        inside = (q >= axis[0]) & (q <= axis[-1])
        if fill is None and not np.all(inside):
            raise SupportError("requested point outside the grid support")
        spline = make_interp_spline(axis, field.values, k=3)
        out = np.where(inside, spline(np.clip(q, axis[0], axis[-1])), fill)
        return out
    interp = RegularGridInterpolator(
        tuple(field.grid.axes()), field.values, method="cubic",
        bounds_error=fill is None, fill_value=fill,
    )
    try:
        return interp(points)
    except ValueError as exc:
        raise SupportError(f"requested point outside the grid support: {exc}") from exc


def _stationary_point(action, r, T: float, grid: Grid, p_init: np.ndarray):
    """Damped Newton on grad_p S~(p) = 0 with finite differences."""
    d = grid.dimension
    p = np.array(p_init, dtype=float)
    scale = max(1.0, float(np.max(np.abs(p))))
    h = 1e-6 * scale
    for _ in range(60):
        grad = np.empty(d)
        hess = np.empty((d, d))
        for i in range(d):
            ei = np.zeros(d); ei[i] = h
            grad[i] = (action(p + ei, r, T) - action(p - ei, r, T)) / (2 * h)
            for j in range(i, d):
                ej = np.zeros(d); ej[j] = h
                hess[i, j] = hess[j, i] = (
                    action(p + ei + ej, r, T) - action(p + ei - ej, r, T)
                    - action(p - ei + ej, r, T) + action(p - ei - ej, r, T)
                ) / (4 * h * h)
        det = np.linalg.det(hess)
        if not np.isfinite(det) or abs(det) < 1e-14:
            raise CausticError("degenerate stationary-phase Hessian")
        step = np.linalg.solve(hess, grad)
        p = p - step
        if np.max(np.abs(step)) < 1e-12 * scale:
            break
    return p, hess


def spa_integrate(momentum_field: ComplexField, action, r, t: float, tau: float) -> complex:
    """Stationary-phase value of int K~(r, p) Phi(p, tau) dp.

    ``action`` is S~(p, r, T).  The stationary momentum p' must lie inside
    the momentum grid (support error otherwise); the result is

        |det H|^{-1/2} e^{i pi sig(H) / 4} e^{i S~(p') / hbar} Phi(p'),

    which for the free and uniform-field actions is i^{-d/2} (m/T)^{d/2}
    e^{i S~(p')/hbar} Phi(p').
    """
    if momentum_field.representation != MOMENTUM:
        raise RepresentationError("spa_integrate expects a momentum-representation field")
    T = t - tau
    if T <= 0:
        raise DomainError("t must exceed tau")
    grid = momentum_field.grid
    r = np.atleast_1d(np.asarray(r, dtype=float))
    # start Newton from the density-weighted mean momentum
    dens = momentum_field.density()
    w = dens / dens.sum()
    axes = grid.meshgrid()
    p_init = np.array([float(np.sum(w * a)) for a in axes])
    p_star, hess = _stationary_point(action, r, T, grid, p_init)
    for ax in range(grid.dimension):
        lo, hi = grid.origin[ax], grid.origin[ax] + grid.spacing[ax] * (grid.n[ax] - 1)
        if not (lo <= p_star[ax] <= hi):
            raise SupportError(
                f"stationary momentum {p_star} lies outside the momentum grid"
            )
    phi = complex(interpolate_field(momentum_field, p_star.reshape(1, -1))[0])
    eigs = np.linalg.eigvalsh(hess)
    sig = int(np.sum(eigs > 0) - np.sum(eigs < 0))
    det = float(np.prod(eigs))
    amp = abs(det) ** -0.5 * np.exp(1j * np.pi * sig / 4.0)
    return amp * np.exp(1j * action(p_star, r, T) / HBAR) * phi


def it_field_uniform(momentum_field: ComplexField, r_grid: Grid, t: float, tau: float,
                     m: float, F=None) -> ComplexField:
    """Asymptotic position field from the mixed-kernel SPA on every r point.

    Uses the closed-form stationary momentum, so it is fast enough for full
    grids; reduces to the free imaging map at F = 0.
    """
    if momentum_field.representation != MOMENTUM:
        raise RepresentationError("expected a momentum-representation field")
    T = t - tau
    if T <= 0:
        raise DomainError("t must exceed tau")
    d = r_grid.dimension
    f = np.zeros(d) if F is None else np.atleast_1d(np.asarray(F, dtype=float))
    axes = np.meshgrid(*r_grid.axes(), indexing="ij")
    pts = np.stack([a.ravel() for a in axes], axis=-1)
    zero = np.zeros(d)
    p_star = np.stack([stationary_momentum(pt, zero, T, m, f) for pt in pts])
    phi = interpolate_field(momentum_field, p_star, fill=0.0)
    s = np.array([action_S_tilde_uniform(pts[k], p_star[k], T, m, f) for k in range(len(pts))])
    amp = (m / T) ** (d / 2.0) * np.exp(-1j * np.pi * d / 4.0)
    vals = (amp * np.exp(1j * s / HBAR) * phi).reshape(tuple(r_grid.n))
    return ComplexField(r_grid, POSITION, vals, t)
