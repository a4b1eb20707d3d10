"""Classical actions, stationary momenta and trajectory densities.

Covers free motion and motion in a uniform (constant-force) field, the two
asymptotic regimes where the position action S(r, r'; T), its mixed
Legendre partner S~(p, r; T) and the fixed-energy characteristic action
W(r, r'; E) all have closed forms.  Van Vleck trajectory densities C and D
are provided both analytically and by finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import UniformField
from .errors import CausticError, DomainError, SingularityError

FD_REL_STEP = 1e-5


def _vec(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class Trajectory:
    """Classical path between (r_start, t_start) and (r_end, t_end).

    Construction verifies the equation of motion for the stated field:
    r_end = r_start + p_start T/m (+ F T^2/(2m)) and p_end = p_start + F T.
    """

    r_start: np.ndarray
    p_start: np.ndarray
    t_start: float
    r_end: np.ndarray
    p_end: np.ndarray
    t_end: float
    mass: float = 1.0
    field: UniformField | None = None

    def __post_init__(self):
        for name in ("r_start", "p_start", "r_end", "p_end"):
            a = _vec(getattr(self, name))
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        T = self.duration
        if T <= 0:
            raise DomainError("trajectory requires t_end > t_start")
        f = np.zeros_like(self.r_start) if self.field is None else self.field.force
        scale = max(1.0, float(np.max(np.abs(self.r_end))))
        r_pred = self.r_start + self.p_start * T / self.mass + f * T ** 2 / (2.0 * self.mass)
        p_pred = self.p_start + f * T
        if np.max(np.abs(r_pred - self.r_end)) > 1e-9 * scale:
            raise DomainError("endpoints do not satisfy the equation of motion")
        if np.max(np.abs(p_pred - self.p_end)) > 1e-9 * max(1.0, float(np.max(np.abs(self.p_end)))):
            raise DomainError("momenta do not satisfy the equation of motion")

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    @property
    def energy(self) -> float:
        f = np.zeros_like(self.r_start) if self.field is None else self.field.force
        return float(np.dot(self.p_end, self.p_end) / (2.0 * self.mass) - np.dot(f, self.r_end))

    @property
    def action(self) -> float:
        if self.field is None:
            return action_S_free(self.r_end, self.r_start, self.duration, self.mass)
        return action_S_uniform(self.r_end, self.r_start, self.duration, self.mass, self.field.force)


def action_S_free(r, r_prime, T: float, m: float = 1.0) -> float:
    """S = m (r - r')^2 / (2 T)."""
    if T <= 0:
        raise DomainError("T must be positive")
    dr = _vec(r) - _vec(r_prime)
    return float(m * np.dot(dr, dr) / (2.0 * T))


def action_S_tilde_free(r, p, T: float, m: float = 1.0) -> float:
    """Mixed action S~ = p.r - p^2 T / (2 m); valid for T >= 0."""
    if T < 0:
        raise DomainError("T must be nonnegative")
    r, p = _vec(r), _vec(p)
    return float(np.dot(p, r) - np.dot(p, p) * T / (2.0 * m))


def action_S_uniform(r, r_prime, T: float, m: float = 1.0, F=0.0) -> float:
    """Position action in a uniform field F (potential -F.r):

    S = m (r - r')^2 / (2T) + F.(r + r') T/2 - F^2 T^3 / (24 m).
    """
    if T <= 0:
        raise DomainError("T must be positive")
    r, rp, f = _vec(r), _vec(r_prime), _vec(F)
    dr = r - rp
    return float(
        m * np.dot(dr, dr) / (2.0 * T)
        + np.dot(f, r + rp) * T / 2.0
        - np.dot(f, f) * T ** 3 / (24.0 * m)
    )


def action_S_tilde_uniform(r, p, T: float, m: float = 1.0, F=0.0) -> float:
    """Mixed action in a uniform field:

    S~ = p.r - p^2 T/(2m) + F.r T - p.F T^2/(2m) - F^2 T^3/(6m).

    Satisfies dS~/dp = r' (launch point traced back from (p, r)) and
    |det d^2 S~ / dr dp| = 1, and reduces to the free form at F = 0.
    """
    if T < 0:
        raise DomainError("T must be nonnegative")
    r, p, f = _vec(r), _vec(p), _vec(F)
    return float(
        np.dot(p, r)
        - np.dot(p, p) * T / (2.0 * m)
        + np.dot(f, r) * T
        - np.dot(p, f) * T ** 2 / (2.0 * m)
        - np.dot(f, f) * T ** 3 / (6.0 * m)
    )


def stationary_momentum(r, r_prime, T: float, m: float = 1.0, F=None) -> np.ndarray:
    """Launch momentum of the unique path from r' to r in time T.

    Free: p' = m (r - r') / T.  Uniform field adds -F T / 2.
    """
    if T <= 0:
        raise DomainError("T must be positive")
    p = m * (_vec(r) - _vec(r_prime)) / T
    if F is not None:
        p = p - _vec(F) * T / 2.0
    return p


def van_vleck_time(m, T, dimension: int = 3) -> float:
    """Free van Vleck factor C = prod_n (m_n / T_n)^d over particles.

    ``m`` and ``T`` may be scalars (one particle) or equal-length sequences.
    """
    m = _vec(m)
    T = np.broadcast_to(_vec(T), m.shape)
    if np.any(T <= 0):
        raise DomainError("T must be positive")
    return float(np.prod((m / T) ** dimension))


def van_vleck_numeric(momentum_map, r, step: float | None = None) -> float:
    """|det dp'/dr| of a launch-momentum map by central differences.

    ``momentum_map`` takes a final position vector and returns the launch
    momentum p' of the trajectory bundle.  Raises CausticError when the
    Jacobian is numerically singular (a conjugate point).
    """
    r = _vec(r)
    d = len(r)
    if step is None:
        step = FD_REL_STEP * max(1.0, float(np.max(np.abs(r))))
    jac = np.empty((d, d))
    for j in range(d):
        e = np.zeros(d)
        e[j] = step
        jac[:, j] = (_vec(momentum_map(r + e)) - _vec(momentum_map(r - e))) / (2.0 * step)
    det = np.linalg.det(jac)
    if not np.isfinite(det) or abs(det) < 1e-12:
        raise CausticError("trajectory bundle is degenerate (det dp'/dr ~ 0)")
    return float(abs(det))


def characteristic_action_W_free(r, r_prime, E: float, m: float = 1.0) -> float:
    """W = sqrt(2 m E) |r - r'|."""
    if E <= 0:
        raise DomainError("E must be positive")
    R = float(np.linalg.norm(_vec(r) - _vec(r_prime)))
    return math.sqrt(2.0 * m * E) * R


def time_of_flight_free(r, r_prime, E: float, m: float = 1.0) -> tuple[float, float]:
    """(T, dT/dE) for the free path: T = m R / p', dT/dE = -T / (2E)."""
    if E <= 0:
        raise DomainError("E must be positive")
    R = float(np.linalg.norm(_vec(r) - _vec(r_prime)))
    if R == 0.0:
        raise DomainError("coincident endpoints")
    T = m * R / math.sqrt(2.0 * m * E)
    return T, -T / (2.0 * E)


def density_D_free(r, r_prime, E: float, m: float = 1.0) -> float:
    """Fixed-energy trajectory density D = -(dT/dE) C(T) = m^2 / R^2 in 3-D."""
    R = float(np.linalg.norm(_vec(r) - _vec(r_prime)))
    if R == 0.0:
        raise SingularityError("coincident endpoints")
    _ = E  # D is energy independent for free motion
    return m * m / (R * R)


def enumerate_trajectories_uniform_1d(
    r_prime: float, r: float, E: float, m: float = 1.0, F: float = 0.0
) -> list[Trajectory]:
    """All 1-D fixed-energy paths from r' to r in a constant force F.

    Launch speed follows from p'^2/(2m) - F r' = E; both launch-momentum
    signs are tried and positive flight times kept.  Classically forbidden
    geometry yields an empty list.
    """
    ke = 2.0 * m * (E + F * r_prime)
    if ke < 0:
        return []
    p0_mag = math.sqrt(ke)
    field = UniformField(np.array([F])) if F != 0.0 else None
    found: list[Trajectory] = []
    for sign in (+1.0, -1.0):
        p0 = sign * p0_mag
        if F == 0.0:
            if p0 == 0.0:
                continue
            T = m * (r - r_prime) / p0
            roots = [T] if T > 0 else []
        else:
            # r = r' + p0 T/m + F T^2/(2m): quadratic in T
            a = F / (2.0 * m)
            b = p0 / m
            c = -(r - r_prime)
            disc = b * b - 4.0 * a * c
            if disc < 0:
                continue
            sq = math.sqrt(disc)
            roots = [t for t in ((-b + sq) / (2 * a), (-b - sq) / (2 * a)) if t > 1e-14]
        for T in roots:
            p_end = p0 + F * T
            if abs(p_end ** 2 / (2.0 * m) - F * r - E) > 1e-10 * max(1.0, abs(E)):
                raise CausticError("energy drift on enumerated trajectory")
            found.append(
                Trajectory(
                    r_start=[r_prime], p_start=[p0], t_start=0.0,
                    r_end=[r], p_end=[p_end], t_end=T,
                    mass=m, field=field,
                )
            )
    uniq: list[Trajectory] = []
    for tr in sorted(found, key=lambda t: t.duration):
        if uniq and abs(uniq[-1].duration - tr.duration) < 1e-12 \
                and abs(uniq[-1].p_start[0] - tr.p_start[0]) < 1e-12:
            continue
        uniq.append(tr)
    return uniq


def trajectories_to_csv(trajectories: list[Trajectory], path, comment: str | None = None) -> None:
    """Columns per axis: r', p', tau, r, p, t, then S, W, T."""
    d = len(trajectories[0].r_start) if trajectories else 1
    cols = []
    for i in range(d):
        cols += [f"r_start_{i}_au", f"p_start_{i}_au"]
    cols += ["t_start_au"]
    for i in range(d):
        cols += [f"r_end_{i}_au", f"p_end_{i}_au"]
    cols += ["t_end_au", "action_S_au", "action_W_au", "duration_au"]
    with open(path, "w") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        fh.write(",".join(cols) + "\n")
        for tr in trajectories:
            row = []
            for i in range(d):
                row += [tr.r_start[i], tr.p_start[i]]
            row += [tr.t_start]
            for i in range(d):
                row += [tr.r_end[i], tr.p_end[i]]
            w = tr.action + tr.energy * tr.duration
            row += [tr.t_end, tr.action, w, tr.duration]
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
