"""Command-line front end.

Usage: itkit <command> --config <path> [--seed N] [--out DIR] [--ev] [--cm]

Commands: it-check, delays, coincidence, xsec, greens.  Configs are plain
``key = value`` lines with ``#`` comments; vectors are comma-separated.
All physics is in Hartree atomic units at the interface; --ev converts the
``energy`` key from eV and --cm converts distance keys from cm, on input
only.  Exit codes: 0 success, 2 config error, 3 infeasible physics,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import coincidence as coin
from . import imaging, propagate, scatter
from .core import (
    CM_TO_BOHR,
    EV_TO_HARTREE,
    GaussianPacketSpec,
    centered_grid_1d,
    sample_gaussian,
    to_momentum,
    to_position,
)
from .errors import DomainError, FitError, InfeasibleError, ItkitError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4


class ConfigError(Exception):
    pass


def parse_config(path: Path) -> dict[str, str]:
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    out: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"{path}:{lineno}: empty key or value")
        if key in out:
            raise ConfigError(f"{path}:{lineno}: duplicate key '{key}'")
        out[key] = value
    return out


class Config:
    """Typed accessors over the raw key-value map; tracks consumed keys."""

    def __init__(self, raw: dict[str, str], ev: bool = False, cm: bool = False):
        self.raw = raw
        self.used: set[str] = set()
        self.ev = ev
        self.cm = cm

    def _get(self, key: str, default=None) -> str | None:
        self.used.add(key)
        return self.raw.get(key, default)

    def _convert(self, key: str, value: float) -> float:
        if self.ev and key == "energy":
            return value * EV_TO_HARTREE
        if self.cm and ("distance" in key or key == "r_min" or key == "r_max"):
            return value * CM_TO_BOHR
        return value

    def real(self, key: str, default: float | None = None) -> float:
        raw = self._get(key)
        if raw is None:
            if default is None:
                raise ConfigError(f"missing required key '{key}'")
            return default
        try:
            return self._convert(key, float(raw))
        except ValueError as exc:
            raise ConfigError(f"key '{key}': not a real number: {raw!r}") from exc

    def integer(self, key: str, default: int | None = None) -> int:
        raw = self._get(key)
        if raw is None:
            if default is None:
                raise ConfigError(f"missing required key '{key}'")
            return default
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"key '{key}': not an integer: {raw!r}") from exc

    def vector(self, key: str, default=None) -> np.ndarray:
        raw = self._get(key)
        if raw is None:
            if default is None:
                raise ConfigError(f"missing required key '{key}'")
            return np.asarray(default, dtype=float)
        try:
            vals = [self._convert(key, float(s)) for s in raw.split(",")]
        except ValueError as exc:
            raise ConfigError(f"key '{key}': not a comma-separated vector: {raw!r}") from exc
        return np.array(vals)

    def text(self, key: str, default: str | None = None) -> str:
        raw = self._get(key)
        if raw is None:
            if default is None:
                raise ConfigError(f"missing required key '{key}'")
            return default
        return raw

    def reject_unknown(self) -> None:
        unknown = set(self.raw) - self.used
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")

    def comment(self) -> str:
        return "config: " + " ".join(f"{k}={v}" for k, v in sorted(self.raw.items()))


def _percentile_region(density: np.ndarray, frac: float = 0.99) -> np.ndarray:
    """Boolean mask of the smallest point set holding ``frac`` of the density."""
    order = np.argsort(density.ravel())[::-1]
    csum = np.cumsum(density.ravel()[order])
    k = int(np.searchsorted(csum, frac * csum[-1])) + 1
    mask = np.zeros(density.size, dtype=bool)
    mask[order[:k]] = True
    return mask.reshape(density.shape)


def cmd_it_check(cfg: Config, out_dir: Path, seed: int | None) -> int:
    mass = cfg.real("mass", 1.0)
    p0 = cfg.real("p0", 1.0)
    sigma_p = cfg.real("sigma_p", 0.25)
    times = cfg.vector("times", [250.0, 500.0, 1000.0, 2000.0])
    n = cfg.integer("n_points", 32768)
    cfg.reject_unknown()
    sigma_x = 1.0 / (2.0 * sigma_p)
    packet = GaussianPacketSpec(p0=[p0], sigma_p=[sigma_p], r0=[0.0])
    errors = []
    for t in times:
        if t * sigma_p / (mass * sigma_x) <= 10.0:
            print(f"warning: t={t:g} is below the far-field threshold", file=sys.stderr)
        center = p0 * t / mass
        spread = math.sqrt(sigma_x ** 2 + (sigma_p * t / mass) ** 2)
        xgrid = centered_grid_1d(30.0 * spread + 2.0 * abs(center), n, center)
        pgrid = centered_grid_1d(40.0 * sigma_p, n, p0)
        phi = sample_gaussian(packet, pgrid, "momentum")
        psi0 = sample_gaussian(packet, xgrid, "position")
        exact_psi = to_position(
            propagate.evolve_free_exact(to_momentum(psi0), mass, float(t)), xgrid
        )
        it_psi = imaging.apply_it_free(phi, mass, float(t), xgrid)
        de, di = exact_psi.density(), it_psi.density()
        region = _percentile_region(de)
        err = float(np.max(np.abs(di[region] - de[region]) / de[region]))
        errors.append((float(t), err))
        imaging.density_to_csv(xgrid, de, out_dir / f"exact_density_t{t:g}.csv", cfg.comment())
        imaging.density_to_csv(xgrid, di, out_dir / f"it_density_t{t:g}.csv", cfg.comment())
    with open(out_dir / "error_vs_time.csv", "w") as fh:
        fh.write(f"# {cfg.comment()}\n")
        fh.write("time_au,max_relative_error\n")
        for t, e in errors:
            fh.write(f"{t:.17g},{e:.17g}\n")
    return EXIT_OK


def cmd_delays(cfg: Config, out_dir: Path, seed: int | None) -> int:
    masses = cfg.vector("masses")
    distances = cfg.vector("distances")
    energy = cfg.real("energy")
    delays = cfg.vector("delays")
    cfg.reject_unknown()
    try:
        obs = coin.DelayObservation(masses, distances, energy, delays)
    except DomainError as exc:
        # the observation parsed fine but describes impossible physics
        raise InfeasibleError(str(exc)) from exc
    momenta = coin.invert_delays_numeric(obs)
    payload = {
        "momenta_au": [float(p) for p in momenta],
        "energy_au": energy,
        "energy_residual": float(np.sum(momenta ** 2 / (2 * masses)) - energy),
    }
    with open(out_dir / "momenta.json", "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    print(json.dumps(payload))
    return EXIT_OK


def cmd_coincidence(cfg: Config, out_dir: Path, seed: int | None) -> int:
    mode = cfg.text("mode", "simulate")
    mass = cfg.real("mass", 1.0)
    distance = cfg.real("distance")
    energy = cfg.real("energy")
    geometry = coin.PairGeometry(mass, distance)
    if mode == "simulate":
        sigma = cfg.real("sigma")
        big_sigma = cfg.real("Sigma")
        tau_max = cfg.real("tau_max", 6.0)
        n_bins = cfg.integer("n_bins", 121)
        n_events = cfg.real("n_events", 0.0)
        cfg.reject_unknown()
        params = coin.PairModelParams(sigma, big_sigma)
        t0 = coin.characteristic_time(mass, distance, energy)
        grid = np.linspace(-tau_max * t0, tau_max * t0, n_bins)
        dt, p1, p2, prob = coin.coincidence_curve(geometry, params, energy, grid)
        coin.curve_to_csv(dt, p1, p2, prob, out_dir / "curve.csv", cfg.comment())
        if n_events > 0:
            ds = coin.synthesize_dataset(geometry, params, energy, n_events,
                                         seed if seed is not None else 0, grid)
            coin.dataset_to_csv(ds, out_dir / "dataset.csv", cfg.comment())
        return EXIT_OK
    if mode == "fit":
        data_path = Path(cfg.text("data"))
        sigma0 = cfg.real("sigma_init", 1.0)
        big0 = cfg.real("Sigma_init", 10.0)
        cfg.reject_unknown()
        if not data_path.is_file():
            raise ConfigError(f"data file not found: {data_path}")
        ds = coin.dataset_from_csv(data_path, geometry, energy)
        params, scale, report = coin.fit_pair_model(ds, coin.PairModelParams(sigma0, big0))
        coin.fit_report_to_json(report, out_dir / "fit.json")
        print(json.dumps({"sigma": params.sigma, "Sigma": params.Sigma, "scale": scale}))
        return EXIT_OK
    raise ConfigError(f"mode must be 'simulate' or 'fit', got {mode!r}")


def cmd_xsec(cfg: Config, out_dir: Path, seed: int | None) -> int:
    v0 = cfg.real("v0", 0.0)
    a = cfg.real("a", 1.0)
    mass = cfg.real("mass", 1.0)
    energy = cfg.real("energy")
    n_angles = cfg.integer("n_angles", 19)
    cfg.reject_unknown()
    p = math.sqrt(2.0 * mass * energy)

    def potential(x, y, z):
        return v0 * np.exp(-(x * x + y * y + z * z) / (a * a))

    angles = np.linspace(0.0, 180.0, n_angles)
    with open(out_dir / "xsec.csv", "w") as fh:
        fh.write(f"# {cfg.comment()}\n")
        fh.write("angle_deg,f_re,f_im,dsigma_domega_au\n")
        for th in angles:
            rad = math.radians(th)
            p_in = np.array([0.0, 0.0, p])
            p_out = p * np.array([math.sin(rad), 0.0, math.cos(rad)])
            if v0 == 0.0:
                f = 0.0 + 0.0j
            else:
                f = scatter.born_amplitude(potential, p_in, p_out, mass,
                                           extent=max(14.0 * a, 14.0))
            fh.write(f"{th:.17g},{f.real:.17g},{f.imag:.17g},{scatter.cross_section(f):.17g}\n")
    return EXIT_OK


def cmd_greens(cfg: Config, out_dir: Path, seed: int | None) -> int:
    n_particles = cfg.integer("n_particles", 1)
    energy = cfg.real("energy")
    r_min = cfg.real("r_min")
    r_max = cfg.real("r_max")
    n_r = cfg.integer("n_r", 50)
    mu = cfg.real("mu", 1.0)
    mass = cfg.real("mass", 1.0)
    cfg.reject_unknown()
    radii = np.linspace(r_min, r_max, n_r)
    rows = []
    for R in radii:
        if R <= 0:
            print(f"note: skipping nonpositive radius {R:g}", file=sys.stderr)
            continue
        if n_particles == 1:
            config = scatter.hyper_config([mass], mass, energy)
            g0 = scatter.green_free([R, 0, 0], [0, 0, 0], energy, mass)
            w = math.sqrt(2 * mass * energy) * R
            gsc = scatter.green_semiclassical(w, mass * mass / (R * R))
            rows.append((R, energy, g0, "exact-free"))
            rows.append((R, energy, gsc, "semiclassical"))
            rows.append((R, energy, scatter.green_hyper_hankel(config, R), "hyper-hankel"))
        else:
            config = scatter.hyper_config([mass] * n_particles, mu, energy)
            rows.append((R, energy, scatter.green_hyper_asymptotic(config, R), "hyper-asymptotic"))
            rows.append((R, energy, scatter.green_hyper_hankel(config, R), "hyper-hankel"))
    scatter.green_scan_to_csv(rows, out_dir / "greens.csv", cfg.comment())
    return EXIT_OK


COMMANDS = {
    "it-check": cmd_it_check,
    "delays": cmd_delays,
    "coincidence": cmd_coincidence,
    "xsec": cmd_xsec,
    "greens": cmd_greens,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="itkit", description=__doc__)
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, type=Path)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", type=Path, default=Path("."))
    parser.add_argument("--ev", action="store_true",
                        help="interpret the 'energy' key in eV and convert")
    parser.add_argument("--cm", action="store_true",
                        help="interpret distance keys in cm and convert")
    args = parser.parse_args(argv)
    try:
        raw = parse_config(args.config)
        cfg = Config(raw, ev=args.ev, cm=args.cm)
        args.out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, args.out, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InfeasibleError,) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ItkitError, FitError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
