"""``dcf`` command line: figure data and the verification suite.

Settings resolve as flags > config file (flat key=value) > per-command
defaults taken from the figure setups (B = 1/2, |alpha| = 4, k = delta = 0).
Exit codes: 0 ok, 1 configuration error, 2 verification failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from math import pi

import numpy as np

from . import classical, numerics, output, verify
from . import coherent as co
from . import eigensystem as es
from . import observables as ob
from .errors import DcfError, GridSupportWarning

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3
COMMANDS = ("classical", "spectrum", "density", "hur", "energy", "velocity", "verify")


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------- parsing helpers

def _floats(text: str) -> tuple:
    try:
        vals = tuple(float(v) for v in str(text).split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from exc
    if not vals:
        raise ConfigError("empty list")
    return vals


def _ints(text: str) -> tuple:
    try:
        vals = tuple(int(v) for v in str(text).split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from exc
    if not vals:
        raise ConfigError("empty list")
    return vals


def _span(text: str) -> tuple:
    """a:b:n -> (a, b, n)."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"expected a:b:n, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"expected a:b:n, got {text!r}") from exc
    if n < 1:
        raise ConfigError(f"sweep {text!r} must have at least one point")
    if n > 1 and not b > a:
        raise ConfigError(f"sweep {text!r} needs a < b")
    return (a, b, n)


def _linspace(span) -> np.ndarray:
    a, b, n = span
    return np.linspace(a, b, int(n)) if n > 1 else np.array([a])


PARSERS = {
    "B": float, "k": float, "eta": int, "alpha_mod": float, "phase": float, "delta": float,
    "beta": _floats, "levels": _ints, "v_d": _floats, "phase_sweep": _span, "grid": _span,
    "alpha_grid": _span, "alpha_sweep": _span, "t_grid": _span, "mode": str, "format": str,
    "out": str, "trunc": int, "tol": float, "omega_B": float, "report": str,
}

DEFAULTS = {
    "B": 0.5, "beta": (0.0,), "k": 0.0, "eta": 1, "alpha_mod": 4.0, "phase": 0.0, "delta": 0.0,
    "levels": (0, 1, 2), "phase_sweep": None, "grid": None, "alpha_grid": (-4.0, 4.0, 33),
    "alpha_sweep": None, "t_grid": (0.0, 4 * pi, 401), "v_d": (0.0, 0.5, 1.5), "mode": "eigen",
    "format": "csv", "out": "-", "trunc": None, "tol": 1e-12, "omega_B": 1.0, "report": None,
}

COMMAND_DEFAULTS = {
    "classical": {},
    "spectrum": {"beta": tuple(np.round(np.linspace(0.0, 0.999, 112), 12)), "levels": tuple(range(6))},
    "density": {"beta": (0.0, 0.25, 0.5, 0.75), "k": 1.0},
    "hur": {"beta": (0.0, 0.25, 0.5, 0.75)},
    "energy": {"beta": (0.0, 0.25, 0.75)},
    "velocity": {"beta": (0.25, 0.5, 0.75)},
    "verify": {"beta": (0.0,)},
}
# coherent density figures use k = 0
COHERENT_DENSITY_DEFAULTS = {"k": 0.0, "phase_sweep": (0.0, 2 * pi, 65)}


@dataclass(frozen=True)
class RunConfig:
    command: str
    B: float
    beta: tuple
    k: float
    eta: int
    alpha_mod: float
    phase: float
    delta: float
    levels: tuple
    phase_sweep: tuple | None
    grid: tuple | None
    alpha_grid: tuple
    alpha_sweep: tuple | None
    t_grid: tuple
    v_d: tuple
    mode: str
    format: str
    out: str
    trunc: int | None
    tol: float
    omega_B: float
    report: str | None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.mode not in ("eigen", "coherent"):
            raise ConfigError(f"mode must be eigen or coherent, got {self.mode!r}")
        if not self.beta or any(not 0.0 <= b < 1.0 for b in self.beta):
            raise ConfigError("beta values must satisfy 0 <= beta < 1")
        if any(n < 0 for n in self.levels):
            raise ConfigError("levels must be non-negative")
        if self.alpha_mod < 0:
            raise ConfigError("alpha-mod must be non-negative")
        if self.grid is not None and self.grid[2] < 2:
            raise ConfigError("grid needs at least two points")
        if not 0 < self.tol < 1:
            raise ConfigError("tol must lie in (0, 1)")
        if self.trunc is not None and self.trunc < 0:
            raise ConfigError("trunc must be non-negative")
        try:
            es.FieldConfig(B=self.B, beta=self.beta[0], k=self.k, eta=self.eta)
            classical.ClassicalConfig(omega_B=self.omega_B)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def field(self, beta: float) -> es.FieldConfig:
        return es.FieldConfig(B=self.B, beta=beta, k=self.k, eta=self.eta)

    def spec(self, alpha_mod=None, phase=None) -> co.CoherentSpec:
        return co.CoherentSpec(
            self.alpha_mod if alpha_mod is None else float(alpha_mod),
            self.phase if phase is None else float(phase),
            self.delta,
            self.trunc,
        )

    @property
    def policy(self) -> numerics.TruncationPolicy:
        return numerics.TruncationPolicy(tol=self.tol)

    def echo(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items()}


def read_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    out = {}
    for i, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{i}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in PARSERS:
            raise ConfigError(f"{path}:{i}: unknown key {key!r}")
        out[key] = value
    return out


def resolve(command: str, flags: dict, config_path: str | None = None) -> RunConfig:
    """Merge flags > config file > command defaults into a validated RunConfig."""
    file_vals = read_config_file(config_path) if config_path else {}
    merged = dict(DEFAULTS)
    merged.update(COMMAND_DEFAULTS[command])
    mode = flags.get("mode") or file_vals.get("mode") or merged["mode"]
    if command == "density" and mode == "coherent":
        merged.update(COHERENT_DENSITY_DEFAULTS)
    for source in (file_vals, flags):
        for key, value in source.items():
            if value is None:
                continue
            try:
                merged[key] = PARSERS[key](value) if isinstance(value, str) and PARSERS[key] is not str else value
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key}: {value!r}") from exc
    names = {f.name for f in fields(RunConfig)} - {"command"}
    return RunConfig(command=command, **{k: merged[k] for k in names})


# ---------------------------------------------------------------- execution helpers

def thread_count() -> int:
    raw = os.environ.get("DCF_THREADS")
    if raw is None:
        return min(8, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"DCF_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ConfigError("DCF_THREADS must be >= 1")
    return n


def parallel_map(fn, items):
    """Order-preserving map over independent sweep points."""
    items = list(items)
    workers = thread_count()
    if workers == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _grid_for(cfg: RunConfig, field: es.FieldConfig, n_max: int) -> np.ndarray:
    if cfg.grid is not None:
        return _linspace(cfg.grid)
    return es.default_grid(field, max(n_max, 1))


def _alpha_points(cfg: RunConfig):
    """(alpha_mod, phase) pairs: a radial sweep if alpha_sweep is set, else the Re/Im plane."""
    if cfg.alpha_sweep is not None:
        phases = _linspace(cfg.phase_sweep) if cfg.phase_sweep else np.array([cfg.phase])
        return [(float(a), float(p)) for p in phases for a in _linspace(cfg.alpha_sweep)]
    axis = _linspace(cfg.alpha_grid)
    return [(float(abs(re + 1j * im)), float(np.angle(re + 1j * im))) for im in axis for re in axis]


def _columns(rows, names):
    return {name: [r[i] for r in rows] for i, name in enumerate(names)}


# ---------------------------------------------------------------- commands

def cmd_classical(cfg: RunConfig):
    t = _linspace(cfg.t_grid)
    rows = []
    for vd in cfg.v_d:
        cc = classical.ClassicalConfig(v0x=0.0, v0y=1.0, omega_B=cfg.omega_B, v_d=vd)
        x, y = classical.trajectory(cc, t)
        res = classical.circle_residual(cc, t)
        rows += [(float(vd), float(ti), float(xi), float(yi), float(ri)) for ti, xi, yi, ri in zip(t, x, y, res)]
    meta = output.base_meta("classical", cfg.echo())
    meta["initial_velocity"] = [0.0, 1.0]
    return meta, _columns(rows, ("v_d", "t", "x", "y", "circle_residual"))


def cmd_spectrum(cfg: RunConfig):
    rows = []
    for beta in cfg.beta:
        f = cfg.field(beta)
        rows += [(float(beta), int(n), es.energy(n, f)) for n in cfg.levels]
    return output.base_meta("spectrum", cfg.echo(), B=cfg.B), _columns(rows, ("beta", "n", "E"))


def cmd_density(cfg: RunConfig):
    if cfg.mode == "eigen":
        return _density_eigen(cfg)
    return _density_coherent(cfg)


def _density_eigen(cfg: RunConfig):
    jobs = [(beta, n) for beta in cfg.beta for n in cfg.levels]

    def run(job):
        beta, n = job
        f = cfg.field(beta)
        x = _grid_for(cfg, f, max(cfg.levels))
        pair = ob.density_eigen(n, f, x)
        total = float(numerics.integrate(pair.rho, numerics.trapezoid_rule(x)))
        return pair, total

    results = parallel_map(run, jobs)
    rows, integrals = [], []
    for (beta, n), (pair, total) in zip(jobs, results):
        integrals.append({"beta": beta, "n": n, "rho_integral": total})
        rows += [(float(beta), int(n), float(xi), float(r), float(j))
                 for xi, r, j in zip(pair.x, pair.rho.values, pair.jy.values)]
    meta = output.base_meta("density", cfg.echo(), B=cfg.B)
    meta["mode"] = "eigen"
    meta["rho_integrals"] = integrals
    return meta, _columns(rows, ("beta", "n", "x", "rho", "jy"))


def _density_coherent(cfg: RunConfig):
    phases = _linspace(cfg.phase_sweep) if cfg.phase_sweep else np.array([cfg.phase])
    order = cfg.spec().order(cfg.policy)
    grids = {beta: _grid_for(cfg, cfg.field(beta), order) for beta in cfg.beta}
    jobs = [(beta, float(ph)) for beta in cfg.beta for ph in phases]

    def run(job):
        beta, ph = job
        return ob.density_coherent(cfg.spec(phase=ph), cfg.field(beta), grids[beta], policy=cfg.policy)

    results = parallel_map(run, jobs)
    rows, checks = [], []
    for (beta, ph), dens in zip(jobs, results):
        total = float(numerics.integrate(dens.rho, numerics.trapezoid_rule(dens.x)))
        checks.append({"beta": beta, "phase": ph, "rho_integral": total, "printed_series_deviation": dens.deviation})
        rows += [(float(beta), ph, float(xi), float(r), float(j))
                 for xi, r, j in zip(dens.x, dens.rho.values, dens.jy.values)]
    meta = output.base_meta("density", cfg.echo(), truncation_order=order, B=cfg.B)
    meta["mode"] = "coherent"
    lo, hi = float(phases[0]), float(phases[-1])
    n0, n1 = int(np.ceil((lo / (pi / 2) - 1) / 2)), int(np.floor((hi / (pi / 2) - 1) / 2))
    meta["dashed_phases"] = [(2 * n + 1) * pi / 2 for n in range(n0, n1 + 1)]
    meta["checks"] = checks
    return meta, _columns(rows, ("beta", "phase", "x", "rho", "jy"))


def cmd_hur(cfg: RunConfig):
    points = _alpha_points(cfg)
    jobs = [(beta, a, p) for beta in cfg.beta for a, p in points]

    def run(job):
        beta, a, p = job
        spec, f = cfg.spec(a, p), cfg.field(beta)
        return ob.hur_closed_form(spec, f, cfg.policy), ob.hur_oracle(spec, f, cfg.policy)

    rows = []
    for (beta, a, p), (h, o) in zip(jobs, parallel_map(run, jobs)):
        z = a * np.exp(1j * p)
        dev = max(abs(h.mean_s0 - o.mean_s0), abs(h.mean_s1 - o.mean_s1), abs(h.var_s0 - o.var_s0), abs(h.var_s1 - o.var_s1))
        rows.append((float(beta), float(z.real), float(z.imag), a, p, h.mean_s0, h.mean_s1,
                     h.sigma_zeta, h.sigma_p, h.product, o.sigma_zeta, o.sigma_p, o.product, float(dev)))
    names = ("beta", "re_alpha", "im_alpha", "alpha_mod", "phase", "mean_s0", "mean_s1", "sigma_zeta", "sigma_p",
             "product", "sigma_zeta_oracle", "sigma_p_oracle", "product_oracle", "max_deviation")
    order = max(cfg.spec(a, p).order(cfg.policy) for a, p in points)
    return output.base_meta("hur", cfg.echo(), truncation_order=order, B=cfg.B), _columns(rows, names)


def cmd_energy(cfg: RunConfig):
    points = _alpha_points(cfg)
    jobs = [(beta, a, p) for beta in cfg.beta for a, p in points]

    def run(job):
        beta, a, p = job
        spec, f = cfg.spec(a, p), cfg.field(beta)
        return ob.mean_energy(spec, f, cfg.policy), ob.mean_energy_coefficients(spec, f, cfg.policy)

    rows = []
    for (beta, a, p), (e1, e2) in zip(jobs, parallel_map(run, jobs)):
        z = a * np.exp(1j * p)
        rows.append((float(beta), float(z.real), float(z.imag), a, p, e1, e2, abs(e1 - e2)))
    names = ("beta", "re_alpha", "im_alpha", "alpha_mod", "phase", "mean_energy", "mean_energy_coefficients", "deviation")
    order = max(cfg.spec(a, p).order(cfg.policy) for a, p in points)
    return output.base_meta("energy", cfg.echo(), truncation_order=order, B=cfg.B), _columns(rows, names)


def cmd_velocity(cfg: RunConfig):
    points = _alpha_points(cfg)
    jobs = [(beta, a, p) for beta in cfg.beta for a, p in points]

    def run(job):
        beta, a, p = job
        spec, f = cfg.spec(a, p), cfg.field(beta)
        ratio = ob.velocity_ratio(spec, f, cfg.policy)
        fd = ob.mean_velocity_fd(spec, f, policy=cfg.policy)
        return ratio, fd

    rows = []
    for (beta, a, p), (ratio, fd) in zip(jobs, parallel_map(run, jobs)):
        z = a * np.exp(1j * p)
        v = ratio * beta
        rows.append((float(beta), float(z.real), float(z.imag), a, p, ratio, v, fd, abs(v - fd)))
    names = ("beta", "re_alpha", "im_alpha", "alpha_mod", "phase", "vy_over_vd", "vy", "vy_fd", "deviation")
    order = max(cfg.spec(a, p).order(cfg.policy) for a, p in points)
    return output.base_meta("velocity", cfg.echo(), truncation_order=order, B=cfg.B), _columns(rows, names)


def cmd_verify(cfg: RunConfig, fault: str | None = None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GridSupportWarning)
        checks = verify.run_all(fault=fault, policy=cfg.policy)
    cols = {
        "check": [c.name for c in checks],
        "measured": [c.measured for c in checks],
        "tolerance": [c.tolerance for c in checks],
        "status": [c.status for c in checks],
        "note": [c.note for c in checks],
    }
    meta = output.base_meta("verify", cfg.echo(), truncation_order=None, B=cfg.B)
    meta["passed"] = verify.passed(checks)
    if fault:
        meta["fault_injected"] = fault
    return meta, cols, checks


HANDLERS = {
    "classical": cmd_classical, "spectrum": cmd_spectrum, "density": cmd_density,
    "hur": cmd_hur, "energy": cmd_energy, "velocity": cmd_velocity,
}


# ---------------------------------------------------------------- argparse

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("field and state")
    g.add_argument("--B", type=str, help="magnetic strength (default 0.5, i.e. omega_B = 1)")
    g.add_argument("--beta", type=str, help="comma-separated drift ratios in [0, 1)")
    g.add_argument("--k", type=str, help="wave number along y")
    g.add_argument("--eta", type=str, choices=["1", "-1", "+1"], help="valley sign")
    g.add_argument("--alpha-mod", dest="alpha_mod", type=str, help="coherent-state |alpha| (default 4)")
    g.add_argument("--phase", type=str, help="coherent-state phase phi")
    g.add_argument("--phase-sweep", dest="phase_sweep", type=str, help="phi sweep a:b:n")
    g.add_argument("--delta", type=str, help="operator phase delta")
    g.add_argument("--alpha-grid", dest="alpha_grid", type=str, help="square Re/Im alpha grid lo:hi:n")
    g.add_argument("--alpha-sweep", dest="alpha_sweep", type=str, help="|alpha| sweep a:b:n at the given phase(s)")
    g.add_argument("--levels", type=str, help="comma-separated level indices")
    g.add_argument("--grid", type=str, help="x grid xmin:xmax:N")
    g.add_argument("--trunc", type=str, help="explicit series order (checked against --tol)")
    g.add_argument("--tol", type=str, help="series truncation tolerance (default 1e-12)")
    c = common.add_argument_group("classical")
    c.add_argument("--v-d", dest="v_d", type=str, help="comma-separated drift velocities")
    c.add_argument("--t-grid", dest="t_grid", type=str, help="time grid a:b:n")
    c.add_argument("--omega-B", dest="omega_B", type=str, help="cyclotron frequency")
    o = common.add_argument_group("output")
    o.add_argument("--out", type=str, help="output path, - for stdout")
    o.add_argument("--format", type=str, choices=["csv", "json"])
    o.add_argument("--config", type=str, help="flat key=value config file")

    parser = _Parser(prog="dcf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "classical": "classical trajectories and circle residuals",
        "spectrum": "energy levels over a beta grid",
        "density": "probability and y-current densities (eigen or coherent)",
        "hur": "quadrature variances and uncertainty products",
        "energy": "coherent-state mean energy over the alpha plane",
        "velocity": "coherent-state drift velocity over the alpha plane",
        "verify": "run the invariant suite and write a report",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common], help=helps[name])
        if name == "density":
            p.add_argument("--mode", type=str, choices=["eigen", "coherent"])
        if name == "verify":
            p.add_argument("--report", type=str, help="report path (defaults to --out)")
            p.add_argument("--inject-fault", dest="inject_fault", choices=["corrupt-m"], help=argparse.SUPPRESS)
    return parser


SPAN_FLAGS = ("--grid", "--alpha-grid", "--alpha-sweep", "--phase-sweep", "--t-grid", "--beta", "--k", "--phase", "--delta", "--v-d")


def _glue_negative_values(argv):
    """Let ``--grid -10:10:201`` through argparse by rewriting it as ``--grid=-10:10:201``."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in SPAN_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and argv[i + 1][1:2].isdigit():
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _glue_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
        flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "inject_fault")}
        cfg = resolve(args.command, flags, args.config)
        if args.command == "verify":
            meta, cols, checks = cmd_verify(cfg, getattr(args, "inject_fault", None))
            text = output.render(meta, cols, cfg.format)
            output.write(cfg.report or cfg.out, text)
            for chk in checks:
                if chk.status == "fail":
                    print(f"FAIL {chk.name}: measured {chk.measured:.3e} > tol {chk.tolerance:.1e}", file=sys.stderr)
            return EXIT_OK if verify.passed(checks) else EXIT_VERIFY
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", GridSupportWarning)
            meta, cols = HANDLERS[args.command](cfg)
        notes = sorted({str(w.message) for w in caught if issubclass(w.category, GridSupportWarning)})
        if notes:
            meta["grid_support_warnings"] = notes
            for msg in notes:
                print(f"warning: {msg}", file=sys.stderr)
        output.write(cfg.out, output.render(meta, cols, cfg.format))
        return EXIT_OK
    except ConfigError as exc:
        print(f"dcf: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DcfError, ValueError) as exc:
        print(f"dcf: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"dcf: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
