"""Command-line front end: ``pursuit-lab <mode> --config <file>``.

Configuration is plain ``key = value`` text with one section per concern
([system] plus a section per mode).  Angles accept raw radians or
pi-multiple suffix notation ("11/12pi", "-1/2pi", "0.25pi"); per-agent
lists use commas with an optional repeat count ("1/6pi*3, 1/7pi*3").
Outputs are deterministic for a fixed config and seed, and every run
writes a manifest listing its artifacts with their provenance.

Exit codes: 0 success, 2 configuration, 3 numeric, 4 collision,
5 precondition.
"""

import argparse
import configparser
import hashlib
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import equilibria, full_space, pure_shape, shape_space, stability
from .errors import (ConfigError, DegenerateAlphaSumError, PursuitLabError)
from .numerics import DEFAULT_DT
from .params import ControlParams

MODES = ("simulate", "shape-sim", "equilibria", "stability", "pure-shape",
         "portrait", "sweep")

_SYSTEM_KEYS = {"n", "mu", "mu_b", "lambda", "alpha", "alpha0", "nu"}
_MODE_KEYS = {
    "simulate": {"t", "dt", "seed", "initial", "m", "k", "kappa1", "rho1",
                 "record_every"},
    "shape-sim": {"t", "dt", "seed", "initial", "m", "k", "kappa1", "rho1",
                  "record_every"},
    "equilibria": {"direction"},
    "stability": {"m"},
    "pure-shape": {"k", "kappa1", "rho1", "t", "dt", "record_every"},
    "portrait": {"k", "kappa_min", "kappa_max", "kappa_samples", "rho_min",
                 "rho_max", "rho_samples", "seeds", "t", "dt"},
    "sweep": {"parameter", "start", "stop", "samples", "m", "workers"},
}


def parse_angle(text, key="angle"):
    """Parse radians or pi-suffix notation ("11/12pi", "pi", "-0.5pi")."""
    s = str(text).strip().lower().replace(" ", "")
    try:
        if s.endswith("pi"):
            head = s[:-2]
            if head in ("", "+"):
                factor = 1.0
            elif head == "-":
                factor = -1.0
            elif "/" in head:
                num, den = head.split("/")
                factor = float(num if num not in ("", "-") else num + "1") \
                    / float(den)
            else:
                factor = float(head)
            return factor * math.pi
        return float(s)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{key}: cannot parse angle value {text!r}") \
            from None


def parse_angle_list(text, n, key):
    """Comma list of angles with optional '*count' repeats, broadcast
    when a single value is given."""
    items = []
    for chunk in str(text).split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "*" in chunk:
            value_text, count_text = chunk.rsplit("*", 1)
            try:
                count = int(count_text)
            except ValueError:
                raise ConfigError(
                    f"{key}: bad repeat count in {chunk!r}") from None
        else:
            value_text, count = chunk, 1
        items.extend([parse_angle(value_text, key)] * count)
    if len(items) == 1:
        items = items * n
    if len(items) != n:
        raise ConfigError(
            f"{key}: expected {n} entries (or one to broadcast), got "
            f"{len(items)}")
    return items


@dataclass
class RunConfig:
    """A fully validated run request."""

    mode: str
    params: ControlParams
    out_dir: Path
    seed: int = 0
    T: float = 20.0
    dt: float = DEFAULT_DT
    record_every: int = 1
    initial: str = "random"
    m: int = 1
    k: int = 1
    kappa1: float = 0.0
    rho1: float = 1.0
    direction: str = "both"
    grid: pure_shape.GridSpec = None
    seeds: tuple = ()
    sweep_parameter: str = "alpha0"
    sweep_start: float = 0.0
    sweep_stop: float = math.pi
    sweep_samples: int = 16
    workers: int = 4
    canonical: str = ""

    def config_hash(self):
        return hashlib.sha256(self.canonical.encode()).hexdigest()[:16]


def _get(section, key, default=None):
    if section is None or key not in section:
        return default
    return section[key]


def _require(section, key, mode):
    if section is None or key not in section:
        raise ConfigError(f"missing required key '{key}' for mode {mode}")
    return section[key]


def _check_unknown_keys(parser, mode):
    for name in parser.sections():
        if name == "system":
            allowed = _SYSTEM_KEYS
        elif name in MODES:
            allowed = _MODE_KEYS[name]
        else:
            raise ConfigError(f"unknown config section [{name}]")
        for key in parser[name]:
            if key not in allowed:
                raise ConfigError(f"unknown key '{key}' in section [{name}]")


def _positive(value, key, kind=float):
    try:
        out = kind(value)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {value!r}") \
            from None
    if out <= 0:
        raise ConfigError(f"{key}: must be positive, got {out}")
    return out


def parse_config(path, mode, overrides=(), out_dir="out", seed=None):
    """Load, override and validate a run configuration.

    Overrides take ``section.key=value`` or bare ``key=value`` (system
    first, then the mode section).  Every failure names the exact key.
    """
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}; expected one of "
                          + ", ".join(MODES))
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, value = item.split("=", 1)
        key = key.strip()
        if "." in key:
            section, bare = key.split(".", 1)
        elif key in _SYSTEM_KEYS:
            section, bare = "system", key
        else:
            section, bare = mode, key
        if not parser.has_section(section):
            parser.add_section(section)
        parser[section][bare] = value.strip()
    _check_unknown_keys(parser, mode)

    if "system" not in parser:
        raise ConfigError("missing [system] section")
    system = parser["system"]
    try:
        n = int(_require(system, "n", "system"))
    except ValueError:
        raise ConfigError("n: expected an integer") from None
    if n < 2:
        raise ConfigError("n: need at least 2 agents")
    mu = _positive(_require(system, "mu", "system"), "mu")
    try:
        lam = float(_require(system, "lambda", "system"))
    except ValueError:
        raise ConfigError("lambda: expected a number") from None
    if not 0.0 < lam < 1.0:
        raise ConfigError(
            f"lambda: must lie strictly inside (0, 1), got {lam}")
    alpha = parse_angle_list(_require(system, "alpha", "system"), n, "alpha")
    alpha0 = parse_angle_list(_require(system, "alpha0", "system"), n,
                              "alpha0")
    nu_text = _get(system, "nu", "1")
    nu = [_positive(v, "nu") for v in str(nu_text).split(",")]
    nu = nu * n if len(nu) == 1 else nu
    if len(nu) != n:
        raise ConfigError(f"nu: expected {n} entries, got {len(nu)}")
    mub_text = _get(system, "mu_b")
    if mub_text is None:
        mu_b = [mu] * n
    else:
        mu_b = [_positive(v, "mu_b") for v in str(mub_text).split(",")]
        mu_b = mu_b * n if len(mu_b) == 1 else mu_b
        if len(mu_b) != n:
            raise ConfigError(f"mu_b: expected {n} entries, got {len(mu_b)}")
    try:
        params = ControlParams(n=n, mu=mu, lam=lam, alpha=alpha,
                               alpha0=alpha0, mu_b=mu_b, nu=nu)
    except ValueError as err:
        raise ConfigError(str(err)) from None

    flags = params.flags()
    if mode in ("shape-sim", "equilibria", "stability", "pure-shape",
                "portrait", "sweep"):
        if not (flags.a1_equal_speed and abs(params.nu[0] - 1.0) < 1e-12):
            raise ConfigError(f"nu: mode {mode} requires common unit speed")
        if not flags.a2_equal_gains:
            raise ConfigError(f"mu_b: mode {mode} requires mu_b = mu")
        if not flags.a3_common_alpha0:
            raise ConfigError(f"alpha0: mode {mode} requires a common value")
    if mode in ("stability", "pure-shape", "portrait", "sweep"):
        if not flags.a4_common_alpha:
            raise ConfigError(f"alpha: mode {mode} requires a common value")

    section = parser[mode] if parser.has_section(mode) else None
    cfg = RunConfig(mode=mode, params=params, out_dir=Path(out_dir))
    cfg.seed = int(seed if seed is not None
                   else _get(section, "seed", 0) or 0)
    cfg.T = _positive(_get(section, "t", 20.0), "t")
    cfg.dt = _positive(_get(section, "dt", DEFAULT_DT), "dt")
    cfg.record_every = int(_positive(_get(section, "record_every", 1),
                                     "record_every", kind=int))

    if mode in ("simulate", "shape-sim"):
        cfg.initial = str(_get(section, "initial", "random")).strip()
        if cfg.initial not in ("random", "equilibrium", "manifold"):
            raise ConfigError(
                f"initial: expected random|equilibrium|manifold, got "
                f"{cfg.initial!r}")
        if cfg.initial == "equilibrium":
            cfg.m = int(_require(section, "m", mode))
        if cfg.initial == "manifold":
            cfg.k = int(_require(section, "k", mode))
            cfg.kappa1 = parse_angle(_require(section, "kappa1", mode),
                                     "kappa1")
            cfg.rho1 = _positive(_require(section, "rho1", mode), "rho1")
    elif mode == "equilibria":
        cfg.direction = str(_get(section, "direction", "both")).strip()
        if cfg.direction not in ("ccw", "cw", "both"):
            raise ConfigError("direction: expected ccw|cw|both")
    elif mode == "stability":
        try:
            cfg.m = int(_require(section, "m", mode))
        except ValueError:
            raise ConfigError("m: expected an integer") from None
    elif mode == "pure-shape":
        try:
            cfg.k = int(_require(section, "k", mode))
        except ValueError:
            raise ConfigError("k: expected an integer") from None
        cfg.kappa1 = parse_angle(_get(section, "kappa1", "0"), "kappa1")
        cfg.rho1 = _positive(_get(section, "rho1", 1.0), "rho1")
    elif mode == "portrait":
        try:
            cfg.k = int(_require(section, "k", mode))
        except ValueError:
            raise ConfigError("k: expected an integer") from None
        try:
            cfg.grid = pure_shape.GridSpec(
                kappa_min=parse_angle(_require(section, "kappa_min", mode),
                                      "kappa_min"),
                kappa_max=parse_angle(_require(section, "kappa_max", mode),
                                      "kappa_max"),
                kappa_samples=int(_require(section, "kappa_samples", mode)),
                rho_min=_positive(_require(section, "rho_min", mode),
                                  "rho_min"),
                rho_max=_positive(_get(section, "rho_max", 50.0),
                                  "rho_max"),
                rho_samples=int(_require(section, "rho_samples", mode)))
        except ValueError as err:
            raise ConfigError(f"portrait grid: {err}") from None
        seeds = []
        seeds_text = _get(section, "seeds", "")
        for chunk in str(seeds_text).split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            if ":" not in chunk:
                raise ConfigError(
                    f"seeds: expected kappa1:rho1 pairs, got {chunk!r}")
            ka, rh = chunk.split(":", 1)
            seeds.append((parse_angle(ka, "seeds"),
                          _positive(rh, "seeds")))
        cfg.seeds = tuple(seeds)
    elif mode == "sweep":
        cfg.sweep_parameter = str(_get(section, "parameter", "alpha0")).strip()
        if cfg.sweep_parameter not in ("alpha0", "alpha", "lambda"):
            raise ConfigError("parameter: expected alpha0|alpha|lambda")
        cfg.sweep_start = parse_angle(_get(section, "start", 0.0), "start")
        cfg.sweep_stop = parse_angle(_get(section, "stop", "pi"), "stop")
        cfg.sweep_samples = int(_positive(_get(section, "samples", 16),
                                          "samples", kind=int))
        try:
            cfg.m = int(_require(section, "m", mode))
        except ValueError:
            raise ConfigError("m: expected an integer") from None
        cfg.workers = int(_positive(_get(section, "workers", 4), "workers",
                                    kind=int))

    canon = [f"mode={mode}", f"seed={cfg.seed}"]
    for name in sorted(parser.sections()):
        for key in sorted(parser[name]):
            canon.append(f"{name}.{key}={parser[name][key]}")
    cfg.canonical = "\n".join(canon)
    return cfg


def _initial_world(cfg):
    if cfg.initial == "random":
        return full_space.random_world(cfg.params.n, seed=cfg.seed)
    if cfg.initial == "equilibrium":
        branch = equilibria.BranchAssignment(sigma=(1,) * cfg.params.n,
                                             m=cfg.m)
        a_star = equilibria.alpha_star(branch, cfg.params)
        matches = [eq for eq in equilibria.enumerate_equilibria(cfg.params, 1)
                   if eq.branch.sigma == branch.sigma
                   and abs(eq.alpha_star - a_star) < 1e-12]
        if not matches:
            raise ConfigError(
                f"m={cfg.m}: no counter-clockwise leftmost-branch "
                "equilibrium for these parameters")
        return equilibria.embed_world(matches[0])
    spec = pure_shape.manifold_spec(cfg.params.n, cfg.k)
    _, world = pure_shape.lift(spec, cfg.kappa1, cfg.rho1)
    return world


def _write_manifest(cfg, artifacts):
    path = cfg.out_dir / "manifest.txt"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# artifact provenance: name, mode, config hash, seed\n")
        for name in artifacts:
            fh.write(f"{name}\tmode={cfg.mode}\t"
                     f"config_sha256={cfg.config_hash()}\tseed={cfg.seed}\n")
    return path


def run(cfg):
    """Execute a validated configuration; returns artifact paths."""
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = []
    if cfg.mode == "simulate":
        world = _initial_world(cfg)
        traj = full_space.simulate(world, cfg.params, cfg.T, cfg.dt,
                                   record_every=cfg.record_every)
        out = cfg.out_dir / "trajectory.csv"
        full_space.write_trajectory_csv(
            traj, out, seed=cfg.seed,
            header_notes=[f"mode=simulate initial={cfg.initial} "
                          f"T={cfg.T:.12g} dt={cfg.dt:.12g}"])
        artifacts.append(out.name)
    elif cfg.mode == "shape-sim":
        world = _initial_world(cfg)
        shape0 = full_space.extract_shape(world)
        traj = shape_space.integrate_shape(shape0, cfg.params, cfg.T, cfg.dt,
                                           record_every=cfg.record_every)
        out = cfg.out_dir / "shape.csv"
        shape_space.write_shape_csv(
            traj, out, header_notes=[f"mode=shape-sim initial={cfg.initial} "
                                     f"T={cfg.T:.12g} dt={cfg.dt:.12g}"])
        artifacts.append(out.name)
    elif cfg.mode == "equilibria":
        out = cfg.out_dir / "equilibria.txt"
        chunks = []
        directions = {"ccw": [1], "cw": [-1], "both": [1, -1]}[cfg.direction]
        for direction in directions:
            label = "counter-clockwise" if direction == 1 else "clockwise"
            try:
                found = equilibria.enumerate_equilibria(cfg.params, direction)
                chunks.append(equilibria.format_equilibrium_report(
                    found, cfg.params, direction_label=label))
            except DegenerateAlphaSumError as err:
                verdict = equilibria.classify_degenerate(cfg.params)
                chunks.append(
                    f"direction: {label}\nunclassified: {err}\n"
                    f"degenerate-branch classification: {verdict.value}\n")
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(chunks))
        artifacts.append(out.name)
    elif cfg.mode == "stability":
        report = stability.format_stability_report(cfg.params, cfg.m)
        out = cfg.out_dir / "stability.txt"
        out.write_text(report, encoding="utf-8")
        artifacts.append(out.name)
        spec_csv = cfg.out_dir / "spectrum.csv"
        stability.write_spectrum_csv(cfg.params, cfg.m, spec_csv)
        artifacts.append(spec_csv.name)
    elif cfg.mode == "pure-shape":
        spec = pure_shape.manifold_spec(cfg.params.n, cfg.k)
        state0, _ = pure_shape.lift(spec, cfg.kappa1, cfg.rho1)
        traj = pure_shape.integrate_pure_shape(
            state0, cfg.params, cfg.T, cfg.dt, record_every=cfg.record_every)
        out = cfg.out_dir / "pure_shape.csv"
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("# transformed-dynamics trajectory on the invariant "
                     "manifold; residual = max deviation from the manifold "
                     "constants\n")
            fh.write("t,kappa1,rho1,manifold_residual\n")
            for i in range(traj.t.size):
                res = float(np.max(spec.residuals(traj.state_at(i))))
                fh.write(f"{traj.t[i]:.12g},{traj.kappa1[i]:.12g},"
                         f"{traj.rho1[i]:.12g},{res:.12g}\n")
        artifacts.append(out.name)
        summary = cfg.out_dir / "pure_shape.txt"
        lines = [f"manifold k = {cfg.k} of n = {cfg.params.n}",
                 f"psi = {spec.psi_const:.12g}, phi_b = "
                 f"{spec.phi_const:.12g}, rho_b ratio = "
                 f"{spec.rho_tb_const:.12g}"]
        eqs = pure_shape.reduced_equilibrium(cfg.params, cfg.k)
        if eqs is None:
            lines.append("reduced circling equilibrium: none")
        else:
            for eq in eqs:
                lines.append(f"reduced equilibrium kappa1 = {eq.kappa1:.12g}"
                             f" rho1 = {eq.rho1:.12g} [{eq.tag}, {eq.method}]")
        region = pure_shape.invariant_region_check(cfg.params, cfg.k)
        lines.append(f"invariant-region condition value = "
                     f"{region.value:.12g} -> "
                     + ("holds" if region.holds else "does not hold"))
        if region.holds:
            try:
                asym = pure_shape.asymptote_prediction(cfg.params, cfg.k)
                lines.append(f"predicted heading asymptote = {asym:.12g} rad"
                             f" ({asym / math.pi:.6f} pi)")
            except PursuitLabError as err:
                lines.append(f"asymptote prediction unavailable: {err}")
        lines.append(f"a5 guard flags along run: {len(traj.a5_flags)}")
        summary.write_text("\n".join(lines) + "\n", encoding="utf-8")
        artifacts.append(summary.name)
    elif cfg.mode == "portrait":
        portrait = pure_shape.phase_portrait(cfg.params, cfg.k, cfg.grid,
                                             seeds=cfg.seeds, T=cfg.T,
                                             dt=cfg.dt)
        grid_path = cfg.out_dir / "grid.csv"
        pure_shape.write_portrait_csv(portrait, grid_path)
        artifacts.append(grid_path.name)
        for idx, (t, ka, rh) in enumerate(portrait.trajectories):
            path = cfg.out_dir / f"traj_{idx:02d}.csv"
            pure_shape.write_portrait_trajectory_csv(t, ka, rh, path)
            artifacts.append(path.name)
    elif cfg.mode == "sweep":
        rows = _run_sweep(cfg)
        out = cfg.out_dir / "sweep.csv"
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(f"# sweep over {cfg.sweep_parameter}, winding m = "
                     f"{cfg.m}\n")
            fh.write("index,value,exists,verdict,max_informative_re\n")
            for row in rows:
                fh.write(",".join(str(v) for v in row) + "\n")
        artifacts.append(out.name)
    artifacts.append(_write_manifest(cfg, artifacts).name)
    return [cfg.out_dir / name for name in artifacts]


def _sweep_item(cfg, value):
    base = cfg.params
    kwargs = dict(n=base.n, mu=base.mu, lam=base.lam, alpha=base.alpha,
                  alpha0=base.alpha0, mu_b=base.mu_b, nu=base.nu)
    if cfg.sweep_parameter == "alpha0":
        kwargs["alpha0"] = value
    elif cfg.sweep_parameter == "alpha":
        kwargs["alpha"] = value
    else:
        kwargs["lam"] = value
    try:
        params = ControlParams(**kwargs)
        verdict = stability.routh_necessary(params, cfg.m)
        spectrum = stability.spectrum_report(params, cfg.m)
        return (True, verdict.overall,
                format(spectrum.max_informative_real(), ".12g"))
    except (PursuitLabError, ValueError):
        return (False, False, "nan")


def _run_sweep(cfg):
    values = np.linspace(cfg.sweep_start, cfg.sweep_stop, cfg.sweep_samples)
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        results = list(pool.map(lambda v: _sweep_item(cfg, v), values))
    rows = []
    for idx, (value, res) in enumerate(zip(values, results)):
        exists, verdict, worst = res
        rows.append((idx, format(value, ".12g"), int(exists), int(verdict),
                     worst))
    return rows


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="pursuit-lab",
        description="Simulation and analysis laboratory for "
                    "beacon-referenced cyclic pursuit collectives.")
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", required=True, help="config file path")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed override (u64)")
    parser.add_argument("--override", action="append", default=[],
                        metavar="KEY=VALUE",
                        help="config override, repeatable")
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(args.config, args.mode, overrides=args.override,
                           out_dir=args.out, seed=args.seed)
        artifacts = run(cfg)
    except PursuitLabError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.exit_code
    for path in artifacts:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
