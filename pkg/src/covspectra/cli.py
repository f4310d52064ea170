"""Command-line front end.

Subcommands: simulate | bounds | spectrum | mp. Flags may also come from a
flat key-value JSON config file (--config); explicit flags win. All
randomness flows from --seed; commands that draw refuse to run without one.
Outputs are CSV/JSON with 17-significant-digit floats so reruns are
byte-identical, plus a run.json manifest (which carries wall-clock time and
is therefore the one non-reproducible file).

Exit codes: 0 success, 1 numerical failure, 2 usage/config error.
"""

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from covspectra import __version__, bounds, experiments, spectra
from covspectra._kernels import BACKEND_NAME
from covspectra.errors import NumericalError
from covspectra.exprs import parse_generator_expr

_SWEEP_HEADER = ("p,n,phi,xi,overshoot_freq,ci_low,ci_high,undershoot_freq,"
                 "uci_low,uci_high,thm2_bound,thm3_bound,mean_l1,mean_lp")
_BOUNDS_HEADER = "x,emp_cdf_l1,muirhead_upper,emp_cdf_lp,muirhead_lower,stderr,pass"
_MAX_SEED = 2 ** 64 - 1


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _write_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def parse_family(spec: str) -> spectra.SpectrumFamily:
    """Family specs: identity:LAM | generator:EXPR | dirac:DELTA:TOP:EXPR |
    twoblock:TOP:BOTTOM | table:FILE.json"""
    kind, _, rest = spec.partition(":")
    if kind == "identity":
        return spectra.IdentityFamily(float(rest or 1.0))
    if kind == "generator":
        expr = parse_generator_expr(rest)
        return spectra.GeneratorFamily(expr, description=rest)
    if kind == "dirac":
        parts = rest.split(":")
        if len(parts) != 3:
            raise ValueError("dirac family needs dirac:DELTA:TOP:BASE_EXPR")
        return spectra.DiracMixtureFamily(
            float(parts[0]), float(parts[1]), parse_generator_expr(parts[2]))
    if kind == "twoblock":
        parts = rest.split(":") if rest else []
        if len(parts) not in (0, 2):
            raise ValueError("twoblock family needs twoblock:TOP:BOTTOM")
        return (spectra.TwoBlockFamily(float(parts[0]), float(parts[1]))
                if parts else spectra.TwoBlockFamily())
    if kind == "table":
        with open(rest, encoding="utf-8") as fh:
            raw = json.load(fh)
        return spectra.TableFamily({int(k): v for k, v in raw.items()})
    raise ValueError(f"unknown family kind {kind!r}")


def _parse_p_list(value) -> tuple:
    if isinstance(value, int):
        return (value,)
    if isinstance(value, (list, tuple)):
        return tuple(int(v) for v in value)
    return tuple(int(v) for v in str(value).split(",") if v.strip())


def _parse_grid(value):
    parts = str(value).split(":")
    if len(parts) != 3:
        raise ValueError("grid must be LO:HI:COUNT")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 2 or hi <= lo or lo < 0.0:
        raise ValueError("grid must satisfy 0 <= LO < HI and COUNT >= 2")
    return np.linspace(lo, hi, count)


class _Options:
    """Flag values merged over the config file."""

    def __init__(self, args: argparse.Namespace):
        file_conf = {}
        if getattr(args, "config", None):
            with open(args.config, encoding="utf-8") as fh:
                file_conf = json.load(fh)
            if not isinstance(file_conf, dict):
                raise ValueError("config file must hold a flat JSON object")
        self._flags = vars(args)
        self._file = file_conf

    def get(self, key, default=None):
        flag = self._flags.get(key)
        if flag is not None:
            return flag
        return self._file.get(key, default)

    def require(self, key):
        value = self.get(key)
        if value is None:
            raise ValueError(f"missing required option --{key}")
        return value

    def seed(self) -> int:
        seed = int(self.require("seed"))
        if not 0 <= seed <= _MAX_SEED:
            raise ValueError("seed must be a 64-bit unsigned integer")
        return seed

    def single_p(self) -> int:
        p_list = _parse_p_list(self.require("p"))
        if len(p_list) != 1:
            raise ValueError("this command takes a single --p")
        return p_list[0]

    def out_dir(self) -> Path:
        out = Path(self.get("out", "."))
        out.mkdir(parents=True, exist_ok=True)
        return out


def _echo_config(opts: _Options, keys) -> dict:
    return {k: opts.get(k) for k in keys if opts.get(k) is not None}


def _write_manifest(out_dir: Path, command: str, config_echo: dict,
                    outputs, started: float, extras=None) -> None:
    for name in outputs:
        path = out_dir / name
        if not path.exists() or path.stat().st_size == 0:
            raise NumericalError(f"output file {name} missing or empty")
    manifest = {
        "tool": "covspectra",
        "version": __version__,
        "command": command,
        "config": config_echo,
        "master_seed": config_echo.get("seed"),
        "dof_convention": config_echo.get("dof", "n"),
        "horizon": config_echo.get("horizon"),
        "backend": BACKEND_NAME,
        "wall_clock_seconds": time.monotonic() - started,
        "outputs": list(outputs),
    }
    if extras:
        manifest.update(extras)
    (out_dir / "run.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _experiment_config(opts: _Options, p_list) -> experiments.ExperimentConfig:
    horizon = opts.get("horizon")
    return experiments.ExperimentConfig(
        family=parse_family(opts.require("family")),
        p_list=p_list,
        q=float(opts.require("q")),
        trials=int(opts.require("trials")),
        master_seed=opts.seed(),
        dof_convention=opts.get("dof", "n"),
        horizon=int(horizon) if horizon is not None else None,
        kappa=float(opts.get("kappa", 0.5)),
        workers=int(opts.get("workers", 1)))


def cmd_simulate(opts: _Options) -> int:
    started = time.monotonic()
    config = _experiment_config(opts, _parse_p_list(opts.require("p")))
    result = experiments.sweep(config)
    out_dir = opts.out_dir()
    rows = [(r.p, r.n, r.phi, r.xi, r.overshoot_freq, r.ci_low, r.ci_high,
             r.undershoot_freq, r.uci_low, r.uci_high, r.thm2_bound,
             r.thm3_bound, r.mean_l1, r.mean_lp) for r in result.rows]
    _write_csv(out_dir / "sweep.csv", _SWEEP_HEADER, rows)
    keys = ("family", "p", "q", "trials", "seed", "dof", "horizon", "kappa", "workers")
    _write_manifest(out_dir, "simulate", _echo_config(opts, keys),
                    ["sweep.csv"], started)
    return 0


def cmd_bounds(opts: _Options) -> int:
    started = time.monotonic()
    p = opts.single_p()
    config = _experiment_config(opts, (p,))
    grid_spec = opts.get("grid")
    if grid_spec is not None:
        grid = _parse_grid(grid_spec)
    else:
        spec = config.family.spectrum(p)
        law = bounds.MPLaw.for_ratio(config.q)
        grid = np.linspace(0.5 * spec.values[-1] * law.lambda_minus,
                           1.25 * spec.values[0] * law.lambda_plus, 25)
    table = experiments.cdf_vs_bound(config, p, grid)
    out_dir = opts.out_dir()
    rows = [(table.x_grid[i], table.emp_cdf_l1[i], table.muirhead_upper[i],
             table.emp_cdf_lp[i], table.muirhead_lower[i], table.stderr[i],
             bool(table.row_pass[i])) for i in range(table.x_grid.size)]
    _write_csv(out_dir / "bounds.csv", _BOUNDS_HEADER, rows)
    keys = ("family", "p", "q", "trials", "seed", "dof", "grid", "workers")
    _write_manifest(out_dir, "bounds", _echo_config(opts, keys),
                    ["bounds.csv"], started, extras={"pass": table.passed})
    return 0


def cmd_spectrum(opts: _Options) -> int:
    started = time.monotonic()
    family = parse_family(opts.require("family"))
    p = opts.single_p()
    horizon = opts.get("horizon")
    horizon = int(horizon) if horizon is not None else None
    kappa = float(opts.get("kappa", 0.5))
    report_j = spectra.j_set(family, p, horizon)
    report_h = spectra.h_set_xi(family, p, kappa, horizon)
    check = None
    g = getattr(family, "g", None)
    if g is not None:
        result = spectra.generator_condition_check(g, spectra.geometric_grid())
        check = {"slopes": list(result.slopes), "passes": result.passes,
                 "heuristic": True}
    payload = {
        "p": p,
        "horizon": report_j.horizon,
        "phi": report_j.cardinal,
        "xi": report_h.cardinal,
        "members_j": list(report_j.members),
        "members_h": list(report_h.members),
        "quantifier_truncated": True,
        "generator_check": check,
    }
    out_dir = opts.out_dir()
    (out_dir / "spectrum.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    keys = ("family", "p", "horizon", "kappa")
    _write_manifest(out_dir, "spectrum", _echo_config(opts, keys),
                    ["spectrum.json"], started)
    return 0


def cmd_mp(opts: _Options) -> int:
    started = time.monotonic()
    q = float(opts.require("q"))
    law = bounds.MPLaw.for_ratio(q)
    grid = np.linspace(0.0, 1.2 * law.lambda_plus, 400)
    out_dir = opts.out_dir()
    _write_csv(out_dir / "mp_density.csv", "x,mp_density",
               [(x, bounds.mp_density(q, float(x))) for x in grid])
    outputs = ["mp_density.csv"]
    extras = {}
    if opts.get("simulate"):
        result = experiments.mp_compare(
            p=opts.single_p(), q=q, trials=int(opts.require("trials")),
            master_seed=opts.seed(), workers=int(opts.get("workers", 1)))
        _write_csv(out_dir / "mp_ks.csv", "ks", [(result.ks_statistic,)])
        hist_rows = [(result.hist_edges[i], result.hist_edges[i + 1],
                      result.hist_mass[i]) for i in range(result.hist_mass.size)]
        _write_csv(out_dir / "mp_hist.csv", "bin_left,bin_right,mass", hist_rows)
        outputs += ["mp_ks.csv", "mp_hist.csv"]
        extras["ks"] = result.ks_statistic
    keys = ("q", "p", "trials", "seed", "simulate", "workers")
    _write_manifest(out_dir, "mp", _echo_config(opts, keys), outputs,
                    started, extras=extras)
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "bounds": cmd_bounds,
    "spectrum": cmd_spectrum,
    "mp": cmd_mp,
}


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--family", help="identity:LAM | generator:EXPR | "
                     "dirac:DELTA:TOP:EXPR | twoblock:TOP:BOTTOM | table:FILE")
    sub.add_argument("--p", help="dimension(s), comma separated")
    sub.add_argument("--q", type=float, help="aspect ratio p/n in (0,1)")
    sub.add_argument("--trials", type=int, help="Monte Carlo trials per p")
    sub.add_argument("--seed", type=int, help="64-bit master seed (required for draws)")
    sub.add_argument("--dof", choices=("n", "n-1"), help="chi-square dof convention")
    sub.add_argument("--horizon", type=int, help="clustering horizon M >= p")
    sub.add_argument("--kappa", type=float, help="bottom-cluster tolerance scale")
    sub.add_argument("--out", help="output directory (default .)")
    sub.add_argument("--config", help="flat JSON config file; flags override it")
    sub.add_argument("--workers", type=int, help="concurrent trial workers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covspectra",
        description="Monte Carlo laboratory for extreme eigenvalues of "
                    "sample covariance matrices")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("simulate", "dimension sweep: overshoot/undershoot vs the bounds"),
            ("bounds", "empirical extreme-eigenvalue CDFs vs product bounds"),
            ("spectrum", "clustering sets and generator condition report"),
            ("mp", "Marchenko-Pastur density table and KS comparison")):
        sub = subs.add_parser(name, help=help_text)
        _add_common(sub)
        if name == "bounds":
            sub.add_argument("--grid", help="x grid as LO:HI:COUNT")
        if name == "mp":
            sub.add_argument("--simulate", action="store_true", default=None,
                             help="pool sample eigenvalues and report KS distance")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        opts = _Options(args)
        return _COMMANDS[args.command](opts)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"covspectra: error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"covspectra: numerical failure: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # stable exit-code contract
        print(f"covspectra: failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
