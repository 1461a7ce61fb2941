"""Command-line driver: deterministic solves, sweeps, and reports.

Subcommands: solve-psi, fiducial, spectrum, indicial, glue, torus.  Flags win
over an optional JSON config file; every report embeds the configuration it
was produced from and floats are written with 17 significant digits, so
rerunning a command yields byte-identical artifacts.  Exit codes: 0 success,
1 numerical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import fiducial, gluing, linearized, painleve, topology
from .errors import NumericalError

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    t: list = field(default_factory=lambda: [1.0, 2.0, 4.0, 8.0])
    grid: int = 2000
    lmax: int = 32
    tol: float = 1e-8
    out: str = "."
    jobs: int = 1
    fmt: str = "json"
    gamma: int = 2

    def validate(self) -> None:
        if self.tol <= 0:
            raise UsageError("tolerance must be positive")
        if any(t <= 0 for t in self.t):
            raise UsageError("all t values must be positive")
        if self.grid < 16:
            raise UsageError("grid size must be at least 16")
        if self.jobs < 1:
            raise UsageError("jobs must be at least 1")
        if self.lmax < 1:
            raise UsageError("lmax must be at least 1")
        if self.fmt not in ("json", "csv"):
            raise UsageError("format must be json or csv")
        if self.gamma < 2:
            raise UsageError("gamma must be at least 2")

    def to_dict(self) -> dict:
        return {
            "command": self.command, "t": list(self.t), "grid": self.grid,
            "lmax": self.lmax, "tol": self.tol, "out": self.out,
            "jobs": self.jobs, "format": self.fmt, "gamma": self.gamma,
        }


def _format_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return _format_value(float(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return "null"
    return json.dumps(str(v))


def _emit_json(obj, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad}  "{k}": {_emit_json(obj[k], indent + 1)}' for k in sorted(obj)
        ]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{pad}  {_emit_json(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    return _format_value(obj)


def write_json(path: Path, payload: dict) -> None:
    path.write_text(_emit_json(payload) + "\n", encoding="utf-8")


def write_csv(path: Path, header: list, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_format_value(v).strip('"') for v in row) + "\n")


def _outdir(config: RunConfig) -> Path:
    out = Path(config.out)
    if not out.exists():
        if not out.parent.exists():
            raise UsageError(f"parent of output directory {out} does not exist")
        out.mkdir()
    return out


def _solve_profile(config: RunConfig):
    return painleve.solve_connection(tol=min(config.tol, 1e-12))


def _parallel_map(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def cmd_solve_psi(config: RunConfig) -> int:
    out = _outdir(config)
    profile = _solve_profile(config)
    painleve.export_profile_csv(profile, out / "psi.csv")
    write_json(out / "summary.json", {
        "config": config.to_dict(),
        "a0": profile.a0,
        "lambda": profile.lam,
        "residual_max": profile.residual_max,
        "match_mismatch": profile.match_mismatch,
        "eta_at_rho_max": float(profile.eta(profile.rho_max)),
    })
    return EXIT_OK


def cmd_fiducial(config: RunConfig) -> int:
    out = _outdir(config)
    profile = _solve_profile(config)

    def one(t):
        fam = fiducial.build_family(t, profile)
        fiducial.export_family_csv(fam, out / f"fiducial_t{t:g}.csv")
        return fiducial.family_summary(fam)

    summaries = _parallel_map(one, config.t, config.jobs)
    write_json(out / "fiducial_summary.json",
               {"config": config.to_dict(), "families": summaries})
    return EXIT_OK


def cmd_spectrum(config: RunConfig) -> int:
    out = _outdir(config)
    profile = _solve_profile(config)

    def one(t):
        fam = fiducial.build_family(t, profile)
        n = min(config.grid, 800)  # eigen sweeps do not need the fine grid
        return linearized.green_norms(t, config.lmax, fam, n=n).to_dict()

    reports = _parallel_map(one, config.t, config.jobs)
    write_json(out / "spectrum.json", {"config": config.to_dict(), "reports": reports})
    return EXIT_OK


def cmd_indicial(config: RunConfig) -> int:
    out = _outdir(config)
    roots = linearized.indicial_roots(range(-config.lmax, config.lmax + 1))
    restricted = linearized.restricted_indicial_roots(range(-config.lmax, config.lmax))
    payload = {
        "config": config.to_dict(),
        "aggregate": [float(v) for v in roots["aggregate"]],
        "restricted": [float(v) for v in restricted],
        "per_ell": {
            str(ell): [[float(root), mult] for root, mult in pairs]
            for ell, pairs in roots["per_ell"].items()
        },
    }
    if config.fmt == "csv":
        write_csv(out / "indicial.csv", ["root"], [(v,) for v in payload["aggregate"]])
    write_json(out / "indicial.json", payload)
    return EXIT_OK


def cmd_glue(config: RunConfig) -> int:
    out = _outdir(config)
    profile = _solve_profile(config)
    cutoff = gluing.CutoffProfile()

    def one(t):
        return gluing.correction_sweep([t], profile, cutoff, n=config.grid,
                                       tol=min(config.tol, 1e-9))[0]

    rows = _parallel_map(one, config.t, config.jobs)
    for row in rows:
        write_csv(out / f"newton_t{row['t']:g}.csv", ["iteration", "residual"],
                  list(enumerate(row["residual_history"])))
    fit = None
    if len(config.t) >= 4:
        delta, c, r2 = gluing.approx_error_sweep(config.t, profile, cutoff)
        fit = {"delta_hat": delta, "c_hat": c, "r_squared": r2}
    payload = {
        "config": config.to_dict(),
        "corrections": [
            {k: v for k, v in row.items() if k != "residual_history"} for row in rows
        ],
        "delta_fit": fit,
    }
    write_json(out / "glue.json", payload)
    return EXIT_OK


def cmd_torus(config: RunConfig) -> int:
    out = _outdir(config)
    rows = topology.dimension_table(range(2, config.gamma + 1))
    if config.fmt == "csv":
        write_csv(out / "torus.csv", ["gamma", "k", "h0", "h1", "expected"], rows)
    gamma = config.gamma
    write_json(out / "torus.json", {
        "config": config.to_dict(),
        "gamma": gamma,
        "dim": topology.torus_dimension(gamma),
        "table": [list(r) for r in rows],
    })
    return EXIT_OK


COMMANDS = {
    "solve-psi": cmd_solve_psi,
    "fiducial": cmd_fiducial,
    "spectrum": cmd_spectrum,
    "indicial": cmd_indicial,
    "glue": cmd_glue,
    "torus": cmd_torus,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hitchinlab",
        description="Model-disk solves and sweeps with machine-readable reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--t", action="append", type=float, default=None,
                       help="parameter value; repeatable")
        p.add_argument("--grid", type=int, default=None)
        p.add_argument("--lmax", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--jobs", type=int, default=None)
        p.add_argument("--format", dest="fmt", choices=("json", "csv"), default=None)
        p.add_argument("--gamma", type=int, default=None)
        p.add_argument("--config", type=str, default=None,
                       help="JSON file with defaults; explicit flags win")
    return parser


def _merge_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig(command=args.command)
    if args.config is not None:
        path = Path(args.config)
        if not path.exists():
            raise UsageError(f"config file {path} not found")
        data = json.loads(path.read_text(encoding="utf-8"))
        for key, value in data.items():
            attr = "fmt" if key == "format" else key
            if not hasattr(config, attr) or attr == "command":
                raise UsageError(f"unknown config key {key!r}")
            setattr(config, attr, value)
    for attr in ("t", "grid", "lmax", "tol", "out", "jobs", "fmt", "gamma"):
        value = getattr(args, attr)
        if value is not None:
            setattr(config, attr, value)
    config.t = [float(v) for v in config.t]
    config.validate()
    return config


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _merge_config(args)
        return COMMANDS[args.command](config)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(json.dumps({"error": "numerical-failure", "detail": str(exc)}),
              file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
