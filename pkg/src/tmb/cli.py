"""Batch front-end: config-driven experiment runner with CSV output.

Configs are INI-style key-value files (sections [problem], [family],
[tolerances], [output]).  Outputs are RFC-4180 CSVs with floats at 17
significant digits plus a JSON metadata sidecar; timestamps live only in
the sidecar so reruns are byte-identical.  Every CSV row carries the
config hash for provenance joins.

Exit codes: 0 success, 1 any family-member failure (partial results are
still written), 2 malformed config.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .bessel import eigenpairs
from .bubbles import liouville_reference
from .errors import ConfigError, FamilyEmptyError, TmbError
from .families import FamilySpec, run_family, verify_formulas
from .nonlinearity import ProblemParams
from .ode import SolverSettings
from .shooting import nodal_solution

COMMANDS = ("solve", "sweep", "profile", "verify", "bessel")


@dataclass
class ExperimentConfig:
    command: str
    k: int = 0
    alpha: float = 1.0
    beta: float = 1.0
    lam: float | None = None
    family: FamilySpec | None = None
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    scan_points: int = 200
    output_dir: Path = Path(".")
    seed_note: str = ""
    jobs: int = 1
    precision: str = "double"
    config_hash: str = ""


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def emit_csv(records: list, path: Path, fieldnames: list) -> None:
    """Write RFC-4180 CSV; floats at 17 significant digits; row order kept.

    Raises ValueError on an empty record set (no file is created).
    """
    if not records:
        raise ValueError("refusing to write an empty CSV")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fieldnames)
        for rec in records:
            writer.writerow([_fmt(rec[name]) for name in fieldnames])


def _get(cp, section, key, conv, default=None, required=False, path=""):
    if not cp.has_option(section, key):
        if required:
            raise ConfigError(f"missing required key '{key}'", field=key,
                              location=f"{path}[{section}]")
        return default
    raw = cp.get(section, key)
    try:
        return conv(raw)
    except ValueError as exc:
        raise ConfigError(f"cannot parse '{key}' = {raw!r}: {exc}", field=key,
                          location=f"{path}[{section}]") from exc


def _floats(raw: str) -> tuple:
    parts = raw.replace(",", " ").split()
    return tuple(float(p) for p in parts)


def parse_config(path: Path, command: str) -> ExperimentConfig:
    """Parse and validate an experiment config; raises ConfigError."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", location=str(path)) from exc
    try:
        cp.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}", location=str(path)) from exc

    cfg = ExperimentConfig(command=command)
    cfg.config_hash = hashlib.sha256(text.encode()).hexdigest()[:12]
    loc = str(path)

    if cp.has_section("problem"):
        cfg.k = _get(cp, "problem", "k", int, default=0, path=loc)
        cfg.alpha = _get(cp, "problem", "alpha", float, default=1.0, path=loc)
        cfg.beta = _get(cp, "problem", "beta", float, default=1.0, path=loc)
        cfg.lam = _get(cp, "problem", "lambda", float, default=None, path=loc)
    if cfg.k < 0:
        raise ConfigError(f"k must be nonnegative, got {cfg.k}", field="k",
                          location=f"{loc}[problem]")
    if not (cfg.alpha > 0.0):
        raise ConfigError(f"alpha must be positive, got {cfg.alpha}",
                          field="alpha", location=f"{loc}[problem]")
    if not (0.0 < cfg.beta < 2.0):
        raise ConfigError(
            f"beta must lie in the open interval (0, 2), got {cfg.beta}",
            field="beta", location=f"{loc}[problem]")
    if cfg.lam is not None and not (cfg.lam > 0.0):
        raise ConfigError(f"lambda must be positive, got {cfg.lam}",
                          field="lambda", location=f"{loc}[problem]")

    if cp.has_section("family"):
        lam_sched = _get(cp, "family", "lambda_schedule", _floats, path=loc)
        if lam_sched is None:
            geo = _get(cp, "family", "lambda_geometric", _floats, path=loc)
            if geo is None or len(geo) != 3:
                raise ConfigError(
                    "family needs lambda_schedule or lambda_geometric "
                    "= start ratio count", field="lambda_schedule",
                    location=f"{loc}[family]")
            start, ratio, count = geo
            lam_sched = tuple(start * ratio ** n for n in range(int(count)))
        beta_sched = _get(cp, "family", "beta_schedule", _floats, path=loc)
        if beta_sched is None:
            bconst = _get(cp, "family", "beta_constant", float, path=loc)
            if bconst is None:
                bconst = cfg.beta
            beta_sched = tuple(bconst for _ in lam_sched)
        note = _get(cp, "family", "coupling_note", str, default="", path=loc)
        for b in beta_sched:
            if not (0.0 < b < 2.0):
                raise ConfigError(
                    f"beta must lie in the open interval (0, 2), got {b}",
                    field="beta_schedule", location=f"{loc}[family]")
        try:
            cfg.family = FamilySpec(k=cfg.k, alpha=cfg.alpha,
                                    lambda_schedule=lam_sched,
                                    beta_schedule=beta_sched,
                                    coupling_note=note)
        except ValueError as exc:
            raise ConfigError(str(exc), field="family",
                              location=f"{loc}[family]") from exc

    if cp.has_section("tolerances"):
        cfg.rel_tol = _get(cp, "tolerances", "rel_tol", float,
                           default=cfg.rel_tol, path=loc)
        cfg.abs_tol = _get(cp, "tolerances", "abs_tol", float,
                           default=cfg.abs_tol, path=loc)
        cfg.scan_points = _get(cp, "tolerances", "scan_points", int,
                               default=cfg.scan_points, path=loc)
        if cfg.rel_tol <= 0.0 or cfg.abs_tol <= 0.0:
            raise ConfigError("tolerances must be positive",
                              field="rel_tol/abs_tol",
                              location=f"{loc}[tolerances]")
        if cfg.scan_points < 2:
            raise ConfigError("scan_points must be at least 2",
                              field="scan_points", location=f"{loc}[tolerances]")
    if cp.has_section("output"):
        cfg.seed_note = _get(cp, "output", "seed_note", str, default="", path=loc)
    return cfg


def _settings(cfg: ExperimentConfig) -> SolverSettings:
    return SolverSettings(rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol,
                          precision=cfg.precision)


def _solution_fieldnames(k: int) -> list:
    names = ["n", "lambda", "beta", "k", "amplitude"]
    for i in range(1, k + 2):
        names += [f"r_{i}", f"rho_{i}", f"mu_{i}", f"du_at_r{i}", f"dirichlet_{i}"]
    names += ["full_dirichlet", "functional", "nehari_residual",
              "identity_residual_max", "config_hash"]
    return names


def _solution_row(n, rec, cfg) -> dict:
    row = {"n": n, "lambda": rec.lam, "beta": rec.beta, "k": len(rec.nodal_radii) - 1,
           "amplitude": rec.amplitude, "config_hash": cfg.config_hash}
    for i in range(1, len(rec.nodal_radii) + 1):
        row[f"r_{i}"] = rec.nodal_radii[i - 1]
        row[f"rho_{i}"] = rec.peak_radii[i - 1]
        row[f"mu_{i}"] = rec.peak_values[i - 1]
        row[f"du_at_r{i}"] = rec.boundary_slopes[i - 1]
        row[f"dirichlet_{i}"] = rec.dirichlet[i - 1]
    row["full_dirichlet"] = rec.full_dirichlet
    row["functional"] = rec.functional
    row["nehari_residual"] = rec.nehari_residual
    row["identity_residual_max"] = rec.identity_residual_max
    return row


def _write_metadata(cfg: ExperimentConfig, out: Path, wall: float,
                    started_at: str, extra: dict) -> None:
    meta = {
        "command": cfg.command,
        "config_hash": cfg.config_hash,
        "seed_note": cfg.seed_note,
        "package_version": __version__,
        "python_version": sys.version.split()[0],
        "precision": cfg.precision,
        "wall_time_s": wall,
        "started_at": started_at,
    }
    meta.update(extra)
    with open(out / "metadata.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _family_records(cfg: ExperimentConfig):
    return run_family(cfg.family, settings=_settings(cfg),
                      scan_points=cfg.scan_points)


def run(cfg: ExperimentConfig) -> int:
    """Execute a parsed config; returns the process exit status."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    started_at = time.strftime("%Y-%m-%dT%H:%M:%S")
    t0 = time.time()
    status = 0
    extra: dict = {}

    if cfg.command == "bessel":
        pairs = eigenpairs(cfg.k if cfg.k >= 1 else 3)
        rows = [{"k": ep.k, "t_k": ep.t_k, "lambda_k": ep.lambda_k,
                 "config_hash": cfg.config_hash} for ep in pairs]
        for ep in pairs:
            print(f"k={ep.k}  t_k={ep.t_k:.15g}  lambda_k={ep.lambda_k:.15g}")
        emit_csv(rows, out / "bessel.csv", ["k", "t_k", "lambda_k", "config_hash"])
        _write_metadata(cfg, out, time.time() - t0, started_at, {})
        return 0

    if cfg.command == "solve":
        if cfg.lam is None:
            raise ConfigError("solve needs [problem] lambda", field="lambda")
        from .families import _summarize

        p = ProblemParams(cfg.alpha, cfg.beta, cfg.lam)
        sols = nodal_solution(cfg.k, cfg.lam, p, settings=_settings(cfg),
                              scan_points=cfg.scan_points)
        rows = []
        for n, sol in enumerate(sols):
            rec = _summarize(n, sol.params.lam, cfg.beta, sol, len(sols))
            rows.append(_solution_row(n, rec, cfg))
        emit_csv(rows, out / "solutions.csv", _solution_fieldnames(cfg.k))
        extra["branches"] = len(sols)
        _write_metadata(cfg, out, time.time() - t0, started_at, extra)
        return 0

    # family-driven commands
    if cfg.family is None:
        raise ConfigError(f"{cfg.command} needs a [family] section", field="family")
    exp = _family_records(cfg)
    if exp.failures:
        status = 1
        extra["failures"] = [
            {"n": f.index, "lambda": f.lam, "beta": f.beta, "reason": f.reason}
            for f in exp.failures
        ]
    rows = [_solution_row(rec.index, rec, cfg) for rec in exp.records]
    emit_csv(rows, out / "solutions.csv", _solution_fieldnames(cfg.k))

    if cfg.command == "profile":
        for rec in exp.records:
            for i, diag in enumerate(rec.bubbles, start=1):
                if diag is None:
                    continue
                prows = []
                for r, zn in diag.samples:
                    z, phi = liouville_reference(r, rec.beta, cfg.alpha)
                    prows.append({"r": r, "z_n": zn, "z_exact": z, "phi": phi,
                                  "config_hash": cfg.config_hash})
                emit_csv(prows, out / f"profile_n{rec.index}_d{i}.csv",
                         ["r", "z_n", "z_exact", "phi", "config_hash"])

    if cfg.command == "verify":
        if len(exp.records) >= 3:
            reports = verify_formulas(exp)
            rrows = [{
                "formula_id": rep.formula_id,
                "applicable": int(rep.applicable),
                "raw_last": rep.raw_last,
                "extrapolated": rep.extrapolated,
                "target": rep.target,
                "rel_error": rep.rel_error,
                "slow_rate_flag": int(rep.slow_rate),
                "config_hash": cfg.config_hash,
            } for rep in reports]
            emit_csv(rrows, out / "formula_reports.csv",
                     ["formula_id", "applicable", "raw_last", "extrapolated",
                      "target", "rel_error", "slow_rate_flag", "config_hash"])
        else:
            status = 1
            extra["verify_skipped"] = "fewer than 3 successful members"

    _write_metadata(cfg, out, time.time() - t0, started_at, extra)
    return status


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tmb",
        description="Nodal radial solutions and blow-up diagnostics on the unit disk")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path,
                        help="experiment config (required except for bessel)")
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker budget (families are continuation-sequential)")
    parser.add_argument("--precision", choices=("double", "extended"),
                        default="double")
    parser.add_argument("--k", type=int, default=None,
                        help="bessel: number of eigenpairs to print")
    args = parser.parse_args(argv)

    try:
        if args.command == "bessel" and args.config is None:
            cfg = ExperimentConfig(command="bessel")
            cfg.config_hash = hashlib.sha256(b"bessel-cli").hexdigest()[:12]
        else:
            if args.config is None:
                raise ConfigError(f"{args.command} requires --config", field="config")
            cfg = parse_config(args.config, args.command)
        if args.jobs < 1:
            raise ConfigError(f"--jobs must be >= 1, got {args.jobs}", field="jobs")
        cfg.jobs = args.jobs
        cfg.precision = args.precision
        if args.k is not None:
            if args.k < 1:
                raise ConfigError(f"--k must be >= 1, got {args.k}", field="k")
            cfg.k = args.k
        if args.out is not None:
            cfg.output_dir = args.out
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        return run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FamilyEmptyError as exc:
        print(f"no results: {exc}", file=sys.stderr)
        return 1
    except TmbError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
