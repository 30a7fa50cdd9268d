"""
Command-line interface for tailforge.

Usage:
    tailforge entropy-check --random 1000 --max-coords 4 --max-points 4
    tailforge entropy-check --input table.json
    tailforge delta --input table.json --choice left
    tailforge simulate --config desk.toml --out report.csv --workers 4
    tailforge mp-check --out esd.csv
    tailforge print-config simulate > desk.toml

Every command is a pure function of its config file and flags. The exit
status is 0 iff every check in the run passed; input and config errors exit
with status 2.
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys
from pathlib import Path

import click
import numpy as np
import tomli
import tomli_w

from .choices import PerturbationChoice
from .delta import delta_squared, tail_bound
from .entropy import (
    FunctionTable,
    Tolerances,
    duality_value,
    entropy,
    herbst_mgf_check,
    log_sobolev_gap,
    random_space,
    random_table,
    tensorization_gap,
    variation_value,
)
from .errors import TailforgeError
from .montecarlo import SimulationConfig, compare_report, tail_estimate
from .rng import SeedTag
from .spectra import EntryDistribution, covariance_spectrum, esd_mp_table, mp_distance, sample_rectangular

__all__ = ["main"]

ENV_WORKERS = "TAILFORGE_WORKERS"

DEFAULTS = {
    "entropy-check": {
        "random": 0,
        "max_coords": 4,
        "max_points": 4,
        "seed": 0,
        "lambdas": [-2.0, -1.0, -0.5, -0.1],
        "exact_tol": 1e-12,
        "exponential_tol": 1e-10,
    },
    "delta": {
        "choice": "maurer",
        "t_grid": [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0],
    },
    "simulate": SimulationConfig().to_mapping(),
    "mp-check": {
        "n": 400,
        "N": 800,
        "dist": "rademacher",
        "samples": 20,
        "seed": 11,
        "threshold": 0.05,
        "min_n": 100,
        "bins": 40,
    },
}


class InputError(click.ClickException):
    exit_code = 2


def load_config(path: str | None, command: str) -> dict:
    """Read a TOML or JSON config; a section named after ``command`` wins over top-level keys."""
    if path is None:
        return {}
    p = Path(path)
    text = p.read_text()
    try:
        if p.suffix.lower() == ".json":
            data = json.loads(text)
        else:
            data = tomli.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    except tomli.TOMLDecodeError as exc:
        raise InputError(f"{path}: {exc}") from None
    for key in (command, command.replace("-", "_")):
        if isinstance(data.get(key), dict):
            return dict(data[key])
    return data


def merged_config(path: str | None, command: str, **overrides) -> dict:
    cfg = dict(DEFAULTS[command])
    loaded = load_config(path, command)
    if command != "simulate":
        unknown = sorted(set(loaded) - set(cfg) - {"input"})
        if unknown:
            raise InputError(f"unknown keys for {command}: {unknown}")
    cfg.update(loaded)
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    return cfg


def read_table(path: str, positive: bool | None) -> FunctionTable:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return FunctionTable.from_json(obj, positive=positive)
    except (TailforgeError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def resolve_workers(workers: int | None) -> int:
    if workers is not None:
        return workers
    env = os.environ.get(ENV_WORKERS)
    if env:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"{ENV_WORKERS} must be an integer, got {env!r}") from None
    return 1


def emit(text: str, out: str | None):
    if out is None or out == "-":
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else (str(v).lower() if isinstance(v, bool) else v)
                    for v in row])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _float_list(value):
    if value is None:
        return None
    return [float(v) for v in value.split(",") if v.strip()]


out_option = click.option("--out", "out", type=click.Path(dir_okay=False), default=None,
                          help="Output file (default: stdout).")
format_option = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
                             show_default=True)
config_option = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                             default=None, help="TOML or JSON config file.")


@click.group()
@click.version_option(package_name="artifact")
def cli():
    """Entropy-method concentration checks and eigenvalue tail simulations."""


def run_entropy_suite(tables, lambdas, tol: Tolerances):
    """Tensorization, attainment, log-Sobolev and Herbst checks on each table.

    Each table doubles as G (tensorization, attainment) and Z (log-Sobolev,
    Herbst). Returns rows of (table, check, choice, lambda, value, ok).
    """
    rows = []
    for idx, G in enumerate(tables):
        h = entropy(G)
        scale = max(1.0, abs(h))
        gap = tensorization_gap(G)
        rows.append((idx, "tensorization", "", 0.0, gap, gap >= -tol.exact))
        d = duality_value(G, G) - h
        rows.append((idx, "duality_attainment", "", 0.0, d, abs(d) <= tol.exact * scale))
        v = variation_value(G, G.mean()) - h
        rows.append((idx, "variation_attainment", "", 0.0, v, abs(v) <= tol.exact * scale))
        Z = G.with_values(G.values, positive=False)
        for choice in PerturbationChoice:
            report = delta_squared(Z, choice)
            sign = -1.0 if choice is PerturbationChoice.LEFT_SUP else 1.0
            for lam in sorted({sign * abs(x) for x in lambdas}):
                ls = log_sobolev_gap(Z, lam, report.perturbed)
                rows.append((idx, "log_sobolev", choice.value, lam, ls, ls >= -tol.exponential))
                lhs, rhs = herbst_mgf_check(Z, lam, report.sup_norm, choice)
                rows.append((idx, "herbst", choice.value, lam, rhs - lhs, lhs <= rhs + tol.exponential))
    return rows


@cli.command("entropy-check")
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="FunctionTable JSON holding a positive G.")
@click.option("--random", "n_random", type=int, default=None, help="Check this many random tables.")
@click.option("--max-coords", type=int, default=None)
@click.option("--max-points", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--lambdas", default=None, help="Comma-separated |lambda| grid; both signs are checked.")
@config_option
@out_option
@format_option
def entropy_check(input_path, n_random, max_coords, max_points, seed, lambdas, config_path, out, fmt):
    """Run the exact entropy inequalities on one table or a random batch."""
    cfg = merged_config(config_path, "entropy-check", random=n_random, max_coords=max_coords,
                        max_points=max_points, seed=seed, lambdas=_float_list(lambdas),
                        input=input_path)
    tol = Tolerances(cfg["exact_tol"], cfg["exponential_tol"])
    tables = []
    if cfg.get("input"):
        tables.append(read_table(cfg["input"], positive=True))
    if cfg["random"]:
        rng = np.random.default_rng(cfg["seed"])
        for _ in range(cfg["random"]):
            space = random_space(rng, cfg["max_coords"], cfg["max_points"])
            tables.append(random_table(rng, space))
    if not tables:
        raise InputError("nothing to check: pass --input or --random")
    try:
        rows = run_entropy_suite(tables, cfg["lambdas"], tol)
    except TailforgeError as exc:
        raise InputError(str(exc)) from None
    failures = [r for r in rows if not r[5]]
    header = ("table", "check", "choice", "lambda", "value", "ok")
    if fmt == "csv":
        emit(csv_text(header, rows), out)
    else:
        summary = {}
        for r in rows:
            s = summary.setdefault(r[1], {"count": 0, "min": None})
            s["count"] += 1
            s["min"] = r[4] if s["min"] is None else min(s["min"], r[4])
        emit(json_text({
            "tables": len(tables),
            "summary": summary,
            "violations": [dict(zip(header, r)) for r in failures],
            "passed": not failures,
        }), out)
    for r in failures:
        click.echo(f"FAIL table={r[0]} check={r[1]} choice={r[2]} lambda={r[3]} value={r[4]!r}", err=True)
    click.echo(f"{'PASS' if not failures else 'FAIL'}: {len(rows)} checks on {len(tables)} tables, "
               f"{len(failures)} failing", err=True)
    sys.exit(0 if not failures else 1)


@cli.command("delta")
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="FunctionTable JSON holding Z.")
@click.option("--choice", type=click.Choice(["maurer", "left"]), default=None)
@click.option("--t-grid", default=None, help="Comma-separated thresholds.")
@config_option
@out_option
@format_option
def delta(input_path, choice, t_grid, config_path, out, fmt):
    """Delta^2 field, its sup-norm and the resulting tail-bound curve."""
    cfg = merged_config(config_path, "delta", choice=choice, t_grid=_float_list(t_grid))
    Z = read_table(input_path, positive=False)
    try:
        report = delta_squared(Z, cfg["choice"])
        side = "right" if report.choice is PerturbationChoice.MAURER_INF else "left"
        curve = [(float(t), tail_bound(float(t), report.sup_norm, side)) for t in cfg["t_grid"]]
    except TailforgeError as exc:
        raise InputError(str(exc)) from None
    if fmt == "csv":
        emit(csv_text(("t", "side", "sup_norm", "bound"),
                      [(t, side, report.sup_norm, b) for t, b in curve]), out)
    else:
        obj = report.to_json()
        obj["side"] = side
        obj["tail_bound"] = [{"t": t, "bound": b} for t, b in curve]
        emit(json_text(obj), out)
    click.echo(f"choice={report.choice.value} sup_norm={report.sup_norm!r}", err=True)


@cli.command("simulate")
@config_option
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None, help="Overrides base_seed.")
@click.option("--workers", type=click.IntRange(min=1), default=None,
              help=f"Worker processes (fallback: ${ENV_WORKERS}, then 1).")
@out_option
@format_option
def simulate(config_path, seed, workers, out, fmt):
    """Monte Carlo eigenvalue tails against the theoretical bounds."""
    raw = load_config(config_path, "simulate")
    if seed is not None:
        raw["base_seed"] = seed
    try:
        config = SimulationConfig.from_mapping(raw)
    except (TailforgeError, TypeError) as exc:
        raise InputError(str(exc)) from None
    report = tail_estimate(config, workers=resolve_workers(workers))
    emit(report.to_csv() if fmt == "csv" else report.to_json_text(), out)
    status, summary = compare_report(report)
    click.echo(summary, err=True)
    sys.exit(status)


@cli.command("mp-check")
@config_option
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None)
@out_option
@format_option
def mp_check(config_path, seed, out, fmt):
    """Compare the pooled spectral distribution with the Marcenko-Pastur law.

    The Marcenko-Pastur law is the standard textbook formula; this is an
    asymptotic sanity check with a tolerance, applied only from ``min_n`` up.
    """
    cfg = merged_config(config_path, "mp-check", seed=seed)
    try:
        dist = EntryDistribution.parse(cfg["dist"])
    except TailforgeError as exc:
        raise InputError(str(exc)) from None
    if dist.second_moment != 1.0:
        raise InputError(f"mp-check needs unit-variance entries; {dist.name} has E|x|^2 = {dist.second_moment:.4g}")
    n, N = int(cfg["n"]), int(cfg["N"])
    if n < 1 or N < 1 or cfg["samples"] < 1:
        raise InputError("n, N and samples must be >= 1")
    c = n / N
    spectra = [covariance_spectrum(sample_rectangular(n, N, dist, SeedTag(cfg["seed"], i)))
               for i in range(cfg["samples"])]
    ks = mp_distance(spectra, c)
    table = esd_mp_table(spectra, c, bins=int(cfg["bins"]))
    applied = n >= cfg["min_n"]
    passed = (ks < cfg["threshold"]) if applied else True
    if fmt == "csv":
        emit(csv_text(("bin_left", "bin_right", "esd_density", "mp_density"), table), out)
    else:
        emit(json_text({
            "c": c, "n": n, "N": N, "samples": cfg["samples"], "dist": dist.value,
            "ks_distance": ks, "threshold": cfg["threshold"], "threshold_applied": applied,
            "passed": passed,
            "reference": "standard Marcenko-Pastur law for unit-variance entries",
            "bins": [dict(zip(("bin_left", "bin_right", "esd_density", "mp_density"), row)) for row in table],
        }), out)
    note = "" if applied else f" (report only: n < {cfg['min_n']})"
    click.echo(f"ks_distance={ks:.6g} c={c:g} threshold={cfg['threshold']}{note}", err=True)
    click.echo("PASS" if passed else "FAIL", err=True)
    sys.exit(0 if passed else 1)


@cli.command("print-config")
@click.argument("command", required=False, type=click.Choice(sorted(DEFAULTS)))
def print_config(command):
    """Print default configs as TOML (one command, or all as sections)."""
    if command:
        click.echo(tomli_w.dumps(DEFAULTS[command]), nl=False)
    else:
        click.echo(tomli_w.dumps(DEFAULTS), nl=False)


def main(argv=None):
    cli.main(args=argv, prog_name="tailforge")


if __name__ == "__main__":
    main()
