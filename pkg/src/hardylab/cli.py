"""Batch front-end: `lab norm`, `lab split`, `lab validate`.

Each subcommand takes a single --config JSON document; no flag overrides,
so a config plus its seeds reproduces every report byte for byte.
Exit codes: 0 success, 1 input/parse failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys
from pathlib import Path

import numpy as np

from .atoms import load_decomposition, validate_atom
from .generators import b_field, random_decomposition
from .grid import GridFunction, GridSpec, load_gridfunction, lp_norm
from .lipschitz import LipschitzOrder, lambda_gamma_norm
from .orlicz import PHI, hardy_quasinorm, lphi_star_norm, luxembourg_norm
from .oscillation import BallFamily, bmo_local_norm, bmo_report, lmo_norm
from .product import SplitReport, split_bmo, split_lipschitz, verify_split

USAGE_ERROR = 2
PARSE_ERROR = 1


class ConfigError(Exception):
    pass


def _load_config(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FileNotFoundError(f"cannot read config {path}: {exc}") from exc


def _grid_from(config: dict) -> GridSpec:
    try:
        g = config["grid"]
        return GridSpec(int(g["dim"]), float(g["halfwidth"]), int(g["points_per_axis"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad grid section: {exc}") from exc


def _input_function(config: dict, spec: GridSpec) -> GridFunction:
    section = config.get("input", {})
    if "file" in section:
        return load_gridfunction(section["file"])
    if "generator" in section:
        rng = np.random.default_rng(section.get("seed", 0))
        return b_field(spec, section["generator"], rng, **section.get("params", {}))
    raise ConfigError("input section needs 'file' or 'generator'")


def cmd_norm(config: dict) -> int:
    spec = _grid_from(config)
    f = _input_function(config, spec)
    which = config.get("which")
    params = config.get("params", {})
    extra: dict = {}
    if which == "lp":
        value = lp_norm(f, float(params.get("p", 1.0)))
    elif which == "luxembourg":
        value = luxembourg_norm(f, PHI)
    elif which == "lphi_star":
        value = lphi_star_norm(f)
    elif which == "hardy":
        value = hardy_quasinorm(
            f, float(params.get("p", 1.0)), local=bool(params.get("local", False))
        )
    elif which == "bmo":
        report = bmo_report(f)
        value = report.norm
        extra = report.to_dict()
    elif which == "bmo_local":
        value = bmo_local_norm(f)
        extra = {"family_size": len(BallFamily.build(spec).balls)}
    elif which == "lmo":
        value = lmo_norm(f)
    elif which == "lambda_gamma":
        value = lambda_gamma_norm(f, LipschitzOrder(float(params["gamma"])))
    else:
        raise ConfigError(f"unknown norm tag {which!r}")
    doc = {
        "which": which,
        "value": value,
        "grid": {"dim": spec.dim, "halfwidth": spec.halfwidth, "points_per_axis": spec.points_per_axis},
        **extra,
    }
    out = config.get("output")
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text)
    else:
        print(text)
    return 0


_REGIMES = {"p1", "p1_local", "mean", "mean_local", "projection", "projection_local"}


def _run_draw(spec: GridSpec, config: dict, rng: np.random.Generator) -> SplitReport:
    regime = config["regime"]
    p = float(config.get("p", 1.0))
    local = regime.endswith("_local")
    atoms_cfg = config.get("atoms", {})
    n_atoms = int(atoms_cfg.get("count", 4))
    radius_range = atoms_cfg.get("radius_range")
    if radius_range is not None:
        radius_range = tuple(float(v) for v in radius_range)
    bgen = config.get("b_generator", {"kind": "random-smooth"})
    b = b_field(spec, bgen["kind"], rng, **bgen.get("params", {}))
    if regime in ("p1", "p1_local"):
        if abs(p - 1.0) > 1e-12:
            raise ConfigError("p must be 1 for the bmo regimes")
        decomp = random_decomposition(
            spec, rng, p=1.0, s=int(atoms_cfg.get("s", 0)),
            n_atoms=n_atoms, radius_range=radius_range, local=local,
        )
        split = split_bmo(b, decomp, local=local)
        b_scale = bmo_local_norm(b)
        return verify_split(split, b_scale, decomp)
    gamma = spec.dim * (1.0 / p - 1.0)
    cfg_gamma = config.get("gamma")
    if cfg_gamma is not None and abs(float(cfg_gamma) - gamma) > 1e-12:
        raise ConfigError(f"gamma must equal n(1/p - 1) = {gamma}")
    order = LipschitzOrder(gamma)
    s_default = 2 * order.k if regime.startswith("projection") else 0
    decomp = random_decomposition(
        spec, rng, p=p, s=int(atoms_cfg.get("s", s_default)),
        n_atoms=n_atoms, radius_range=radius_range, local=local,
    )
    split = split_lipschitz(b, decomp, order, local=local)
    b_scale = lambda_gamma_norm(b, order)
    return verify_split(split, b_scale, decomp, gamma=gamma)


def cmd_split(config: dict) -> int:
    spec = _grid_from(config)
    regime = config.get("regime")
    if regime not in _REGIMES:
        raise ConfigError(f"unknown regime {regime!r}")
    draws = int(config.get("draws", 1))
    seed = int(config.get("seed", 0))
    out_dir = Path(config.get("output_dir", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    reports = []
    for draw in range(draws):
        report = _run_draw(spec, config, rng)
        reports.append((draw, report))
    rows_path = out_dir / "rows.csv"
    with rows_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("draw",) + SplitReport.CSV_FIELDS)
        for draw, report in reports:
            writer.writerow([draw] + report.to_csv_row())
    c1s = [r.c1 for _, r in reports]
    c2s = [r.c2 for _, r in reports]
    summary = {
        "regime": regime,
        "draws": draws,
        "seed": seed,
        "C1_max": max(c1s),
        "C1_median": statistics.median(c1s),
        "C2_max": max(c2s),
        "C2_median": statistics.median(c2s),
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def cmd_validate(config: dict) -> int:
    try:
        decomp = load_decomposition(config["decomposition"])
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: cannot load decomposition: {exc}", file=sys.stderr)
        return PARSE_ERROR
    rows = []
    for idx, (lam, atom) in enumerate(decomp.terms):
        report = validate_atom(atom)
        rows.append(
            {
                "index": idx,
                "lambda": lam,
                "local": atom.local,
                "passed": report.passed,
                "failures": list(report.failures),
                "support_leakage": report.support_leakage,
                "size_ratio": report.size_ratio,
                "max_moment_residual": max(
                    (abs(v) for v in report.moment_residuals.values()), default=None
                ),
            }
        )
    doc = {"p": decomp.p, "atoms": rows, "all_passed": all(r["passed"] for r in rows)}
    out = config.get("output")
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text)
    else:
        print(text)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("norm", "split", "validate"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return PARSE_ERROR
    handlers = {"norm": cmd_norm, "split": cmd_split, "validate": cmd_validate}
    try:
        return handlers[args.command](config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return PARSE_ERROR


if __name__ == "__main__":
    sys.exit(main())
