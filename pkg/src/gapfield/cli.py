"""Command-line front end.

Exit codes: 0 success, 2 bad configuration, 3 failed validation,
4 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from dataclasses import dataclass, fields

import numpy as np

from .blowup import blowup_curve, write_blowup_csv
from .constants import closed_constants, series_constants
from .errors import GapfieldError, NonConvergenceError
from .fieldasym import GridSpec, field_grid, write_field_csv
from .geometry import SpherePair
from .harmonic import HarmonicBackground, parse_polynomial, require_harmonic
from .validate import run_checks

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION, EXIT_NONCONVERGENCE = 0, 2, 3, 4

FIGURE1_H = "x1"
FIGURE2_H = "x1^3 - 3*x1*x2^2"


class ConfigError(GapfieldError):
    pass


@dataclass
class RunConfig:
    r1: float = 1.0
    r2: float = 1.0
    eps: float = 1e-4
    harmonic: str = "x1"
    tol: float = 1e-9
    max_terms: int = 10**6
    format: str = "json"
    out: str | None = None
    seed: int = 0
    quick: bool = False
    perturb_q: float | None = None
    r_values: str | None = None
    r_min: float = 0.05
    r_max: float = 5.0
    r_count: int = 100
    grid_n: int = 101
    half_width: float | None = None
    x1: str | None = None
    x2: str | None = None
    x3: str | None = None

    def background(self) -> HarmonicBackground:
        return require_harmonic(parse_polynomial(self.harmonic))

    def pair(self) -> SpherePair:
        return SpherePair(self.r1, self.r2, self.eps)

    def check(self) -> None:
        for name in ("r1", "r2", "eps", "tol", "r_min", "r_max"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be finite and positive, got {v!r}")
        for name in ("max_terms", "r_count", "grid_n"):
            if not (isinstance(getattr(self, name), int) and getattr(self, name) > 0):
                raise ConfigError(f"{name} must be a positive integer")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.perturb_q is not None and not math.isfinite(self.perturb_q):
            raise ConfigError("perturb-q must be finite")
        self.background()


def _parse_axis(text: str) -> tuple:
    """``a:b:n`` for n evenly spaced values, otherwise a comma-separated list."""
    try:
        if ":" in text:
            a, b, n = text.split(":")
            return tuple(np.linspace(float(a), float(b), int(n)))
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad grid axis {text!r}") from exc


def _r_grid(cfg: RunConfig) -> list[float]:
    if cfg.r_values:
        return list(_parse_axis(cfg.r_values))
    if cfg.r_count == 1:
        return [cfg.r_max]
    return list(np.linspace(cfg.r_min, cfg.r_max, cfg.r_count))


def _grid(cfg: RunConfig, pair: SpherePair) -> GridSpec:
    if cfg.x1 or cfg.x2 or cfg.x3:
        return GridSpec(
            x1=_parse_axis(cfg.x1 or "0"), x2=_parse_axis(cfg.x2 or "0"), x3=_parse_axis(cfg.x3 or "0")
        )
    return GridSpec.gap_plane(pair, cfg.grid_n, cfg.half_width)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serialisable: {type(o).__name__}")


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_constants(cfg: RunConfig) -> int:
    pair = cfg.pair()
    closed = closed_constants(pair)
    series = series_constants(pair, tol=max(cfg.tol, 1e-12))
    if cfg.format == "json":
        text = _json(
            {
                "r1": pair.r1, "r2": pair.r2, "eps": pair.eps,
                "Q1": series.Q1, "Q2": series.Q2, "M": series.M,
                "closed": closed.to_dict(), "series": series.to_dict(),
            }
        )
    else:
        cols = ["r1", "r2", "eps", "Q1_closed", "Q2_closed", "M_asymptotic",
                "Q1_series", "Q2_series", "M_series", "tail_bound", "terms_used"]
        vals = [pair.r1, pair.r2, pair.eps, closed.Q1, closed.Q2, closed.M,
                series.Q1, series.Q2, series.M, series.tail_bound]
        text = ",".join(cols) + "\n" + ",".join(repr(float(v)) for v in vals) + f",{series.terms_used}\n"
    _emit(text, cfg)
    return EXIT_OK


def _curve_text(H: HarmonicBackground, rs, cfg: RunConfig) -> str:
    rows = blowup_curve(H, rs, tol=cfg.tol)
    if cfg.format == "json":
        return _json({"H": str(H), "rows": [{"r": r, "psi_series": s, "psi_closed": c} for r, s, c in rows]})
    return write_blowup_csv(rows, H)


def cmd_blowup_curve(cfg: RunConfig) -> int:
    _emit(_curve_text(cfg.background(), _r_grid(cfg), cfg), cfg)
    return EXIT_OK


def cmd_field(cfg: RunConfig) -> int:
    pair = cfg.pair()
    rows = field_grid(pair, cfg.background(), _grid(cfg, pair))
    if cfg.format == "json":
        text = _json(
            [
                {"x": r.x, "rho": r.rho, "main": r.main_term, "singular": r.singular_part, "region_ok": r.region_ok}
                for r in rows
            ]
        )
    else:
        text = write_field_csv(rows)
    _emit(text, cfg)
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    checks = run_checks(quick=cfg.quick, perturb_q=cfg.perturb_q, seed=cfg.seed)
    failed = [c for c in checks if not c.passed]
    if cfg.format == "json":
        text = _json({"passed": not failed, "checks": [c.to_dict() for c in checks]})
    else:
        buf = io.StringIO()
        buf.write("name,passed,required,measured\n")
        for c in checks:
            measured = json.dumps(c.measured, default=_json_default).replace('"', "'")
            buf.write(f'{c.name},{int(c.passed)},"{c.required}","{measured}"\n')
        text = buf.getvalue()
    _emit(text, cfg)
    for c in failed:
        print(f"FAILED {c.name}: measured {c.measured}; required {c.required}", file=sys.stderr)
    return EXIT_VALIDATION if failed else EXIT_OK


def cmd_figures(cfg: RunConfig) -> int:
    """Write the two blowup-factor curves as figure1.csv and figure2.csv under --out."""
    outdir = cfg.out or "figures"
    os.makedirs(outdir, exist_ok=True)
    rs = _r_grid(cfg)
    csv_cfg = RunConfig(**{**cfg.__dict__, "format": "csv"})
    for name, text in (("figure1.csv", FIGURE1_H), ("figure2.csv", FIGURE2_H)):
        H = require_harmonic(parse_polynomial(text))
        with open(os.path.join(outdir, name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_curve_text(H, rs, csv_cfg))
    return EXIT_OK


COMMANDS = {
    "constants": cmd_constants,
    "blowup-curve": cmd_blowup_curve,
    "field": cmd_field,
    "validate": cmd_validate,
    "figures": cmd_figures,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    add = common.add_argument
    # defaults stay None so that the config file can fill gaps
    add("--config", help="JSON file with any of the options below (flags win)")
    add("--r1", type=float)
    add("--r2", type=float)
    add("--eps", type=float)
    add("--harmonic", help="polynomial in x1, x2, x3, e.g. 'x1^3 - 3*x1*x2^2'")
    add("--tol", type=float)
    add("--max-terms", type=int, dest="max_terms")
    add("--format", choices=("csv", "json"))
    add("--out")
    add("--seed", type=int)
    add("--quick", action="store_const", const=True)
    add("--perturb-q", type=float, dest="perturb_q", help="scale odd image charges by 1+value (fault injection)")
    add("--r-values", dest="r_values", help="'a:b:n' or comma list of radius ratios")
    add("--r-min", type=float, dest="r_min")
    add("--r-max", type=float, dest="r_max")
    add("--r-count", type=int, dest="r_count")
    add("--grid-n", type=int, dest="grid_n", help="points per side of the default gap-plane grid")
    add("--half-width", type=float, dest="half_width")
    add("--x1", help="grid axis as 'a:b:n' or comma list")
    add("--x2")
    add("--x3")

    parser = argparse.ArgumentParser(prog="gapfield", description="Field concentration between two close spheres.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=_HELP[name])
    return parser


_HELP = {
    "constants": "charge sums Q1, Q2 and M, closed form and series",
    "blowup-curve": "blowup factor over a grid of radius ratios (radii 1 and r)",
    "field": "main and image-charge field on a grid",
    "validate": "run the invariant checks; exit 3 on any failure",
    "figures": "write figure1.csv (H = x1) and figure2.csv (cubic) into --out",
}

_FORMAT_DEFAULTS = {"blowup-curve": "csv", "field": "csv"}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Flags over config file over defaults."""
    values = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        names = {f.name for f in fields(RunConfig)}
        unknown = set(k.replace("-", "_") for k in loaded) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update({k.replace("-", "_"): v for k, v in loaded.items()})
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    if "format" not in values:
        values["format"] = _FORMAT_DEFAULTS.get(args.command, "json")
    cfg = RunConfig(**values)
    cfg.check()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except (NonConvergenceError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (GapfieldError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
