"""Command line interface.

Settings are layered: command line flags override a ``key = value`` file
named by ``$SRVF_CONFIG``, which overrides the built-in defaults.  Exit
codes: 0 success, 2 input error, 3 numeric or configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from pathlib import Path

from . import io as sio
from .counterexample import CounterexampleConfig, counterexample_report
from .curves import SampledCurve, Srvf, probe_nondifferentiability, srvt, srvt_inverse
from .metric import DpOptions, dist_param, geodesic, quotient_distance
from .shapespace import canonical, distance_matrix

log = logging.getLogger("srvf")

CONFIG_ENV = "SRVF_CONFIG"
EXIT_INPUT = 2
EXIT_NUMERIC = 3


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CliConfig:
    grid_n: int = 1024
    dp_w: int = 4
    axis_moves: bool = True
    tol: float = 1e-6
    output_dir: Path = Path(".")
    format: str = "csv"

    def __post_init__(self):
        if self.grid_n < 2:
            raise ConfigError("grid_n must be >= 2")
        if self.dp_w < 1:
            raise ConfigError("dp_w must be >= 1")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")

    @property
    def dp_options(self):
        return DpOptions(move_set_radius=self.dp_w, include_axis_moves=self.axis_moves, grid_n=self.grid_n)


def _parse_bool(s):
    s = str(s).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {s!r}")


_CASTS = {"grid_n": int, "dp_w": int, "axis_moves": _parse_bool, "tol": float, "output_dir": Path, "format": str}


def load_config_file(path):
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}, line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _CASTS:
            raise ConfigError(f"{path}, line {lineno}: unknown key {key!r}")
        try:
            values[key] = _CASTS[key](val)
        except ValueError as e:
            raise ConfigError(f"{path}, line {lineno}: {e}") from None
    return values


def resolve_config(args):
    values = {}
    cfg_path = os.environ.get(CONFIG_ENV)
    if cfg_path:
        values.update(load_config_file(cfg_path))
    for f in fields(CliConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    return replace(CliConfig(), **values)


def _out(cfg, name):
    return Path(cfg.output_dir) / f"{name}.{cfg.format}"


def cmd_transform(args, cfg):
    obj = sio.read_any(args.input)
    if args.direction == "forward":
        if not isinstance(obj, SampledCurve):
            raise sio.ParseError("forward transform needs a curve file", args.input)
        out = Path(args.output) if args.output else _out(cfg, "srvf")
        sio.write_srvf(out, srvt(obj), cfg.format)
    else:
        if not isinstance(obj, Srvf):
            raise sio.ParseError("inverse transform needs an SRVF file", args.input)
        out = Path(args.output) if args.output else _out(cfg, "curve")
        sio.write_curve(out, srvt_inverse(obj), cfg.format)
    print(out)


def _pair(args):
    b, c = sio.read_curve(args.b), sio.read_curve(args.c)
    if b.dim != c.dim:
        raise sio.ParseError(f"dimension mismatch: {b.dim} != {c.dim}", args.c)
    return b, c


def cmd_distance(args, cfg):
    b, c = _pair(args)
    if args.mode == "param":
        d = dist_param(b, c)
    else:
        d, res = quotient_distance(b, c, cfg.dp_options)
        out = Path(args.alignment) if args.alignment else _out(cfg, "alignment")
        sio.write_alignment(out, res, cfg.format)
        log.info("alignment written to %s", out)
    print(f"{d:.12f}")


def cmd_geodesic(args, cfg):
    if args.steps < 1:
        raise ConfigError("steps must be >= 1")
    b, c = _pair(args)
    total = dist_param(b, c)
    rows = []
    for k in range(args.steps + 1):
        s = k / args.steps
        g = geodesic(b, c, s)
        sio.write_curve(_out(cfg, f"geodesic_{k:04d}"), g, cfg.format)
        rows.append({"step": k, "s": s, "dist_from_b": dist_param(b, g), "dist_to_c": dist_param(g, c)})
    sio.write_rows(Path(cfg.output_dir) / "geodesic_distances.csv", ["step", "s", "dist_from_b", "dist_to_c"], rows)
    m = geodesic(b, c, 0.5)
    err = max(abs(dist_param(b, m) - total / 2), abs(dist_param(m, c) - total / 2))
    print(f"total {total:.12f}  midpoint deviation {err:.3e}")


def cmd_counterexample(args, cfg):
    try:
        ccfg = CounterexampleConfig(
            cantor_level=args.level,
            epsilon=Fraction(args.epsilon),
            grid_n=args.grid,
            fatten_delta=None if args.delta is None else Fraction(args.delta),
        )
    except ValueError as e:
        raise ConfigError(str(e)) from None
    opts = DpOptions(move_set_radius=cfg.dp_w, include_axis_moves=cfg.axis_moves)
    kp = args.kprime_list or list(range(1, min(args.level, 8) + 1))
    if max(kp) > args.level or min(kp) < 1:
        raise ConfigError(f"k' values must lie in [1, {args.level}]")
    report = counterexample_report(ccfg, args.n_list, kp, opts)
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "counterexample.json").write_text(json.dumps(report, indent=1) + "\n")
    sio.write_rows(outdir / "counterexample.csv",
                   ["N", "k_prime", "dp_value", "explicit_value", "gap_to_half", "qdist_sq"], report["dp"])
    sio.write_rows(outdir / "counterexample_explicit.csv",
                   ["k_prime", "explicit_value", "gap_to_half", "gap_bound"], report["explicit"])
    sio.write_rows(outdir / "counterexample_gap_plot.csv", ["N", "gap_to_half", "gap_to_one"], report["dp"])
    print(f"dist_param^2 = {report['dist_param_sq']:.12f} (exact {report['dist_param_sq_exact']})")
    for r in report["dp"]:
        print(f"N={r['N']:6d}  dp={r['dp_value']:.12f}  gap={r['gap_to_half']:.3e}  qdist^2={r['qdist_sq']:.12f}")


def cmd_matrix(args, cfg):
    ids, curves, errors = sio.read_corpus(args.corpus, skip_bad=args.skip_bad)
    for e in errors:
        print(f"skipped: {e}", file=sys.stderr)
    shapes = [canonical(c, id=i) for i, c in zip(ids, curves)]

    def progress(k, n):
        print(f"\r{k}/{n} pairs", end="" if k < n else "\n", file=sys.stderr)

    res = distance_matrix(shapes, cfg.dp_options, progress=progress)
    out = Path(args.output) if args.output else Path(cfg.output_dir) / "matrix.csv"
    sio.write_matrix(out, res.ids, res.matrix)
    print(out)


def cmd_canonical(args, cfg):
    rec = canonical(sio.read_curve(args.input))
    out = Path(args.output) if args.output else _out(cfg, "canonical")
    sio.write_curve(out, rec.canonical, cfg.format)
    print(f"length {rec.ac_length:.12f}")
    print(out)


def cmd_probe(args, cfg):
    c, h = sio.read_curve(args.c), sio.read_curve(args.h)
    try:
        values = probe_nondifferentiability(c, h, args.eps)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    for eps, v in zip(args.eps, values):
        print(f"{sio.fmt(eps)},{sio.fmt(v)}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("settings (override $SRVF_CONFIG)")
    g.add_argument("--grid-n", dest="grid_n", type=int, help="DP lattice size (default 1024)")
    g.add_argument("--dp-w", dest="dp_w", type=int, help="DP move radius W (default 4)")
    g.add_argument("--axis-moves", dest="axis_moves", action="store_true", default=None,
                   help="allow (1,0)/(0,1) DP steps (default on)")
    g.add_argument("--no-axis-moves", dest="axis_moves", action="store_false")
    g.add_argument("--tol", type=float, help="equivalence tolerance (default 1e-6)")
    g.add_argument("--output-dir", dest="output_dir", type=Path, help="output directory (default .)")
    g.add_argument("--format", choices=["csv", "json"], help="output format (default csv)")
    g.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    ap = argparse.ArgumentParser(prog="srvf", description="Square root velocity distances between curves.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", parents=[common], help="curve <-> SRVF")
    p.add_argument("input")
    p.add_argument("--direction", choices=["forward", "inverse"], default="forward")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("distance", parents=[common], help="parametrised or quotient distance")
    p.add_argument("b")
    p.add_argument("c")
    p.add_argument("--mode", choices=["param", "quotient"], default="param")
    p.add_argument("--alignment", help="alignment output file (quotient mode)")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("geodesic", parents=[common], help="SRVF straight line between two curves")
    p.add_argument("b")
    p.add_argument("c")
    p.add_argument("--steps", type=int, default=4)
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("counterexample", parents=[common], help="non-attainment counterexample report")
    p.add_argument("--level", type=int, default=10, help="Cantor level k (default 10)")
    p.add_argument("--epsilon", default="1/10", help="rotation rate, 0 < eps < 1/6 (default 1/10)")
    p.add_argument("--grid", type=int, default=2048, help="uniform part of the SRVF partition (default 2048)")
    p.add_argument("--delta", default=None, help="fattening delta (default 4^-(k'+2))")
    p.add_argument("--kprime-list", type=int, nargs="+", help="levels of the explicit sequence (default 1..8)")
    p.add_argument("--n-list", type=int, nargs="+", default=[1, 128, 512, 2048],
                   help="DP lattice sizes; N=1 is the identity pair (default 1 128 512 2048)")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("matrix", parents=[common], help="quotient distance matrix of a shape corpus")
    p.add_argument("corpus")
    p.add_argument("-o", "--output")
    p.add_argument("--skip-bad", action="store_true")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("canonical", parents=[common], help="constant speed representative")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_canonical)

    p = sub.add_parser("probe", parents=[common], help="difference quotients of R at a curve with flat parts")
    p.add_argument("c")
    p.add_argument("h")
    p.add_argument("--eps", type=float, nargs="+", default=[1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6])
    p.set_defaults(func=cmd_probe)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        cfg = resolve_config(args)
        args.func(args, cfg)
    except sio.ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (ConfigError, ValueError, ArithmeticError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
