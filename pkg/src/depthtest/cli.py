"""Command-line interface: ``depthtest {test,simulate,region,scatter,depth}``.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 numerical error (degenerate sample).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .calibrate import empirical_pvalue, permutation_null
from .dataio import PROFILES, DatasetConfig, bundled_scenario, load_two_samples, parse_scenario, with_replications
from .depth import DepthKind, DepthSpec, as_data_matrix, make_context
from .errors import DataError, DepthTestError, NumericalError, ReplicateError, SchemaError, TooFewRows
from .qindex import q_pair, relative_ranks
from .sampler import standard_normal
from .simlab import (alde_csv, alde_scatter, alternative_scatter, boundary_csv, null_scatter, run_campaign,
                     scatter_csv)
from .teststat import StatSpec, anti_diagonal_intersections, evaluate, region_boundary, statistic_at

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
SEED_ENV = "DEPTHTEST_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _resolve_seed(seed: Optional[int]) -> int:
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return 0


def _depth_spec(args) -> DepthSpec:
    return DepthSpec(DepthKind(args.depth), args.directions, args.depth_seed)


def _stat_spec(args) -> StatSpec:
    kind = args.stat.upper()
    if kind in ("E", "R") and not args.lam > 0:
        raise UsageError(f"--lambda must be > 0, got {args.lam}")
    if kind == "E":
        return StatSpec.E(args.lam)
    if kind == "R":
        return StatSpec.R(args.lam, args.theta)
    if kind == "M":
        return StatSpec.M()
    if args.omega is not None and not 0.0 <= args.omega <= 1.0:
        raise UsageError(f"--omega must lie in [0, 1], got {args.omega}")
    return StatSpec.W(args.omega)


def _add_stat_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--stat", choices=["E", "W", "M", "R", "e", "w", "m", "r"], default="E")
    p.add_argument("--lambda", dest="lam", type=float, default=0.3, help="axis ratio for E and R (default 0.3)")
    p.add_argument("--omega", type=float, default=None, help="weight for W (default n/(m+n))")
    p.add_argument("--theta", type=float, default=math.pi / 4, help="rotation for R (default pi/4)")


def _add_depth_flags(p: argparse.ArgumentParser, default_directions: int = 500) -> None:
    p.add_argument("--depth", choices=[k.value for k in DepthKind], default="mahalanobis")
    p.add_argument("--directions", type=int, default=default_directions, help="projection-depth direction count")
    p.add_argument("--depth-seed", type=int, default=0, help="seed of the projection directions")


def _add_csv_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--delimiter", default=None, help="field delimiter (sniffed when omitted)")


def _features(text: Optional[str]):
    if text is None:
        return None
    return [int(c) if c.strip().isdigit() else c.strip() for c in text.split(",") if c.strip()]


def _dataset(args) -> DatasetConfig:
    common = dict(has_header=not args.no_header, delimiter=args.delimiter, standardize=args.standardize)
    features = _features(args.features)
    if args.x or args.y:
        if not (args.x and args.y) or args.data:
            raise UsageError("use --x and --y together, or --data with a group column")
        return DatasetConfig(x_path=args.x, y_path=args.y, feature_columns=features, **common)
    if not args.data:
        raise UsageError("no input: give --x/--y or --data")
    if args.profile:
        overrides = {k: v for k, v in (("feature_columns", features), ("group_column", args.group_col),
                                       ("group_values", tuple(args.groups) if args.groups else None)) if v is not None}
        return DatasetConfig.from_profile(args.profile, args.data, **common, **overrides)
    if args.group_col is None or not args.groups:
        raise UsageError("--data needs --group-col and --groups (or --profile)")
    return DatasetConfig(path=args.data, feature_columns=features, group_column=args.group_col,
                         group_values=tuple(args.groups), **common)


def cmd_test(args) -> int:
    seed = _resolve_seed(args.seed)
    if args.B < 1:
        raise UsageError("--B must be >= 1")
    if not 0.0 < args.alpha < 1.0:
        raise UsageError("--alpha must lie in (0, 1)")
    spec = _stat_spec(args)
    depth = _depth_spec(args)
    x, y = load_two_samples(_dataset(args))
    m, n = x.shape[0], y.shape[0]
    spec = spec.resolve(m, n)
    print(f"seed={seed} depth={depth.label} statistic={spec.label} alpha={args.alpha} "
          f"calibration={args.calibration} B={args.B if args.calibration == 'permutation' else 0} m={m} n={n} d={x.shape[1]}")
    warnings = []
    shared = {tuple(r) for r in x} & {tuple(r) for r in y}
    if shared:
        warnings.append(f"{len(shared)} observation(s) occur in both samples; shared rows tie in depth and inflate both quality indices")
        _note("warning: " + warnings[-1])
    q = q_pair(x, y, depth)
    result = evaluate(q, spec, args.alpha)
    if args.calibration == "permutation":
        ens = permutation_null(x, y, spec, depth, args.B, seed, workers=args.workers)
        result = result.with_empirical(empirical_pvalue(result.value, ens), "permutation")
    print(f"Q(F_m,G_n) = {q.q_fg:.6f}   Q(G_n,F_m) = {q.q_gf:.6f}")
    print(f"{spec.label} = {result.value:.6g}   scale = {result.scale:.6g}")
    print(f"asymptotic p = {result.p_asymptotic:.6g}")
    if result.p_empirical is not None:
        print(f"permutation p = {result.p_empirical:.6g}  (B = {args.B})")
    print(f"decision at alpha = {args.alpha}: {'reject H0' if result.reject else 'do not reject H0'}")
    if args.json:
        doc = result.to_dict()
        doc.update(q_pair={"q_fg": q.q_fg, "q_gf": q.q_gf, "m": m, "n": n}, depth=depth.to_dict(), seed=seed,
                   B=args.B if args.calibration == "permutation" else None, warnings=warnings, version=__version__)
        Path(args.json).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def _load_config(name: str):
    path = Path(name)
    if not path.exists():
        try:
            path = bundled_scenario(name)
        except FileNotFoundError:
            raise UsageError(f"scenario {name!r} is neither a file nor a bundled config") from None
    return parse_scenario(path)


def cmd_simulate(args) -> int:
    config = _load_config(args.config)
    if args.reps is not None:
        if args.reps < 1:
            raise UsageError("--reps must be >= 1")
        config = with_replications(config, args.reps)
    if args.seed is not None or os.environ.get(SEED_ENV):
        from dataclasses import replace
        config = replace(config, master_seed=_resolve_seed(args.seed))
    _note(f"scenario={config.name} seed={config.master_seed} reps={config.replications} "
          f"calibration={config.calibration.label} alpha={config.alpha} sizes={list(config.sizes)}")
    result = run_campaign(config, workers=args.workers)
    _emit(result.to_csv(), args.out)
    width = max(len(r.statistic) for r in result.rows)
    for r in result.rows:
        _note(f"  m={r.m:<5d} n={r.n:<5d} {r.depth:<12s} {r.statistic:<{width}s} "
              f"rate={r.rejection_rate:.4f} (se {r.stderr:.4f})")
    if result.errors:
        _note(f"  {result.errors} replication(s) failed and were excluded")
    return EXIT_OK


def cmd_region(args) -> int:
    if args.points < 8:
        raise UsageError("--points must be >= 8")
    if not 0.0 < args.alpha < 1.0:
        raise UsageError("--alpha must lie in (0, 1)")
    spec = _stat_spec(args).resolve(args.m, args.n)
    _note(f"statistic={spec.label} m={args.m} n={args.n} alpha={args.alpha} points={args.points}")
    verts = region_boundary(spec, args.m, args.n, args.alpha, args.points)
    _emit(boundary_csv(verts), args.out)
    if args.check:
        pts = anti_diagonal_intersections(spec, args.m, args.n, args.alpha)
        from .numkit import chi2_1_quantile
        closed = math.sqrt((args.m + args.n) * chi2_1_quantile(1 - args.alpha) / (12 * args.m * args.n))
        dev = float(np.max(np.abs(np.abs(pts[:, 0] - 0.5) - closed)))
        level = spec.scale() * chi2_1_quantile(1 - args.alpha)
        worst = max(abs(statistic_at(spec, args.m, args.n, u, v) - level) for u, v in verts)
        _note(f"anti-diagonal intersections: ({pts[0, 0]:.6f}, {pts[0, 1]:.6f}) and ({pts[1, 0]:.6f}, {pts[1, 1]:.6f})")
        _note(f"closed-form half-width {closed:.6f}; deviation {dev:.2e}; max level-set error {worst:.2e}")
        if dev > 1e-6:
            return EXIT_NUMERIC
    return EXIT_OK


def cmd_scatter(args) -> int:
    seed = _resolve_seed(args.seed)
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    depth = _depth_spec(args)
    _note(f"mode={args.mode} case={args.case} m={args.m} n={args.n} reps={args.reps} depth={depth.label} seed={seed}")
    if args.mode == "null":
        text = scatter_csv(null_scatter(standard_normal(2), args.m, args.n, depth, args.reps, seed, args.workers))
    elif args.mode == "appendixB":
        if args.case not in ("green", "blue", "yellow", "brown", "red"):
            raise UsageError(f"unknown --case {args.case!r} for appendixB (green, blue, yellow, brown, red)")
        text = scatter_csv(alternative_scatter(args.case, args.m, args.n, depth, args.reps, seed, args.workers))
    else:
        if args.case not in ("I", "II"):
            raise UsageError(f"unknown --case {args.case!r} for alde-demo (I, II)")
        text = alde_csv(alde_scatter(args.case, args.m, args.n, args.reps, seed, not args.sd, args.workers))
    _emit(text, args.out)
    if args.boundary_out and args.mode != "alde-demo":
        spec = _stat_spec(args).resolve(args.m, args.n)
        Path(args.boundary_out).write_text(boundary_csv(region_boundary(spec, args.m, args.n, args.alpha)),
                                           encoding="utf-8")
    return EXIT_OK


def _read_matrix(path: str, args) -> np.ndarray:
    cfg = DatasetConfig(x_path=path, y_path=path, has_header=not args.no_header, delimiter=args.delimiter)
    return load_two_samples(cfg)[0]


def cmd_depth(args) -> int:
    depth = _depth_spec(args)
    data = _read_matrix(args.data, args)
    query = _read_matrix(args.query, args) if args.query else data
    _note(f"depth={depth.label} m={data.shape[0]} queries={query.shape[0]} depth_seed={depth.seed}")
    ctx = make_context(data, depth)
    values = ctx.depths(as_data_matrix(query))
    ranks = relative_ranks(query, ctx)
    lines = ["row,depth,relative_rank"]
    lines += [f"{i},{float(v)!r},{float(r)!r}" for i, (v, r) in enumerate(zip(values, ranks))]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="depthtest", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"depthtest {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("test", help="two-sample test on data files")
    p.add_argument("--x")
    p.add_argument("--y")
    p.add_argument("--data")
    p.add_argument("--profile", choices=sorted(PROFILES))
    p.add_argument("--group-col")
    p.add_argument("--groups", nargs=2, metavar=("LABEL_X", "LABEL_Y"))
    p.add_argument("--features", help="comma-separated feature column names or indices")
    p.add_argument("--standardize", action="store_true", help="z-score with pooled mean and sd")
    _add_csv_flags(p)
    _add_depth_flags(p)
    _add_stat_flags(p)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--calibration", choices=["asymptotic", "permutation"], default="asymptotic")
    p.add_argument("--B", type=int, default=10_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--json")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("simulate", help="run a Monte Carlo size/power campaign")
    p.add_argument("--config", required=True, help="scenario JSON path or bundled name (e.g. fig6_null)")
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("region", help="non-rejection region boundary as CSV")
    _add_stat_flags(p)
    p.add_argument("--m", type=int, default=300)
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--points", type=int, default=512)
    p.add_argument("--check", action="store_true", help="report and verify the anti-diagonal intersections")
    p.add_argument("--out")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("scatter", help="Monte Carlo Q-pair or demo scatter as CSV")
    p.add_argument("--mode", choices=["null", "appendixB", "alde-demo"], default="null")
    p.add_argument("--case")
    p.add_argument("--m", type=int, default=300)
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--reps", type=int, default=1000)
    _add_depth_flags(p, default_directions=100)
    _add_stat_flags(p)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--sd", action="store_true", help="alde-demo: read the spread 3 as a standard deviation")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--boundary-out", help="also write the region boundary of --stat for overlay")
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("depth", help="depth of query points against a data sample")
    p.add_argument("--data", required=True)
    p.add_argument("--query")
    _add_depth_flags(p)
    _add_csv_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_depth)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        _note(f"usage error: {exc}")
        return EXIT_USAGE
    except SchemaError as exc:
        _note(f"configuration error: {exc}")
        return EXIT_USAGE
    except (DataError, TooFewRows, FileNotFoundError, IsADirectoryError) as exc:
        _note(f"data error: {exc}")
        return EXIT_DATA
    except ReplicateError as exc:
        _note(f"numerical error: {exc}")
        return EXIT_NUMERIC if isinstance(exc.cause, NumericalError) else EXIT_DATA
    except NumericalError as exc:
        _note(f"numerical error: {exc}")
        return EXIT_NUMERIC
    except DepthTestError as exc:
        _note(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
