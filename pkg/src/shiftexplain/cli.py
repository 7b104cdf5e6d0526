"""Command line interface: generate / explain / sweep / distance.

Exit codes: 0 success, 2 usage error, 3 I/O or parse error, 4 numerical
failure (non-convergence, nothing to explain, ...). All randomness flows from
--seed (default: the SHIFT_EXPLAIN_SEED environment variable, else 0), so any
command rerun with identical flags and files prints byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .data import (
    GENERATOR_KINDS,
    GeneratorSpec,
    generate,
    load_csv,
    split_csv,
    write_csv,
)
from .exceptions import (
    ClusteringError,
    ConvergenceError,
    CsvError,
    DegeneratePlanError,
    EmptySplitError,
    NothingToExplainError,
    ShiftExplainError,
    SizeLimitExceededError,
)
from .maps import make_shift_map
from .metrics import evaluate_map, render_report_csv
from .ot import OTConfig, solve_ot
from .sweep import render_sweep, run_sweep, sweep_result_from_json

_KIND_ALIASES = {
    "gaussian": "gaussian_mean_shift",
    "gmm": "gmm_component_shift",
    "half-moons": "half_moons",
}
_FAMILIES = ("vector", "k-sparse-mean", "k-sparse-ot", "k-cluster")


def _env_seed() -> int:
    try:
        return int(os.environ.get("SHIFT_EXPLAIN_SEED", "0"))
    except ValueError:
        return 0


def _add_common_flags(cmd: argparse.ArgumentParser) -> None:
    cmd.add_argument("--seed", type=int, default=_env_seed(), help="global random seed")
    cmd.add_argument(
        "--ot-solver",
        choices=("exact", "sinkhorn", "auto"),
        default="auto",
        help="OT solver (auto: exact while N*M fits the size limit)",
    )
    cmd.add_argument("--epsilon", type=float, default=None, help="sinkhorn regularization")
    cmd.add_argument("--max-iters", type=int, default=None, help="sinkhorn iteration budget")
    cmd.add_argument("--convergence-tol", type=float, default=None, help="sinkhorn marginal tolerance")
    cmd.add_argument("--exact-size-limit", type=int, default=None, help="largest N*M for exact OT")
    cmd.add_argument("--output", choices=("table", "json", "csv"), default="table")
    cmd.add_argument("--out-file", default=None, help="write the rendering here instead of stdout")


def _add_input_flags(cmd: argparse.ArgumentParser) -> None:
    cmd.add_argument("--source", help="source CSV (with --target)")
    cmd.add_argument("--target", help="target CSV (with --source)")
    cmd.add_argument("--data", help="single CSV to split (with --split-* flags)")
    cmd.add_argument("--split-column", help="column holding the split label")
    cmd.add_argument("--split-source", help="comma-separated raw values for the source side")
    cmd.add_argument("--split-target", help="comma-separated raw values for the target side")
    cmd.add_argument("--columns", help="comma-separated feature columns to keep")
    cmd.add_argument(
        "--value-map",
        help="JSON ({column: {raw: value}}) applied before parsing; @file reads a JSON file",
    )
    cmd.add_argument(
        "--drop-rows-containing",
        help="comma-separated cell tokens marking rows to drop (e.g. '?')",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shift-explain",
        description="Explain the shift between two tabular datasets with interpretable transport maps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic source/target CSV pair")
    gen.add_argument("--kind", choices=tuple(_KIND_ALIASES) + GENERATOR_KINDS, help="shift kind")
    gen.add_argument("--n", type=int, default=500, help="samples per side")
    gen.add_argument("--d", type=int, default=2, help="dimension (gaussian only)")
    gen.add_argument("--delta", help="comma-separated target mean displacement (gaussian)")
    gen.add_argument("--means", help="JSON list of component means (gmm)")
    gen.add_argument("--component-deltas", help="JSON list of per-component shifts (gmm)")
    gen.add_argument("--noise", type=float, default=None, help="gmm sigma / half-moons noise")
    gen.add_argument("--spec-file", help="JSON generator spec (overrides the flags above)")
    gen.add_argument("--out-dir", default=".", help="directory for source.csv/target.csv/manifest.json")
    _add_common_flags(gen)
    gen.set_defaults(func=cmd_generate)

    exp = sub.add_parser("explain", help="fit one interpretable map and print its report")
    _add_input_flags(exp)
    exp.add_argument("--family", choices=_FAMILIES, required=True)
    exp.add_argument("--k", type=int, default=None, help="sparsity level / cluster count")
    exp.add_argument("--strategy", choices=("mean-gap", "ot-displacement"), default=None)
    exp.add_argument("--lambda", dest="lam", type=float, default=1.0, help="objective weight")
    exp.add_argument("--restarts", type=int, default=10, help="clustering restarts (k-cluster)")
    exp.add_argument("--save-map", help="also write the fitted map JSON here")
    _add_common_flags(exp)
    exp.set_defaults(func=cmd_explain)

    swp = sub.add_parser("sweep", help="fit one family across a k range")
    _add_input_flags(swp)
    swp.add_argument("--family", choices=_FAMILIES)
    swp.add_argument("--k-min", type=int)
    swp.add_argument("--k-max", type=int)
    swp.add_argument("--strategy", choices=("mean-gap", "ot-displacement"), default=None)
    swp.add_argument("--lambda", dest="lam", type=float, default=1.0)
    swp.add_argument("--restarts", type=int, default=10)
    swp.add_argument(
        "--verify",
        metavar="PATH",
        default=None,
        help="validate a sweep JSON document ('-' reads stdin) instead of running a sweep",
    )
    _add_common_flags(swp)
    swp.set_defaults(func=cmd_sweep)

    dst = sub.add_parser("distance", help="W2^2 and per-column mean gaps between two CSVs")
    dst.add_argument("--a", required=True, help="first CSV")
    dst.add_argument("--b", required=True, help="second CSV")
    dst.add_argument("--columns", help="comma-separated feature columns to keep")
    dst.add_argument("--value-map", help="JSON value encodings, as in explain")
    dst.add_argument("--drop-rows-containing", help="comma-separated row-drop tokens")
    _add_common_flags(dst)
    dst.set_defaults(func=cmd_distance)
    return parser


def _ot_config(args) -> OTConfig:
    kwargs = {"solver": args.ot_solver}
    if args.epsilon is not None:
        kwargs["epsilon"] = args.epsilon
    if args.max_iters is not None:
        kwargs["max_iters"] = args.max_iters
    if args.convergence_tol is not None:
        kwargs["convergence_tol"] = args.convergence_tol
    if args.exact_size_limit is not None:
        kwargs["exact_size_limit"] = args.exact_size_limit
    return OTConfig(**kwargs)


def _emit(text: str, args) -> None:
    if args.out_file:
        Path(args.out_file).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _parse_floats(text: str):
    return [float(v) for v in text.split(",") if v.strip() != ""]


def _parse_json_flag(text: str | None):
    if text is None:
        return None
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            return json.load(fh)
    return json.loads(text)


def _parse_tokens(text: str | None):
    if text is None:
        return ()
    return tuple(t.strip() for t in text.split(",") if t.strip() != "")


def _columns_arg(args):
    return None if args.columns is None else [c.strip() for c in args.columns.split(",")]


def _load_pair(args):
    """Resolve the (source, target) datasets from either flag style."""
    split_flags = (args.data, args.split_column, args.split_source, args.split_target)
    if args.source and args.target:
        if any(split_flags):
            raise ValueError("use either --source/--target or --data with --split-* flags, not both")
        if args.drop_rows_containing:
            raise ValueError("--drop-rows-containing only applies to the --data/--split-* form")
        value_map = _parse_json_flag(args.value_map)
        columns = _columns_arg(args)
        return (
            load_csv(args.source, numeric_columns=columns, value_map=value_map),
            load_csv(args.target, numeric_columns=columns, value_map=value_map),
        )
    if all(split_flags):
        return split_csv(
            args.data,
            split_column=args.split_column,
            source_raw_values=_parse_tokens(args.split_source),
            target_raw_values=_parse_tokens(args.split_target),
            numeric_columns=_columns_arg(args),
            value_map=_parse_json_flag(args.value_map),
            drop_rows_containing=_parse_tokens(args.drop_rows_containing),
        )
    raise ValueError(
        "provide --source and --target, or --data with --split-column/--split-source/--split-target"
    )


def cmd_generate(args) -> int:
    if args.spec_file:
        spec = GeneratorSpec.from_json_file(args.spec_file)
    else:
        if not args.kind:
            raise ValueError("--kind is required (or pass --spec-file)")
        kind = _KIND_ALIASES.get(args.kind, args.kind)
        spec = GeneratorSpec(
            kind=kind,
            n=args.n,
            d=args.d,
            seed=args.seed,
            delta=_parse_floats(args.delta) if args.delta else None,
            means=_parse_json_flag(args.means),
            component_deltas=_parse_json_flag(args.component_deltas),
            noise_scale=args.noise,
        )
    source, target = generate(spec)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    src_path, tgt_path = out_dir / "source.csv", out_dir / "target.csv"
    write_csv(source, src_path)
    write_csv(target, tgt_path)
    manifest = {"spec": spec.to_dict(), "source": "source.csv", "target": "target.csv"}
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    _emit(
        "\n".join(
            [
                f"wrote {src_path} ({source.n_rows} rows)",
                f"wrote {tgt_path} ({target.n_rows} rows)",
                f"wrote {out_dir / 'manifest.json'}",
            ]
        ),
        args,
    )
    return 0


def _explain_report_text(report, shift_map) -> str:
    lines = [
        f"family: {report.variant}",
        f"n_source: {report.n_source}",
        f"n_target: {report.n_target}",
        f"transport_cost: {report.transport_cost:.6g}",
        f"distance_to_ot: {report.distance_to_ot:.6g}",
        f"percent_explained: {report.percent_explained:.6g}",
        f"objective (lambda={report.lam:.6g}): {report.objective:.6g}",
    ]
    if report.note:
        lines.append(f"note: {report.note}")
    lines.append("")
    lines.extend(shift_map.describe())
    return "\n".join(lines)


def cmd_explain(args) -> int:
    source, target = _load_pair(args)
    family = args.family.replace("-", "_")
    if family != "vector" and args.k is None:
        raise ValueError(f"--k is required for family {args.family}")
    cfg = _ot_config(args)
    strategy = args.strategy.replace("-", "_") if args.strategy else None
    shift_map = make_shift_map(
        family,
        k=args.k,
        strategy=strategy,
        ot_config=cfg,
        restarts=args.restarts,
        random_state=args.seed,
    )
    sol = solve_ot(source, target, cfg, with_images=True)
    if family == "vector":
        shift_map.fit(source, target)
    else:
        shift_map.fit(source, target, ot_images=sol.images)
    report = evaluate_map(
        shift_map,
        source,
        target,
        lam=args.lam,
        ot_config=cfg,
        ot_images=sol.images,
        baseline=sol.cost,
    )
    if args.save_map:
        shift_map.save_json(args.save_map)
    if args.output == "json":
        _emit(report.to_json(), args)
    elif args.output == "csv":
        _emit(render_report_csv([report]), args)
    else:
        _emit(_explain_report_text(report, shift_map), args)
    return 0


def cmd_sweep(args) -> int:
    if args.verify is not None:
        text = sys.stdin.read() if args.verify == "-" else Path(args.verify).read_text(encoding="utf-8")
        try:
            result = sweep_result_from_json(text)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"invalid sweep json: {exc}") from exc
        _emit(f"valid sweep json: family={result.family}, rows={len(result.rows)}", args)
        return 0
    if args.family is None or args.k_min is None or args.k_max is None:
        raise ValueError("--family, --k-min and --k-max are required (unless --verify is used)")
    source, target = _load_pair(args)
    if args.k_min < 1 or args.k_min > args.k_max:
        raise ValueError(f"need 1 <= --k-min <= --k-max, got {args.k_min}..{args.k_max}")
    result = run_sweep(
        source,
        target,
        args.family.replace("-", "_"),
        range(args.k_min, args.k_max + 1),
        strategy=args.strategy.replace("-", "_") if args.strategy else None,
        lam=args.lam,
        ot_config=_ot_config(args),
        random_state=args.seed,
        restarts=args.restarts,
    )
    _emit(render_sweep(result, args.output), args)
    return 0


def cmd_distance(args) -> int:
    value_map = _parse_json_flag(args.value_map)
    columns = _columns_arg(args)
    a = load_csv(args.a, numeric_columns=columns, value_map=value_map)
    b = load_csv(args.b, numeric_columns=columns, value_map=value_map)
    if a.columns != b.columns:
        raise ValueError(f"column mismatch between files: {a.columns} vs {b.columns}")
    cfg = _ot_config(args)
    w2 = solve_ot(a, b, cfg).cost
    gaps = b.values.mean(axis=0) - a.values.mean(axis=0)
    if args.output == "json":
        _emit(
            json.dumps(
                {"w2_squared": w2, "mean_gaps": {c: float(g) for c, g in zip(a.columns, gaps)}},
                indent=2,
            ),
            args,
        )
    elif args.output == "csv":
        lines = ["name,value", f"w2_squared,{w2!r}"]
        lines += [f"mean_gap:{c},{float(g)!r}" for c, g in zip(a.columns, gaps)]
        _emit("\n".join(lines), args)
    else:
        lines = [f"w2_squared: {w2:.6g}", "mean gap (target mean - source mean):"]
        lines += [f"  {c}: {g:+.6g}" for c, g in zip(a.columns, gaps)]
        _emit("\n".join(lines), args)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage/help
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except (CsvError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (
        ConvergenceError,
        NothingToExplainError,
        DegeneratePlanError,
        ClusteringError,
        SizeLimitExceededError,
    ) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    except (ValueError, EmptySplitError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ShiftExplainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
