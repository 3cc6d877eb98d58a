"""Command-line front end.

Subcommands: validate, stats, simplify, homology, batch.  Exit codes:
0 success, 1 domain error (non-orientable cell, structural violation),
2 input error (unreadable or malformed files, bad arguments).
"""
from __future__ import annotations

import argparse
import random
import sys
import time

from .core import DomainError, GMap, InputError
from .homology import homology_of_map, project_generators
from .io import (
    ResultReport,
    format_gmap_table,
    gmap_from_voxels,
    load_off,
    load_voxels,
    read_gmap_table,
    write_gmap_table,
    write_report,
)
from .orientation import NonOrientableCell, assign_signs, check_subclass
from .simplify import simplify
from .synth import random_voxels


def _infer_format(path: str) -> str:
    if path.endswith(".off"):
        return "off"
    if path.endswith(".gmap"):
        return "gmap"
    if path.endswith((".vox", ".voxels", ".txt")):
        return "voxels"
    raise InputError(
        f"cannot infer format of {path!r}; pass --format off|voxels|gmap"
    )


def _load(path: str, format: str | None) -> GMap:
    format = format or _infer_format(path)
    if format == "off":
        return load_off(path).gmap
    if format == "voxels":
        return load_voxels(path)
    if format == "gmap":
        return read_gmap_table(path)
    raise InputError(f"unknown input format {format!r}")


def _emit(report: ResultReport, args) -> None:
    format = "json" if args.json else "text"
    if getattr(args, "out", None):
        write_report(report, args.out, format=format)
    else:
        sys.stdout.write(report.to_json() if args.json else report.to_text())


def _cell_fields(g: GMap, prefix: str) -> dict:
    counts = g.all_cells().counts()
    out = {f"{prefix}darts": g.num_darts}
    for dim, c in enumerate(counts):
        out[f"{prefix}cells_{dim}"] = c
    return out


def cmd_validate(args) -> int:
    g = _load(args.input, args.format)
    report = g.validate()
    sub = check_subclass(g, sphere=args.sphere)
    for i, d in report.involution_failures:
        print(f"axiom violation: alpha_{i} is not an involution at dart {d}")
    for i, j, d in report.commutation_failures:
        print(f"axiom violation: alpha_{i}.alpha_{j} at dart {d}")
    for d, i in sub.free_dart_violations:
        print(f"structural violation: dart {d} is {i}-free")
    for d, i in sub.multi_link_violations:
        print(f"structural violation: multi-link at alpha_{i}({d})")
    for dim, dart in sub.sphere_failures:
        print(f"structural violation: boundary of {dim}-cell at dart {dart} is not a sphere")
    try:
        assign_signs(g)
        orientable = "all cells orientable"
    except NonOrientableCell as exc:
        orientable = f"note: sign assignment fails ({exc})"
    state = "valid" if report.ok and sub.ok else "INVALID"
    print(f"{args.input}: {state} {g.dimension}-gmap, {g.num_darts} darts; {orientable}")
    return 0 if report.ok and sub.ok else 1


def cmd_stats(args) -> int:
    g = _load(args.input, args.format)
    run = _cell_fields(g, "")
    euler = sum(
        (-1) ** dim * run[f"cells_{dim}"] for dim in range(g.dimension + 1)
    )
    run["euler"] = euler
    report = ResultReport(
        meta={"command": "stats", "input": args.input, "dimension": g.dimension},
        runs=[run],
    )
    _emit(report, args)
    return 0


def _simplify_timed(g: GMap, args):
    t0 = time.perf_counter()
    signed, log = simplify(
        g,
        removal_only=args.removal_only,
        contraction_first=args.contraction_first,
    )
    return signed, log, time.perf_counter() - t0


def cmd_simplify(args) -> int:
    g = _load(args.input, args.format)
    signed, log, seconds = _simplify_timed(g, args)
    run = _cell_fields(g, "")
    run.update(_cell_fields(signed.base, "final_"))
    run["operations"] = len(log.records)
    run["time_simplify"] = seconds
    if args.out_map:
        write_gmap_table(signed.base, args.out_map)
    if args.out_log:
        with open(args.out_log, "w", encoding="utf-8") as fh:
            fh.write(log.to_json(indent=2))
    report = ResultReport(
        meta={
            "command": "simplify",
            "input": args.input,
            "mode": _mode(args),
        },
        runs=[run],
    )
    _emit(report, args)
    return 0


def _mode(args) -> str:
    if args.removal_only:
        return "removal-only"
    if args.contraction_first:
        return "contraction-first"
    return "removal-then-contraction"


def cmd_homology(args) -> int:
    g = _load(args.input, args.format)
    run = _cell_fields(g, "")
    generators = args.project_generators
    if args.no_simplify:
        t0 = time.perf_counter()
        result = homology_of_map(g, generators=generators)
        time_h = time.perf_counter() - t0
        run["time_simplify"] = 0.0
        log = None
    else:
        signed, log, time_s = _simplify_timed(g, args)
        run.update(_cell_fields(signed.base, "final_"))
        run["time_simplify"] = time_s
        t0 = time.perf_counter()
        result = homology_of_map(signed, generators=generators)
        time_h = time.perf_counter() - t0
    run["time_homology"] = time_h
    for dim, b in enumerate(result.betti):
        run[f"betti_{dim}"] = b
    run["torsion"] = [list(t) for t in result.torsion]
    groups = [result.group(p) for p in range(result.dimension + 1)]
    run["homology"] = groups
    if generators:
        chains = result.generators
        if log is not None:
            chains = project_generators(result, log, g)
        run["generators"] = [
            {
                "dim": c.dim,
                "order": c.order,
                "support": {str(k): v for k, v in sorted(c.support.items())},
            }
            for per_dim in chains
            for c in per_dim
        ]
    report = ResultReport(
        meta={
            "command": "homology",
            "input": args.input,
            "mode": "no-simplify" if args.no_simplify else _mode(args),
        },
        runs=[run],
    )
    _emit(report, args)
    return 0


def cmd_batch(args) -> int:
    if args.count < 1:
        raise InputError("batch needs --count >= 1")
    if args.grid < 1:
        raise InputError("batch needs --grid >= 1")
    voxels = args.voxels or max(1, args.grid**3 // 8)
    master = random.Random(args.seed)
    runs = []
    for idx in range(args.count):
        run_seed = master.randrange(2**32)
        cells = random_voxels(args.grid, voxels, seed=run_seed)
        g = gmap_from_voxels(cells)
        run = {"run_seed": run_seed, "voxels": len(cells)}
        run.update(_cell_fields(g, ""))
        for prefix, removal_only in (("ro_", True), ("rc_", False)):
            t0 = time.perf_counter()
            signed, log = simplify(g, removal_only=removal_only)
            seconds = time.perf_counter() - t0
            run.update(_cell_fields(signed.base, prefix + "final_"))
            run[prefix + "operations"] = len(log.records)
            run[prefix + "time"] = seconds
            if not removal_only:
                t0 = time.perf_counter()
                result = homology_of_map(signed)
                run["time_homology"] = time.perf_counter() - t0
                for dim, b in enumerate(result.betti):
                    run[f"betti_{dim}"] = b
        runs.append(run)
    report = ResultReport(
        meta={
            "command": "batch",
            "grid": args.grid,
            "count": args.count,
            "voxels_per_run": voxels,
            "seed": args.seed,
        },
        runs=runs,
    )
    _emit(report, args)
    return 0


def _add_input(p) -> None:
    p.add_argument("input", help="input file")
    p.add_argument(
        "--format",
        choices=("off", "voxels", "gmap"),
        help="input format (default: inferred from the extension)",
    )


def _add_phases(p) -> None:
    p.add_argument(
        "--removal-only",
        action="store_true",
        help="run only the removal sweeps",
    )
    p.add_argument(
        "--contraction-first",
        action="store_true",
        help="run contraction sweeps before removal sweeps",
    )


def _add_output(p) -> None:
    p.add_argument("--out", help="write the report to this path")
    p.add_argument(
        "--json", action="store_true", help="emit JSON instead of text"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ngmap",
        description="generalized maps: validation, simplification, homology",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check gmap axioms and structure")
    _add_input(p)
    p.add_argument(
        "--sphere",
        action="store_true",
        help="also run the recursive cell-boundary sphere check",
    )
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", help="cell counts and Euler characteristic")
    _add_input(p)
    _add_output(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("simplify", help="run the simplification pipeline")
    _add_input(p)
    _add_phases(p)
    p.add_argument("--out-map", help="write the simplified map as a gmap table")
    p.add_argument("--out-log", help="write the operation log as JSON")
    _add_output(p)
    p.set_defaults(func=cmd_simplify)

    p = sub.add_parser("homology", help="Betti numbers, torsion, generators")
    _add_input(p)
    _add_phases(p)
    p.add_argument(
        "--no-simplify",
        action="store_true",
        help="compute on the unsimplified complex",
    )
    p.add_argument(
        "--project-generators",
        action="store_true",
        help="compute generator chains and project them onto the input map",
    )
    _add_output(p)
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("batch", help="seeded random voxel-set experiments")
    p.add_argument("--grid", type=int, default=8, help="grid side length")
    p.add_argument("--count", type=int, default=10, help="number of random sets")
    p.add_argument(
        "--voxels",
        type=int,
        help="occupied voxels per set (default: grid^3 / 8)",
    )
    p.add_argument("--seed", type=int, default=0, help="master random seed")
    _add_output(p)
    p.set_defaults(func=cmd_batch)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
