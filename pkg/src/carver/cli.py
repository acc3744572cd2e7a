"""Command-line pipeline: generate, subdivide, carve, cover, assemble,
estimate, verify, render.

Exit codes: 0 success, 2 invalid input or format, 3 violated
mathematical precondition, 4 insufficient resolution.  The environment
variable CARVER_THREADS caps internal parallelism (0 = auto).
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import serialize
from .assembly import assemble
from .cantor import build_cantor_tree, target_dimension
from .curves import cover_curve
from .dimension import (
    box_count_series,
    certified_cover_series,
    cover_sum_check,
    default_window,
    estimate_upper_minkowski,
    frostman_check,
    leaf_cube_cover,
    random_covers,
)
from .errors import CarverError, InputError
from .grid import (
    CubeRegion,
    check_boundary_component_property,
    connected_components,
    normalize_to_unit_cube,
)
from .shapes import (
    ShapeSpec,
    carpet_spec,
    circle_spec,
    koch_spec,
    maze_spec,
    polyline_spec,
    rasterize_shape,
    segment_spec,
    staircase_continuum,
)
from .subdivision import check_piece, spanning_subdivision


def _parse_point(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(part.strip()) for part in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse point {text!r}: {exc}") from exc


def _parse_cell(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part.strip()) for part in text.split(","))
    except ValueError as exc:
        raise InputError(f"cannot parse cell {text!r}: {exc}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carver",
        description="Rasterized continua, spanning subdivisions, Cantor-like "
        "carving, covering curves, and dimension certificates.",
        epilog="CARVER_THREADS caps internal parallelism (0 = auto).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="rasterize a corpus shape")
    gen.add_argument(
        "--shape",
        required=True,
        choices=["segment", "polyline", "circle", "koch", "carpet", "maze", "staircase"],
    )
    gen.add_argument("--res", type=int, required=True, help="cells per unit length")
    gen.add_argument("--from", dest="p0", default="0,1/2", help="segment start")
    gen.add_argument("--to", dest="p1", default="1,1/2", help="segment end")
    gen.add_argument("--points", default=None, help="polyline points x,y;x,y;...")
    gen.add_argument("--center", default="1/2,1/2", help="circle center")
    gen.add_argument("--radius", default="1/3", help="circle radius")
    gen.add_argument("--depth", type=int, default=3, help="koch/carpet recursion depth")
    gen.add_argument("--seed", type=int, default=0, help="maze seed")
    gen.add_argument("--raw-res", type=int, default=None,
                     help="rasterize at this resolution, then normalize to --res")
    gen.add_argument("--normalize", action="store_true",
                     help="fit the shape onto the full cube at --res")
    gen.add_argument("-o", "--output", required=True)

    sd = sub.add_parser("subdivide", help="split a spanning continuum into N pieces")
    sd.add_argument("-i", "--input", required=True)
    sd.add_argument("-N", type=int, required=True)
    sd.add_argument("--axis", type=int, default=0)
    sd.add_argument("-o", "--output", required=True)

    carve = sub.add_parser("carve", help="build the Cantor-like piece tree")
    carve.add_argument("-i", "--input", required=True)
    carve.add_argument("-N", type=int, required=True)
    carve.add_argument("--depth", type=int, required=True)
    carve.add_argument("--axis", type=int, default=0)
    carve.add_argument("-o", "--output", required=True)

    cover = sub.add_parser("cover", help="cover a tree with the corner-visiting curve")
    cover.add_argument("-i", "--input", required=True, help="tree JSON")
    cover.add_argument("-o", "--output", required=True, help="polyline JSON")
    cover.add_argument("--budget", default=None, help="budget JSON (default: <output>.budget.json)")

    asm = sub.add_parser("assemble", help="staged curve meeting the continuum")
    asm.add_argument("-i", "--input", required=True)
    asm.add_argument("--stages", type=int, default=3)
    asm.add_argument("--auto", action="store_true",
                     help="run stages until resolution is exhausted")
    asm.add_argument("--center", default=None, help="center cell x,y (default: lex-min)")
    asm.add_argument("-o", "--output", required=True, help="curve JSON")
    asm.add_argument("--report", default=None,
                     help="report JSON; also writes .csv and .png siblings")

    est = sub.add_parser("estimate", help="box-count series and dimension slope")
    est.add_argument("-i", "--input", required=True)
    est.add_argument("--base", type=int, default=2)
    est.add_argument("--kmin", type=int, default=1)
    est.add_argument("--kmax", type=int, default=None)
    est.add_argument("-o", "--output", default=None, help="series CSV; writes .png sibling")
    est.add_argument("--fig", default=None, help="explicit figure path")

    ver = sub.add_parser("verify", help="invariant, mass-bound, and cover-sum suites")
    ver.add_argument("-i", "--input", required=True, help="continuum or tree JSON")
    ver.add_argument("--trials", type=int, default=10000)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--covers", type=int, default=20)

    ren = sub.add_parser("render", help="SVG rendering (d=2)")
    ren.add_argument("-i", "--input", default=None, help="continuum JSON")
    ren.add_argument("--pieces", default=None)
    ren.add_argument("--tree", default=None)
    ren.add_argument("--curve", default=None)
    ren.add_argument("-o", "--output", required=True)
    return parser


def _cmd_gen(args) -> int:
    res = args.res
    raw = args.raw_res
    if args.shape == "staircase":
        K = staircase_continuum(raw if raw else res)
    else:
        r = raw if raw else res
        if args.shape == "segment":
            spec = segment_spec(_parse_point(args.p0), _parse_point(args.p1), r)
        elif args.shape == "polyline":
            if not args.points:
                raise InputError("polyline needs --points")
            spec = polyline_spec(
                [_parse_point(p) for p in args.points.split(";")], r
            )
        elif args.shape == "circle":
            spec = circle_spec(_parse_point(args.center), Fraction(args.radius), r)
        elif args.shape == "koch":
            spec = koch_spec(args.depth, r)
        elif args.shape == "carpet":
            spec = carpet_spec(args.depth, r)
        elif args.shape == "maze":
            if r % 2 == 0:
                raise InputError(
                    "maze needs an odd resolution; rasterize with --raw-res "
                    "and normalize to --res"
                )
            spec = maze_spec(args.seed, r)
        else:  # pragma: no cover
            raise InputError(f"unknown shape {args.shape}")
        K = rasterize_shape(spec)
    if raw is not None or args.normalize:
        K = normalize_to_unit_cube(
            K.region, res, source_resolution=K.resolution
        ).continuum
    serialize.write_continuum(args.output, K)
    print(f"wrote {K.count} cells at resolution {K.resolution} to {args.output}")
    return 0


def _cmd_subdivide(args) -> int:
    K = serialize.read_continuum(args.input)
    Q = K.full_cube()
    pieces = spanning_subdivision(K, Q, args.axis, args.N)
    serialize.write_pieces(args.output, pieces)
    print(f"wrote {len(pieces)} spanning pieces to {args.output}")
    return 0


def _cmd_carve(args) -> int:
    K = serialize.read_continuum(args.input)
    tree = build_cantor_tree(K, K.full_cube(), args.axis, args.N, args.depth)
    serialize.write_tree(args.output, tree)
    print(
        f"wrote tree with {tree.leaf_count()} leaves "
        f"(s = {tree.s:.6f}) to {args.output}"
    )
    return 0


def _cmd_cover(args) -> int:
    tree = serialize.read_tree(args.input)
    result = cover_curve(tree.as_hierarchy())
    serialize.write_polyline(args.output, result.deepest)
    budget_path = args.budget or str(Path(args.output).with_suffix(".budget.json"))
    serialize.write_budget(budget_path, result.budget)
    print(
        f"curve length {result.deepest.length:.6f} <= budget {result.budget.total:.6f}; "
        f"wrote {args.output} and {budget_path}"
    )
    return 0


def _cmd_assemble(args) -> int:
    K = serialize.read_continuum(args.input)
    center = _parse_cell(args.center) if args.center else None
    result = assemble(K, center, n_max=args.stages, auto=args.auto)
    serialize.write_polyline(args.output, result.curve)
    report = serialize.assembly_report(result)
    if args.report:
        serialize.write_report(args.report, report)
        base = Path(args.report)
        serialize.write_report_csv(base.with_suffix(".csv"), report)
        from .figures import save_assembly_figure

        save_assembly_figure(report, base.with_suffix(".png"))
    print(
        f"assembled {len(result.stages)} stages, total length "
        f"{result.total_length:.6f} < 3"
    )
    for st in report["stages"]:
        slope = st["intersection_slope"]
        slope_txt = f"{slope:.4f}" if slope is not None else "n/a"
        print(
            f"  stage {st['n']}: N={st['N']} depth={st['depth']} "
            f"s={st['s']:.4f} length={st['curve_length']:.6f} slope={slope_txt}"
        )
    return 0


def _cmd_estimate(args) -> int:
    K = serialize.read_continuum(args.input)
    series = box_count_series(K, K.resolution, args.base, args.kmin, args.kmax)
    window = default_window(series, K.d)
    estimate = None
    if window[1] - window[0] >= 3:
        estimate = estimate_upper_minkowski(series, window)
    print("k,delta,count")
    for k, delta, count in series.entries():
        print(f"{k},{delta!r},{count}")
    if estimate is not None:
        print(
            f"slope {estimate.slope:.6f} (r2 {estimate.r_squared:.6f}, "
            f"window {estimate.window[0]}:{estimate.window[1]})"
        )
    else:
        print("slope n/a (needs at least 3 usable scales)")
    fig_path = args.fig
    if args.output:
        serialize.write_series_csv(args.output, series, estimate)
        if fig_path is None:
            fig_path = str(Path(args.output).with_suffix(".png"))
    if fig_path:
        from .figures import save_series_figure

        save_series_figure(series, estimate, fig_path)
    return 0


def _cmd_verify(args) -> int:
    kind = serialize.detect_payload_kind(args.input)
    failures = 0
    if kind == "tree":
        failures = _verify_tree(args)
    elif kind == "continuum":
        failures = _verify_continuum(args)
    else:
        raise InputError(f"verify expects a continuum or tree file, got {kind}")
    if failures:
        print(f"FAILED {failures} check(s)")
        return 3
    print("all checks passed")
    return 0


def _verify_tree(args) -> int:
    tree = serialize.read_tree(args.input)
    failures = 0

    def report(name: str, ok: bool, detail: str = ""):
        nonlocal failures
        mark = "ok  " if ok else "FAIL"
        print(f"{mark} {name}" + (f": {detail}" if detail else ""))
        failures += 0 if ok else 1

    expected = (tree.N - 1) ** tree.depth
    report(
        "leaf count",
        len(tree.leaves()) == expected,
        f"{len(tree.leaves())} leaves, (N-1)^depth = {expected}",
    )
    bad = 0
    for word, node in tree.nodes.items():
        if not word:
            continue
        parent = tree.nodes[word[:-1]]
        bad += len(check_piece(node, parent.piece, parent.cube, tree.N)) > 0
    report("piece invariants", bad == 0, f"{bad} defective nodes")
    series = certified_cover_series(tree)
    within = all(
        c <= (tree.N - 1) ** k for k, c in zip(series.ks, series.counts)
    )
    report("certified cover counts", within, f"counts {series.counts}")
    fr = frostman_check(tree, args.trials, args.seed)
    report(
        "mass bound",
        fr.passed,
        f"worst ratio {fr.worst_ratio:.6f} over {fr.trials} boxes",
    )
    cs = cover_sum_check(tree, leaf_cube_cover(tree))
    report(
        "cover sum (leaf cubes)",
        cs.passed,
        f"sum {cs.total:.6f} >= {cs.bound:.6f}",
    )
    worst = None
    ok = True
    for cov in random_covers(tree, args.covers, args.seed):
        res = cover_sum_check(tree, cov)
        if worst is None or res.total < worst:
            worst = res.total
        ok = ok and res.passed
    if args.covers:
        report(
            "cover sum (random covers)",
            ok,
            f"worst sum {worst:.6f} >= {cs.bound:.6f}",
        )
    return failures


def _verify_continuum(args) -> int:
    import random as _random

    K = serialize.read_continuum(args.input)
    failures = 0

    def report(name: str, ok: bool, detail: str = ""):
        nonlocal failures
        mark = "ok  " if ok else "FAIL"
        print(f"{mark} {name}" + (f": {detail}" if detail else ""))
        failures += 0 if ok else 1

    report("format and connectivity", True, f"{K.count} cells at R={K.resolution}")
    comps = connected_components(K.cells)
    report("single component", len(comps) == 1, f"{len(comps)} components")
    rng = _random.Random(args.seed)
    cells = [tuple(int(v) for v in row) for row in K.cells]
    trials = min(args.trials, 200)
    ok = True
    for _ in range(trials):
        size = rng.randrange(1, len(cells))
        subset = set(rng.sample(cells, size))
        if len(subset) == len(cells):
            continue
        ok = ok and check_boundary_component_property(K.cells, subset)
    report("boundary components reach the relative boundary", ok, f"{trials} subsets")
    return failures


def _cmd_render(args) -> int:
    continuum = serialize.read_continuum(args.input) if args.input else None
    pieces = serialize.read_pieces(args.pieces) if args.pieces else None
    tree = serialize.read_tree(args.tree) if args.tree else None
    curve = serialize.read_polyline(args.curve) if args.curve else None
    from .render import render_svg

    render_svg(args.output, continuum=continuum, pieces=pieces, tree=tree, curve=curve)
    print(f"wrote {args.output}")
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "subdivide": _cmd_subdivide,
    "carve": _cmd_carve,
    "cover": _cmd_cover,
    "assemble": _cmd_assemble,
    "estimate": _cmd_estimate,
    "verify": _cmd_verify,
    "render": _cmd_render,
}


def cli_dispatch(argv) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    return _COMMANDS[args.command](args)


def main(argv=None) -> int:
    try:
        return cli_dispatch(sys.argv[1:] if argv is None else argv)
    except CarverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
