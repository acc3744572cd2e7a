"""JSON and CSV round-trip formats for every pipeline artifact.

All writers emit compact, key-ordered JSON with a trailing newline, so
identical in-memory values always produce identical bytes.  Readers
validate structure strictly: continuum cells must be lex-sorted without
duplicates, tree nodes sorted by word.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .assembly import AssemblyResult
from .cantor import CantorTree
from .curves import CoverBudget, Polyline
from .errors import InputError
from .grid import CubeRegion, DiscreteContinuum, Region
from .subdivision import SpanningPiece


def _dump(path, payload) -> None:
    text = json.dumps(payload, separators=(",", ":"), allow_nan=False)
    Path(path).write_text(text + "\n")


def _load(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read JSON from {path}: {exc}") from exc


def _require(payload: dict, keys, kind: str):
    missing = [k for k in keys if k not in payload]
    if missing:
        raise InputError(f"{kind} file is missing fields {missing}")


def _cells_payload(cells: np.ndarray) -> list:
    return [[int(v) for v in row] for row in cells]


def _validate_sorted_cells(cells: list, d: int, kind: str) -> None:
    prev = None
    for row in cells:
        if not isinstance(row, list) or len(row) != d:
            raise InputError(f"{kind}: cell {row} is not a {d}-vector")
        tup = tuple(row)
        if prev is not None and tup <= prev:
            raise InputError(
                f"{kind}: cells must be strictly lex-sorted without duplicates"
            )
        prev = tup


# -- continuum --------------------------------------------------------------


def write_continuum(path, K: DiscreteContinuum) -> None:
    _dump(
        path,
        {"d": K.d, "resolution": K.resolution, "cells": _cells_payload(K.cells)},
    )


def read_continuum(path) -> DiscreteContinuum:
    payload = _load(path)
    _require(payload, ("d", "resolution", "cells"), "continuum")
    d = int(payload["d"])
    cells = payload["cells"]
    if not cells:
        raise InputError("continuum: empty cell list")
    _validate_sorted_cells(cells, d, "continuum")
    return DiscreteContinuum(
        [tuple(c) for c in cells], int(payload["resolution"]), d
    )


# -- pieces -----------------------------------------------------------------


def _cube_payload(cube: CubeRegion) -> dict:
    return {"origin": list(cube.origin), "edge_cells": cube.edge_cells}


def _cube_from(payload: dict) -> CubeRegion:
    _require(payload, ("origin", "edge_cells"), "cube")
    return CubeRegion(tuple(int(v) for v in payload["origin"]), int(payload["edge_cells"]))


def _piece_payload(piece: SpanningPiece) -> dict:
    return {
        "cube": _cube_payload(piece.cube),
        "span_axis": piece.span_axis,
        "cells": _cells_payload(piece.cells()),
    }


def _piece_from(payload: dict) -> SpanningPiece:
    _require(payload, ("cube", "span_axis", "cells"), "piece")
    cube = _cube_from(payload["cube"])
    _validate_sorted_cells(payload["cells"], cube.d, "piece")
    region = Region.from_cells([tuple(c) for c in payload["cells"]])
    return SpanningPiece(cube, region, int(payload["span_axis"]))


def write_pieces(path, pieces) -> None:
    _dump(path, [_piece_payload(p) for p in pieces])


def read_pieces(path) -> list[SpanningPiece]:
    payload = _load(path)
    if not isinstance(payload, list):
        raise InputError("pieces file must hold a JSON array")
    return [_piece_from(p) for p in payload]


# -- cantor tree ------------------------------------------------------------


def write_tree(path, tree: CantorTree) -> None:
    words = sorted(tree.nodes.keys())
    nodes = [
        {
            "word": list(w),
            "cube": _cube_payload(tree.nodes[w].cube),
            "span_axis": tree.nodes[w].span_axis,
            "cells": _cells_payload(tree.nodes[w].cells()),
        }
        for w in words
    ]
    _dump(
        path,
        {
            "N": tree.N,
            "depth": tree.depth,
            "d": tree.d,
            "resolution": tree.resolution,
            "nodes": nodes,
        },
    )


def read_tree(path) -> CantorTree:
    payload = _load(path)
    _require(payload, ("N", "depth", "d", "resolution", "nodes"), "tree")
    N, depth = int(payload["N"]), int(payload["depth"])
    nodes = {}
    prev_word = None
    for entry in payload["nodes"]:
        _require(entry, ("word", "cube", "span_axis", "cells"), "tree node")
        word = tuple(int(v) for v in entry["word"])
        if prev_word is not None and word <= prev_word:
            raise InputError("tree nodes must be sorted by word")
        prev_word = word
        if any(i < 1 or i >= N for i in word) or len(word) > depth:
            raise InputError(f"tree word {word} out of range for N={N}, depth={depth}")
        nodes[word] = _piece_from(entry)
    expect = sum((N - 1) ** k for k in range(depth + 1))
    if len(nodes) != expect:
        raise InputError(
            f"tree must hold {expect} nodes for N={N}, depth={depth}, found {len(nodes)}"
        )
    return CantorTree(N, depth, int(payload["resolution"]), nodes)


# -- polylines and budgets ---------------------------------------------------


def write_polyline(path, poly: Polyline) -> None:
    _dump(
        path,
        {
            "d": poly.d,
            "points": [[float(v) for v in row] for row in poly.points],
            "length": poly.length,
        },
    )


def read_polyline(path) -> Polyline:
    payload = _load(path)
    _require(payload, ("d", "points", "length"), "polyline")
    poly = Polyline(payload["points"])
    if poly.d != int(payload["d"]):
        raise InputError("polyline dimension disagrees with its points")
    if abs(poly.length - float(payload["length"])) > 1e-9:
        raise InputError("polyline length field disagrees with its points")
    return poly


def write_budget(path, budget: CoverBudget) -> None:
    _dump(
        path,
        {
            "base": budget.base,
            "s": budget.s,
            "c1": budget.c1,
            "c2": budget.c2,
            "r": list(budget.r),
            "l": list(budget.l),
            "partial": list(budget.partial),
            "L": budget.total,
        },
    )


def read_budget(path) -> CoverBudget:
    payload = _load(path)
    _require(payload, ("base", "s", "c1", "c2", "r", "l", "L"), "budget")
    return CoverBudget(
        int(payload["base"]),
        float(payload["s"]),
        float(payload["c1"]),
        float(payload["c2"]),
        tuple(int(v) for v in payload["r"]),
        tuple(float(v) for v in payload["l"]),
        tuple(float(v) for v in payload.get("partial", [])),
        float(payload["L"]),
    )


# -- assembly report ----------------------------------------------------------


def assembly_report(result: AssemblyResult) -> dict:
    stages = []
    for plan in result.stages:
        stages.append(
            {
                "n": plan.n,
                "center": list(plan.center),
                "radius": plan.radius,
                "N": plan.branching,
                "requested_N": plan.requested_branching,
                "depth": plan.depth,
                "s": plan.s,
                "curve_length": plan.curve.length,
                "join_length": plan.join_to_next,
                "intersection_slope": plan.slope,
                "corner_count": plan.corner_count,
            }
        )
    final_slope = (
        result.final_estimate.slope if result.final_estimate is not None else None
    )
    return {
        "stages": stages,
        "final": {
            "total_length": result.total_length,
            "curve_total": result.curve_total,
            "join_total": result.join_total,
            "final_slope": final_slope,
        },
    }


def write_report(path, report: dict) -> None:
    _dump(path, report)


def write_report_csv(path, report: dict) -> None:
    lines = ["n,N,depth,s,curve_length,join_length,intersection_slope"]
    for st in report["stages"]:
        join = "" if st["join_length"] is None else repr(st["join_length"])
        slope = "" if st["intersection_slope"] is None else repr(st["intersection_slope"])
        lines.append(
            f"{st['n']},{st['N']},{st['depth']},{st['s']!r},"
            f"{st['curve_length']!r},{join},{slope}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_series_csv(path, series, estimate=None) -> None:
    lines = ["k,delta,count"]
    for k, delta, count in series.entries():
        lines.append(f"{k},{delta!r},{count}")
    if estimate is not None:
        lines.append(f"# slope={estimate.slope!r} r2={estimate.r_squared!r} "
                     f"window={estimate.window[0]}:{estimate.window[1]}")
    Path(path).write_text("\n".join(lines) + "\n")


def detect_payload_kind(path) -> str:
    """Rough classification of a JSON artifact by its top-level fields."""
    payload = _load(path)
    if isinstance(payload, list):
        return "pieces"
    if isinstance(payload, dict):
        if "nodes" in payload:
            return "tree"
        if "cells" in payload:
            return "continuum"
        if "points" in payload:
            return "polyline"
        if "stages" in payload:
            return "report"
    raise InputError(f"unrecognized JSON payload in {path}")
