"""Deterministic SVG rendering of planar continua, pieces, trees, curves.

Fixed 1024x1024 canvas, y axis flipped to mathematical orientation,
coordinates printed with 6 decimals.  Identical inputs produce
byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

from .errors import InputError

CANVAS = 1024.0

CELL_FILL = "#b8c7dd"
PIECE_FILLS = ("#f2b06c", "#9fd6a4", "#d6a3d1", "#8fd0d6", "#e6e08a", "#d99a9a")
CUBE_STROKE = "#24518f"
CURVE_STROKE = "#c22f2f"


def _fmt(v: float) -> str:
    return f"{v:.6f}"


def _rect(x: float, y: float, w: float, h: float, style: str) -> str:
    return (
        f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" height="{_fmt(h)}" {style}/>'
    )


def _cell_rects(cells, resolution: int, fill: str) -> list[str]:
    side = CANVAS / resolution
    out = []
    for cx, cy in cells:
        x = cx * side
        y = CANVAS - (cy + 1) * side
        out.append(_rect(x, y, side, side, f'fill="{fill}"'))
    return out


def _cube_outline(cube, resolution: int, stroke: str, width: float) -> str:
    side = CANVAS / resolution
    x = cube.origin[0] * side
    y = CANVAS - (cube.origin[1] + cube.edge_cells) * side
    w = cube.edge_cells * side
    return _rect(
        x, y, w, w, f'fill="none" stroke="{stroke}" stroke-width="{_fmt(width)}"'
    )


def render_svg(
    path,
    continuum=None,
    pieces=None,
    tree=None,
    curve=None,
) -> None:
    """Write an SVG overlaying the given artifacts (two dimensions only)."""
    resolution = None
    for artifact in (continuum, tree):
        if artifact is not None:
            if artifact.d != 2:
                raise InputError("SVG rendering supports d=2 only")
            resolution = artifact.resolution
    if pieces:
        if pieces[0].d != 2:
            raise InputError("SVG rendering supports d=2 only")
    if curve is not None and curve.d != 2:
        raise InputError("SVG rendering supports d=2 only")
    if resolution is None and pieces:
        resolution = max(
            max(p.cube.origin[a] + p.cube.edge_cells for a in range(2)) for p in pieces
        )
    if resolution is None and curve is None:
        raise InputError("nothing to render")

    body = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {int(CANVAS)} {int(CANVAS)}">',
        _rect(0.0, 0.0, CANVAS, CANVAS, 'fill="#ffffff"'),
    ]
    if continuum is not None:
        body.extend(_cell_rects(continuum.cells, continuum.resolution, CELL_FILL))
    if pieces:
        for i, piece in enumerate(pieces):
            fill = PIECE_FILLS[i % len(PIECE_FILLS)]
            body.extend(_cell_rects(piece.cells(), resolution, fill))
        for piece in pieces:
            body.append(_cube_outline(piece.cube, resolution, CUBE_STROKE, 2.0))
    if tree is not None:
        for word in sorted(tree.nodes.keys()):
            level = len(word)
            width = max(0.6, 2.4 - 0.45 * level)
            body.append(
                _cube_outline(tree.nodes[word].cube, tree.resolution, CUBE_STROKE, width)
            )
    if curve is not None:
        pts = curve.points
        coords = " ".join(
            f"{_fmt(p[0] * CANVAS)},{_fmt(CANVAS - p[1] * CANVAS)}" for p in pts
        )
        if len(pts) == 1:
            p = pts[0]
            body.append(
                f'<circle cx="{_fmt(p[0] * CANVAS)}" cy="{_fmt(CANVAS - p[1] * CANVAS)}" '
                f'r="3.000000" fill="{CURVE_STROKE}"/>'
            )
        else:
            body.append(
                f'<polyline points="{coords}" fill="none" stroke="{CURVE_STROKE}" '
                'stroke-width="1.500000"/>'
            )
    body.append("</svg>")
    Path(path).write_text("\n".join(body) + "\n")
