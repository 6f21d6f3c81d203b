"""SVG drawings of domino tilings."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .lattice import AztecGraph, Matching

# one colour per edge direction of a cell, i.e. per domino type
DOMINO_COLOURS = ("#1f5fa8", "#e8b31c", "#2a9d4b", "#c8372d")


def _square_centre(X, Y):
    # rotate the embedding by 45 degrees so vertices become unit squares
    return (np.asarray(X) - np.asarray(Y)) / 2.0, (np.asarray(X) + np.asarray(Y)) / 2.0


def tiling_svg(graph: AztecGraph, matching: Matching, scale: float = 4.0) -> str:
    """SVG text with one rectangle per domino, coloured by the four domino types."""
    edges = matching.edge_indices(graph)
    n = graph.order
    wA, wC = graph.white_label(graph.edge_white[edges])
    bA, bC = graph.black_label(graph.edge_black[edges])
    wu, wv = _square_centre(2 * wA + 1, 2 * wC + 2)
    bu, bv = _square_centre(2 * bA, 2 * bC + 1)
    x0 = np.minimum(wu, bu) - 0.5 + (n + 0.5)
    y0 = np.minimum(wv, bv) - 0.5
    width = np.abs(wu - bu) + 1.0
    height = np.abs(wv - bv) + 1.0
    kinds = graph.edge_direction[edges]
    size = 2 * n + 2
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size * scale:.0f}" '
           f'height="{size * scale:.0f}" viewBox="0 0 {size} {size}">']
    for x, y, w, h, kind in zip(x0, y0, width, height, kinds):
        # flip vertically so that larger Y is drawn higher up
        out.append(f'<rect x="{x:g}" y="{size - y - h - 0.5:g}" width="{w:g}" height="{h:g}" '
                   f'fill="{DOMINO_COLOURS[kind]}" stroke="black" stroke-width="0.05"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_tiling_svg(path, graph: AztecGraph, matching: Matching, scale: float = 4.0) -> None:
    Path(path).write_text(tiling_svg(graph, matching, scale))
