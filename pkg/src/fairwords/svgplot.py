"""SVG rendering of exchange systems (one fill colour per letter)."""

from __future__ import annotations

from . import __version__
from .geometry import ExchangeSystem

FILL = ["#c6dbef", "#fcbba1", "#c7e9c0", "#dadaeb", "#fdd0a2", "#d9d9d9"]
EDGE = ["#3182bd", "#de2d26", "#31a354", "#756bb1", "#e6550d", "#636363"]

_SIZE = 640


def _fmt(x: float) -> str:
    return f"{x:.6f}".rstrip("0").rstrip(".")


def render_system(system: ExchangeSystem) -> str:
    """Serialise the partition to SVG 1.1: atoms coloured by letter inside a
    dotted outline of the hexagonal box section [-C', C]^3 on the hyperplane."""
    c, cp = system.C, system.C_prime
    lo, hi = -cp - 0.1, c + 0.1
    span = hi - lo
    scale = _SIZE / span

    def sx(x: float) -> str:
        return _fmt((x - lo) * scale)

    def sy(y: float) -> str:
        return _fmt((hi - y) * scale)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f"<!-- fairwords {__version__} -->",
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_SIZE}" height="{_SIZE}" viewBox="0 0 {_SIZE} {_SIZE}">',
        f'<rect width="{_SIZE}" height="{_SIZE}" fill="white"/>',
    ]
    for atom in system.atoms:
        fill = FILL[(atom.letter - 1) % len(FILL)]
        edge = EDGE[(atom.letter - 1) % len(EDGE)]
        for poly in atom.polygons:
            pts = " ".join(f"{sx(x)},{sy(y)}" for x, y in poly.vertices)
            parts.append(
                f'<polygon points="{pts}" fill="{fill}" stroke="{edge}" '
                f'stroke-width="0.5"/>'
            )
    hexagon = [(-cp, 0.0), (0.0, -cp), (c, -cp), (c, 0.0), (0.0, c), (-cp, c)]
    pts = " ".join(f"{sx(x)},{sy(y)}" for x, y in hexagon)
    parts.append(
        f'<polygon points="{pts}" fill="none" stroke="black" '
        f'stroke-width="1" stroke-dasharray="4 4"/>'
    )
    parts.append(
        f'<line x1="{sx(lo)}" y1="{sy(0.0)}" x2="{sx(hi)}" y2="{sy(0.0)}" '
        f'stroke="black" stroke-width="0.75"/>'
    )
    parts.append(
        f'<line x1="{sx(0.0)}" y1="{sy(lo)}" x2="{sx(0.0)}" y2="{sy(hi)}" '
        f'stroke="black" stroke-width="0.75"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
