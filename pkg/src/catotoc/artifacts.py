"""
File emitters for run outputs: CSV tables, JSON reports and SVG scatter plots.

Floats are written with 17 significant digits so that repeated runs produce
byte-identical files and values round-trip exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .otoc import EntropySeries, OtocSeries
from .relevance import FootprintMap, RelevanceReport

ENTROPY_HEADER = ("t", "S_L", "S2", "purity")
OTOC_HEADER = ("label", "t", "C")
COUNTS_HEADER = ("scenario", "basis", "t0", "n_relevant", "basis_size")
FOOTPRINT_HEADER = ("coord1", "coord2", "rank")
PARTIAL_HEADER = ("t0", "t", "S_L", "relevant_sum", "remaining_sum")
RESIDUAL_HEADER = ("scenario", "basis", "t", "residual")


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])
    return path


def write_entropy(path, entropy: EntropySeries) -> Path:
    rows = zip(range(len(entropy.S_L)), entropy.S_L, entropy.S2, entropy.purity)
    return write_csv(path, ENTROPY_HEADER, rows)


def write_otoc(path, series: OtocSeries) -> Path:
    T = series.t_max + 1

    def rows():
        for label, vals in zip(series.labels, series.values):
            name = str(label)
            for t in range(T):
                yield name, t, vals[t]

    return write_csv(path, OTOC_HEADER, rows())


def write_partial_sums(path, reports: Sequence[RelevanceReport], series: OtocSeries, entropy: EntropySeries) -> Path:
    """Raw sums over the relevant and the remaining elements, per t0 and t."""

    def rows():
        for rep in reports:
            mask = np.zeros(len(series.labels), dtype=bool)
            mask[rep.relevant] = True
            rel = series.values[mask, : rep.t0 + 1].sum(axis=0)
            rest = series.values[~mask, : rep.t0 + 1].sum(axis=0)
            for t in range(rep.t0 + 1):
                yield rep.t0, t, entropy.S_L[t], rel[t], rest[t]

    return write_csv(path, PARTIAL_HEADER, rows())


def write_relevance(path, reports: Sequence[RelevanceReport], meta: dict | None = None) -> Path:
    payload = dict(meta or {})
    payload["reports"] = [r.to_dict() for r in reports]
    path = Path(path)
    path.write_text(json.dumps(payload, indent=1) + "\n")
    return path


def write_footprint_csv(path, fp: FootprintMap) -> Path:
    return write_csv(path, FOOTPRINT_HEADER, ((x, y, r) for (x, y), r in zip(fp.points, fp.ranks)))


def wrapped_segments(origin, direction, period: float = 1.0, length: float = 2.0):
    """Pieces of the line origin + s*direction, |s| <= length, folded into the cell."""
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    o = np.asarray(origin, dtype=float)
    cuts = [-length, length]
    for k in range(2):
        if abs(u[k]) > 1e-15:
            lo, hi = sorted(((o[k] - length * u[k]) / period, (o[k] + length * u[k]) / period))
            for m in range(int(np.ceil(lo)), int(np.floor(hi)) + 1):
                cuts.append((m * period - o[k]) / u[k])
    cuts = np.unique(np.clip(cuts, -length, length))
    segments = []
    for s0, s1 in zip(cuts[:-1], cuts[1:]):
        if s1 - s0 < 1e-12:
            continue
        cell = np.floor((o + 0.5 * (s0 + s1) * u) / period) * period
        a, b = o + s0 * u - cell, o + s1 * u - cell
        segments.append((tuple(a), tuple(b)))
    return segments


def footprint_svg(fp: FootprintMap, size: int = 400, margin: int = 30, title: str = "") -> str:
    scale = size / fp.period

    def X(x):
        return margin + x * scale

    def Y(y):
        return margin + size - y * scale

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size + 2 * margin}" '
        f'height="{size + 2 * margin}" viewBox="0 0 {size + 2 * margin} {size + 2 * margin}">',
        f'<rect x="{margin}" y="{margin}" width="{size}" height="{size}" fill="white" stroke="black"/>',
    ]
    if title:
        out.append(f'<text x="{margin}" y="{margin - 10}" font-size="12">{title}</text>')
    out.append(f'<text x="{margin + size / 2:.1f}" y="{2 * margin + size - 6}" font-size="11">position</text>')
    out.append(f'<text x="4" y="{margin + size / 2:.1f}" font-size="11">momentum</text>')
    r = 2.5 if len(fp.points) < 500 else 1.5
    for x, y in fp.points:
        out.append(f'<circle cx="{X(x):.3f}" cy="{Y(y):.3f}" r="{r:.2f}" fill="steelblue"/>')
    if fp.has_overlay:
        for (x0, y0), (x1, y1) in wrapped_segments(fp.origin, fp.direction, fp.period, 2 * fp.period):
            out.append(
                f'<line x1="{X(x0):.3f}" y1="{Y(y0):.3f}" x2="{X(x1):.3f}" y2="{Y(y1):.3f}" '
                'stroke="black" stroke-width="1.5"/>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_footprint_svg(path, fp: FootprintMap, title: str = "") -> Path:
    path = Path(path)
    path.write_text(footprint_svg(fp, title=title))
    return path


def write_counts(path, rows) -> Path:
    return write_csv(path, COUNTS_HEADER, rows)
