"""
Operator relevance: time-integrated OTOC areas, the cumulative-area cutoff,
and phase-space footprints of the relevant set.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import maps
from .bases import OperatorBasis
from .errors import DegenerateWindowError, NotHyperbolicError
from .otoc import EntropySeries, OtocSeries, Scenario, otoc_re_series

DEFAULT_FRACTION = 0.8
QUADRATURES = ("riemann", "trapezoid")

# slack on the cutoff comparison so that fraction=1 is reachable despite rounding
_CUT_RTOL = 1e-12


def quadrature_weights(t0: int, rule: str = "riemann") -> np.ndarray:
    """Weights on t = 0..t0. 'riemann' is the unit-step sum over both endpoints."""
    w = np.ones(t0 + 1)
    if rule == "trapezoid":
        w[0] = w[-1] = 0.5
    elif rule != "riemann":
        raise ValueError(f"unknown quadrature {rule!r}; choose from {QUADRATURES}")
    return w


def _check_window(t0: int, t_max: int):
    if not 0 <= t0 <= t_max:
        raise ValueError(f"t0 = {t0} outside the computed window 0..{t_max}")


def otoc_area(series: OtocSeries, element, t0: int, rule: str = "riemann") -> float:
    """Area under C_M(t) up to t0; ``element`` is an index or a label."""
    _check_window(t0, series.t_max)
    idx = element if isinstance(element, (int, np.integer)) else series.labels.index(element)
    return float(series.values[idx, : t0 + 1] @ quadrature_weights(t0, rule))


def otoc_areas(series: OtocSeries, t0: int, rule: str = "riemann") -> np.ndarray:
    _check_window(t0, series.t_max)
    return series.values[:, : t0 + 1] @ quadrature_weights(t0, rule)


def entropy_area(entropy: EntropySeries, t0: int, rule: str = "riemann") -> float:
    """Area under 1 - S_L(t) up to t0."""
    _check_window(t0, entropy.t_max)
    return float((1.0 - entropy.S_L[: t0 + 1]) @ quadrature_weights(t0, rule))


@dataclass(frozen=True)
class RelevanceReport:
    t0: int | None
    areas: np.ndarray = field(repr=False)
    entropy_area: float
    ranked: np.ndarray = field(repr=False)
    n_relevant: int
    fraction: float = DEFAULT_FRACTION
    labels: tuple | None = field(default=None, repr=False)

    @property
    def relevant(self) -> np.ndarray:
        return self.ranked[: self.n_relevant]

    @property
    def relevant_labels(self) -> list:
        if self.labels is None:
            return list(self.relevant)
        return [self.labels[i] for i in self.relevant]

    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.areas[self.ranked])

    def to_dict(self) -> dict:
        names = self.labels or range(len(self.areas))
        return {
            "t0": self.t0,
            "fraction": self.fraction,
            "entropy_area": self.entropy_area,
            "n_relevant": self.n_relevant,
            "basis_size": len(self.areas),
            "cutoff": self.fraction * self.entropy_area,
            "ranked_labels": [str(names[i]) for i in self.ranked],
            "areas": {str(names[i]): float(self.areas[i]) for i in self.ranked},
        }


def rank_and_cut(
    areas,
    entropy_area: float,
    fraction: float = DEFAULT_FRACTION,
    labels=None,
    t0: int | None = None,
) -> RelevanceReport:
    """Sort by area (stable, descending) and keep the shortest prefix whose
    cumulative area reaches ``fraction * entropy_area``."""
    areas = np.asarray(areas, dtype=float)
    if entropy_area <= 0:
        raise DegenerateWindowError(f"entropy area {entropy_area!r} must be positive")
    if not 0 < fraction <= 1:
        raise ValueError("fraction must lie in (0, 1]")
    if areas.size and areas.min() < -1e-12:
        raise ValueError("areas must be nonnegative")
    ranked = np.argsort(-areas, kind="stable")
    cum = np.cumsum(areas[ranked])
    target = fraction * entropy_area * (1 - _CUT_RTOL)
    n = int(np.searchsorted(cum, target, side="left")) + 1
    if n > areas.size:
        n = int(np.count_nonzero(areas))
    return RelevanceReport(t0, areas, float(entropy_area), ranked, n, fraction, labels)


def relevance_report(
    series: OtocSeries,
    entropy: EntropySeries,
    t0: int,
    fraction: float = DEFAULT_FRACTION,
    rule: str = "riemann",
) -> RelevanceReport:
    return rank_and_cut(
        otoc_areas(series, t0, rule),
        entropy_area(entropy, t0, rule),
        fraction,
        series.labels,
        t0,
    )


def counts_vs_t0(
    scenario: Scenario,
    basis: OperatorBasis,
    t0_list,
    fraction: float = DEFAULT_FRACTION,
    rule: str = "riemann",
    series: tuple[OtocSeries, EntropySeries] | None = None,
) -> list[tuple[int, int]]:
    t0_list = [int(t) for t in t0_list]
    if t0_list and max(t0_list) > scenario.t_max:
        raise ValueError(f"t0 = {max(t0_list)} exceeds t_max = {scenario.t_max}")
    otocs, entropy = series or otoc_re_series(scenario, basis)
    return [(t0, relevance_report(otocs, entropy, t0, fraction, rule).n_relevant) for t0 in t0_list]


@dataclass(frozen=True)
class FootprintMap:
    """Relevant labels placed in phase space as (position, momentum) pairs."""

    kind: str
    points: np.ndarray = field(repr=False)  # (n, 2)
    ranks: np.ndarray = field(repr=False)
    period: float = 1.0
    direction: np.ndarray | None = None
    origin: tuple[float, float] | None = None

    @property
    def has_overlay(self) -> bool:
        return self.direction is not None


def _inverse_of_two(N: int) -> int:
    return (N + 1) // 2


def label_coordinates(basis: OperatorBasis, indices=None, remap_odd: bool = False):
    """(position, momentum) of the chosen labels and the coordinate period.

    Chords map to (s/N, r/N); centres to (b/N, a/N) on the quarter torus, or
    for odd N with ``remap_odd`` to the integer grid via 2c = 2b mod N.
    """
    N = basis.space.N
    idx = range(len(basis)) if indices is None else indices
    labels = [basis.labels[i] for i in idx]
    if basis.kind == "translation":
        pts = [(l.s / N, l.r / N) for l in labels]
        period = 1.0
    elif basis.kind == "reflection":
        if remap_odd and N % 2:
            inv2 = _inverse_of_two(N)
            pts = [((l.b2 * inv2 % N) / N, (l.a2 * inv2 % N) / N) for l in labels]
            period = 1.0
        else:
            pts = [(l.b2 / (2 * N), l.a2 / (2 * N)) for l in labels]
            period = 0.5
    elif basis.kind == "kirkwood":
        pts = [(l.i / N, l.j / N) for l in labels]
        period = 1.0
    else:
        raise ValueError(f"{basis.kind} labels carry no phase-space coordinates")
    return np.array(pts, dtype=float).reshape(-1, 2), period


def footprint(
    report: RelevanceReport,
    basis: OperatorBasis,
    overlay_map: maps.CatMapSpec | None = None,
    remap_odd: bool = False,
) -> FootprintMap:
    pts, period = label_coordinates(basis, report.relevant, remap_odd)
    direction = origin = None
    if overlay_map is not None and basis.kind != "kirkwood":
        try:
            direction = maps.unstable_direction(overlay_map.M)
        except NotHyperbolicError as exc:
            warnings.warn(f"overlay omitted: {exc}", stacklevel=2)
        else:
            origin = (0.0, 0.0) if basis.kind == "translation" else (0.5, 0.5)
    ranks = np.arange(1, len(pts) + 1)
    return FootprintMap(basis.kind, pts, ranks, period, direction, origin)


def wrap(d, period: float = 1.0):
    """Minimal-image displacement in [-period/2, period/2)."""
    return (np.asarray(d) + period / 2) % period - period / 2


def line_distances(points, direction, origin=(0.0, 0.0), period: float = 1.0) -> np.ndarray:
    """Perpendicular distance to the line through ``origin``, minimal image."""
    d = wrap(np.asarray(points) - np.asarray(origin), period)
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    return np.abs(d[:, 0] * u[1] - d[:, 1] * u[0])


def point_distances(points, centre, period: float = 1.0) -> np.ndarray:
    d = wrap(np.asarray(points) - np.asarray(centre), period)
    return np.hypot(d[:, 0], d[:, 1])


def alignment_statistic(
    report: RelevanceReport, basis: OperatorBasis, M=maps.HYPERBOLIC
) -> tuple[float, float]:
    """Median distance to the unstable line: (relevant set, whole basis)."""
    direction = maps.unstable_direction(M)
    rel, period = label_coordinates(basis, report.relevant)
    full, _ = label_coordinates(basis)
    origin = (0.0, 0.0) if basis.kind == "translation" else (0.5, 0.5)
    return (
        float(np.median(line_distances(rel, direction, origin, period))),
        float(np.median(line_distances(full, direction, origin, period))),
    )
