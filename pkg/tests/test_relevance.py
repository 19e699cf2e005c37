import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from catotoc import maps
from catotoc.bases import make_basis, translation_basis
from catotoc.errors import DegenerateWindowError
from catotoc.otoc import EntropySeries, OtocSeries, make_scenario, otoc_re_series
from catotoc.torus import make_space
from catotoc.relevance import (
    alignment_statistic,
    counts_vs_t0,
    entropy_area,
    footprint,
    label_coordinates,
    line_distances,
    otoc_area,
    otoc_areas,
    point_distances,
    quadrature_weights,
    rank_and_cut,
    relevance_report,
    wrap,
)

area_arrays = arrays(
    np.float64,
    st.integers(1, 40),
    elements=st.floats(0, 1, allow_nan=False, allow_subnormal=False),
)


def series_of(values):
    values = np.atleast_2d(np.asarray(values, dtype=float))
    return OtocSeries(tuple(range(len(values))), values)


def test_constant_series_area():
    s = series_of(np.full((1, 21), 0.3))
    assert otoc_area(s, 0, 10) == pytest.approx(0.3 * 11)
    assert otoc_area(s, 0, 10, rule="trapezoid") == pytest.approx(0.3 * 10)
    assert otoc_area(series_of(np.zeros((1, 5))), 0, 4) == 0


def test_area_by_label_and_window_checks():
    s = OtocSeries(("a", "b"), np.array([[1.0, 2.0, 3.0], [0.0, 0.0, 1.0]]))
    assert otoc_area(s, "a", 2) == 6
    assert otoc_area(s, 1, 1) == 0
    with pytest.raises(ValueError):
        otoc_area(s, 0, 3)
    with pytest.raises(ValueError):
        quadrature_weights(3, "simpson")


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.integers(2, 30), elements=st.floats(0, 1, allow_nan=False)))
def test_area_monotone_in_t0(values):
    s = series_of(values)
    areas = [otoc_area(s, 0, t0) for t0 in range(len(values))]
    # exact in real arithmetic; allow reordering noise from the BLAS dot product
    assert np.all(np.diff(areas) >= -1e-12 * max(1.0, areas[-1]))


def test_entropy_area():
    zero = EntropySeries(np.zeros(11), np.zeros(11), np.ones(11))
    assert entropy_area(zero, 10) == 11


def test_entropy_area_matches_summed_otoc_areas():
    sc = make_scenario("HH", 16, t_max=20)
    series, ent = otoc_re_series(sc, translation_basis(sc.observed_space))
    for t0 in (0, 5, 20):
        for rule in ("riemann", "trapezoid"):
            assert otoc_areas(series, t0, rule).sum() == pytest.approx(entropy_area(ent, t0, rule), abs=1e-8)
    a = entropy_area(ent, 10)
    assert 1 < a < 11


def test_single_element_holds_everything():
    r = rank_and_cut([0, 0, 5.0, 0], 5.0)
    assert r.n_relevant == 1 and list(r.relevant) == [2]


@pytest.mark.parametrize("m, fraction", [(10, 0.8), (7, 0.8), (13, 0.5), (1, 0.8), (4096, 0.8)])
def test_uniform_areas(m, fraction):
    r = rank_and_cut(np.full(m, 1 / m), 1.0, fraction)
    assert r.n_relevant == math.ceil(fraction * m - 1e-9)


def test_fraction_one_counts_nonzero():
    areas = np.array([0.2, 0.0, 0.1, 0.3, 0.0, 0.4])
    assert rank_and_cut(areas, areas.sum(), 1.0).n_relevant == 4


def test_ties_keep_label_order():
    r = rank_and_cut([0.25, 0.5, 0.25, 0.25, 0.0], 1.0, 0.9)
    assert list(r.ranked) == [1, 0, 2, 3, 4]
    assert r.n_relevant == 3


def test_degenerate_and_bad_inputs():
    with pytest.raises(DegenerateWindowError):
        rank_and_cut([0.1], 0.0)
    with pytest.raises(ValueError):
        rank_and_cut([0.1], 1.0, fraction=0.0)
    with pytest.raises(ValueError):
        rank_and_cut([-0.5, 0.2], 1.0)


@settings(max_examples=200, deadline=None)
@given(area_arrays, st.floats(0.05, 0.95))
def test_cutoff_minimality(areas, fraction):
    total = areas.sum()
    if total <= 0:
        return
    r = rank_and_cut(areas, total, fraction)
    cum = r.cumulative()
    assert cum[r.n_relevant - 1] >= fraction * total * (1 - 1e-12)
    if r.n_relevant > 1:
        assert cum[r.n_relevant - 2] < fraction * total


@settings(max_examples=200, deadline=None)
@given(area_arrays, st.floats(0.05, 0.95), st.randoms(use_true_random=False))
def test_permutation_safety(areas, fraction, rnd):
    total = areas.sum()
    if total <= 0:
        return
    perm = list(range(len(areas)))
    rnd.shuffle(perm)
    a = rank_and_cut(areas, total, fraction)
    b = rank_and_cut(areas[perm], total, fraction)
    assert a.n_relevant == b.n_relevant
    # relevant sets agree up to elements tied with the last kept area
    edge = areas[a.relevant[-1]]
    sa = {i for i in a.relevant if areas[i] != edge}
    sb = {perm[i] for i in b.relevant if areas[perm[i]] != edge}
    assert sa == sb


def test_report_serializes():
    sc = make_scenario("HH", 8, t_max=6)
    series, ent = otoc_re_series(sc, translation_basis(sc.observed_space))
    r = relevance_report(series, ent, 5)
    d = r.to_dict()
    assert d["n_relevant"] == r.n_relevant and d["basis_size"] == 64
    assert d["ranked_labels"][0] == str(r.relevant_labels[0])
    assert sum(d["areas"].values()) == pytest.approx(r.entropy_area, abs=1e-8)


def test_counts_share_one_series():
    sc = make_scenario("HH", 16, t_max=10)
    basis = translation_basis(sc.observed_space)
    pre = otoc_re_series(sc, basis)
    rows = counts_vs_t0(sc, basis, [2, 5, 10], series=pre)
    assert [t for t, _ in rows] == [2, 5, 10]
    assert rows == counts_vs_t0(sc, basis, [2, 5, 10])
    with pytest.raises(ValueError):
        counts_vs_t0(sc, basis, [11], series=pre)


def test_label_coordinates():
    basis = make_basis("translation", make_space(8))
    pts, period = label_coordinates(basis, [0, 1, 8 + 3])
    np.testing.assert_allclose(pts, [[0, 0], [1 / 8, 0], [3 / 8, 1 / 8]])
    assert period == 1.0
    refl = make_basis("reflection", basis.space)
    pts, period = label_coordinates(refl, [1])
    np.testing.assert_allclose(pts, [[1 / 16, 0]])
    assert period == 0.5
    with pytest.raises(ValueError):
        label_coordinates(make_basis("pauli", basis.space))


def test_label_coordinates_odd_remap():
    refl = make_basis("reflection", make_space(9))
    pts, period = label_coordinates(refl, remap_odd=True)
    assert period == 1.0
    # every integer grid point is hit exactly once
    assert len({(round(p * 9), round(q * 9)) for p, q in pts}) == 81
    # b2 = 1 means 2b = 1 mod 9, i.e. b = 5/9
    i = refl.labels.index(next(l for l in refl.labels if (l.a2, l.b2) == (0, 1)))
    np.testing.assert_allclose(pts[i], [5 / 9, 0])


def test_wrap_and_distances():
    np.testing.assert_allclose(wrap([0.9, -0.6, 0.2]), [-0.1, 0.4, 0.2])
    d = line_distances([[0.5, 0.5], [0.9, 0.0]], (1, 0))
    np.testing.assert_allclose(d, [0.5, 0.0])
    np.testing.assert_allclose(point_distances([[0.95, 0.05]], (0, 0)), [math.hypot(0.05, 0.05)])


def test_footprint_overlay_and_warning():
    sc = make_scenario("HH", 16, t_max=6)
    basis = translation_basis(sc.observed_space)
    series, ent = otoc_re_series(sc, basis)
    r = relevance_report(series, ent, 5)
    fp = footprint(r, basis, maps.hyperbolic())
    assert fp.has_overlay and fp.origin == (0.0, 0.0)
    np.testing.assert_allclose(fp.direction, np.array([1, math.sqrt(3)]) / 2)
    assert len(fp.points) == r.n_relevant and list(fp.ranks) == list(range(1, r.n_relevant + 1))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        fp = footprint(r, basis, maps.elliptic())
    assert not fp.has_overlay and caught
    assert np.all((fp.points >= 0) & (fp.points < 1))


def test_he_chords_cluster_near_identity():
    sc = make_scenario("HE", 32, t_max=20)
    basis = translation_basis(sc.observed_space)
    series, ent = otoc_re_series(sc, basis)
    r = relevance_report(series, ent, 20)
    rel, _ = label_coordinates(basis, r.relevant)
    full, _ = label_coordinates(basis)
    assert np.median(point_distances(rel, (0, 0))) < 0.5 * np.median(point_distances(full, (0, 0)))


@pytest.mark.parametrize("N", [32, 33])
def test_ee_centres_cluster_at_middle(N):
    sc = make_scenario("EE-fixed", N, t_max=10)
    basis = make_basis("reflection", sc.observed_space)
    series, ent = otoc_re_series(sc, basis)
    r = relevance_report(series, ent, 10)
    # native centre coordinates have period 1/2, so (0.5, 0.5) is identified with the origin
    rel, period = label_coordinates(basis, r.relevant)
    full, _ = label_coordinates(basis)
    near = point_distances(rel, (0.5, 0.5), period)
    assert np.median(near) < 0.5 * np.median(point_distances(full, (0.5, 0.5), period))


def test_alignment_statistic_small_n():
    sc = make_scenario("HH", 32, t_max=10)
    basis = translation_basis(sc.observed_space)
    series, ent = otoc_re_series(sc, basis)
    rel, full = alignment_statistic(relevance_report(series, ent, 10), basis)
    assert rel < full
