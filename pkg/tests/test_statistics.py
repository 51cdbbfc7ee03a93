from __future__ import annotations

from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusgaps.errors import AmbiguousClustering, PairingViolation
from torusgaps.numerics import PrecisionConfig, Real
from torusgaps.sites import VectorSpec, generate_sites
from torusgaps.statistics import (
    certified_partitions,
    count_distinct_areas,
    gap_report,
    side_histogram,
    tolerance,
)
from torusgaps.voronoi import build_partition

TOL = tolerance(80, 120)


def _reals(*texts):
    return [Real.parse(t, 120) for t in texts]


def test_exact_duplicates():
    c = count_distinct_areas(_reals("0.1", "0.1", "0.2"), TOL)
    assert c.count == 2
    assert [cls.member_sites for cls in c.classes] == [(1, 2), (3,)]
    assert c.certified


def test_sub_tolerance_perturbation_merges():
    c = count_distinct_areas(_reals("0.1", "0.1" + "0" * 98 + "1", "0.2"), TOL)
    assert c.count == 2
    assert c.classes[0].member_sites == (1, 2)
    # far below the ambiguity band the merge is also certified
    c = count_distinct_areas(_reals("0.1", "0.1" + "0" * 108 + "1", "0.2"), TOL)
    assert c.count == 2 and c.certified


def test_gap_in_ambiguity_band_is_flagged():
    c = count_distinct_areas(_reals("0.1", "0.1" + "0" * 68 + "1", "0.2"), TOL)
    assert c.count == 3
    assert not c.certified
    assert "ambiguous" in c.diagnostic()


def test_spread_above_tenth_of_tolerance_is_ambiguous():
    areas = [Real.parse(f"0.1{'0' * 79}{k}", 120) for k in range(10)]
    with pytest.raises(AmbiguousClustering):
        count_distinct_areas(areas, TOL)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.integers(min_value=1, max_value=50), min_size=1, max_size=40),
    st.lists(st.integers(min_value=-(10**9), max_value=10**9), min_size=40, max_size=40),
)
def test_clustering_invariant_under_subtolerance_noise(levels, noise):
    base = [Real.parse(f"0.{lv:03d}", 120) for lv in levels]
    # noise up to tol * 1e-20 = 1e-100 in absolute value
    noisy = [a + Real.parse(f"{z}e-109", 120) for a, z in zip(base, noise)]
    c0 = count_distinct_areas(base, TOL)
    c1 = count_distinct_areas(noisy, TOL)
    assert c0.count == c1.count == len(set(levels))
    assert [k.member_sites for k in c0.classes] == [k.member_sites for k in c1.classes]


def test_n20_report():
    p = build_partition(generate_sites(VectorSpec.parse("sqrt(2),sqrt(3)"), 20))
    r = gap_report(p)
    assert r.S == 6
    assert r.M == {5: 6, 6: 8, 7: 6}
    assert r.certified
    assert sum(len(c.member_sites) for c in r.classes) == 20


@pytest.mark.parametrize(
    "vector, n, S, M",
    [
        ("sqrt(5),sqrt(6)", 80, 5, {4: 4, 6: 68, 7: 8}),
        ("cbrt(2),e", 50, 4, {5: 8, 6: 34, 7: 8}),
    ],
)
def test_published_reports(vector, n, S, M):
    s = generate_sites(VectorSpec.parse(vector), n)
    base, check = certified_partitions(s)
    r = gap_report(base, check=check)
    assert (r.S, r.M) == (S, M)
    assert r.certified and r.certified_digits >= 80


def test_side_histogram_single_cell():
    assert side_histogram(build_partition(generate_sites(VectorSpec.parse("e,pi"), 1))) == {4: 1}


def test_pairing_violation_detected():
    p = build_partition(generate_sites(VectorSpec.parse("sqrt(2),sqrt(3)"), 20))
    cells = list(p.cells)
    cells[0] = replace(cells[0], area=cells[0].area + Real.parse("1e-10", 120))
    with pytest.raises(PairingViolation):
        gap_report(replace(p, cells=tuple(cells)))


def test_escalation_disagreement_uncertifies():
    p = build_partition(generate_sites(VectorSpec.parse("sqrt(2),sqrt(3)"), 20))
    cells = list(p.cells)
    cells[4] = replace(cells[4], area=cells[4].area + Real.parse("1e-75", 120))
    r = gap_report(p, check=replace(p, cells=tuple(cells)))
    assert not r.certified
    assert r.certified_digits < 80
    assert any("stable under escalation" in d for d in r.diagnostics)


def test_tolerance_flag_changes_threshold():
    p = build_partition(generate_sites(VectorSpec.parse("sqrt(2),sqrt(3)"), 30))
    r = gap_report(p, tolerance_exponent=30)
    assert r.S == 6
    assert r.tolerance_exponent == 30
    # a tolerance that swallows real gaps leaves classes wider than tol/10
    with pytest.raises(AmbiguousClustering):
        gap_report(p, tolerance_exponent=2)


def test_report_json_shape():
    p = build_partition(generate_sites(VectorSpec.parse("sqrt(2),sqrt(3)"), 20))
    payload = gap_report(p, PrecisionConfig()).to_json()
    assert payload["S"] == 6 and payload["M"] == {"5": 6, "6": 8, "7": 6}
    area = payload["classes"][0]["area"]
    assert isinstance(area, str) and len(area.split(".")[1]) == 80
