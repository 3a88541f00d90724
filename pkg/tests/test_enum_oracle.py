from fractions import Fraction as Q

import pytest

from hullstats import enum_oracle as eo
from hullstats.gf_engine import F_series


def test_dyck_words_counted_by_catalan():
    for N in range(1, 8):
        words = list(eo.dyck_words(N))
        assert len(words) == eo.catalan(N)
        assert len(set(words)) == len(words)


def test_rooted_counts():
    assert [eo.rooted_quadrangulation_count(N) for N in range(1, 5)] == [2, 9, 54, 378]


def test_size_one_census():
    c = eo.census(1)
    assert c.total == 3
    assert c.counts_by_k == {1: 2, 2: 1}


@pytest.mark.parametrize("N", range(1, 7))
def test_census_matches_series_for_every_distance(N):
    counts = eo.census(N).counts_by_k
    assert sum(counts.values()) == eo.catalan(N) * 3**N
    for k in range(1, max(counts) + 3):
        assert counts.get(k, 0) == F_series(k, N + 1)[N]


def test_encoding_round_trip():
    c = eo.census(3)
    for idx in (0, 5, c.total - 1):
        word, inc = c.encoding(idx)
        assert c.index_of(word, inc) == idx


@pytest.mark.parametrize("k,d", [(3, 2), (4, 2), (4, 3), (5, 3)])
def test_hull_census_matches_generating_function(k, d):
    assert eo.compare_with_series(k, d, 6) == []


def test_maximal_prescription_differs_somewhere():
    diffs = [eo.compare_with_series(k, d, 6, "maximal") for k, d in ((4, 2), (5, 2), (5, 3))]
    assert any(diffs)


def test_hull_census_domain():
    with pytest.raises(ValueError):
        eo.hull_census(3, 2, 1)


def test_size_budget():
    with pytest.raises(ValueError):
        eo.enumerate_maps(eo.MAX_N + 1)
    with pytest.raises(ValueError):
        eo.enumerate_maps(2, prescription="minimal")


def test_exact_k_distribution_sums_to_one():
    dist = eo.exact_k_distribution(4)
    assert sum(dist.values()) == 1
    assert all(isinstance(v, Q) for v in dist.values())


def test_census_csv_header():
    text = eo.census_csv(2)
    assert text.splitlines()[0] == "N,k,d,V,L,count"
