"""Rankings, strongest partners, groups, and pair explanations."""

from __future__ import annotations

import numpy as np
import pytest

from attrscale import (
    AttributeCatalog,
    AttrScaleError,
    DiagonalPairError,
    QueryRecord,
    UnknownAttributeError,
    build_usage_set,
    explain_pair,
    rank_pairs,
    run_pipeline,
    strongest_partner,
    suggest_groups,
)
from attrscale.analytics import AttributeGroup

import oracles


def bundle_of(*attr_sets, names):
    catalog = AttributeCatalog(tuple(names))
    records = [QueryRecord(id=f"q{i}", attrs=tuple(attrs)) for i, attrs in enumerate(attr_sets, start=1)]
    return run_pipeline(build_usage_set(records, catalog))


@pytest.fixture(scope="module")
def grouping_bundle():
    # {p,q} x4, {p,r} x4, {q,r} x4, {p,s}: q,r are a perfect tie (both SD 0)
    sets = [("p", "q")] * 4 + [("p", "r")] * 4 + [("q", "r")] * 4 + [("p", "s")]
    return bundle_of(*sets, names=("p", "q", "r", "s"))


def test_rank_min_matches_full_scan(reference_bundle):
    names = reference_bundle.attributes
    nnsm = [[reference_bundle.nnsm.cell(h, k) for k in range(len(names))] for h in range(len(names))]
    expected = oracles.oracle_rank_min(nnsm, names)
    ranking = rank_pairs(reference_bundle, "nnsm-min")
    assert [(e.nnsm, e.a, e.b) for e in ranking.entries] == expected
    assert ranking.warnings == ()


def test_rank_min_scores_each_pair_once(reference_bundle):
    ranking = rank_pairs(reference_bundle, "nnsm-min")
    pairs = [frozenset((e.a, e.b)) for e in ranking.entries]
    assert len(pairs) == len(set(pairs)) == 44  # 45 pairs minus the zero-count one
    assert [e.nnsm for e in ranking.entries] == sorted(e.nnsm for e in ranking.entries)


def test_rank_row_lists_directed_cells(reference_bundle):
    ranking = rank_pairs(reference_bundle, "nnsm-row")
    assert len(ranking.entries) == int(reference_bundle.nnsm.defined.sum())
    for e in ranking.entries[:5]:
        h = reference_bundle.attributes.index(e.a)
        k = reference_bundle.attributes.index(e.b)
        assert e.nnsm == reference_bundle.nnsm.cell(h, k)
        assert e.nsm == reference_bundle.nsm.cell(h, k)
        assert e.adm == int(reference_bundle.adm.counts[h, k])


def test_rank_rejects_unknown_key(reference_bundle):
    with pytest.raises(AttrScaleError, match="ranking key"):
        rank_pairs(reference_bundle, "adm-max")


def test_empty_ranking_carries_warning():
    bundle = bundle_of(("a",), ("b",), names=("a", "b"))
    ranking = rank_pairs(bundle, "nnsm-min")
    assert ranking.entries == ()
    assert ranking.warnings and ranking.warnings[0]["code"] == "empty_ranking"


def test_strongest_partner_tracks_row_minimum(reference_bundle):
    for name in reference_bundle.attributes:
        partner, value = strongest_partner(reference_bundle, name)
        h = reference_bundle.attributes.index(name)
        row = reference_bundle.nnsm.values[h]
        defined = reference_bundle.nnsm.defined[h]
        assert value == float(row[defined].min())
        assert reference_bundle.nnsm.cell(h, reference_bundle.attributes.index(partner)) == value


def test_strongest_partner_matches_row_ranking_head(reference_bundle):
    ranking = rank_pairs(reference_bundle, "nnsm-row")
    first = ranking.entries[0]
    assert strongest_partner(reference_bundle, first.a) == (first.b, first.nnsm)


def test_strongest_partner_errors():
    bundle = bundle_of(("a",), ("b",), names=("a", "b"))
    with pytest.raises(AttrScaleError, match="isolated"):
        strongest_partner(bundle, "a")
    with pytest.raises(UnknownAttributeError):
        strongest_partner(bundle, "zz")


def test_strongest_partner_is_case_insensitive(reference_bundle):
    assert strongest_partner(reference_bundle, "A1") == strongest_partner(reference_bundle, "a1")


def test_explain_pair_reference_values(reference_bundle):
    info = explain_pair(reference_bundle, "a1", "a2")
    assert info.co_occurring_queries == ("q1", "q7", "q8")
    assert info.adm == 3
    assert (info.total_measure_a, info.total_measure_b) == (26, 23)
    assert info.pdm_ab == pytest.approx(3 / 26)
    assert info.pdm_ba == pytest.approx(3 / 23)
    assert info.nsm == reference_bundle.nsm.cell(0, 1)
    assert info.nnsm_ab == reference_bundle.nnsm.cell(0, 1)
    assert info.nnsm_ba == reference_bundle.nnsm.cell(1, 0)


def test_explain_pair_zero_count_pair():
    bundle = bundle_of(("a", "b"), ("b", "c"), names=("a", "b", "c"))
    info = explain_pair(bundle, "a", "c")
    assert info.co_occurring_queries == ()
    assert info.adm == 0
    assert info.nsm is None and info.nnsm_ab is None


def test_explain_pair_errors(reference_bundle):
    with pytest.raises(DiagonalPairError):
        explain_pair(reference_bundle, "a1", "A1")
    with pytest.raises(UnknownAttributeError):
        explain_pair(reference_bundle, "a1", "zz")


def test_suggest_groups_zero_cutoff_finds_the_exact_tie(reference_bundle):
    # a1 and a3 share identical co-occurrence count multisets, so their SDs
    # coincide exactly and their mutual scale value is 0
    groups = suggest_groups(reference_bundle, cutoff=0.0, max_size=4)
    assert [(g.attributes, g.cohesion) for g in groups] == [(("a1", "a3"), 0.0)]


def test_suggest_groups_growth_respects_cutoff(grouping_bundle):
    tight = suggest_groups(grouping_bundle, cutoff=3.0, max_size=3)
    assert [(g.attributes, g.cohesion) for g in tight] == [(("q", "r"), 0.0)]
    grown = suggest_groups(grouping_bundle, cutoff=5.0, max_size=3)
    assert [g.attributes for g in grown] == [("p", "q", "r")]
    assert grown[0].cohesion == pytest.approx(25 / 6)


def test_suggest_groups_max_size_bounds_growth(grouping_bundle):
    groups = suggest_groups(grouping_bundle, cutoff=5.0, max_size=2)
    assert [g.attributes for g in groups] == [("q", "r")]


def test_suggest_groups_is_deterministic(grouping_bundle):
    assert suggest_groups(grouping_bundle, 5.0, 3) == suggest_groups(grouping_bundle, 5.0, 3)


def test_suggest_groups_validation(reference_bundle):
    with pytest.raises(AttrScaleError, match="cutoff"):
        suggest_groups(reference_bundle, cutoff=11.0, max_size=3)
    with pytest.raises(AttrScaleError, match="max_size"):
        suggest_groups(reference_bundle, cutoff=5.0, max_size=1)


def test_group_needs_two_members():
    with pytest.raises(AttrScaleError, match="at least 2"):
        AttributeGroup(attributes=("solo",), cohesion=0.0)


def test_groups_partition_members(reference_bundle):
    groups = suggest_groups(reference_bundle, cutoff=10.0, max_size=3)
    seen: set[str] = set()
    for group in groups:
        assert len(group.attributes) <= 3
        assert not (seen & set(group.attributes))
        seen.update(group.attributes)
        internal = [
            reference_bundle.nnsm.cell(
                reference_bundle.attributes.index(a), reference_bundle.attributes.index(b)
            )
            for a in group.attributes
            for b in group.attributes
            if a != b
        ]
        cells = [v for v in internal if v is not None]
        assert group.cohesion == pytest.approx(float(np.mean(cells)))
