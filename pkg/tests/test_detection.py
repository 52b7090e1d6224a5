import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darkscan.classifier.base import CategoryDistribution, softmax
from darkscan.detection import (AggregationMode, DetectionResult, SiteReport,
                                ThresholdConfig, aggregate, compare_sites,
                                detect, flag, load_thresholds,
                                predict_category, save_thresholds)
from darkscan.errors import DarkScanError, EmptySite, ModeMismatch
from darkscan.ingest import TextSegment
from darkscan.taxonomy import Category, DARK_CATEGORIES, canonical_order

# Distribution dominated by Scarcity (fractions sum to 1).
SCARCITY_HEAVY = CategoryDistribution.from_vector(
    [0.0015, 0.0040, 0.0094, 0.0006, 0.9809, 0.0007, 0.0004, 0.0025])
# Benign-leaning distribution with mass spread across categories.
BENIGN_MIXED = CategoryDistribution.from_vector(
    [0.0521, 0.0020, 0.5421, 0.0051, 0.0449, 0.0172, 0.3151, 0.0215])


def seg(i=0, text="segment text", url="http://s.test/p"):
    return TextSegment(segment_id=f"s{i}", text=text, dom_path="body > p",
                       order_index=i, page_url=url)


def dist_for(category, p=0.9):
    rest = (1.0 - p) / 7
    return CategoryDistribution(
        {c: (p if c is category else rest) for c in canonical_order()})


def results_for(categories, url="http://s.test/p"):
    config = ThresholdConfig.uniform()
    return [detect(seg(i, url=url), dist_for(c), config)
            for i, c in enumerate(categories)]


# ---------------------------------------------------------------- thresholds

def test_threshold_defaults_to_half():
    config = ThresholdConfig()
    for c in DARK_CATEGORIES:
        assert config[c] == 0.5


def test_threshold_rejects_out_of_range():
    with pytest.raises(ValueError):
        ThresholdConfig({Category.SCARCITY: 1.5})


def test_threshold_rejects_benign_category():
    with pytest.raises(ValueError):
        ThresholdConfig({Category.NOT_DARK_PATTERN: 0.5})


def test_threshold_file_round_trip(tmp_path):
    config = ThresholdConfig({Category.SCARCITY: 0.8, Category.URGENCY: 0.3})
    path = tmp_path / "thresholds.json"
    save_thresholds(config, path)
    again = load_thresholds(path)
    assert again[Category.SCARCITY] == 0.8
    assert again[Category.URGENCY] == 0.3
    assert again[Category.SNEAKING] == 0.5  # saved default, still default


def test_threshold_file_missing_keys_use_default(tmp_path):
    path = tmp_path / "t.json"
    path.write_text('{"Scarcity": 0.9}', encoding="utf-8")
    config = load_thresholds(path)
    assert config[Category.SCARCITY] == 0.9
    assert config[Category.URGENCY] == 0.5


# ---------------------------------------------------------------- prediction

def test_table5_predicts_scarcity():
    assert predict_category(SCARCITY_HEAVY) is Category.SCARCITY


def test_table4_predicts_benign():
    assert predict_category(BENIGN_MIXED) is Category.NOT_DARK_PATTERN


def test_uniform_tie_breaks_to_first_canonical():
    assert predict_category(CategoryDistribution.uniform()) is \
        Category.FORCED_ACTION


def test_argmax_invariant_under_temperature_sweep():
    scores = [0.3, -1.2, 2.0, 0.0, 0.5, -0.7, 1.1, 0.2]
    winners = {predict_category(softmax(scores, temperature=t))
               for t in (0.1, 0.5, 1.0, 2.0, 10.0)}
    assert winners == {Category.NOT_DARK_PATTERN}


# ------------------------------------------------------------------ flagging

def test_table5_flags_scarcity_at_default():
    assert flag(SCARCITY_HEAVY, ThresholdConfig.uniform()) == {Category.SCARCITY}


def test_table4_flags_nothing_at_default():
    assert flag(BENIGN_MIXED, ThresholdConfig.uniform()) == set()


def test_zero_thresholds_flag_all_dark_categories():
    assert flag(BENIGN_MIXED, ThresholdConfig.uniform(0.0)) == set(DARK_CATEGORIES)


def test_benign_never_flagged_even_at_zero():
    flags = flag(dist_for(Category.NOT_DARK_PATTERN, 0.99),
                 ThresholdConfig.uniform(0.0))
    assert Category.NOT_DARK_PATTERN not in flags


def test_detect_bundles_prediction_and_flags():
    result = detect(seg(), SCARCITY_HEAVY, ThresholdConfig.uniform())
    assert result.predicted is Category.SCARCITY
    assert result.flagged_categories == frozenset({Category.SCARCITY})
    assert result.is_flagged


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=8, max_size=8),
       st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_threshold_monotonicity(scores, t_low, t_high):
    t_low, t_high = min(t_low, t_high), max(t_low, t_high)
    dist = softmax(scores)
    low = flag(dist, ThresholdConfig.uniform(t_low))
    high = flag(dist, ThresholdConfig.uniform(t_high))
    assert high <= low  # raising thresholds never adds a flag


# --------------------------------------------------------------- aggregation

def test_aggregate_counts_fractions():
    cats = [Category.NOT_DARK_PATTERN] * 3 + [Category.SCARCITY]
    report = aggregate(results_for(cats))
    assert report.n_segments == 4
    assert report.category_fractions[Category.NOT_DARK_PATTERN] == 0.75
    assert report.category_fractions[Category.SCARCITY] == 0.25
    for c in canonical_order():
        if c not in (Category.NOT_DARK_PATTERN, Category.SCARCITY):
            assert report.category_fractions[c] == 0.0


def test_aggregate_single_result_gets_fraction_one():
    report = aggregate(results_for([Category.URGENCY]))
    assert report.category_fractions[Category.URGENCY] == 1.0


def test_aggregate_mean_is_elementwise_average():
    config = ThresholdConfig.uniform()
    r1 = detect(seg(0), BENIGN_MIXED, config)
    r2 = detect(seg(1), SCARCITY_HEAVY, config)
    report = aggregate([r1, r2], mode=AggregationMode.MEAN_PROBABILITY)
    expected = (BENIGN_MIXED.as_vector() + SCARCITY_HEAVY.as_vector()) / 2
    got = np.array([report.mean_probabilities[c] for c in canonical_order()])
    assert np.allclose(got, expected, atol=1e-12)
    assert float(got.sum()) == pytest.approx(1.0, abs=1e-9)


def test_aggregate_headline_follows_mode():
    results = results_for([Category.SCARCITY, Category.NOT_DARK_PATTERN])
    argmax = aggregate(results, mode=AggregationMode.ARGMAX_FRACTION)
    mean = aggregate(results, mode=AggregationMode.MEAN_PROBABILITY)
    assert argmax.headline == argmax.category_fractions
    assert mean.headline == mean.mean_probabilities


def test_aggregate_collects_flags_and_pages():
    results = (results_for([Category.SCARCITY], url="http://s.test/a")
               + results_for([Category.NOT_DARK_PATTERN],
                             url="http://s.test/b"))
    report = aggregate(results, site_id="shop")
    assert report.site_id == "shop"
    assert report.page_urls == ("http://s.test/a", "http://s.test/b")
    assert len(report.flagged) == 1
    assert report.flagged[0].predicted is Category.SCARCITY


def test_aggregate_empty_is_error():
    with pytest.raises(EmptySite):
        aggregate([])


def test_aggregate_permutation_invariant_up_to_flag_order():
    cats = [Category.SCARCITY, Category.URGENCY, Category.NOT_DARK_PATTERN,
            Category.SCARCITY]
    fwd = aggregate(results_for(cats))
    rev = aggregate(list(reversed(results_for(cats))))
    assert fwd.category_fractions == rev.category_fractions
    assert {r.segment.segment_id for r in fwd.flagged} == \
        {r.segment.segment_id for r in rev.flagged}


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from(canonical_order()), min_size=1, max_size=100))
def test_aggregate_matches_brute_force_recount(categories):
    report = aggregate(results_for(categories))
    n = len(categories)
    for c in canonical_order():
        assert report.category_fractions[c] == categories.count(c) / n
    total = sum(report.category_fractions.values())
    assert abs(total - 1.0) <= 1e-6


# ---------------------------------------------------------------- comparison

def make_report(site_id, ndp, scarcity, mode=AggregationMode.ARGMAX_FRACTION):
    rest = (1.0 - ndp - scarcity) / 6
    fractions = {c: rest for c in canonical_order()}
    fractions[Category.NOT_DARK_PATTERN] = ndp
    fractions[Category.SCARCITY] = scarcity
    return SiteReport(site_id=site_id, page_urls=(), n_segments=10,
                      category_fractions=fractions,
                      mean_probabilities=fractions, flagged=(),
                      aggregation_mode=mode)


def test_compare_ranks_by_benign_share():
    cmp = compare_sites([make_report("site2", 0.68, 0.02),
                         make_report("site1", 0.75, 0.2)])
    assert [r.site_id for r in cmp.ranked] == ["site1", "site2"]


def test_compare_dark_category_winner_is_lower():
    cmp = compare_sites([make_report("site1", 0.75, 0.2),
                         make_report("site2", 0.68, 0.02)])
    verdicts = {v.category: v for v in cmp.verdicts}
    assert verdicts[Category.SCARCITY].winner == "site2"
    assert verdicts[Category.NOT_DARK_PATTERN].winner == "site1"


def test_compare_identical_reports_tie_and_stable_order():
    cmp = compare_sites([make_report("a", 0.5, 0.1),
                         make_report("b", 0.5, 0.1)])
    assert [r.site_id for r in cmp.ranked] == ["a", "b"]  # stable sort
    assert all(v.winner == "tie" for v in cmp.verdicts)


def test_compare_three_sites():
    cmp = compare_sites([make_report("a", 0.3, 0.3),
                         make_report("b", 0.9, 0.02),
                         make_report("c", 0.6, 0.1)])
    assert [r.site_id for r in cmp.ranked] == ["b", "c", "a"]


def test_compare_requires_two_reports():
    with pytest.raises(DarkScanError):
        compare_sites([make_report("solo", 0.5, 0.1)])


def test_compare_rejects_mixed_modes():
    with pytest.raises(ModeMismatch):
        compare_sites([
            make_report("a", 0.5, 0.1),
            make_report("b", 0.5, 0.1, mode=AggregationMode.MEAN_PROBABILITY),
        ])
