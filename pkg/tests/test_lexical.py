import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darkscan.classifier.base import SUM_TOLERANCE
from darkscan.classifier.lexical import (Lexicon, LexicalBackend,
                                         default_lexicon, lexical_classify,
                                         load_lexicon, save_lexicon)
from darkscan.taxonomy import Category, DARK_CATEGORIES, canonical_order


def single_pattern_lexicon(category=Category.SCARCITY,
                           pattern="only * left", weight=3.0):
    patterns = {c: (("zzzznever", 1.0),) for c in DARK_CATEGORIES}
    patterns[category] = ((pattern, weight),)
    return Lexicon(patterns=patterns, bias=1.0, temperature=0.5)


def test_wildcard_pattern_scores_scarcity_argmax():
    lex = single_pattern_lexicon()
    dist = lexical_classify("only 2 left in stock", lex)
    assert max(dist.probs, key=dist.probs.get) is Category.SCARCITY
    # hand check: scores are (3 for Scarcity, 1 bias for NotDark, 0 rest)
    scores = lex.score("only 2 left in stock")
    assert scores[canonical_order().index(Category.SCARCITY)] == 3.0
    assert scores[canonical_order().index(Category.NOT_DARK_PATTERN)] == 1.0


def test_no_pattern_fires_benign_wins_on_bias():
    dist = lexical_classify("hello world", default_lexicon())
    assert max(dist.probs, key=dist.probs.get) is Category.NOT_DARK_PATTERN


def test_empty_text_is_benign():
    dist = lexical_classify("", default_lexicon())
    assert max(dist.probs, key=dist.probs.get) is Category.NOT_DARK_PATTERN


def test_matching_is_case_insensitive():
    lex = single_pattern_lexicon(pattern="hurry", weight=2.0,
                                 category=Category.URGENCY)
    low = lexical_classify("hurry now", lex)
    up = lexical_classify("HURRY NOW", lex)
    assert np.allclose(low.as_vector(), up.as_vector())


def test_single_bare_word_respects_word_boundaries():
    lex = single_pattern_lexicon(pattern="hurry", weight=2.0,
                                 category=Category.URGENCY)
    # "churry" must not match the single-word pattern
    scores = lex.score("churry up")
    assert scores[canonical_order().index(Category.URGENCY)] == 0.0
    assert lex.score("hurry up")[canonical_order().index(Category.URGENCY)] == 2.0


def test_each_pattern_counts_once_even_if_repeated():
    lex = single_pattern_lexicon(pattern="hurry", weight=2.0,
                                 category=Category.URGENCY)
    once = lex.score("hurry")[canonical_order().index(Category.URGENCY)]
    twice = lex.score("hurry and hurry")[canonical_order().index(Category.URGENCY)]
    assert once == 2.0
    assert twice == 2.0  # presence scoring, not occurrence counting


def test_more_evidence_never_lowers_category_probability():
    lex = default_lexicon()
    base = lexical_classify("limited time offer", lex)[Category.URGENCY]
    more = lexical_classify("limited time offer, act now", lex)[Category.URGENCY]
    assert more >= base


# The four statement walkthroughs the classifier must reproduce by argmax.
WALKTHROUGHS = [
    ("Hurry! Only 2 left in stock", Category.SCARCITY, True),
    ("me and my friends are going to buy shoes which are 20% off",
     Category.NOT_DARK_PATTERN, False),
    ("sdjbfksbdfgbkldsglkdflgf subscribe now or regret the offer of 20% "
     "djkbfksjbglsbdfsdbfksdbfgkjsbdkgbskdbfsdbfsd",
     Category.MISDIRECTION, True),
    ("My name is Jin Kazama and I am in Pune, get 30% off on this bottle "
     "but you'll have to sign up first or you'll miss it, let's go have "
     "camping together",
     Category.MISDIRECTION, True),
]


@pytest.mark.parametrize("text,expected,flagged", WALKTHROUGHS)
def test_statement_walkthroughs(text, expected, flagged):
    dist = lexical_classify(text, default_lexicon())
    assert max(dist.probs, key=dist.probs.get) is expected
    if flagged:
        assert dist[expected] >= 0.5


def test_lexicon_requires_every_dark_category():
    patterns = {c: (("x y z", 1.0),) for c in DARK_CATEGORIES}
    del patterns[Category.SNEAKING]
    with pytest.raises(ValueError):
        Lexicon(patterns=patterns)


def test_lexicon_rejects_non_positive_weight():
    patterns = {c: (("x y z", 1.0),) for c in DARK_CATEGORIES}
    patterns[Category.URGENCY] = (("act now", 0.0),)
    with pytest.raises(ValueError):
        Lexicon(patterns=patterns)


def test_lexicon_file_round_trip(tmp_path):
    lex = default_lexicon()
    path = tmp_path / "lexicon.json"
    save_lexicon(lex, path)
    again = load_lexicon(path)
    assert again.bias == lex.bias
    assert again.temperature == lex.temperature
    for c in DARK_CATEGORIES:
        assert again.patterns[c] == lex.patterns[c]
    a = lexical_classify("Hurry! Only 2 left in stock", lex).as_vector()
    b = lexical_classify("Hurry! Only 2 left in stock", again).as_vector()
    assert np.array_equal(a, b)


def test_backend_contract_batch_order_and_length():
    backend = LexicalBackend()
    texts = ["Hurry! Only 2 left in stock", "hello world", ""]
    out = backend.classify_batch(texts)
    assert len(out) == len(texts)
    assert max(out[0].probs, key=out[0].probs.get) is Category.SCARCITY
    assert max(out[1].probs, key=out[1].probs.get) is Category.NOT_DARK_PATTERN


@settings(max_examples=100, deadline=None)
@given(st.text(max_size=200))
def test_lexical_output_is_always_normalized(text):
    vec = lexical_classify(text, default_lexicon()).as_vector()
    assert abs(float(vec.sum()) - 1.0) <= SUM_TOLERANCE
    assert np.all(vec >= 0)
