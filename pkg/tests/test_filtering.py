import numpy as np
import pytest
from hypothesis import given, strategies as st

from paramine.corpus import Section, Sentence
from paramine.filtering import (
    FilterConfig,
    FilterError,
    HashingTokenEncoder,
    apply_filters,
    dedup,
    passes_gates,
    plr,
    token_match_score,
)
from paramine.pairs import Channel, make_pair


def sent(text, i=0, paper="P1", section=Section.ABSTRACT):
    return Sentence(f"{paper}-{section.value}-{i}", paper, section, i, text,
                    len(text.split()), len(text))


def pair(text_a, text_b, channel=Channel.CITATION, similarity=0.95):
    return make_pair(sent(text_a, 0), sent(text_b, 1, section=Section.CONCLUSION),
                     channel, similarity)


# --- plr ------------------------------------------------------------------

def test_plr_equal_lengths():
    assert plr(10, 10) == 0.0


def test_plr_direct_formula():
    assert plr(12, 30) == pytest.approx(1.5)


def test_plr_symmetry_example():
    assert plr(30, 12) == pytest.approx(1.5)


def test_plr_zero_length_errors():
    with pytest.raises(FilterError):
        plr(0, 5)


@given(st.integers(min_value=1, max_value=10_000), st.integers(min_value=1, max_value=10_000))
def test_plr_symmetric_property(a, b):
    assert plr(a, b) == plr(b, a)
    assert plr(a, b) >= 0.0


# --- token_match_score ------------------------------------------------------

class StubTokenEncoder:
    """Injects fixed per-token embeddings keyed by token string."""

    tag = "stub"

    def __init__(self, table):
        self.table = table

    def encode_tokens(self, text):
        tokens = text.split()
        return tokens, np.stack([np.asarray(self.table[t], dtype=np.float64) for t in tokens])


def test_token_match_identity():
    enc = HashingTokenEncoder("hash-ctx-v1-128")
    text = "the parser produces labelled dependency trees"
    assert token_match_score(text, text, enc) >= 0.999


def test_token_match_toy_oracle():
    # candidate "a c" vs reference "a b" with hand-set unit vectors:
    # cos(a,a)=1, cos(b,c)=0.8, cos(a,c)=0.6, cos(a,b)=0
    table = {"a": [1.0, 0.0], "b": [0.0, 1.0], "c": [0.6, 0.8]}
    enc = StubTokenEncoder(table)
    # oracle, computed directly from the greedy-match formula:
    # precision = mean(max cos per candidate token) = (1.0 + 0.8)/2 = 0.9
    # recall    = mean(max cos per reference token) = (1.0 + 0.8)/2 = 0.9
    # F1 = 2*0.9*0.9/(0.9+0.9) = 0.9
    got = token_match_score("a c", "a b", enc)
    assert got == pytest.approx(0.9, abs=1e-12)


def test_token_match_asymmetric_lengths_toy():
    table = {"a": [1.0, 0.0], "b": [0.0, 1.0]}
    enc = StubTokenEncoder(table)
    # candidate "a", reference "a b": precision = 1.0, recall = (1+0)/2 = 0.5
    # F1 = 2*1*0.5/1.5 = 2/3
    got = token_match_score("a", "a b", enc)
    assert got == pytest.approx(2.0 / 3.0, abs=1e-12)


def test_token_match_empty_errors():
    enc = HashingTokenEncoder("hash-ctx-v1-128")
    with pytest.raises(FilterError):
        token_match_score("text here", "", enc)
    with pytest.raises(FilterError):
        token_match_score("", "text here", enc)


def test_token_match_self_score_on_random_sentences():
    from paramine.minicorpus import TOPICS, make_sentence
    import random

    enc = HashingTokenEncoder("hash-ctx-v1-128")
    rng = random.Random(4)
    for _ in range(100):
        text = make_sentence(rng, TOPICS[rng.randrange(len(TOPICS))])
        assert token_match_score(text, text, enc) >= 0.999


# --- apply_filters ----------------------------------------------------------

class ConstantScorer:
    tag = "stub"

    def __init__(self, score):
        self.score = score

    def encode_tokens(self, text):
        raise AssertionError("not used")


def scored_pair(channel, score, rate):
    """Run apply_filters with a stub that produces exact score/plr values."""
    len_b = 100
    len_a = int(round(len_b * (1 + rate)))
    p = pair("w " * (len_a - 1) + "w", "v " * (len_b - 1) + "v", channel=channel)

    class Enc:
        tag = "stub"

        def encode_tokens(self, text):
            tokens = text.split()
            # identical constant vectors give sims == 1; scale one token to
            # fake the desired score is messy, so monkeypatch instead
            raise AssertionError

    import paramine.filtering as filtering

    original = filtering.token_match_score
    filtering.token_match_score = lambda c, r, e: score
    try:
        (result,) = apply_filters([p], FilterConfig(), encoder=Enc())
    finally:
        filtering.token_match_score = original
    return result


def test_definition_boundary_kept():
    result = scored_pair(Channel.DEFINITION, 0.65, 1.9)
    assert result.kept is True


def test_general_boundary_dropped():
    result = scored_pair(Channel.CITATION, 0.65, 0.5)
    assert result.kept is False


def test_exact_threshold_rejected():
    assert scored_pair(Channel.DEFINITION, 0.6, 1.0).kept is False
    assert scored_pair(Channel.CITATION, 0.7, 0.5).kept is False
    assert scored_pair(Channel.CITATION, 0.75, 1.0).kept is False


def test_general_pass():
    assert scored_pair(Channel.INTRA_SECTION_SIM, 0.75, 0.5).kept is True
    assert scored_pair(Channel.PDBERT_PARTIAL, 0.71, 0.99).kept is True


def test_filters_monotone_in_threshold():
    rates = [(0.62, 0.5), (0.71, 0.8), (0.85, 0.2), (0.69, 0.9)]
    results = {}
    for smin in (0.6, 0.7, 0.8):
        cfg = FilterConfig(general_score_min=smin)
        kept = set()
        for idx, (score, rate) in enumerate(rates):
            p = pair(f"one two three four five six seven eight nine ten",
                     f"uno dos tres quatro cinco seis siete ocho nueve diez")
            import paramine.filtering as filtering
            original = filtering.token_match_score
            filtering.token_match_score = lambda c, r, e, s=score: s
            try:
                (res,) = apply_filters([p], cfg, encoder=ConstantScorer(score))
            finally:
                filtering.token_match_score = original
            if res.kept:
                kept.add(idx)
        results[smin] = kept
    assert results[0.8] <= results[0.7] <= results[0.6]


def test_kept_matches_stored_predicate():
    cfg = FilterConfig()
    pairs = [
        pair("the quick brown fox jumps over the lazy dog today",
             "the quick brown fox leaps over the lazy dog today"),
        pair("alpha beta gamma delta epsilon zeta", "totally different words here now everyone"),
        pair("sentence compression is the task of producing shorter sentences",
             "sentence compression is a task of creating short sentences",
             channel=Channel.DEFINITION),
    ]
    scored = apply_filters(pairs, cfg)
    for p in scored:
        if p.drop_reason and p.drop_reason.startswith("scoring failed"):
            continue
        assert p.kept == passes_gates(p, cfg)


def test_scoring_failure_marks_dropped():
    class Broken:
        tag = "stub"

        def encode_tokens(self, text):
            raise FilterError("boom")

    (result,) = apply_filters([pair("some words here", "other words there")],
                              FilterConfig(), encoder=Broken())
    assert result.kept is False
    assert "scoring failed" in result.drop_reason


# --- dedup ------------------------------------------------------------------

def test_dedup_merges_channels():
    from dataclasses import replace

    a = replace(pair("alpha beta gamma", "alpha beta gamma delta",
                     channel=Channel.INTRA_SECTION_SIM), quality_score=0.8)
    b = replace(pair("alpha beta gamma", "alpha beta gamma delta",
                     channel=Channel.CITATION), quality_score=0.9)
    merged = dedup([a, b])
    assert len(merged) == 1
    assert merged[0].channels == {Channel.INTRA_SECTION_SIM, Channel.CITATION}
    assert merged[0].quality_score == 0.9


def test_dedup_identity_when_no_duplicates():
    a = pair("alpha beta gamma", "alpha beta gamma delta")
    b = pair("epsilon zeta eta", "epsilon zeta eta theta")
    assert {p.pair_id for p in dedup([a, b])} == {a.pair_id, b.pair_id}


def test_dedup_drops_identical_sentence_pairs():
    s1 = sent("identical text in both slots", 0)
    s2 = sent("identical text in both slots", 1, section=Section.CONCLUSION)
    p = make_pair(s1, s2, Channel.CITATION, 1.0)
    assert dedup([p]) == []


def test_filter_config_validation():
    with pytest.raises(ValueError):
        FilterConfig(general_score_min=1.2)
    with pytest.raises(ValueError):
        FilterConfig(definition_plr_max=0.0)
