import numpy as np
import pytest

from paramine.embed import HashingSentenceEncoder, cosine
from paramine.spanfind.baseline import (
    best_clause_baseline,
    select_best_clause_run,
    split_clauses,
)


class TableEncoder:
    """Fixed vectors per text; unknown texts get a far-away direction."""

    tag = "hash-v1-4"

    def __init__(self, table):
        self.table = table

    def encode(self, texts):
        return np.stack([
            np.asarray(self.table.get(t, [0.0, 0.0, 0.0, 1.0]), dtype=np.float64)
            for t in texts
        ])


def test_split_clauses_basic():
    assert split_clauses("alpha beta, gamma delta; epsilon.") == [
        "alpha beta,", "gamma delta;", "epsilon.",
    ]


def test_split_clauses_no_delimiters():
    assert split_clauses("no punctuation in here") == ["no punctuation in here"]


def test_split_clauses_drops_empty_pieces():
    assert split_clauses("alpha,, beta.") == ["alpha,", "beta."]


def test_single_clause_returns_whole_sentence():
    enc = HashingSentenceEncoder("hash-v1-64")
    assert best_clause_baseline("short query text here", "one clause only here", enc) == "one clause only here"


def test_verbatim_clause_wins_against_brute_force():
    short = "the model predicts spans"
    long = "we ran many tests, the model predicts spans, results were strong."
    enc = HashingSentenceEncoder("hash-v1-256")
    got = best_clause_baseline(short, long, enc)
    # oracle: brute force over all contiguous clause runs
    clauses = split_clauses(long)
    best, best_sim, best_tokens, best_start = None, -2.0, 0, 0
    short_vec = enc.encode([short])[0]
    for i in range(len(clauses)):
        for j in range(i, len(clauses)):
            text = " ".join(clauses[i : j + 1])
            sim = cosine(short_vec, enc.encode([text])[0])
            tokens = len(text.split())
            better = sim > best_sim or (
                sim == best_sim and (tokens < best_tokens or (tokens == best_tokens and i < best_start))
            )
            if better:
                best, best_sim, best_tokens, best_start = text, sim, tokens, i
    assert got == best
    assert "the model predicts spans," == got


def test_equal_similarity_prefers_shorter_run():
    # two runs with exactly equal similarity; the shorter must win
    table = {
        "query text": [1.0, 0.0, 0.0, 0.0],
        "aa bb,": [1.0, 1.0, 0.0, 0.0],
        "cc,": [1.0, 1.0, 0.0, 0.0],
        "aa bb, cc,": [0.0, 0.0, 1.0, 0.0],
        "dd ee ff.": [0.0, 0.0, 1.0, 0.0],
        "cc, dd ee ff.": [0.0, 0.0, 1.0, 0.0],
        "aa bb, cc, dd ee ff.": [0.0, 0.0, 1.0, 0.0],
    }
    enc = TableEncoder(table)
    got = best_clause_baseline("query text", "aa bb, cc, dd ee ff.", enc)
    assert got == "cc,"  # same similarity as "aa bb," but fewer tokens


def test_equal_similarity_and_length_prefers_earlier():
    table = {
        "query text": [1.0, 0.0, 0.0, 0.0],
        "aa bb,": [1.0, 1.0, 0.0, 0.0],
        "cc dd.": [1.0, 1.0, 0.0, 0.0],
        "aa bb, cc dd.": [0.0, 0.0, 1.0, 0.0],
    }
    enc = TableEncoder(table)
    assert best_clause_baseline("query text", "aa bb, cc dd.", enc) == "aa bb,"


def test_full_sentence_flag():
    enc = HashingSentenceEncoder("hash-v1-128")
    long = "identical matching text for both sides"
    run = select_best_clause_run("identical matching text for both sides", long, enc)
    assert run.is_full_sentence


@pytest.mark.parametrize("seed", range(6))
def test_random_inputs_match_brute_force(seed):
    rng = np.random.RandomState(seed)
    words = ["model", "span", "parser", "corpus", "metric", "graph", "test", "token"]
    enc = HashingSentenceEncoder("hash-v1-128")
    k = rng.randint(1, 7)
    clauses = []
    for _ in range(k):
        n = rng.randint(1, 5)
        delim = rng.choice(list(",;:."))
        clauses.append(" ".join(rng.choice(words, size=n)) + delim)
    long = " ".join(clauses)
    short = " ".join(rng.choice(words, size=rng.randint(2, 5)))

    got = best_clause_baseline(short, long, enc)

    pieces = split_clauses(long)
    short_vec = enc.encode([short])[0]
    best, best_sim, best_tokens, best_start = None, -2.0, 0, 0
    for i in range(len(pieces)):
        for j in range(i, len(pieces)):
            text = " ".join(pieces[i : j + 1])
            sim = cosine(short_vec, enc.encode([text])[0])
            tokens = len(text.split())
            if sim > best_sim or (
                sim == best_sim and (tokens < best_tokens or (tokens == best_tokens and i < best_start))
            ):
                best, best_sim, best_tokens, best_start = text, sim, tokens, i
    assert got == best
