"""Best-clause-run baseline for paraphrase discovery.

The long sentence is split into clauses at punctuation; every contiguous
run of clauses is embedded and compared with the short sentence; the most
similar run wins. Ties go to the run with fewer tokens, then to the
earlier start. Runs are contiguous only: non-contiguous clause subsets are
ungrammatical and blow up the search space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..embed import SentenceEncoder, cosine

#: Clause delimiters: comma, semicolon, colon, em dash, period.
CLAUSE_DELIMS = ",;:—."


def split_clauses(text: str) -> list[str]:
    """Split at delimiter characters, keeping each delimiter attached to
    its clause; clauses with no word characters are dropped."""
    clauses: list[str] = []
    current: list[str] = []
    for ch in text:
        current.append(ch)
        if ch in CLAUSE_DELIMS:
            clauses.append("".join(current).strip())
            current = []
    tail = "".join(current).strip()
    if tail:
        clauses.append(tail)
    return [c for c in clauses if any(ch not in CLAUSE_DELIMS and not ch.isspace() for ch in c)]


@dataclass(frozen=True)
class ClauseRun:
    text: str
    start_clause: int
    end_clause: int
    num_clauses: int
    similarity: float

    @property
    def is_full_sentence(self) -> bool:
        return self.start_clause == 0 and self.end_clause == self.num_clauses - 1


def select_best_clause_run(short: str, long: str, encoder: SentenceEncoder) -> ClauseRun:
    clauses = split_clauses(long)
    if not clauses:
        return ClauseRun(long, 0, 0, 1, float("nan"))
    k = len(clauses)

    runs: list[tuple[int, int, str]] = []
    for i in range(k):
        for j in range(i, k):
            runs.append((i, j, " ".join(clauses[i : j + 1])))

    vectors = encoder.encode([short] + [text for _, _, text in runs])
    short_vec = np.asarray(vectors[0], dtype=np.float64)

    best: ClauseRun | None = None
    for (i, j, text), vec in zip(runs, vectors[1:]):
        sim = cosine(short_vec, np.asarray(vec, dtype=np.float64))
        tokens = len(text.split())
        if best is None:
            best = ClauseRun(text, i, j, k, sim)
            continue
        best_tokens = len(best.text.split())
        if sim > best.similarity or (
            sim == best.similarity
            and (tokens < best_tokens or (tokens == best_tokens and i < best.start_clause))
        ):
            best = ClauseRun(text, i, j, k, sim)
    return best


def best_clause_baseline(short: str, long: str, encoder: SentenceEncoder) -> str:
    """Text of the contiguous clause run most similar to the short sentence."""
    return select_best_clause_run(short, long, encoder).text
