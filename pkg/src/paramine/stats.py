"""Dataset statistics and exports: Self-BLEU, length means, splits, and
phenomenon-occurrence reporting.

Self-BLEU is 4-gram BLEU between the two sides of each pair (side A as
hypothesis, side B as the single reference), scaled to [0, 100]. The
default is corpus-level BLEU (clipped counts aggregated before the
precisions); a mean-of-sentence-level mode is available since either
reading is defensible. Tokenization is whitespace on normalized text and
no smoothing is applied at corpus level.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

TextPair = tuple[str, str]

PHENOMENON_CATEGORIES = ["Synonym", "Voice", "Word-Form", "Break", "Definition", "Structure"]


class StatsError(Exception):
    pass


@dataclass(frozen=True)
class DatasetStats:
    pair_count: int
    mean_word_len: float
    mean_char_len: float
    self_bleu: float


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _pair_counts(hyp: Sequence[str], ref: Sequence[str], max_order: int):
    """Clipped n-gram matches and hypothesis n-gram totals per order."""
    matches = [0] * max_order
    totals = [0] * max_order
    for n in range(1, max_order + 1):
        hyp_grams = _ngrams(hyp, n)
        if not hyp_grams:
            continue
        ref_grams = _ngrams(ref, n)
        totals[n - 1] = sum(hyp_grams.values())
        matches[n - 1] = sum(min(count, ref_grams[g]) for g, count in hyp_grams.items())
    return matches, totals


def _bleu_from_counts(matches, totals, hyp_len: int, ref_len: int, max_order: int) -> float:
    if hyp_len == 0:
        return 0.0
    log_sum = 0.0
    for n in range(max_order):
        if totals[n] == 0 or matches[n] == 0:
            return 0.0
        log_sum += math.log(matches[n] / totals[n])
    precision_term = math.exp(log_sum / max_order)
    brevity = 1.0 if hyp_len > ref_len else math.exp(1.0 - ref_len / hyp_len)
    return 100.0 * brevity * precision_term


def self_bleu(pairs: Sequence[TextPair], mode: str = "corpus", max_order: int = 4) -> float:
    """BLEU between the sides of each pair on a 0-100 scale."""
    if not pairs:
        raise StatsError("no pairs")
    if mode not in ("corpus", "sentence"):
        raise StatsError(f"unknown self-BLEU mode: {mode}")

    if mode == "sentence":
        scores = []
        for a, b in pairs:
            hyp, ref = a.split(), b.split()
            matches, totals = _pair_counts(hyp, ref, max_order)
            scores.append(_bleu_from_counts(matches, totals, len(hyp), len(ref), max_order))
        return sum(scores) / len(scores)

    agg_matches = [0] * max_order
    agg_totals = [0] * max_order
    hyp_len = ref_len = 0
    for a, b in pairs:
        hyp, ref = a.split(), b.split()
        matches, totals = _pair_counts(hyp, ref, max_order)
        for n in range(max_order):
            agg_matches[n] += matches[n]
            agg_totals[n] += totals[n]
        hyp_len += len(hyp)
        ref_len += len(ref)
    return _bleu_from_counts(agg_matches, agg_totals, hyp_len, ref_len, max_order)


def length_stats(pairs: Sequence[TextPair], bleu_mode: str = "corpus") -> DatasetStats:
    """Means over both sides of all pairs (2n sentences)."""
    if not pairs:
        raise StatsError("no pairs")
    words = 0
    chars = 0
    for a, b in pairs:
        words += len(a.split()) + len(b.split())
        chars += len(a) + len(b)
    n_sentences = 2 * len(pairs)
    return DatasetStats(
        pair_count=len(pairs),
        mean_word_len=words / n_sentences,
        mean_char_len=chars / n_sentences,
        self_bleu=self_bleu(pairs, mode=bleu_mode),
    )


def split_dataset(
    pairs: Sequence, ratios: Sequence[float], seed: int
) -> dict[str, list]:
    """Disjoint, exhaustive train/valid/test split, deterministic under the
    seed. Validation and test sizes are floor-allocated; the remainder goes
    to train."""
    if len(ratios) != 3:
        raise StatsError("ratios must be (train, valid, test)")
    if any(r < 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise StatsError(f"ratios must be non-negative and sum to 1: {ratios}")
    items = list(pairs)
    random.Random(seed).shuffle(items)
    n = len(items)
    n_valid = int(n * ratios[1])
    n_test = int(n * ratios[2])
    valid = items[:n_valid]
    test = items[n_valid : n_valid + n_test]
    train = items[n_valid + n_test :]
    return {"train": train, "valid": valid, "test": test}


def phenomenon_report(
    labelled: Sequence[Mapping[str, float]],
    categories: Sequence[str] = tuple(PHENOMENON_CATEGORIES),
) -> dict[str, float]:
    """Mean occurrences per category over labelled pairs."""
    if not labelled:
        raise StatsError("no labelled pairs")
    return {
        cat: sum(float(counts.get(cat, 0)) for counts in labelled) / len(labelled)
        for cat in categories
    }


def format_stats_table(rows: Mapping[str, DatasetStats]) -> str:
    header = f"{'Name':<16}{'Pairs':>10}{'Len':>10}{'Char Len':>12}{'Self-BLEU':>12}"
    lines = [header, "-" * len(header)]
    for name, s in rows.items():
        lines.append(
            f"{name:<16}{s.pair_count:>10d}{s.mean_word_len:>10.2f}"
            f"{s.mean_char_len:>12.2f}{s.self_bleu:>12.2f}"
        )
    return "\n".join(lines)


def format_phenomenon_table(rows: Mapping[str, Mapping[str, float]]) -> str:
    short = {"Synonym": "Syn", "Voice": "Voice", "Word-Form": "Form",
             "Break": "Break", "Definition": "Def", "Structure": "Struct"}
    header = f"{'Name':<16}" + "".join(f"{short[c]:>8}" for c in PHENOMENON_CATEGORIES)
    lines = [header, "-" * len(header)]
    for name, means in rows.items():
        lines.append(
            f"{name:<16}" + "".join(f"{means.get(c, 0.0):>8.2f}" for c in PHENOMENON_CATEGORIES)
        )
    return "\n".join(lines)
