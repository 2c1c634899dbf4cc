"""Running span discovery over below-threshold pairs, and the method
comparison harness (speed / valuable extractions / quality)."""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, replace
from typing import Callable, Sequence

from ..corpus import Sentence
from ..embed import EmbedConfig, SentenceEncoder, build_sentence_encoder, cosine
from ..intra import RejectedPair
from ..pairs import CandidatePair, Channel, dedup_by_text, make_pair
from .baseline import select_best_clause_run
from .model import RejectionReason, TrainedSpanModel, predict_span


class DiscoveryError(Exception):
    pass


def _span_sentence(long_sentence: Sentence, span_text: str, lo: int, hi: int) -> Sentence:
    return Sentence(
        sentence_id=f"{long_sentence.sentence_id}@{lo}-{hi}",
        paper_id=long_sentence.paper_id,
        section=long_sentence.section,
        index_in_section=long_sentence.index_in_section,
        text=span_text,
        token_count=len(span_text.split()),
        char_count=len(span_text),
    )


def discover_partial(
    rejected: Sequence[RejectedPair],
    model: TrainedSpanModel,
    embed_cfg: EmbedConfig,
    encoder: SentenceEncoder | None = None,
) -> tuple[list[CandidatePair], Counter]:
    """Extract (short sentence, span of long sentence) candidates from
    pairs that failed the whole-sentence similarity gate.

    Returns the accepted candidates (channel PDBERT_PARTIAL) plus a counter
    of rejections per reason; pairs at or above the gate never enter."""
    if encoder is None and rejected:
        encoder = build_sentence_encoder(embed_cfg)
    counts: Counter = Counter()
    pairs: list[CandidatePair] = []
    for item in rejected:
        if item.similarity > embed_cfg.similarity_threshold:
            counts["routed_out"] += 1
            continue
        short, long = item.sent_a, item.sent_b
        if short.token_count > long.token_count:
            short, long = long, short
        result = predict_span(model, short.text, long.text)
        if not result.accepted:
            counts[result.rejection_reason.value] += 1
            continue
        lo, hi = result.span_token_range
        span_sent = _span_sentence(long, result.extracted_span_text, lo, hi)
        vecs = encoder.encode([short.text, span_sent.text])
        sim = max(0.0, cosine(vecs[0], vecs[1]))
        pair = make_pair(short, span_sent, Channel.PDBERT_PARTIAL, sim)
        if pair.sent_a.text == pair.sent_b.text:
            counts["identical_text"] += 1
            continue
        pairs.append(pair)
        counts["accepted"] += 1
    return dedup_by_text(pairs), counts


@dataclass(frozen=True)
class MethodReport:
    method: str
    speed_pairs_per_min: float
    size_valuable: int
    size_after_quality_gate: int
    mean_quality: float


Extractor = Callable[[str, str], "tuple[str | None, bool]"]
# returns (span text or None, valuable) where valuable excludes
# full-sentence extractions


def model_extractor(model: TrainedSpanModel) -> Extractor:
    def run(short: str, long: str) -> tuple[str | None, bool]:
        result = predict_span(model, short, long)
        if result.accepted:
            return result.extracted_span_text, True
        return None, False

    return run


def clause_extractor(encoder: SentenceEncoder, min_span_tokens: int = 4) -> Extractor:
    def run(short: str, long: str) -> tuple[str | None, bool]:
        selection = select_best_clause_run(short, long, encoder)
        if selection.is_full_sentence:
            return None, False
        if len(selection.text.split()) < min_span_tokens:
            return None, False
        return selection.text, True

    return run


def evaluate_discovery(
    methods: dict[str, Extractor],
    eval_pairs: Sequence[tuple[str, str]],
    quality_scorer: Callable[[str, str], float],
    quality_gate: float = 0.7,
    plr_gate: float = 1.0,
) -> list[MethodReport]:
    """Run each method over the same (short, long) pairs; report processing
    speed, valuable-extraction counts before and after the general quality
    gate, and mean quality of valuable extractions."""
    if not eval_pairs:
        raise DiscoveryError("no evaluation pairs")
    reports = []
    for name, extract in methods.items():
        started = time.perf_counter()
        extractions: list[tuple[str, str]] = []
        for short, long in eval_pairs:
            span, valuable = extract(short, long)
            if span is not None and valuable:
                extractions.append((short, span))
        elapsed = time.perf_counter() - started
        if elapsed <= 0.0:
            raise DiscoveryError("zero elapsed time")
        qualities = [quality_scorer(short, span) for short, span in extractions]
        gated = 0
        for (short, span), quality in zip(extractions, qualities):
            len_a, len_b = len(short.split()), len(span.split())
            plr = abs(len_a - len_b) / min(len_a, len_b)
            if quality > quality_gate and plr < plr_gate:
                gated += 1
        reports.append(
            MethodReport(
                method=name,
                speed_pairs_per_min=len(eval_pairs) / (elapsed / 60.0),
                size_valuable=len(extractions),
                size_after_quality_gate=gated,
                mean_quality=sum(qualities) / len(qualities) if qualities else 0.0,
            )
        )
    return reports


def format_discovery_report(reports: Sequence[MethodReport]) -> str:
    header = f"{'Method':<16}{'Speed':>10}{'Size':>8}{'Size(gated)':>13}{'Quality':>10}"
    lines = [header, "-" * len(header)]
    for r in reports:
        lines.append(
            f"{r.method:<16}{r.speed_pairs_per_min:>10.2f}{r.size_valuable:>8d}"
            f"{r.size_after_quality_gate:>13d}{r.mean_quality * 100:>10.2f}"
        )
    return "\n".join(lines)
