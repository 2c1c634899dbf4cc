"""Channel 1: cross-section paraphrase candidates within a single paper.

Only the six target sections participate; same-section comparisons are
excluded because repeated information inside one section is rare, and
near-identical strings there (result tables, metric lines) are usually not
paraphrases. Pairs must clear the cosine threshold strictly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import Sentence, TARGET_SECTIONS
from .embed import (
    EmbedConfig,
    EmbeddingCache,
    SentenceEncoder,
    build_sentence_encoder,
    embed_batch,
    pairwise_above_threshold,
)
from .pairs import CandidatePair, Channel, dedup_by_text, make_pair


@dataclass
class RejectedPair:
    """Cross-section pair that failed the similarity gate; fodder for the
    partial-paraphrase discovery channel."""

    sent_a: Sentence
    sent_b: Sentence
    similarity: float


def eligible_sentences(sentences: Iterable[Sentence]) -> list[Sentence]:
    return [
        s for s in sentences
        if s.section in TARGET_SECTIONS and s.pairing_eligible
    ]


def extract_intra(
    paper_sentences: Sequence[Sentence],
    cfg: EmbedConfig,
    cache: EmbeddingCache | None = None,
    encoder: SentenceEncoder | None = None,
    collect_rejected: bool = False,
    rejected_floor: float = 0.0,
) -> tuple[list[CandidatePair], list[RejectedPair]]:
    """All cross-section pairs of one paper with cosine above the threshold.

    Character-identical sentence pairs are dropped (no paraphrase value).
    When collect_rejected is set, below-threshold pairs with similarity
    strictly above rejected_floor are returned too.
    """
    sentences = eligible_sentences(paper_sentences)
    papers = {s.paper_id for s in sentences}
    if len(papers) > 1:
        raise ValueError(f"sentences from multiple papers: {sorted(papers)}")
    if len(sentences) < 2:
        return [], []

    if encoder is None:
        encoder = build_sentence_encoder(cfg)
    vectors = embed_batch(sentences, cfg, cache=cache, encoder=encoder)
    by_id = {s.sentence_id: s for s in sentences}
    vec_by_section: dict = {}
    for sent, vec in zip(sentences, vectors):
        vec_by_section.setdefault(sent.section, []).append(vec)

    pairs: list[CandidatePair] = []
    rejected: list[RejectedPair] = []
    sections = sorted(vec_by_section, key=lambda s: s.value)
    floor = rejected_floor if collect_rejected else cfg.similarity_threshold
    for i, sec_a in enumerate(sections):
        for sec_b in sections[i + 1 :]:
            hits = pairwise_above_threshold(
                vec_by_section[sec_a], vec_by_section[sec_b], floor
            )
            for id_a, id_b, sim in hits:
                sent_a, sent_b = by_id[id_a], by_id[id_b]
                if sent_a.text == sent_b.text:
                    continue
                if sim > cfg.similarity_threshold:
                    pairs.append(make_pair(sent_a, sent_b, Channel.INTRA_SECTION_SIM, sim))
                elif collect_rejected:
                    rejected.append(RejectedPair(sent_a, sent_b, sim))
    return pairs, rejected


def extract_intra_corpus(
    papers: dict[str, Sequence[Sentence]],
    cfg: EmbedConfig,
    cache: EmbeddingCache | None = None,
    collect_rejected: bool = False,
    rejected_floor: float = 0.0,
) -> tuple[list[CandidatePair], list[RejectedPair]]:
    """Per-paper extraction over the corpus, deduped by canonical text pair
    and sorted by pair_id so output is independent of paper order."""
    if not papers:
        return [], []
    encoder = build_sentence_encoder(cfg)
    all_pairs: list[CandidatePair] = []
    all_rejected: list[RejectedPair] = []
    for paper_id in sorted(papers):
        pairs, rejected = extract_intra(
            papers[paper_id], cfg, cache=cache, encoder=encoder,
            collect_rejected=collect_rejected, rejected_floor=rejected_floor,
        )
        all_pairs.extend(pairs)
        all_rejected.extend(rejected)
    return dedup_by_text(all_pairs), all_rejected
