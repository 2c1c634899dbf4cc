"""Fine-stage candidate filtering: token-matching quality score plus
paraphrase length rate, with per-channel thresholds.

The quality score is a greedy-matching F1 over contextual token
embeddings: recall is the mean over reference tokens of the maximum cosine
to any candidate token, precision is the symmetric quantity, and F1 their
harmonic mean. No idf weighting and no baseline rescaling. The default
token encoder is the deterministic hashed-feature one with neighbour
context mixing; any encoder implementing TokenEncoder can be injected
(tests use stubs, a transformers-backed encoder plugs in where local
weights exist).

Length rate: |len_a - len_b| / min(len_a, len_b) over whitespace token
counts. Definition-channel candidates pass with score > 0.6 and rate < 2;
every other channel needs score > 0.7 and rate < 1. All inequalities are
strict.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Protocol, Sequence

import numpy as np

from .embed import hashed_token_matrix
from .pairs import CandidatePair, Channel


class FilterError(Exception):
    pass


@dataclass
class FilterConfig:
    scorer_tag: str = "hash-ctx-v1-256"
    definition_score_min: float = 0.6
    definition_plr_max: float = 2.0
    general_score_min: float = 0.7
    general_plr_max: float = 1.0

    def __post_init__(self) -> None:
        for name in ("definition_score_min", "general_score_min"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} out of [0,1]")
        for name in ("definition_plr_max", "general_plr_max"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")


class TokenEncoder(Protocol):
    tag: str

    def encode_tokens(self, text: str) -> tuple[list[str], np.ndarray]: ...


class HashingTokenEncoder:
    """Per-token hashed-feature vectors with neighbour context mixing."""

    def __init__(self, tag: str = "hash-ctx-v1-256", context_mix: float = 0.3):
        self.tag = tag
        try:
            self.dim = int(tag.rsplit("-", 1)[1])
        except (IndexError, ValueError) as exc:
            raise FilterError(f"bad token encoder tag: {tag!r}") from exc
        self.context_mix = context_mix

    def encode_tokens(self, text: str) -> tuple[list[str], np.ndarray]:
        tokens = text.split()
        if not tokens:
            raise FilterError("empty sentence")
        return tokens, hashed_token_matrix(tokens, self.dim, context_mix=self.context_mix)


def build_token_encoder(cfg: FilterConfig) -> TokenEncoder:
    if cfg.scorer_tag.startswith("hash-ctx-"):
        return HashingTokenEncoder(cfg.scorer_tag)
    raise FilterError(f"unknown scorer tag: {cfg.scorer_tag!r}")


def plr(len_a: int, len_b: int) -> float:
    """Paraphrase length rate |len_a - len_b| / min(len_a, len_b)."""
    if len_a < 1 or len_b < 1:
        raise FilterError("empty sentence")
    return abs(len_a - len_b) / min(len_a, len_b)


def token_match_score(candidate: str, reference: str, encoder: TokenEncoder) -> float:
    """Greedy-matching F1 between candidate and reference token embeddings."""
    if not candidate.split() or not reference.split():
        raise FilterError("empty sentence")
    _, cand = encoder.encode_tokens(candidate)
    _, ref = encoder.encode_tokens(reference)

    cand_norms = np.linalg.norm(cand, axis=1, keepdims=True)
    ref_norms = np.linalg.norm(ref, axis=1, keepdims=True)
    if np.any(cand_norms == 0.0) or np.any(ref_norms == 0.0):
        raise FilterError("degenerate token embedding")
    sims = (cand / cand_norms) @ (ref / ref_norms).T

    precision = float(sims.max(axis=1).mean())
    recall = float(sims.max(axis=0).mean())
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def passes_gates(pair: CandidatePair, cfg: FilterConfig) -> bool:
    """Re-check the keep decision from the scores stored on the pair."""
    if pair.quality_score is None or pair.plr is None:
        return False
    if pair.channel == Channel.DEFINITION:
        return pair.quality_score > cfg.definition_score_min and pair.plr < cfg.definition_plr_max
    return pair.quality_score > cfg.general_score_min and pair.plr < cfg.general_plr_max


def apply_filters(
    candidates: Sequence[CandidatePair],
    cfg: FilterConfig,
    encoder: TokenEncoder | None = None,
) -> list[CandidatePair]:
    """Score each candidate and set its kept flag per the channel gates.

    Scoring failures mark the candidate kept=False with the reason stored;
    they never abort the batch.
    """
    if encoder is None:
        encoder = build_token_encoder(cfg)
    out: list[CandidatePair] = []
    for pair in candidates:
        try:
            score = token_match_score(pair.sent_a.text, pair.sent_b.text, encoder)
            rate = plr(pair.sent_a.token_count, pair.sent_b.token_count)
        except FilterError as exc:
            out.append(replace(pair, kept=False, drop_reason=f"scoring failed: {exc}"))
            continue
        scored = replace(pair, quality_score=score, plr=rate)
        kept = passes_gates(scored, cfg)
        out.append(replace(
            scored, kept=kept, drop_reason=None if kept else "below channel thresholds"
        ))
    return out


def dedup(candidates: Iterable[CandidatePair]) -> list[CandidatePair]:
    """One candidate per canonical text pair.

    Duplicates across channels keep the higher-quality record and merge the
    channel sets. Pairs whose two sides are identical text are dropped
    entirely. Output is sorted by pair_id.
    """
    best: dict[str, CandidatePair] = {}
    for pair in candidates:
        if pair.sent_a.text == pair.sent_b.text:
            continue
        current = best.get(pair.pair_id)
        if current is None:
            best[pair.pair_id] = pair
            continue
        merged = current.channels | pair.channels
        keep = pair if (pair.quality_score or 0.0) > (current.quality_score or 0.0) else current
        best[pair.pair_id] = replace(keep, channels=merged)
    return sorted(best.values(), key=lambda p: p.pair_id)
