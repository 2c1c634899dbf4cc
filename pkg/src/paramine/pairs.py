"""Candidate paraphrase pairs shared by every extraction channel."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable

from .corpus import Section, Sentence


class Channel(str, Enum):
    INTRA_SECTION_SIM = "INTRA_SECTION_SIM"
    PDBERT_PARTIAL = "PDBERT_PARTIAL"
    DEFINITION = "DEFINITION"
    CITATION = "CITATION"


def pair_content_id(text_a: str, text_b: str) -> str:
    payload = text_a.encode("utf-8") + b"\x00" + text_b.encode("utf-8")
    return hashlib.sha256(payload).hexdigest()[:24]


@dataclass(frozen=True)
class CandidatePair:
    """Two sentences plus channel and scores, canonically oriented so that
    sent_a.text <= sent_b.text lexicographically."""

    pair_id: str
    sent_a: Sentence
    sent_b: Sentence
    channel: Channel
    similarity: float
    channels: frozenset[Channel] = field(default_factory=frozenset)
    quality_score: float | None = None
    plr: float | None = None
    kept: bool = False
    drop_reason: str | None = None

    def __post_init__(self) -> None:
        if self.sent_a.text > self.sent_b.text:
            raise ValueError("pair not canonically oriented")
        if not self.channels:
            object.__setattr__(self, "channels", frozenset({self.channel}))


def make_pair(
    sent_a: Sentence, sent_b: Sentence, channel: Channel, similarity: float
) -> CandidatePair:
    if sent_a.text > sent_b.text:
        sent_a, sent_b = sent_b, sent_a
    return CandidatePair(
        pair_id=pair_content_id(sent_a.text, sent_b.text),
        sent_a=sent_a,
        sent_b=sent_b,
        channel=channel,
        similarity=similarity,
    )


def dedup_by_text(pairs: Iterable[CandidatePair]) -> list[CandidatePair]:
    """One pair per canonical text pair, keeping the highest similarity;
    output sorted by pair_id for run-to-run stability."""
    best: dict[str, CandidatePair] = {}
    for pair in pairs:
        current = best.get(pair.pair_id)
        if current is None or pair.similarity > current.similarity:
            merged_channels = pair.channels | (current.channels if current else frozenset())
            best[pair.pair_id] = replace(pair, channels=merged_channels)
        else:
            best[pair.pair_id] = replace(
                current, channels=current.channels | pair.channels
            )
    return sorted(best.values(), key=lambda p: p.pair_id)


def _sentence_to_record(s: Sentence) -> dict:
    return {
        "sentence_id": s.sentence_id,
        "paper_id": s.paper_id,
        "section": s.section.value,
        "index": s.index_in_section,
        "text": s.text,
    }


def _sentence_from_record(rec: dict) -> Sentence:
    text = rec["text"]
    return Sentence(
        sentence_id=rec["sentence_id"],
        paper_id=rec["paper_id"],
        section=Section(rec["section"]),
        index_in_section=int(rec["index"]),
        text=text,
        token_count=len(text.split()),
        char_count=len(text),
    )


def pair_to_record(pair: CandidatePair) -> dict:
    return {
        "pair_id": pair.pair_id,
        "channel": pair.channel.value,
        "channels": sorted(c.value for c in pair.channels),
        "sent_a": _sentence_to_record(pair.sent_a),
        "sent_b": _sentence_to_record(pair.sent_b),
        "similarity": pair.similarity,
        "quality_score": pair.quality_score,
        "plr": pair.plr,
        "kept": pair.kept,
        "drop_reason": pair.drop_reason,
    }


def pair_from_record(rec: dict) -> CandidatePair:
    return CandidatePair(
        pair_id=rec["pair_id"],
        sent_a=_sentence_from_record(rec["sent_a"]),
        sent_b=_sentence_from_record(rec["sent_b"]),
        channel=Channel(rec["channel"]),
        channels=frozenset(Channel(c) for c in rec.get("channels", [rec["channel"]])),
        similarity=float(rec["similarity"]),
        quality_score=rec.get("quality_score"),
        plr=rec.get("plr"),
        kept=bool(rec.get("kept", False)),
        drop_reason=rec.get("drop_reason"),
    )


def write_pairs(path: str | Path, pairs: Iterable[CandidatePair]) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(json.dumps(pair_to_record(pair), sort_keys=True) + "\n")
            n += 1
    return n


def read_pairs(path: str | Path) -> list[CandidatePair]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(pair_from_record(json.loads(line)))
    return out
