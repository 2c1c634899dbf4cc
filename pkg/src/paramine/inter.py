"""Channels 3 and 4: definition sentences aggregated by term, and citation
sentences aggregated by cited paper, each gated by embedding similarity.

Definition patterns are regular expressions with a named ``term`` capture,
loadable from a JSON-lines file ({"pattern_id": ..., "pattern": ...}) and
extensible; the built-in library covers the common "X is the task of",
"X is defined as", "X refers to" shapes. Terms are normalized by lowering,
stripping leading articles and a trailing parenthesized abbreviation.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import CitationEdge, Corpus, Sentence
from .embed import (
    EmbedConfig,
    EmbeddingCache,
    SentenceEncoder,
    build_sentence_encoder,
    embed_batch,
    pairwise_above_threshold,
)
from .pairs import CandidatePair, Channel, dedup_by_text, make_pair

_TERM = r"(?P<term>[^,;:]{3,60}?)"

DEFAULT_DEFINITION_PATTERNS: list[tuple[str, str]] = [
    ("task-of", rf"^{_TERM} is the task of "),
    ("a-task-of", rf"^{_TERM} is a task of "),
    ("defined-as", rf"^{_TERM} is defined as "),
    ("refers-to", rf"^{_TERM} refers to "),
    ("known-as", rf"^the process of .{{3,}}, is known as {_TERM}[.!?]?$"),
    ("we-define", rf"we define {_TERM} as "),
]

_ARTICLE_RE = re.compile(r"^(?:the|a|an)\s+")
_ABBREV_RE = re.compile(r"\s*\(([^()]{1,12})\)\s*$")


class PatternError(Exception):
    pass


@dataclass(frozen=True)
class DefinitionRecord:
    term: str
    abbreviation: str | None
    sentence: Sentence
    subject_area: str
    pattern_id: str


@dataclass(frozen=True)
class CitationGroup:
    cited_paper_id: str
    members: tuple[Sentence, ...]


def compile_patterns(
    patterns: Sequence[tuple[str, str]] | None = None,
) -> list[tuple[str, re.Pattern]]:
    source = patterns if patterns is not None else DEFAULT_DEFINITION_PATTERNS
    compiled = []
    for pattern_id, expr in source:
        try:
            regex = re.compile(expr)
        except re.error as exc:
            raise PatternError(f"pattern {pattern_id!r} does not compile: {exc}") from exc
        if "term" not in regex.groupindex:
            raise PatternError(f"pattern {pattern_id!r} lacks a named 'term' capture")
        compiled.append((pattern_id, regex))
    return compiled


def load_patterns(path: str | Path) -> list[tuple[str, str]]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                out.append((str(rec["pattern_id"]), str(rec["pattern"])))
    return out


def normalize_term(raw: str) -> tuple[str, str | None]:
    """Lowercase, strip leading article and trailing parenthesized
    abbreviation; returns (term, abbreviation)."""
    term = raw.strip().lower()
    term = _ARTICLE_RE.sub("", term)
    abbrev = None
    m = _ABBREV_RE.search(term)
    if m:
        abbrev = m.group(1)
        term = term[: m.start()].strip()
    return term.strip(), abbrev


def extract_definitions(
    corpus: Corpus,
    patterns: Sequence[tuple[str, str]] | None = None,
) -> list[DefinitionRecord]:
    """One record per (sentence, matched term); the term text occurs
    verbatim in the sentence."""
    compiled = compile_patterns(patterns)
    records: list[DefinitionRecord] = []
    for sentence in corpus.sentences:
        for pattern_id, regex in compiled:
            m = regex.search(sentence.text)
            if not m:
                continue
            term, abbrev = normalize_term(m.group("term"))
            if not term or term not in sentence.text:
                continue
            records.append(
                DefinitionRecord(
                    term=term,
                    abbreviation=abbrev,
                    sentence=sentence,
                    subject_area=corpus.subject_area(sentence.paper_id),
                    pattern_id=pattern_id,
                )
            )
    return records


def _gated_pairs(
    sentences: list[Sentence],
    channel: Channel,
    cfg: EmbedConfig,
    threshold: float,
    cache: EmbeddingCache | None,
    encoder: SentenceEncoder,
) -> list[CandidatePair]:
    """Cross-paper pairs within one group passing the cosine gate."""
    sentences = [s for s in sentences if s.pairing_eligible]
    if len(sentences) < 2:
        return []
    vectors = embed_batch(sentences, cfg, cache=cache, encoder=encoder)
    by_id = {s.sentence_id: s for s in sentences}
    hits = pairwise_above_threshold(vectors, vectors, threshold)
    pairs = []
    seen: set[tuple[str, str]] = set()
    for id_a, id_b, sim in hits:
        if id_a >= id_b:  # the self product reports both orders; keep one
            continue
        sent_a, sent_b = by_id[id_a], by_id[id_b]
        if sent_a.paper_id == sent_b.paper_id:
            continue
        if sent_a.text == sent_b.text:
            continue
        key = (min(id_a, id_b), max(id_a, id_b))
        if key in seen:
            continue
        seen.add(key)
        pairs.append(make_pair(sent_a, sent_b, channel, sim))
    return pairs


def pair_definitions(
    records: Sequence[DefinitionRecord],
    cfg: EmbedConfig,
    cache: EmbeddingCache | None = None,
    threshold: float | None = None,
) -> list[CandidatePair]:
    """Within-(term, subject) cross-paper pairs above the cosine gate."""
    if not records:
        return []
    encoder = build_sentence_encoder(cfg)
    tau = cfg.similarity_threshold if threshold is None else threshold
    groups: dict[tuple[str, str], list[Sentence]] = {}
    for rec in records:
        groups.setdefault((rec.term, rec.subject_area), []).append(rec.sentence)
    pairs: list[CandidatePair] = []
    for key in sorted(groups):
        members = groups[key]
        if len(members) < 2:
            continue
        pairs.extend(_gated_pairs(members, Channel.DEFINITION, cfg, tau, cache, encoder))
    return dedup_by_text(pairs)


def build_citation_groups(
    edges: Sequence[CitationEdge],
    max_group_size: int = 200,
    seed: int = 0,
) -> list[CitationGroup]:
    """One group per cited paper having citing sentences from at least two
    distinct citing papers. Oversized groups are deterministically sampled
    down to max_group_size members."""
    by_cited: dict[str, list[Sentence]] = {}
    for edge in edges:
        by_cited.setdefault(edge.cited_paper_id, []).append(edge.citing_sentence)
    groups = []
    for cited_id in sorted(by_cited):
        members = by_cited[cited_id]
        if len({m.paper_id for m in members}) < 2:
            continue
        if len(members) > max_group_size:
            rng = random.Random(f"{seed}:{cited_id}")
            members = sorted(rng.sample(members, max_group_size), key=lambda s: s.sentence_id)
        groups.append(CitationGroup(cited_id, tuple(members)))
    return groups


def pair_citations(
    groups: Sequence[CitationGroup],
    cfg: EmbedConfig,
    cache: EmbeddingCache | None = None,
    threshold: float | None = None,
) -> list[CandidatePair]:
    """Cross-citing-paper pairs within each group above the cosine gate;
    two sentences from the same citing paper are never paired."""
    if not groups:
        return []
    encoder = build_sentence_encoder(cfg)
    tau = cfg.similarity_threshold if threshold is None else threshold
    pairs: list[CandidatePair] = []
    for group in groups:
        pairs.extend(
            _gated_pairs(list(group.members), Channel.CITATION, cfg, tau, cache, encoder)
        )
    return dedup_by_text(pairs)
