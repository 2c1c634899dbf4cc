"""Data model and ingestion for sentence-segmented paper corpora.

Input files are UTF-8 JSON-lines:

  sentences: {"paper_id": ..., "section": ..., "index": ..., "text": ...}
             (optional "sentence_id"; derived from identity fields if absent)
  papers:    {"paper_id": ..., "title": ..., "subject_area": ..., "source": ...}
  citations: {"citing_paper_id": ..., "cited_paper_id": ..., "citing_sentence_id": ...}

Malformed sentence records are skipped and reported with their line number;
an unreadable file is fatal. Loaded collections are immutable afterward and
safe to share across threads.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

_WS_RE = re.compile(r"\s+")

DEFAULT_MIN_TOKENS = 4
DEFAULT_MAX_TOKENS = 120


class Section(str, Enum):
    ABSTRACT = "Abstract"
    INTRODUCTION = "Introduction"
    BACKGROUND = "Background"
    DISCUSSION = "Discussion"
    PREAMBLE = "Preamble"
    CONCLUSION = "Conclusion"
    OTHER = "Other"


#: Sections eligible for paraphrase pairing; Other never participates.
TARGET_SECTIONS = frozenset(s for s in Section if s is not Section.OTHER)

#: Case-insensitive raw-label aliases, extensible via config.
DEFAULT_SECTION_ALIASES: dict[str, Section] = {
    "abstract": Section.ABSTRACT,
    "introduction": Section.INTRODUCTION,
    "intro": Section.INTRODUCTION,
    "background": Section.BACKGROUND,
    "related work": Section.BACKGROUND,
    "related works": Section.BACKGROUND,
    "discussion": Section.DISCUSSION,
    "discussions": Section.DISCUSSION,
    "preamble": Section.PREAMBLE,
    "conclusion": Section.CONCLUSION,
    "conclusions": Section.CONCLUSION,
    "concluding remarks": Section.CONCLUSION,
}


class PaperSource(str, Enum):
    ACL = "ACL"
    ARXIV = "ARXIV"
    OTHER = "OTHER"


@dataclass(frozen=True)
class Sentence:
    sentence_id: str
    paper_id: str
    section: Section
    index_in_section: int
    text: str
    token_count: int
    char_count: int
    pairing_eligible: bool = True

    @property
    def tokens(self) -> list[str]:
        return self.text.split()


@dataclass(frozen=True)
class PaperMeta:
    paper_id: str
    title: str
    subject_area: str
    source: PaperSource


@dataclass(frozen=True)
class CitationEdge:
    citing_paper_id: str
    cited_paper_id: str
    citing_sentence: Sentence


@dataclass
class LoadReport:
    """Per-file ingestion outcome; loaded + skipped == input records."""

    loaded: int = 0
    skipped: int = 0
    errors: list[tuple[int, str]] = field(default_factory=list)

    def skip(self, line_no: int, reason: str) -> None:
        self.skipped += 1
        self.errors.append((line_no, reason))


class CorpusError(Exception):
    """Fatal ingestion problem (unreadable file, bad schema)."""


def normalize_sentence(raw: str) -> str:
    """Canonical sentence form: NFC, lowercased, single-spaced, stripped.

    Returns "" when raw has no non-whitespace characters; callers drop
    empties. normalize_sentence is a fixed point of itself.
    """
    text = unicodedata.normalize("NFC", raw)
    text = text.lower()
    text = unicodedata.normalize("NFC", text)
    return _WS_RE.sub(" ", text).strip()


def derive_sentence_id(paper_id: str, section: Section, index: int) -> str:
    return f"{paper_id}#{section.value}#{index}"


def resolve_section(label: str, aliases: dict[str, Section] | None = None) -> Section:
    table = DEFAULT_SECTION_ALIASES if aliases is None else aliases
    return table.get(label.strip().lower(), Section.OTHER)


def _iter_json_lines(path: str | Path):
    p = Path(path)
    try:
        raw = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read {p}: {exc}") from exc
    for line_no, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        yield line_no, line


@dataclass
class Corpus:
    """Immutable view over loaded sentences and paper metadata."""

    sentences: list[Sentence]
    papers: dict[str, PaperMeta]
    report: LoadReport

    def __post_init__(self) -> None:
        self._by_id = {s.sentence_id: s for s in self.sentences}
        self._by_paper: dict[str, list[Sentence]] = {}
        for s in self.sentences:
            self._by_paper.setdefault(s.paper_id, []).append(s)

    def sentence(self, sentence_id: str) -> Sentence | None:
        return self._by_id.get(sentence_id)

    def paper_sentences(self, paper_id: str) -> list[Sentence]:
        return self._by_paper.get(paper_id, [])

    def paper_ids(self) -> list[str]:
        return list(self._by_paper.keys())

    def subject_area(self, paper_id: str) -> str:
        meta = self.papers.get(paper_id)
        return meta.subject_area if meta else "unknown"


def load_corpus(
    path: str | Path,
    meta_path: str | Path | None = None,
    source: PaperSource = PaperSource.OTHER,
    section_aliases: dict[str, Section] | None = None,
    min_tokens: int = DEFAULT_MIN_TOKENS,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> Corpus:
    """Load sentence records (and optional paper metadata) into a Corpus.

    Every surviving record is normalized; unknown section labels map to
    Other; (paper_id, section, index) must be unique, the second occurrence
    is skipped with a reported error. Sentences outside [min_tokens,
    max_tokens] are kept but flagged ineligible for pairing. File order is
    preserved, so loading is idempotent.
    """
    report = LoadReport()
    sentences: list[Sentence] = []
    seen_keys: set[tuple[str, Section, int]] = set()

    for line_no, line in _iter_json_lines(path):
        try:
            rec = json.loads(line)
            paper_id = str(rec["paper_id"])
            section = resolve_section(str(rec["section"]), section_aliases)
            index = int(rec["index"])
            raw_text = str(rec["text"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            report.skip(line_no, f"malformed record: {exc}")
            continue
        if index < 0:
            report.skip(line_no, "negative index")
            continue
        text = normalize_sentence(raw_text)
        if not text:
            report.skip(line_no, "empty text after normalization")
            continue
        key = (paper_id, section, index)
        if key in seen_keys:
            report.skip(line_no, f"duplicate (paper_id, section, index): {key}")
            continue
        seen_keys.add(key)
        tokens = text.split()
        sid = str(rec.get("sentence_id") or derive_sentence_id(paper_id, section, index))
        sentences.append(
            Sentence(
                sentence_id=sid,
                paper_id=paper_id,
                section=section,
                index_in_section=index,
                text=text,
                token_count=len(tokens),
                char_count=len(text),
                pairing_eligible=min_tokens <= len(tokens) <= max_tokens,
            )
        )
        report.loaded += 1

    papers: dict[str, PaperMeta] = {}
    if meta_path is not None:
        papers = load_paper_meta(meta_path, default_source=source)
    return Corpus(sentences=sentences, papers=papers, report=report)


def load_paper_meta(
    path: str | Path, default_source: PaperSource = PaperSource.OTHER
) -> dict[str, PaperMeta]:
    papers: dict[str, PaperMeta] = {}
    for line_no, line in _iter_json_lines(path):
        try:
            rec = json.loads(line)
            paper_id = str(rec["paper_id"])
        except (json.JSONDecodeError, KeyError) as exc:
            raise CorpusError(f"{path}:{line_no}: bad metadata record: {exc}") from exc
        if paper_id in papers:
            raise CorpusError(f"{path}:{line_no}: duplicate paper_id {paper_id!r}")
        try:
            src = PaperSource(str(rec.get("source", default_source.value)).upper())
        except ValueError:
            src = PaperSource.OTHER
        papers[paper_id] = PaperMeta(
            paper_id=paper_id,
            title=str(rec.get("title", "")),
            subject_area=str(rec.get("subject_area") or "unknown"),
            source=src,
        )
    return papers


def load_citation_edges(path: str | Path, corpus: Corpus) -> tuple[list[CitationEdge], LoadReport]:
    """Load citation edges, resolving citing sentences against the corpus.

    Self-citations and edges whose citing sentence is unknown or belongs to
    a different paper are skipped with a warning count.
    """
    report = LoadReport()
    edges: list[CitationEdge] = []
    for line_no, line in _iter_json_lines(path):
        try:
            rec = json.loads(line)
            citing = str(rec["citing_paper_id"])
            cited = str(rec["cited_paper_id"])
            sid = str(rec["citing_sentence_id"])
        except (json.JSONDecodeError, KeyError) as exc:
            report.skip(line_no, f"malformed edge: {exc}")
            continue
        if citing == cited:
            report.skip(line_no, f"self-citation: {citing}")
            continue
        sentence = corpus.sentence(sid)
        if sentence is None:
            report.skip(line_no, f"unknown sentence_id: {sid}")
            continue
        if sentence.paper_id != citing:
            report.skip(line_no, f"sentence {sid} does not belong to {citing}")
            continue
        edges.append(CitationEdge(citing, cited, sentence))
        report.loaded += 1
    return edges, report
