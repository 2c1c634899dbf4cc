import json

import pytest
from hypothesis import given, strategies as st

from paramine.corpus import (
    CorpusError,
    PaperSource,
    Section,
    load_citation_edges,
    load_corpus,
    load_paper_meta,
    normalize_sentence,
)


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


def test_normalize_basic():
    assert normalize_sentence("We  Used POS tags ") == "we used pos tags"


def test_normalize_empty():
    assert normalize_sentence("") == ""
    assert normalize_sentence("   \t\n") == ""


def test_normalize_keeps_parenthesized_abbreviations():
    assert (
        normalize_sentence("Word Sense Disambiguation (WSD)")
        == "word sense disambiguation (wsd)"
    )


@given(st.text(max_size=200))
def test_normalize_is_fixed_point(raw):
    once = normalize_sentence(raw)
    assert normalize_sentence(once) == once


@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=100))
def test_normalize_idempotent_unicode(raw):
    once = normalize_sentence(raw)
    assert normalize_sentence(once) == once


def corpus_file(tmp_path, records, name="sentences.jsonl"):
    path = tmp_path / name
    write_jsonl(path, records)
    return path


def test_load_corpus_section_mapping(tmp_path):
    path = corpus_file(
        tmp_path,
        [
            {"paper_id": "P1", "section": "abstract", "index": 0, "text": "We study parsing models here."},
            {"paper_id": "P1", "section": "Introduction", "index": 0, "text": "Parsing models are studied."},
            {"paper_id": "P1", "section": "method", "index": 0, "text": "We train with gradient descent."},
        ],
    )
    corpus = load_corpus(path)
    assert [s.section for s in corpus.sentences] == [
        Section.ABSTRACT,
        Section.INTRODUCTION,
        Section.OTHER,
    ]
    assert corpus.report.loaded == 3
    assert corpus.report.skipped == 0


def test_load_corpus_blank_text_skipped(tmp_path):
    path = corpus_file(
        tmp_path,
        [
            {"paper_id": "P1", "section": "abstract", "index": 0, "text": "   "},
            {"paper_id": "P1", "section": "abstract", "index": 1, "text": "Real text goes here now."},
        ],
    )
    corpus = load_corpus(path)
    assert corpus.report.loaded == 1
    assert corpus.report.skipped == 1
    assert corpus.report.errors[0][0] == 1


def test_load_corpus_duplicate_identity_rejected(tmp_path):
    path = corpus_file(
        tmp_path,
        [
            {"paper_id": "P1", "section": "abstract", "index": 0, "text": "First version of this sentence."},
            {"paper_id": "P1", "section": "abstract", "index": 0, "text": "Second version of this sentence."},
        ],
    )
    corpus = load_corpus(path)
    assert corpus.report.loaded == 1
    assert corpus.report.skipped == 1
    assert "duplicate" in corpus.report.errors[0][1]


def test_load_corpus_counts_add_up(tmp_path):
    records = [
        {"paper_id": "P1", "section": "abstract", "index": i, "text": f"sentence number {i} with words"}
        for i in range(5)
    ]
    records.append({"paper_id": "P1", "section": "abstract", "index": "x", "text": "bad index"})
    records.append({"paper_id": "P1", "section": "abstract", "text": "missing index field"})
    path = corpus_file(tmp_path, records)
    corpus = load_corpus(path)
    assert corpus.report.loaded + corpus.report.skipped == 7


def test_load_corpus_idempotent(tmp_path):
    records = [
        {"paper_id": "P2", "section": "conclusions", "index": 0, "text": "We Conclude THAT parsing helps."},
    ]
    path = corpus_file(tmp_path, records)
    a = load_corpus(path)
    b = load_corpus(path)
    assert a.sentences == b.sentences
    assert a.sentences[0].section == Section.CONCLUSION


def test_load_corpus_normalization_fixed_point(tmp_path):
    path = corpus_file(
        tmp_path,
        [{"paper_id": "P1", "section": "abstract", "index": 0, "text": "Mixed   CASE with  gaps"}],
    )
    corpus = load_corpus(path)
    for s in corpus.sentences:
        assert normalize_sentence(s.text) == s.text
        assert s.token_count == len(s.text.split())
        assert s.char_count == len(s.text)


def test_load_corpus_length_eligibility(tmp_path):
    path = corpus_file(
        tmp_path,
        [
            {"paper_id": "P1", "section": "abstract", "index": 0, "text": "too short"},
            {"paper_id": "P1", "section": "abstract", "index": 1, "text": "this one has enough tokens"},
        ],
    )
    corpus = load_corpus(path)
    assert corpus.sentences[0].pairing_eligible is False
    assert corpus.sentences[1].pairing_eligible is True


def test_load_corpus_unreadable_file_is_fatal(tmp_path):
    with pytest.raises(CorpusError):
        load_corpus(tmp_path / "missing.jsonl")


def test_load_paper_meta_defaults(tmp_path):
    path = corpus_file(
        tmp_path,
        [{"paper_id": "P1", "title": "A Paper", "subject_area": "", "source": "acl"}],
        name="papers.jsonl",
    )
    papers = load_paper_meta(path)
    assert papers["P1"].subject_area == "unknown"
    assert papers["P1"].source == PaperSource.ACL


def test_load_paper_meta_duplicate_fatal(tmp_path):
    path = corpus_file(
        tmp_path,
        [{"paper_id": "P1", "title": "A"}, {"paper_id": "P1", "title": "B"}],
        name="papers.jsonl",
    )
    with pytest.raises(CorpusError):
        load_paper_meta(path)


@pytest.fixture
def small_corpus(tmp_path):
    path = corpus_file(
        tmp_path,
        [
            {"paper_id": "P1", "section": "abstract", "index": 0, "text": "We propose a parsing model today."},
            {"paper_id": "P2", "section": "introduction", "index": 0, "text": "Prior work proposed parsing models."},
        ],
    )
    return load_corpus(path)


def test_citation_edges_resolved(tmp_path, small_corpus):
    sid = small_corpus.sentences[0].sentence_id
    path = corpus_file(
        tmp_path,
        [{"citing_paper_id": "P1", "cited_paper_id": "P2", "citing_sentence_id": sid}],
        name="citations.jsonl",
    )
    edges, report = load_citation_edges(path, small_corpus)
    assert len(edges) == 1
    assert edges[0].citing_sentence.sentence_id == sid
    assert report.loaded == 1


def test_citation_self_edge_skipped(tmp_path, small_corpus):
    sid = small_corpus.sentences[0].sentence_id
    path = corpus_file(
        tmp_path,
        [{"citing_paper_id": "P1", "cited_paper_id": "P1", "citing_sentence_id": sid}],
        name="citations.jsonl",
    )
    edges, report = load_citation_edges(path, small_corpus)
    assert edges == []
    assert report.skipped == 1


def test_citation_unknown_sentence_skipped(tmp_path, small_corpus):
    path = corpus_file(
        tmp_path,
        [{"citing_paper_id": "P1", "cited_paper_id": "P2", "citing_sentence_id": "nope"}],
        name="citations.jsonl",
    )
    edges, report = load_citation_edges(path, small_corpus)
    assert edges == []
    assert report.skipped == 1
    assert "unknown sentence_id" in report.errors[0][1]
