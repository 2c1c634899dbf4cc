"""Synthetic scientific-paper fixtures.

Generates a small, fully deterministic corpus that exercises every
extraction channel: papers whose contribution sentence recurs near-verbatim
across sections, shared term definitions across papers of one subject
area, citation sentences describing a shared cited paper, and long
composite sentences that embed a paraphrase of a short sentence (fodder
for partial-paraphrase discovery). Also produces seed paraphrase pairs
plus a distractor pool for span-model training.

Everything derives from one integer seed; identical seeds yield identical
files byte for byte.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .corpus import Section, Sentence, derive_sentence_id

FUNCTION_WORDS = ["the", "a", "of", "in", "for", "with", "on", "and", "that", "to", "by", "from"]

SENTENCE_OPENERS = [
    ["we", "propose"],
    ["we", "present"],
    ["we", "introduce"],
    ["this", "paper", "presents"],
    ["we", "show", "that"],
    ["our", "results", "indicate", "that"],
    ["we", "describe"],
]

SYNONYMS = {
    "propose": "present", "present": "introduce", "introduce": "propose",
    "show": "demonstrate", "describe": "outline", "method": "approach",
    "model": "framework", "results": "findings", "large": "big", "novel": "new",
    "fast": "efficient", "task": "problem", "dataset": "corpus", "improves": "boosts",
    "uses": "employs", "robust": "stable", "simple": "straightforward",
}

_TOPIC_TEXT = [
    "parsing treebank decoder grammar syntax dependency constituency tagger",
    "translation bilingual alignment phrase corpus bleu decoder fluency",
    "embedding vector semantic similarity cosine space representation cluster",
    "attention transformer encoder layer head softmax position context",
    "citation graph network node edge centrality scholarly literature",
    "sentiment polarity review opinion classifier lexicon subjective rating",
    "dialogue state tracking utterance response agent belief slot",
    "summarization extractive abstractive compression salience content length",
    "entity relation extraction mention linking knowledge base schema",
    "speech acoustic phoneme recognition spectrogram frame signal audio",
    "question answering span passage retrieval reader reasoning answer",
    "morphology inflection lemma suffix paradigm agglutinative form stem",
    "topic latent dirichlet allocation document mixture inference gibbs",
    "coreference anaphora antecedent resolution chain mention pronoun gender",
    "discourse rhetorical structure relation connective segment coherence tree",
    "string cosmic inflation symmetry breaking universe defect topological",
    "reinforcement policy reward agent exploration gradient trajectory baseline",
    "optimizer gradient descent momentum learning rate schedule convergence",
]
TOPICS = [t.split() for t in _TOPIC_TEXT]

SUBJECT_AREAS = [
    "computation and language",
    "machine learning",
    "information retrieval",
    "high energy physics",
]

DEFINITION_TERMS = [
    ("dependency parsing", 0),
    ("phrase alignment", 1),
    ("semantic clustering", 2),
    ("attention pooling", 3),
    ("citation ranking", 4),
    ("polarity detection", 5),
]


def _sentence_words(rng: random.Random, topic: list[str], n_content: int) -> list[str]:
    words = list(rng.choice(SENTENCE_OPENERS))
    for _ in range(n_content):
        if rng.random() < 0.4:
            words.append(rng.choice(FUNCTION_WORDS))
        words.append(rng.choice(topic))
    words.append(rng.choice(FUNCTION_WORDS))
    words.append(rng.choice(topic))
    return words


def make_sentence(rng: random.Random, topic: list[str], n_content: int | None = None) -> str:
    n = n_content if n_content is not None else rng.randint(5, 9)
    return " ".join(_sentence_words(rng, topic, n)) + "."


def make_paraphrase(
    rng: random.Random, text: str, max_swaps: int = 1, rotate_prob: float = 0.5
) -> str:
    """Swap up to max_swaps synonym-table words and possibly rotate the
    token order; high lexical overlap is preserved."""
    tokens = text[:-1].split() if text.endswith(".") else text.split()
    idxs = list(range(len(tokens)))
    rng.shuffle(idxs)
    swapped = 0
    for i in idxs:
        if swapped >= max_swaps:
            break
        if tokens[i] in SYNONYMS:
            tokens[i] = SYNONYMS[tokens[i]]
            swapped += 1
    if rng.random() < rotate_prob and len(tokens) > 6:
        cut = rng.randint(2, len(tokens) - 3)
        tokens = tokens[cut:] + tokens[:cut]
    return " ".join(tokens) + "."


def _mk(sid: str, paper: str, section: Section, idx: int, text: str) -> Sentence:
    return Sentence(sid, paper, section, idx, text, len(text.split()), len(text))


def build_seed_paraphrases(
    n_pairs: int, seed: int = 20488, n_pool: int | None = None
) -> tuple[list[tuple[Sentence, Sentence]], list[Sentence]]:
    """Seed paraphrase pairs plus a distractor pool for pseudo-data
    construction. Pairs share most tokens (synonym swaps + rotation), the
    pool comes from unrelated topics."""
    rng = random.Random(seed)
    pairs = []
    for i in range(n_pairs):
        topic = TOPICS[i % len(TOPICS)]
        a = make_sentence(rng, topic)
        b = make_paraphrase(rng, a, max_swaps=rng.randint(1, 3))
        pairs.append((
            _mk(f"seed-a{i}", f"SP{i}", Section.ABSTRACT, 0, a),
            _mk(f"seed-b{i}", f"SP{i}", Section.CONCLUSION, 0, b),
        ))
    pool = []
    for i in range(n_pool if n_pool is not None else n_pairs):
        topic = TOPICS[rng.randrange(len(TOPICS))]
        text = make_sentence(rng, topic)
        pool.append(_mk(f"seed-pool{i}", f"SQ{i}", Section.OTHER, 0, text))
    return pairs, pool


@dataclass
class MiniCorpus:
    sentence_records: list[dict]
    paper_records: list[dict]
    citation_records: list[dict]

    def write(self, directory: str | Path) -> dict[str, int]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        names = {
            "sentences.jsonl": self.sentence_records,
            "papers.jsonl": self.paper_records,
            "citations.jsonl": self.citation_records,
        }
        for name, records in names.items():
            with open(directory / name, "w", encoding="utf-8") as fh:
                for rec in records:
                    fh.write(json.dumps(rec, sort_keys=True) + "\n")
        return {name: len(records) for name, records in names.items()}


# raw section labels vary in case/aliases to exercise the alias table
_SECTION_LABELS = {
    Section.ABSTRACT: ["Abstract", "abstract", "ABSTRACT"],
    Section.INTRODUCTION: ["Introduction", "introduction", "intro"],
    Section.BACKGROUND: ["Background", "related work"],
    Section.DISCUSSION: ["Discussion", "discussion"],
    Section.CONCLUSION: ["Conclusion", "conclusions"],
    Section.OTHER: ["method", "results", "experiments"],
}


def build_mini_corpus(n_papers: int = 20, seed: int = 20488) -> MiniCorpus:
    rng = random.Random(seed)
    sentence_records: list[dict] = []
    paper_records: list[dict] = []
    citation_records: list[dict] = []

    paper_ids = [f"MP{i:03d}" for i in range(n_papers)]
    contributions = {}
    short_cores = {}
    for i, pid in enumerate(paper_ids):
        topic = TOPICS[i % len(TOPICS)]
        contributions[pid] = make_sentence(rng, topic, n_content=9)
        short_cores[pid] = make_sentence(rng, topic, n_content=3)

    for i, pid in enumerate(paper_ids):
        topic = TOPICS[i % len(TOPICS)]
        subject = SUBJECT_AREAS[i % len(SUBJECT_AREAS)]
        paper_records.append({
            "paper_id": pid,
            "title": f"a study of {topic[0]} and {topic[1]}",
            "subject_area": subject,
            "source": "ACL",
        })
        counters = {section: 0 for section in Section}

        def emit(section: Section, text: str, pid=pid, counters=counters):
            idx = counters[section]
            counters[section] += 1
            label_options = _SECTION_LABELS[section]
            sentence_records.append({
                "paper_id": pid,
                "section": label_options[idx % len(label_options)],
                "index": idx,
                "text": text,
            })
            return derive_sentence_id(pid, section, idx)

        contribution = contributions[pid]
        core = short_cores[pid]

        # contribution recurs near-verbatim in three sections
        emit(Section.ABSTRACT, contribution)
        emit(Section.INTRODUCTION, make_paraphrase(rng, contribution, max_swaps=1))
        emit(Section.CONCLUSION, make_paraphrase(rng, contribution, max_swaps=1))
        # short core sentence; its paraphrase is buried in a long composite
        emit(Section.ABSTRACT, core)
        embedded = make_paraphrase(rng, core, max_swaps=1, rotate_prob=0.0)[:-1]
        framing_topic = TOPICS[(i + 5) % len(TOPICS)]
        left = make_sentence(rng, framing_topic, n_content=4)[:-1]
        right = make_sentence(rng, framing_topic, n_content=4)
        emit(Section.DISCUSSION, f"{left}, {embedded}, and {right}")
        # a verbatim copy in a non-target section must never pair
        emit(Section.OTHER, contribution)

        # definitions: same term defined in papers j, j+6, j+12
        for term, topic_idx in DEFINITION_TERMS:
            owners = {j % n_papers for j in range(topic_idx, n_papers, 6)}
            if i in owners:
                phrase = make_sentence(rng, TOPICS[topic_idx], n_content=5)[:-1]
                body = " ".join(phrase.split()[2:])
                emit(Section.INTRODUCTION, f"{term} is the task of {body}.")

        # two citations per paper, each a paraphrase of the cited
        # contribution sentence
        for hop, section in ((7, Section.INTRODUCTION), (13, Section.BACKGROUND)):
            target = paper_ids[(i + hop) % n_papers]
            citing_text = make_paraphrase(rng, contributions[target], max_swaps=2)
            sid = emit(section, citing_text)
            citation_records.append({
                "citing_paper_id": pid,
                "cited_paper_id": target,
                "citing_sentence_id": sid,
            })

        # filler to reach ~40 sentences per paper
        filler_plan = [
            (Section.ABSTRACT, 2), (Section.INTRODUCTION, 4), (Section.BACKGROUND, 5),
            (Section.DISCUSSION, 5), (Section.CONCLUSION, 4), (Section.OTHER, 11),
        ]
        for section, count in filler_plan:
            for _ in range(count):
                filler_topic = TOPICS[rng.randrange(len(TOPICS))]
                emit(section, make_sentence(rng, filler_topic))

    return MiniCorpus(sentence_records, paper_records, citation_records)


def write_mini_corpus(directory: str | Path, n_papers: int = 20, seed: int = 20488) -> dict[str, int]:
    return build_mini_corpus(n_papers=n_papers, seed=seed).write(directory)
