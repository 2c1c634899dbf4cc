"""Synthetic span-labeled training data for paraphrase discovery.

Each example starts from a known paraphrase pair (A, B). Input 1 is A.
Input 2 concatenates up to three parts drawn independently: a random
sentence C, the paraphrase B, and a random sentence D, included with
probabilities p_c, p_b, p_d. Ending punctuation is removed from C and B
before joining. The model sequence is

    [CLS] tokens(A) [SEP] tokens(input2)

and the gold span is the token range of B inside that sequence, inclusive
on both ends. When B is absent the gold span is the sentinel position 0
(the sequence-start marker); a config flag can instead force resampling
until B is present.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from ..corpus import Sentence

CLS = "[CLS]"
SEP = "[SEP]"

#: Sentence-final characters stripped from C and B before concatenation.
ENDING_PUNCT = ".!?;"


class PseudoDataError(Exception):
    pass


@dataclass
class SpanDataConfig:
    p_c: float = 0.8
    p_b: float = 0.5
    p_d: float = 0.8
    resample_until_b: bool = False

    def __post_init__(self) -> None:
        for name in ("p_c", "p_b", "p_d"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} out of [0,1]: {value}")


@dataclass(frozen=True)
class PseudoExample:
    input1: str
    input2: str
    span_start: int
    span_end: int
    has_answer: bool
    recipe: dict = field(default_factory=dict)

    def model_tokens(self) -> list[str]:
        return [CLS, *self.input1.split(), SEP, *self.input2.split()]

    def input2_offset(self) -> int:
        return len(self.input1.split()) + 2

    def gold_span_tokens(self) -> list[str]:
        if not self.has_answer:
            return []
        return self.model_tokens()[self.span_start : self.span_end + 1]


def strip_ending_punct(text: str) -> str:
    if text and text[-1] in ENDING_PUNCT:
        return text[:-1].rstrip()
    return text


def build_pseudo_example(
    a_text: str,
    b_text: str,
    pool: Sequence[Sentence],
    cfg: SpanDataConfig,
    rng: random.Random,
    a_id: str = "a",
    b_id: str = "b",
) -> PseudoExample:
    """One training example from the known paraphrase pair (a_text, b_text).

    The draw is resampled whenever all three parts come up absent (input 2
    must be non-empty). C and D are drawn from the pool, distinct from each
    other and from both pair sentences.
    """
    candidates = [s for s in pool if s.text != a_text and s.text != b_text]
    if len(candidates) < 2:
        raise PseudoDataError("distractor pool too small")

    while True:
        use_c = rng.random() < cfg.p_c
        use_b = rng.random() < cfg.p_b
        use_d = rng.random() < cfg.p_d
        if cfg.resample_until_b and not use_b:
            continue
        if use_c or use_b or use_d:
            break

    c = candidates[rng.randrange(len(candidates))] if use_c else None
    d = None
    if use_d:
        remaining = [s for s in candidates if c is None or s.sentence_id != c.sentence_id]
        if not remaining:
            raise PseudoDataError("distractor pool too small")
        d = remaining[rng.randrange(len(remaining))]

    parts: list[str] = []
    if c is not None:
        parts.append(strip_ending_punct(c.text))
    stripped_b = strip_ending_punct(b_text)
    if use_b:
        if not stripped_b.split():
            raise PseudoDataError(f"paraphrase side of pair ({a_id},{b_id}) is empty after punctuation strip")
        parts.append(stripped_b)
    if d is not None:
        parts.append(d.text)

    input2 = " ".join(p for p in parts if p)
    offset = len(a_text.split()) + 2
    if use_b:
        before = len(parts[0].split()) if c is not None else 0
        span_start = offset + before
        span_end = span_start + len(stripped_b.split()) - 1
        has_answer = True
    else:
        span_start = span_end = 0
        has_answer = False

    return PseudoExample(
        input1=a_text,
        input2=input2,
        span_start=span_start,
        span_end=span_end,
        has_answer=has_answer,
        recipe={
            "used_c": c is not None,
            "used_b": use_b,
            "used_d": d is not None,
            "a_id": a_id,
            "b_id": b_id,
            "c_id": c.sentence_id if c is not None else None,
            "d_id": d.sentence_id if d is not None else None,
        },
    )


def build_pseudo_dataset(
    seed_pairs: Sequence[tuple[Sentence, Sentence]],
    pool: Sequence[Sentence],
    cfg: SpanDataConfig,
    rng: random.Random,
    passes: int = 1,
    both_orientations: bool = True,
) -> list[PseudoExample]:
    """One example per seed pair per pass; odd passes flip the pair
    orientation when both_orientations is set. Deterministic under a fixed
    rng seed."""
    if not seed_pairs:
        raise PseudoDataError("no seed pairs")
    examples: list[PseudoExample] = []
    for pass_no in range(passes):
        flip = both_orientations and pass_no % 2 == 1
        for sent_a, sent_b in seed_pairs:
            if flip:
                sent_a, sent_b = sent_b, sent_a
            examples.append(
                build_pseudo_example(
                    sent_a.text, sent_b.text, pool, cfg, rng,
                    a_id=sent_a.sentence_id, b_id=sent_b.sentence_id,
                )
            )
    return examples


def write_pseudo_dataset(path: str | Path, examples: Sequence[PseudoExample]) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(json.dumps({
                "input1": ex.input1,
                "input2": ex.input2,
                "span_start": ex.span_start,
                "span_end": ex.span_end,
                "has_answer": ex.has_answer,
                "recipe": ex.recipe,
            }, sort_keys=True) + "\n")
    return len(examples)


def read_pseudo_dataset(path: str | Path) -> list[PseudoExample]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                out.append(PseudoExample(
                    input1=rec["input1"],
                    input2=rec["input2"],
                    span_start=int(rec["span_start"]),
                    span_end=int(rec["span_end"]),
                    has_answer=bool(rec["has_answer"]),
                    recipe=rec.get("recipe", {}),
                ))
    return out
