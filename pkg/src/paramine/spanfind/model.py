"""Span-pointer model: a compact transformer encoder with start/end heads.

The model reads [CLS] input1 [SEP] input2 and scores every position twice
(span start, span end). Training minimizes the summed cross-entropy of the
gold start and end positions. Position 0 (the sequence-start marker) is
the no-answer sentinel. Scoring is masked so only input2 positions and the
sentinel can be predicted.

Checkpoints are a directory: weights.pt (state dict), vocab.json, and
config.json recording the full configuration, seed, and held-out metrics.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np
import torch
from torch import nn

from .pseudo import CLS, SEP, PseudoExample

PAD_ID = 0
UNK_ID = 1
CLS_ID = 2
SEP_ID = 3
_SPECIALS = {"[PAD]": PAD_ID, "[UNK]": UNK_ID, CLS: CLS_ID, SEP: SEP_ID}

_NEG = -1e9


class SpanModelError(Exception):
    pass


@dataclass
class SpanModelConfig:
    encoder_tag: str = "scratch-transformer"
    max_sequence_length: int = 160
    d_model: int = 96
    num_layers: int = 3
    num_heads: int = 4
    ff_dim: int = 192
    dropout: float = 0.1
    learning_rate: float = 3e-4
    batch_size: int = 32
    epochs: int = 8
    seed: int = 1
    vocab_size: int = 30000
    holdout_fraction: float = 0.1
    min_span_tokens: int = 4
    p_c: float = 0.8
    p_b: float = 0.5
    p_d: float = 0.8
    resample_until_b: bool = False

    def __post_init__(self) -> None:
        for name in ("p_c", "p_b", "p_d"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} out of [0,1]")
        if self.max_sequence_length < 8:
            raise ValueError("max_sequence_length too small")


class RejectionReason(str, Enum):
    FULL_SENTENCE_SPAN = "FULL_SENTENCE_SPAN"
    EMPTY_SPAN = "EMPTY_SPAN"
    NO_ANSWER = "NO_ANSWER"


@dataclass(frozen=True)
class DiscoveryResult:
    short_sentence: str
    long_sentence: str
    extracted_span_text: str | None
    span_token_range: tuple[int, int] | None  # token indices into long_sentence
    accepted: bool
    rejection_reason: RejectionReason | None = None


class Vocab:
    def __init__(self, token_to_id: dict[str, int]):
        self.token_to_id = token_to_id

    @classmethod
    def build(cls, examples: Sequence[PseudoExample], max_size: int) -> "Vocab":
        counts: Counter[str] = Counter()
        for ex in examples:
            counts.update(ex.input1.split())
            counts.update(ex.input2.split())
        table = dict(_SPECIALS)
        budget = max_size - len(table)
        for token, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:budget]:
            table[token] = len(table)
        return cls(table)

    def encode(self, tokens: Sequence[str]) -> list[int]:
        return [self.token_to_id.get(t, UNK_ID) for t in tokens]

    def __len__(self) -> int:
        return len(self.token_to_id)


class SpanPointerNet(nn.Module):
    def __init__(self, vocab_size: int, cfg: SpanModelConfig):
        super().__init__()
        self.token_emb = nn.Embedding(vocab_size, cfg.d_model, padding_idx=PAD_ID)
        self.pos_emb = nn.Embedding(cfg.max_sequence_length, cfg.d_model)
        self.seg_emb = nn.Embedding(2, cfg.d_model)
        layer = nn.TransformerEncoderLayer(
            d_model=cfg.d_model,
            nhead=cfg.num_heads,
            dim_feedforward=cfg.ff_dim,
            dropout=cfg.dropout,
            batch_first=True,
        )
        self.encoder = nn.TransformerEncoder(
            layer, num_layers=cfg.num_layers, enable_nested_tensor=False
        )
        self.start_head = nn.Linear(cfg.d_model, 1)
        self.end_head = nn.Linear(cfg.d_model, 1)

    def forward(
        self, ids: torch.Tensor, segments: torch.Tensor, pad_mask: torch.Tensor,
        answer_mask: torch.Tensor,
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """ids/segments: (batch, len); pad_mask True on padding; answer_mask
        True where a span boundary is legal (sentinel + input2)."""
        positions = torch.arange(ids.shape[1], device=ids.device).unsqueeze(0)
        x = self.token_emb(ids) + self.pos_emb(positions) + self.seg_emb(segments)
        x = self.encoder(x, src_key_padding_mask=pad_mask)
        start = self.start_head(x).squeeze(-1)
        end = self.end_head(x).squeeze(-1)
        illegal = ~answer_mask
        start = start.masked_fill(illegal, _NEG)
        end = end.masked_fill(illegal, _NEG)
        return start, end


def _encode_example(
    tokens: list[str], input2_offset: int, vocab: Vocab, max_len: int
) -> tuple[list[int], list[int], list[bool]] | None:
    """Token ids, segment ids, and legal-boundary mask, truncated to
    max_len. Returns None when even the input1 block does not fit."""
    if input2_offset >= max_len - 1:
        return None
    tokens = tokens[:max_len]
    ids = vocab.encode(tokens)
    segments = [0 if i < input2_offset else 1 for i in range(len(ids))]
    legal = [i == 0 or i >= input2_offset for i in range(len(ids))]
    return ids, segments, legal


def _batches(indices: list[int], batch_size: int):
    for start in range(0, len(indices), batch_size):
        yield indices[start : start + batch_size]


@dataclass
class TrainedSpanModel:
    net: SpanPointerNet
    vocab: Vocab
    cfg: SpanModelConfig
    metrics: dict = field(default_factory=dict)

    def save(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        torch.save(self.net.state_dict(), directory / "weights.pt")
        (directory / "vocab.json").write_text(
            json.dumps(self.vocab.token_to_id, sort_keys=True), encoding="utf-8"
        )
        (directory / "config.json").write_text(
            json.dumps({"config": asdict(self.cfg), "metrics": self.metrics}, indent=2, sort_keys=True),
            encoding="utf-8",
        )

    @classmethod
    def load(cls, directory: str | Path) -> "TrainedSpanModel":
        directory = Path(directory)
        manifest = json.loads((directory / "config.json").read_text(encoding="utf-8"))
        cfg = SpanModelConfig(**manifest["config"])
        vocab = Vocab(json.loads((directory / "vocab.json").read_text(encoding="utf-8")))
        net = SpanPointerNet(len(vocab), cfg)
        net.load_state_dict(torch.load(directory / "weights.pt", weights_only=True))
        net.eval()
        return cls(net=net, vocab=vocab, cfg=cfg, metrics=manifest.get("metrics", {}))


def _prepare(
    examples: Sequence[PseudoExample], vocab: Vocab, max_len: int
) -> list[tuple[list[int], list[int], list[bool], int, int, bool]]:
    """Encoded rows (ids, segments, legal, start, end, has_answer); examples
    whose gold span falls past the truncation point are dropped."""
    rows = []
    for ex in examples:
        enc = _encode_example(ex.model_tokens(), ex.input2_offset(), vocab, max_len)
        if enc is None:
            continue
        ids, segments, legal = enc
        if ex.has_answer and ex.span_end >= len(ids):
            continue
        rows.append((ids, segments, legal, ex.span_start, ex.span_end, ex.has_answer))
    return rows


def _forward_batch(net: SpanPointerNet, rows, device="cpu"):
    max_len = max(len(r[0]) for r in rows)
    ids = torch.full((len(rows), max_len), PAD_ID, dtype=torch.long, device=device)
    segments = torch.zeros((len(rows), max_len), dtype=torch.long, device=device)
    pad_mask = torch.ones((len(rows), max_len), dtype=torch.bool, device=device)
    legal = torch.zeros((len(rows), max_len), dtype=torch.bool, device=device)
    for i, (row_ids, row_seg, row_legal, *_rest) in enumerate(rows):
        n = len(row_ids)
        ids[i, :n] = torch.tensor(row_ids, dtype=torch.long)
        segments[i, :n] = torch.tensor(row_seg, dtype=torch.long)
        pad_mask[i, :n] = False
        legal[i, :n] = torch.tensor(row_legal, dtype=torch.bool)
    starts = torch.tensor([r[3] for r in rows], dtype=torch.long, device=device)
    ends = torch.tensor([r[4] for r in rows], dtype=torch.long, device=device)
    start_logits, end_logits = net(ids, segments, pad_mask, legal)
    return start_logits, end_logits, starts, ends


def _evaluate(net: SpanPointerNet, rows, batch_size: int) -> dict:
    net.eval()
    exact = 0
    noanswer_correct = 0
    with torch.no_grad():
        for chunk in _batches(list(range(len(rows))), batch_size):
            batch = [rows[i] for i in chunk]
            start_logits, end_logits, starts, ends = _forward_batch(net, batch)
            pred_s, pred_e = _decode_batch(start_logits, end_logits, batch)
            for k, i in enumerate(chunk):
                gold_s, gold_e, has_answer = rows[i][3], rows[i][4], rows[i][5]
                if pred_s[k] == gold_s and pred_e[k] == gold_e:
                    exact += 1
                predicted_noanswer = pred_s[k] == 0
                if predicted_noanswer == (not has_answer):
                    noanswer_correct += 1
    n = max(len(rows), 1)
    return {
        "heldout_size": len(rows),
        "exact_span_accuracy": exact / n,
        "no_answer_accuracy": noanswer_correct / n,
    }


def _decode_batch(start_logits, end_logits, rows) -> tuple[list[int], list[int]]:
    """Joint argmax of start+end with start <= end inside input2, compared
    against the sentinel score at position 0."""
    pred_s, pred_e = [], []
    for i, row in enumerate(rows):
        n = len(row[0])
        offset = row[1].index(1) if 1 in row[1] else n  # first input2 position
        s_log = start_logits[i, :n].detach()
        e_log = end_logits[i, :n].detach()
        best_score, best = None, (0, 0)
        if offset < n:
            s_np = s_log.numpy()
            e_np = e_log.numpy()
            span_scores = s_np[offset:, None] + e_np[None, offset:]
            tri = np.triu(np.ones_like(span_scores, dtype=bool))
            span_scores = np.where(tri, span_scores, -np.inf)
            flat = int(np.argmax(span_scores))
            si, ei = divmod(flat, span_scores.shape[1])
            best_score = float(span_scores[si, ei])
            best = (offset + si, offset + ei)
        sentinel = float(s_log[0] + e_log[0])
        if best_score is None or sentinel >= best_score:
            pred_s.append(0)
            pred_e.append(0)
        else:
            pred_s.append(best[0])
            pred_e.append(best[1])
    return pred_s, pred_e


def train_span_model(
    examples: Sequence[PseudoExample], cfg: SpanModelConfig
) -> TrainedSpanModel:
    """Fit the span-pointer net; returns the model plus held-out metrics.

    Deterministic for a fixed seed, data, and torch build (see README for
    the framework reproducibility caveats).
    """
    if not examples:
        raise SpanModelError("no training examples")
    torch.manual_seed(cfg.seed)
    rng = random.Random(cfg.seed)

    vocab = Vocab.build(examples, cfg.vocab_size)
    rows = _prepare(examples, vocab, cfg.max_sequence_length)
    if not rows:
        raise SpanModelError("all examples exceeded max_sequence_length")

    order = list(range(len(rows)))
    rng.shuffle(order)
    n_holdout = max(1, int(len(rows) * cfg.holdout_fraction)) if len(rows) > 1 else 0
    holdout = [rows[i] for i in order[:n_holdout]]
    train = [rows[i] for i in order[n_holdout:]] or holdout

    net = SpanPointerNet(len(vocab), cfg)
    optimizer = torch.optim.Adam(net.parameters(), lr=cfg.learning_rate)
    loss_fn = nn.CrossEntropyLoss()

    indices = list(range(len(train)))
    for _epoch in range(cfg.epochs):
        net.train()
        rng.shuffle(indices)
        for chunk in _batches(indices, cfg.batch_size):
            batch = [train[i] for i in chunk]
            start_logits, end_logits, starts, ends = _forward_batch(net, batch)
            loss = loss_fn(start_logits, starts) + loss_fn(end_logits, ends)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()

    metrics = _evaluate(net, holdout if holdout else train, cfg.batch_size)
    net.eval()
    return TrainedSpanModel(net=net, vocab=vocab, cfg=cfg, metrics=metrics)


def predict_span(model: TrainedSpanModel, short: str, long: str) -> DiscoveryResult:
    """Locate the part of the longer sentence that restates the shorter one.

    The decoded span must lie inside input2 with start <= end; the sentinel
    wins ties. A span covering all of input2 is rejected (that pair is
    already reachable through whole-sentence similarity), as are spans
    shorter than the configured minimum.
    """
    short_tokens = short.split()
    long_tokens = long.split()
    if len(short_tokens) > len(long_tokens):
        raise SpanModelError("input 1 must not be longer than input 2")

    tokens = [CLS, *short_tokens, SEP, *long_tokens]
    offset = len(short_tokens) + 2
    enc = _encode_example(tokens, offset, model.vocab, model.cfg.max_sequence_length)
    if enc is None:
        raise SpanModelError("short sentence alone exceeds max_sequence_length")
    ids, segments, legal = enc
    row = (ids, segments, legal, 0, 0, False)
    with torch.no_grad():
        start_logits, end_logits, _, _ = _forward_batch(model.net, [row])
        pred_s, pred_e = _decode_batch(start_logits, end_logits, [row])
    s, e = pred_s[0], pred_e[0]

    if s == 0:
        return DiscoveryResult(short, long, None, None, False, RejectionReason.NO_ANSWER)

    lo = s - offset
    hi = e - offset
    visible_long = len(ids) - offset  # long may have been truncated
    span_tokens = long_tokens[lo : hi + 1]
    if lo == 0 and hi == visible_long - 1 and visible_long == len(long_tokens):
        return DiscoveryResult(
            short, long, None, (lo, hi), False, RejectionReason.FULL_SENTENCE_SPAN
        )
    if len(span_tokens) < model.cfg.min_span_tokens:
        return DiscoveryResult(
            short, long, None, (lo, hi), False, RejectionReason.EMPTY_SPAN
        )
    return DiscoveryResult(short, long, " ".join(span_tokens), (lo, hi), True, None)
