"""Sentence vectors, cosine similarity, and a persistent embedding cache.

Two encoder families sit behind one interface:

  hash-v1-<dim>   deterministic hashed-feature encoder (word + char trigram
                  features, signed feature hashing). Needs no weights, is
                  bitwise reproducible, and is the default for pipelines.
  hf:<model>      mean/first-token pooled final-layer states of a
                  transformers model, when that package and local weights
                  are available.

The cache is an append-only record file mapping (encoder_tag, sha256 of
text) to float32 vectors. Layout per record, all little-endian:
u16 tag length, tag bytes (utf-8), 32-byte key digest, u32 dim, dim
float32 values. The file starts with magic b"PMEC" and a u32 version.
"""

from __future__ import annotations

import hashlib
import struct
import threading
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .corpus import Sentence

_CACHE_MAGIC = b"PMEC"
_CACHE_VERSION = 1


class EmbedError(Exception):
    pass


class EncoderUnavailableError(EmbedError):
    """Requested encoder cannot be constructed (missing package/weights)."""


@dataclass(frozen=True)
class SentenceVector:
    sentence_id: str
    vector: np.ndarray
    encoder_tag: str


@dataclass
class EmbedConfig:
    encoder_tag: str = "hash-v1-256"
    pooling: str = "mean"  # mean | first_token
    batch_size: int = 256
    similarity_threshold: float = 0.931

    def __post_init__(self) -> None:
        if not 0.0 <= self.similarity_threshold <= 1.0:
            raise ValueError(f"similarity_threshold out of [0,1]: {self.similarity_threshold}")
        if self.pooling not in ("mean", "first_token"):
            raise ValueError(f"unknown pooling: {self.pooling}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")


class SentenceEncoder(Protocol):
    tag: str

    def encode(self, texts: Sequence[str]) -> np.ndarray: ...


def _feature_index(feature: str, dim: int) -> tuple[int, float]:
    digest = hashlib.blake2b(feature.encode("utf-8"), digest_size=8).digest()
    value = int.from_bytes(digest, "little")
    sign = 1.0 if value & 1 else -1.0
    return (value >> 1) % dim, sign


def hashed_token_vector(token: str, dim: int) -> np.ndarray:
    """Signed-hash feature vector for one token (word + char trigrams)."""
    vec = np.zeros(dim, dtype=np.float64)
    idx, sign = _feature_index("w\x00" + token, dim)
    vec[idx] += 2.0 * sign
    padded = f"^{token}$"
    for i in range(len(padded) - 2):
        idx, sign = _feature_index("c3\x00" + padded[i : i + 3], dim)
        vec[idx] += sign
    return vec


def hashed_token_matrix(tokens: Sequence[str], dim: int, context_mix: float = 0.0) -> np.ndarray:
    """Per-token vectors; context_mix > 0 blends in neighbouring tokens."""
    base = np.stack([hashed_token_vector(t, dim) for t in tokens])
    if context_mix <= 0.0 or len(tokens) == 1:
        return base
    out = (1.0 - context_mix) * base
    half = context_mix / 2.0
    out[1:] += half * base[:-1]
    out[:-1] += half * base[1:]
    out[0] += half * base[0]
    out[-1] += half * base[-1]
    return out


class HashingSentenceEncoder:
    """Deterministic sentence encoder over hashed token features."""

    def __init__(self, tag: str = "hash-v1-256", pooling: str = "mean"):
        self.tag = tag
        self.pooling = pooling
        try:
            self.dim = int(tag.rsplit("-", 1)[1])
        except (IndexError, ValueError) as exc:
            raise EncoderUnavailableError(f"bad hash encoder tag: {tag!r}") from exc
        if self.dim < 8:
            raise EncoderUnavailableError(f"hash encoder dim too small: {self.dim}")

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim), dtype=np.float32)
        for row, text in enumerate(texts):
            tokens = text.split()
            if not tokens:
                raise EmbedError("cannot embed empty text")
            mat = hashed_token_matrix(tokens, self.dim)
            pooled = mat[0] if self.pooling == "first_token" else mat.mean(axis=0)
            out[row] = pooled.astype(np.float32)
        return out


class TransformerSentenceEncoder:
    """Pooled final-layer states of a local transformers checkpoint."""

    def __init__(self, tag: str, pooling: str = "mean", max_length: int = 512):
        self.tag = tag
        self.pooling = pooling
        self.max_length = max_length
        model_name = tag.split(":", 1)[1]
        try:
            import torch
            from transformers import AutoModel, AutoTokenizer

            self._torch = torch
            self._tokenizer = AutoTokenizer.from_pretrained(model_name)
            self._model = AutoModel.from_pretrained(model_name)
            self._model.eval()
        except Exception as exc:  # missing package, weights, or network
            raise EncoderUnavailableError(f"encoder {tag!r} unavailable: {exc}") from exc

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        torch = self._torch
        enc = self._tokenizer(
            list(texts), padding=True, truncation=True,
            max_length=self.max_length, return_tensors="pt",
        )
        if enc["input_ids"].shape[1] >= self.max_length:
            warnings.warn("input truncated to encoder max length", stacklevel=2)
        with torch.no_grad():
            states = self._model(**enc).last_hidden_state
        if self.pooling == "first_token":
            pooled = states[:, 0]
        else:
            mask = enc["attention_mask"].unsqueeze(-1)
            pooled = (states * mask).sum(1) / mask.sum(1).clamp(min=1)
        return pooled.numpy().astype(np.float32)


def build_sentence_encoder(cfg: EmbedConfig) -> SentenceEncoder:
    if cfg.encoder_tag.startswith("hash-"):
        return HashingSentenceEncoder(cfg.encoder_tag, cfg.pooling)
    if cfg.encoder_tag.startswith("hf:"):
        return TransformerSentenceEncoder(cfg.encoder_tag, cfg.pooling)
    raise EncoderUnavailableError(f"unknown encoder tag: {cfg.encoder_tag!r}")


def text_key(text: str) -> bytes:
    return hashlib.sha256(text.encode("utf-8")).digest()


class EmbeddingCache:
    """Append-only vector store; concurrent readers, serialized writers."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._index: dict[tuple[str, bytes], np.ndarray] = {}
        if self.path.exists():
            self._load()
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "wb") as fh:
                fh.write(_CACHE_MAGIC + struct.pack("<I", _CACHE_VERSION))

    def _load(self) -> None:
        blob = self.path.read_bytes()
        if blob[:4] != _CACHE_MAGIC:
            raise EmbedError(f"not a cache file: {self.path}")
        pos = 8
        while pos < len(blob):
            (tag_len,) = struct.unpack_from("<H", blob, pos)
            pos += 2
            tag = blob[pos : pos + tag_len].decode("utf-8")
            pos += tag_len
            digest = blob[pos : pos + 32]
            pos += 32
            (dim,) = struct.unpack_from("<I", blob, pos)
            pos += 4
            vec = np.frombuffer(blob, dtype="<f4", count=dim, offset=pos).copy()
            pos += 4 * dim
            self._index[(tag, digest)] = vec

    def get(self, tag: str, key: bytes) -> np.ndarray | None:
        return self._index.get((tag, key))

    def put(self, tag: str, key: bytes, vector: np.ndarray) -> None:
        vec = np.ascontiguousarray(vector, dtype="<f4")
        with self._lock:
            if (tag, key) in self._index:
                return
            tag_bytes = tag.encode("utf-8")
            with open(self.path, "ab") as fh:
                fh.write(struct.pack("<H", len(tag_bytes)))
                fh.write(tag_bytes)
                fh.write(key)
                fh.write(struct.pack("<I", vec.shape[0]))
                fh.write(vec.tobytes())
            self._index[(tag, key)] = vec.copy()

    def __len__(self) -> int:
        return len(self._index)


def embed_batch(
    sentences: Sequence[Sentence],
    cfg: EmbedConfig,
    cache: EmbeddingCache | None = None,
    encoder: SentenceEncoder | None = None,
) -> list[SentenceVector]:
    """One vector per sentence, cache consulted first and updated after."""
    if not sentences:
        return []
    if encoder is None:
        encoder = build_sentence_encoder(cfg)

    keys = [text_key(s.text) for s in sentences]
    vectors: list[np.ndarray | None] = [None] * len(sentences)
    misses: list[int] = []
    for i, key in enumerate(keys):
        cached = cache.get(encoder.tag, key) if cache is not None else None
        if cached is not None:
            vectors[i] = cached
        else:
            misses.append(i)

    for start in range(0, len(misses), cfg.batch_size):
        chunk = misses[start : start + cfg.batch_size]
        encoded = encoder.encode([sentences[i].text for i in chunk])
        for row, i in enumerate(chunk):
            vec = np.ascontiguousarray(encoded[row], dtype="<f4")
            if not np.all(np.isfinite(vec)):
                raise EmbedError(f"non-finite embedding for {sentences[i].sentence_id}")
            vectors[i] = vec
            if cache is not None:
                cache.put(encoder.tag, keys[i], vec)

    return [
        SentenceVector(sentence_id=s.sentence_id, vector=vectors[i], encoder_tag=encoder.tag)
        for i, s in enumerate(sentences)
    ]


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """dot(a, b) / (|a| * |b|); errors on zero norms or dimension mismatch."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise EmbedError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise EmbedError("degenerate embedding (zero norm)")
    return float(np.dot(a, b) / (na * nb))


def pairwise_above_threshold(
    a_vectors: Sequence[SentenceVector],
    b_vectors: Sequence[SentenceVector],
    threshold: float,
) -> list[tuple[str, str, float]]:
    """All (idA, idB, sim) over the A x B product with sim strictly above
    the threshold; each product pair reported once."""
    if not a_vectors or not b_vectors:
        return []
    tags = {v.encoder_tag for v in a_vectors} | {v.encoder_tag for v in b_vectors}
    if len(tags) != 1:
        raise EmbedError(f"mismatched encoder tags: {sorted(tags)}")

    mat_a = np.stack([np.asarray(v.vector, dtype=np.float64) for v in a_vectors])
    mat_b = np.stack([np.asarray(v.vector, dtype=np.float64) for v in b_vectors])
    if mat_a.shape[1] != mat_b.shape[1]:
        raise EmbedError("dimension mismatch between vector collections")
    norms_a = np.linalg.norm(mat_a, axis=1)
    norms_b = np.linalg.norm(mat_b, axis=1)
    if np.any(norms_a == 0.0) or np.any(norms_b == 0.0):
        raise EmbedError("degenerate embedding (zero norm)")

    sims = (mat_a / norms_a[:, None]) @ (mat_b / norms_b[:, None]).T
    out: list[tuple[str, str, float]] = []
    rows, cols = np.nonzero(sims > threshold)
    for i, j in zip(rows.tolist(), cols.tolist()):
        out.append((a_vectors[i].sentence_id, b_vectors[j].sentence_id, float(sims[i, j])))
    return out
