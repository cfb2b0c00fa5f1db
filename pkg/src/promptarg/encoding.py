"""Subword encoding: assembled sequences -> model-ready inputs, plus the
gold per-token label vectors.

Layout of every encoded sequence:

    [CLS] prompt pieces [SEP] document pieces [SEP]

The prompt is never truncated. When the joint sequence would exceed
`max_len`, the document is windowed around the trigger with equal left and
right piece budgets; budget left over at a document edge spills to the
other side. `alignment` maps ORIGINAL document token indices to piece
ranges, so marker insertion is invisible to downstream label/score
vectors: marker pieces sit inside the document region but align to no
token.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

import numpy as np

from .corpus import EventInstance
from .errors import ConfigurationError, IntegrityError, UsageError
from .prompting import TRIGGER_CLOSE, TRIGGER_OPEN, AssembledSequence, IndexRemap

_WORD = re.compile(r"\S+")

MINI_CHECKPOINT = "mini"


@dataclass
class TokenLabelVector:
    """Gold 0/1 labels over document tokens."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1:
            raise UsageError("label vector must be one-dimensional")
        if not np.all((self.values == 0.0) | (self.values == 1.0)):
            raise UsageError("label vector must be binary")

    def __len__(self) -> int:
        return int(self.values.shape[0])


@dataclass
class TokenProbVector:
    """Predicted probabilities over document tokens, each in [0, 1]."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1:
            raise UsageError("probability vector must be one-dimensional")
        if self.values.size and (self.values.min() < 0.0 or self.values.max() > 1.0):
            raise UsageError("probabilities must lie in [0, 1]")

    def __len__(self) -> int:
        return int(self.values.shape[0])


class HashTokenizer:
    """Deterministic subword tokenizer with no external resources.

    Words are cut into fixed-width character chunks and each chunk is
    hashed into a fixed vocabulary, so multi-piece alignment is exercised
    without a pretrained vocab. Used by the miniature encoder for CPU
    tests and smoke runs.
    """

    PAD, UNK, CLS, SEP = 0, 1, 2, 3
    _N_SPECIAL = 4

    def __init__(self, vocab_size: int = 4096, chunk: int = 4):
        if vocab_size <= self._N_SPECIAL:
            raise ConfigurationError("vocab_size too small")
        self.vocab_size = vocab_size
        self.chunk = chunk

    pad_id = PAD
    cls_id = CLS
    sep_id = SEP

    def _piece_id(self, piece: str) -> int:
        digest = hashlib.blake2b(piece.encode("utf-8"), digest_size=4).digest()
        return int.from_bytes(digest, "big") % (self.vocab_size - self._N_SPECIAL) + self._N_SPECIAL

    def encode_word(self, word: str) -> list[int]:
        if not word:
            return [self.UNK]
        return [self._piece_id(word[i : i + self.chunk]) for i in range(0, len(word), self.chunk)]

    def encode_text(self, text: str) -> tuple[list[int], list[tuple[int, int]]]:
        ids: list[int] = []
        offsets: list[tuple[int, int]] = []
        for match in _WORD.finditer(text):
            word = match.group()
            for i in range(0, len(word), self.chunk):
                ids.append(self._piece_id(word[i : i + self.chunk]))
                offsets.append((match.start() + i, match.start() + min(i + self.chunk, len(word))))
        return ids, offsets

    def to_config(self) -> dict:
        return {"kind": "hash", "vocab_size": self.vocab_size, "chunk": self.chunk}

    @classmethod
    def from_config(cls, config: dict) -> "HashTokenizer":
        return cls(vocab_size=config["vocab_size"], chunk=config["chunk"])


class HfTokenizer:
    """Adapter over a pretrained fast tokenizer (transformers).

    Trigger marker literals are registered as additional special tokens;
    the owning model must resize its embeddings accordingly.
    """

    def __init__(self, checkpoint: str):
        from transformers import AutoTokenizer

        try:
            tok = AutoTokenizer.from_pretrained(checkpoint, use_fast=True, add_prefix_space=True)
        except (TypeError, ValueError):
            tok = AutoTokenizer.from_pretrained(checkpoint, use_fast=True)
        tok.add_special_tokens(
            {"additional_special_tokens": [TRIGGER_OPEN, TRIGGER_CLOSE]}, replace_additional_special_tokens=False
        )
        self.tok = tok
        self.checkpoint = checkpoint
        self.pad_id = tok.pad_token_id if tok.pad_token_id is not None else 0
        self.cls_id = tok.cls_token_id if tok.cls_token_id is not None else tok.bos_token_id
        self.sep_id = tok.sep_token_id if tok.sep_token_id is not None else tok.eos_token_id
        self.vocab_size = len(tok)

    def encode_word(self, word: str) -> list[int]:
        ids = self.tok(word, add_special_tokens=False)["input_ids"]
        return ids if ids else [self.tok.unk_token_id or 0]

    def encode_text(self, text: str) -> tuple[list[int], list[tuple[int, int]]]:
        enc = self.tok(text, add_special_tokens=False, return_offsets_mapping=True)
        ids, offsets = [], []
        for piece, (s, e) in zip(enc["input_ids"], enc["offset_mapping"]):
            if e > s:
                ids.append(piece)
                offsets.append((s, e))
        return ids, offsets

    def to_config(self) -> dict:
        return {"kind": "hf", "checkpoint": self.checkpoint}


def get_tokenizer(checkpoint: str, vocab_size: int = 4096, chunk: int = 4):
    if checkpoint == MINI_CHECKPOINT:
        return HashTokenizer(vocab_size=vocab_size, chunk=chunk)
    return HfTokenizer(checkpoint)


def tokenizer_from_config(config: dict):
    if config["kind"] == "hash":
        return HashTokenizer.from_config(config)
    return HfTokenizer(config["checkpoint"])


@dataclass
class ModelInput:
    """One encoded instance.

    alignment        original doc token index -> half-open piece range
    doc_region       half-open piece range covering the document (markers
                     included, trailing [SEP] excluded)
    target_range     half-open piece range of the prompt's target slot
    window           inclusive original-token range retained after windowing
    segment          per-piece 0/1 vector (all zeros unless segment marking)
    """

    piece_ids: list[int]
    alignment: dict[int, tuple[int, int]]
    segment: list[int]
    doc_region: tuple[int, int]
    target_range: tuple[int, int]
    window: tuple[int, int]

    @property
    def length(self) -> int:
        return len(self.piece_ids)

    @property
    def n_doc_tokens(self) -> int:
        return len(self.alignment)

    def doc_token_indices(self) -> list[int]:
        return sorted(self.alignment)


def _select_window(
    counts: list[int], block: tuple[int, int], budget: int
) -> tuple[int, int]:
    """Pick the inclusive token window around `block` whose pieces fit `budget`."""
    lo, hi = block
    used = sum(counts[lo : hi + 1])
    if used > budget:
        raise ConfigurationError(
            f"trigger region needs {used} pieces but only {budget} fit after the prompt"
        )
    rem = budget - used
    left_budget = rem // 2
    right_budget = rem - left_budget
    left, right = lo, hi
    while left > 0 and counts[left - 1] <= left_budget:
        left -= 1
        left_budget -= counts[left]
    right_budget += left_budget
    while right < len(counts) - 1 and counts[right + 1] <= right_budget:
        right += 1
        right_budget -= counts[right]
    while left > 0 and counts[left - 1] <= right_budget:
        left -= 1
        right_budget -= counts[left]
    return left, right


def encode(seq: AssembledSequence, max_len: int, tokenizer) -> ModelInput:
    """Encode an assembled sequence into padded-free piece ids with alignment."""
    prompt_ids, prompt_offsets = tokenizer.encode_text(seq.prompt.text)
    if len(prompt_ids) + 3 > max_len:
        raise ConfigurationError(
            f"prompt occupies {len(prompt_ids)} pieces; max_len {max_len} leaves no room "
            "for the document"
        )
    slot = seq.prompt.slots[seq.prompt.target_role]
    target_pieces = [
        k for k, (s, e) in enumerate(prompt_offsets) if s < slot[1] and e > slot[0]
    ]
    if not target_pieces:
        raise IntegrityError(
            f"target slot for role {seq.prompt.target_role!r} maps to no pieces"
        )
    target_range = (1 + target_pieces[0], 1 + target_pieces[-1] + 1)

    word_pieces = [tokenizer.encode_word(tok) for tok in seq.doc_tokens]
    counts = [len(p) for p in word_pieces]
    budget = max_len - len(prompt_ids) - 3
    left, right = _select_window(counts, seq.trigger_block, budget)

    piece_ids = [tokenizer.cls_id] + prompt_ids + [tokenizer.sep_id]
    segment = [0] * len(piece_ids)
    doc_start = len(piece_ids)
    alignment: dict[int, tuple[int, int]] = {}
    for j in range(left, right + 1):
        pieces = word_pieces[j]
        original = seq.remap.inverse(j)
        if original is not None:
            alignment[original] = (len(piece_ids), len(piece_ids) + len(pieces))
        seg_value = seq.segment[j] if seq.segment is not None else 0
        piece_ids.extend(pieces)
        segment.extend([seg_value] * len(pieces))
    doc_region = (doc_start, len(piece_ids))
    piece_ids.append(tokenizer.sep_id)
    segment.append(0)

    window = (min(alignment), max(alignment))
    return ModelInput(piece_ids, alignment, segment, doc_region, target_range, window)


def make_labels(
    event: EventInstance,
    target_role: str,
    n_tokens: int,
    remap: IndexRemap | None = None,
) -> TokenLabelVector:
    """Gold 0/1 vector for one (event, role): 1 on every argument token.

    With a marker remap, each labeled token is mapped individually, so
    inserted marker positions stay 0 and the labeled surface tokens are
    exactly those of the original spans.
    """
    values = np.zeros(n_tokens, dtype=np.float64)
    for span in event.arguments.get(target_role, []):
        for i in range(span.start, span.end + 1):
            j = remap.forward(i) if remap is not None else i
            if not 0 <= j < n_tokens:
                raise IntegrityError(
                    f"role {target_role!r}: token {i} maps to {j}, outside [0, {n_tokens})"
                )
            values[j] = 1.0
    return TokenLabelVector(values)
