"""Letter model and reproducible random words.

Letters are 0-based integer codes. The shared alphabet is ``0 .. m-1`` and
the extra letter that only the X-word can emit is always code ``m``.

X letters: each shared code with probability ``(1 - p) / m``, code ``m``
with probability ``p``. Y letters: uniform over the shared codes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

__all__ = [
    "ModelParams",
    "SeedSpec",
    "as_word",
    "sample_x_word",
    "sample_y_word",
    "strip_extra_letter",
    "word_to_json",
    "word_from_json",
    "word_to_text",
    "word_from_text",
    "resolve_rng",
]

WORD_DTYPE = np.int64
_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class ModelParams:
    """Alphabet size ``m`` (shared letters) and bias ``p`` of the extra letter."""

    m: int
    p: float

    def __post_init__(self):
        if isinstance(self.m, bool) or int(self.m) != self.m:
            raise ValueError(f"ModelParams.m must be an integer, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        if self.m < 2:
            raise ValueError(f"ModelParams invariant m >= 2 violated: m={self.m}")
        if not 0.0 < float(self.p) < 1.0:
            raise ValueError(f"ModelParams invariant 0 < p < 1 violated: p={self.p}")
        object.__setattr__(self, "p", float(self.p))

    @property
    def p_exact(self) -> Fraction:
        # decimal literal rather than the binary expansion: p=1e-6 -> 1/10**6
        return Fraction(repr(self.p))

    def x_letter_probs(self) -> np.ndarray:
        probs = np.full(self.m + 1, (1.0 - self.p) / self.m)
        probs[self.m] = self.p
        return probs

    def x_thresholds(self) -> np.ndarray:
        """Upper CDF thresholds for shared codes ``0 .. m-1``; above the last is code m."""
        q = (1 - self.p_exact) / self.m
        return np.array([float(q * (j + 1)) for j in range(self.m)])

    def to_dict(self) -> dict:
        return {"m": self.m, "p": self.p}


@dataclass(frozen=True)
class SeedSpec:
    """Counter-based stream selector.

    ``(master_seed, stream_index)`` keys a Philox generator, so replicate
    ``i`` sees the same numbers no matter which worker runs it.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError("master_seed must fit in 64 unsigned bits")
        if int(self.stream_index) < 0:
            raise ValueError("stream_index must be non-negative")

    def rng(self) -> np.random.Generator:
        return np.random.Generator(
            np.random.Philox(key=[int(self.master_seed), int(self.stream_index)])
        )

    def stream(self, index: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, index)


RngLike = Union[SeedSpec, np.random.Generator]


def resolve_rng(seed: RngLike) -> np.random.Generator:
    """A SeedSpec opens a fresh stream; a Generator is used (and advanced) as is."""
    if isinstance(seed, SeedSpec):
        return seed.rng()
    if isinstance(seed, np.random.Generator):
        return seed
    raise TypeError(f"expected SeedSpec or numpy Generator, got {type(seed).__name__}")


def as_word(letters: Sequence[int], m: int | None = None, *, y_word: bool = False) -> np.ndarray:
    """Coerce to a 1-D int64 array, validating codes against ``m`` when given."""
    word = np.asarray(letters, dtype=WORD_DTYPE)
    if word.ndim != 1:
        raise ValueError("a word is one-dimensional")
    if word.size and word.min() < 0:
        raise ValueError("letter codes are non-negative")
    if m is not None and word.size:
        limit = m if y_word else m + 1
        if word.max() >= limit:
            kind = "Y-word" if y_word else "word"
            raise ValueError(f"{kind} letter code {int(word.max())} outside 0..{limit - 1}")
    return word


def sample_x_word(params: ModelParams, n: int, seed: RngLike) -> np.ndarray:
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = resolve_rng(seed)
    u = rng.random(n)
    return np.searchsorted(params.x_thresholds(), u, side="right").astype(WORD_DTYPE)


def sample_y_word(params: ModelParams, n: int, seed: RngLike) -> np.ndarray:
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = resolve_rng(seed)
    return rng.integers(0, params.m, size=n, dtype=WORD_DTYPE)


def strip_extra_letter(x: Sequence[int], m: int) -> tuple[np.ndarray, int]:
    """Drop every code-``m`` letter; return the remaining subword and how many were dropped."""
    x = as_word(x)
    keep = x != m
    return x[keep], int(x.size - keep.sum())


def word_to_json(word: Sequence[int]) -> str:
    return json.dumps([int(c) for c in word])


def word_from_json(text: str) -> np.ndarray:
    return as_word(json.loads(text))


def word_to_text(word: Sequence[int]) -> str:
    """Compact corpus line: one base-36 digit per letter."""
    try:
        return "".join(_DIGITS[int(c)] for c in word)
    except IndexError:
        raise ValueError("text encoding supports letter codes 0..35 only") from None


def word_from_text(line: str) -> np.ndarray:
    return as_word([int(ch, 36) for ch in line.strip()])
