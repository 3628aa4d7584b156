"""Exact LCS lengths, canonical minimal matchings, matches and compartments.

Index conventions follow the matching literature: ``pi`` and ``eta`` are
1-based positions into the first and second word.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np

from . import _kernels
from .words import as_word

__all__ = [
    "lcs_length",
    "lcs_length_bitparallel",
    "MatchingPair",
    "Match",
    "CompartmentDecomposition",
    "extract_minimal_matching",
    "enumerate_matches",
    "boundary_segments",
    "count_nonempty_matches",
    "decompose_compartments",
    "letters_in_long_compartments",
    "maximal_matchings",
    "minimal_matchings",
    "match_compartment_spans",
]

# Backtrace keeps the full (|a|+1) x (|b|+1) table; cap it.
MAX_BACKTRACE_LENGTH = 4096


def lcs_length(a: Sequence[int], b: Sequence[int]) -> int:
    return int(_kernels.dp_lcs_length(as_word(a), as_word(b)))


def lcs_length_bitparallel(a: Sequence[int], b: Sequence[int]) -> int:
    """Same value as :func:`lcs_length`, computed 64 columns per machine word."""
    a = as_word(a)
    b = as_word(b)
    if a.size == 0 or b.size == 0:
        return 0
    n_alpha = int(max(a.max(), b.max())) + 1
    return int(_kernels.bitparallel_lcs_length(a, b, n_alpha))


@dataclass(frozen=True)
class MatchingPair:
    """``first[pi[i]] == second[eta[i]]`` with both index tuples strictly increasing."""

    pi: tuple[int, ...]
    eta: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "pi", tuple(int(v) for v in self.pi))
        object.__setattr__(self, "eta", tuple(int(v) for v in self.eta))
        if len(self.pi) != len(self.eta):
            raise ValueError("pi and eta must have equal length")
        for seq in (self.pi, self.eta):
            if any(x >= y for x, y in zip(seq, seq[1:])) or (seq and seq[0] < 1):
                raise ValueError("pi and eta must be strictly increasing and 1-based")

    def __len__(self) -> int:
        return len(self.pi)

    def is_valid_for(self, a: Sequence[int], b: Sequence[int]) -> bool:
        if self.pi and (self.pi[-1] > len(a) or self.eta[-1] > len(b)):
            return False
        return all(a[i - 1] == b[j - 1] for i, j in zip(self.pi, self.eta))

    def __le__(self, other: "MatchingPair") -> bool:
        # coordinatewise partial order; only defined between equal lengths
        if len(self) != len(other):
            return NotImplemented
        return all(x <= y for x, y in zip(self.pi, other.pi)) and all(
            x <= y for x, y in zip(self.eta, other.eta)
        )

    def to_json(self) -> str:
        return json.dumps({"pi": list(self.pi), "eta": list(self.eta)})

    @classmethod
    def from_json(cls, text: str) -> "MatchingPair":
        obj = json.loads(text)
        return cls(obj["pi"], obj["eta"])


@dataclass(frozen=True)
class Match:
    """Quadruple ``(pi_i, pi_next, eta_i, eta_next)`` of consecutive matched positions."""

    pi_i: int
    pi_next: int
    eta_i: int
    eta_next: int

    @property
    def non_empty(self) -> bool:
        return self.eta_i + 2 <= self.eta_next

    @property
    def unmatched(self) -> range:
        """Second-word positions skipped between the two matched letters."""
        return range(self.eta_i + 1, self.eta_next)


def extract_minimal_matching(a: Sequence[int], b: Sequence[int]) -> MatchingPair:
    """Greedy-leftmost maximal matching.

    Left to right, each step takes the smallest ``eta`` that still admits a
    completion to full LCS length, then the smallest ``pi`` for it. Anything
    coordinatewise below this pair would have been chosen earlier, so the
    result is minimal among maximal-length pairs.
    """
    a = as_word(a)
    b = as_word(b)
    if max(a.size, b.size) > MAX_BACKTRACE_LENGTH:
        raise ValueError(f"backtrace limited to words of length <= {MAX_BACKTRACE_LENGTH}")
    S = _kernels.dp_suffix_table(a, b)
    ell = int(S[0, 0])
    na = a.size
    # next_in_a[i][c]: smallest index >= i holding letter c (na if none)
    n_alpha = int(max(a.max(initial=0), b.max(initial=0))) + 1
    next_in_a = np.full((na + 1, n_alpha), na, dtype=np.int64)
    for i in range(na - 1, -1, -1):
        next_in_a[i] = next_in_a[i + 1]
        next_in_a[i, a[i]] = i
    pi, eta = [], []
    ci = cj = 0
    for remaining in range(ell, 0, -1):
        for j in range(cj, b.size):
            i = next_in_a[ci, b[j]]
            if i < na and S[i + 1, j + 1] >= remaining - 1:
                break
        else:  # pragma: no cover - S guarantees a feasible step
            raise AssertionError("backtrace lost feasibility")
        pi.append(i + 1)
        eta.append(j + 1)
        ci, cj = i + 1, j + 1
    return MatchingPair(pi, eta)


def enumerate_matches(pair: MatchingPair, b_len: int | None = None) -> list[Match]:
    """The ``len(pair) - 1`` interior matches, in order."""
    if b_len is not None and pair.eta and pair.eta[-1] > b_len:
        raise ValueError("eta exceeds the second word's length")
    return [
        Match(pair.pi[i], pair.pi[i + 1], pair.eta[i], pair.eta[i + 1])
        for i in range(len(pair) - 1)
    ]


def boundary_segments(pair: MatchingPair, a_len: int, b_len: int) -> tuple[Match, Match]:
    """Sentinel quadruples before the first and after the last matched position.

    Uses ``pi(0) = eta(0) = 0`` and ``pi(l+1) = a_len + 1``, ``eta(l+1) = b_len + 1``.
    These are not matches; they expose the leading and trailing skipped letters.
    """
    if not pair.pi:
        return Match(0, a_len + 1, 0, b_len + 1), Match(0, a_len + 1, 0, b_len + 1)
    lead = Match(0, pair.pi[0], 0, pair.eta[0])
    tail = Match(pair.pi[-1], a_len + 1, pair.eta[-1], b_len + 1)
    return lead, tail


def count_nonempty_matches(pair: MatchingPair) -> int:
    eta = pair.eta
    return sum(1 for x, y in zip(eta, eta[1:]) if y - x >= 2)


@dataclass(frozen=True)
class CompartmentDecomposition:
    """Compartment start positions (1-based) over a word of length ``n``."""

    boundaries: tuple[int, ...]
    n: int

    @property
    def d(self) -> int:
        return len(self.boundaries)

    def intervals(self) -> list[tuple[int, int]]:
        ends = [j - 1 for j in self.boundaries[1:]] + [self.n]
        return list(zip(self.boundaries, ends))

    def lengths(self) -> list[int]:
        return [end - start + 1 for start, end in self.intervals()]

    def compartment_of(self) -> np.ndarray:
        """Compartment number (0-based) of every position 1..n, as a length-n array."""
        out = np.empty(self.n, dtype=np.int64)
        for c, (start, end) in enumerate(self.intervals()):
            out[start - 1:end] = c
        return out

    def to_json(self) -> str:
        return json.dumps({"boundaries": list(self.boundaries), "n": self.n})


def decompose_compartments(y: Sequence[int], m: int, rule: str = "complete") -> CompartmentDecomposition:
    """Split ``y`` into compartments.

    ``rule="complete"``: every compartment but the last is the shortest
    segment, from its start, that holds all ``m`` letters; the next one starts
    right after the completing letter.

    ``rule="literal"``: ``j_i`` is the first ``s > j_{i-1}`` such that
    ``y[j_{i-1}..s]`` holds ``m`` distinct letters, so the completing letter
    opens the next compartment and each closed compartment holds ``m - 1``
    letters. For ``m = 2`` the compartments are exactly the runs.
    """
    y = as_word(y, m, y_word=True)
    n = y.size
    if n == 0:
        return CompartmentDecomposition((), 0)
    if rule not in ("complete", "literal"):
        raise ValueError(f"unknown compartment rule {rule!r}")
    boundaries = [1]
    seen: set[int] = set()
    for s in range(1, n + 1):
        letter = int(y[s - 1])
        seen.add(letter)
        if len(seen) < m:
            continue
        if rule == "complete":
            if s < n:
                boundaries.append(s + 1)
            seen = set()
        else:
            boundaries.append(s)
            seen = {letter}
    return CompartmentDecomposition(tuple(boundaries), n)


def letters_in_long_compartments(decomp: CompartmentDecomposition, D: int) -> int:
    """Total length of compartments of length at least ``D``."""
    if D < 1:
        raise ValueError("D must be >= 1")
    return sum(length for length in decomp.lengths() if length >= D)


def match_compartment_spans(pair: MatchingPair, decomp: CompartmentDecomposition) -> list[int]:
    """For each interior match, how many compartments its unmatched letters touch."""
    where = decomp.compartment_of()
    spans = []
    for match in enumerate_matches(pair):
        gap = where[match.eta_i:match.eta_next - 1]
        spans.append(len(set(gap.tolist())))
    return spans


def maximal_matchings(a: Sequence[int], b: Sequence[int]) -> Iterator[MatchingPair]:
    """Every maximal-length matching pair, by exhaustive choice of index subsets.

    Exponential; meant as a ground truth for short words (length <= ~14).
    """
    a = as_word(a)
    b = as_word(b)
    ell = lcs_length(a, b)
    if ell == 0:
        yield MatchingPair((), ())
        return
    by_letters: dict[tuple[int, ...], list[tuple[int, ...]]] = defaultdict(list)
    for idx in combinations(range(b.size), ell):
        by_letters[tuple(b[list(idx)].tolist())].append(idx)
    for idx in combinations(range(a.size), ell):
        key = tuple(a[list(idx)].tolist())
        for jdx in by_letters.get(key, ()):
            yield MatchingPair([i + 1 for i in idx], [j + 1 for j in jdx])


def minimal_matchings(a: Sequence[int], b: Sequence[int]) -> list[MatchingPair]:
    """Maximal pairs with no other maximal pair coordinatewise below them."""
    pairs = list(maximal_matchings(a, b))
    if len(pairs) <= 1:
        return pairs
    arr = np.array([p.pi + p.eta for p in pairs], dtype=np.int64)
    keep = []
    for r in range(arr.shape[0]):
        below = np.all(arr <= arr[r], axis=1)
        below[r] = False
        if not below.any():
            keep.append(pairs[r])
    return keep
