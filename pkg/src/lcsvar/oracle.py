"""Exact laws of LCS lengths at tiny sizes, by full enumeration with rational weights.

Enumeration order is lexicographic (``itertools.product``), so failure
reports are reproducible. Probabilities are :class:`fractions.Fraction`.
"""
from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import BudgetExceeded
from .lcs import lcs_length
from .words import ModelParams, as_word

__all__ = [
    "ExactDistribution",
    "exact_lc_distribution",
    "exact_uniform_lc_distribution",
    "exact_profile_distribution",
    "exact_mixture_distribution",
    "exact_variance_table",
    "distributions_to_csv",
    "distributions_to_json",
    "subsequence_set",
    "brute_force_lcs_length",
    "PAIR_BUDGET",
    "PROFILE_BUDGET",
]

PAIR_BUDGET = 10**8
PROFILE_BUDGET = 10**6


@dataclass(frozen=True)
class ExactDistribution:
    support: Mapping[int, Fraction]

    def __post_init__(self):
        clean = {int(v): Fraction(q) for v, q in sorted(self.support.items()) if q != 0}
        if sum(clean.values()) != 1:
            raise ValueError(f"probabilities sum to {sum(clean.values())}, not 1")
        if any(q < 0 for q in clean.values()):
            raise ValueError("negative probability")
        object.__setattr__(self, "support", clean)

    @classmethod
    def from_counts(cls, weighted_counts: Iterable[tuple[Fraction, Counter]]) -> "ExactDistribution":
        """Combine integer outcome counts, each block scaled by its exact weight."""
        support: dict[int, Fraction] = {}
        for weight, counts in weighted_counts:
            for value, c in counts.items():
                support[value] = support.get(value, Fraction(0)) + weight * c
        return cls(support)

    @property
    def mean(self) -> Fraction:
        return sum((v * q for v, q in self.support.items()), Fraction(0))

    @property
    def variance(self) -> Fraction:
        mu = self.mean
        return sum(((v - mu) ** 2 * q for v, q in self.support.items()), Fraction(0))

    def prob(self, value: int) -> Fraction:
        return self.support.get(value, Fraction(0))

    def to_dict(self) -> dict:
        return {
            "support": {str(v): str(q) for v, q in self.support.items()},
            "mean": str(self.mean),
            "variance": str(self.variance),
            "mean_float": float(self.mean),
            "variance_float": float(self.variance),
        }


def _check_budget(size: int, budget: int, what: str):
    if size > budget:
        raise BudgetExceeded(f"{what}: {size} outcomes exceeds the budget of {budget}")


def _words(alphabet: int, n: int) -> list[np.ndarray]:
    return [np.array(w, dtype=np.int64) for w in product(range(alphabet), repeat=n)]


def exact_lc_distribution(params: ModelParams, n: int) -> ExactDistribution:
    """Law of ``LC_n`` by enumerating every X-word (with the extra letter) and Y-word."""
    m = params.m
    _check_budget((m + 1) ** n * m**n, PAIR_BUDGET, "exact_lc_distribution")
    p = params.p_exact
    q = (1 - p) / m
    ys = _words(m, n)
    # an X-word's weight depends only on how many extra letters it holds
    by_extra: dict[int, Counter] = {e: Counter() for e in range(n + 1)}
    for x in _words(m + 1, n):
        extra = int(np.count_nonzero(x == m))
        counts = by_extra[extra]
        for y in ys:
            counts[lcs_length(x, y)] += 1
    y_weight = Fraction(1, m**n)
    return ExactDistribution.from_counts(
        (p**e * q ** (n - e) * y_weight, counts) for e, counts in by_extra.items()
    )


def exact_uniform_lc_distribution(m: int, n: int) -> ExactDistribution:
    """Law of the LCS of two independent uniform words over ``m`` letters (no extra letter)."""
    _check_budget(m ** (2 * n), PAIR_BUDGET, "exact_uniform_lc_distribution")
    words = _words(m, n)
    counts = Counter(lcs_length(x, y) for x in words for y in words)
    return ExactDistribution.from_counts([(Fraction(1, m ** (2 * n)), counts)])


def exact_profile_distribution(params: ModelParams, n: int, y: Sequence[int], k: int) -> ExactDistribution:
    """Law of ``L_n(k)`` for a fixed Y-word: ``Z(k)`` is uniform on ``m**k`` strings."""
    m = params.m
    y = as_word(y, m, y_word=True)
    if y.size != n:
        raise ValueError(f"y has length {y.size}, expected n={n}")
    if k < 0:
        raise ValueError("k must be >= 0")
    _check_budget(m**k, PROFILE_BUDGET, "exact_profile_distribution")
    counts = Counter(lcs_length(z, y) for z in _words(m, k))
    return ExactDistribution.from_counts([(Fraction(1, m**k), counts)])


def exact_mixture_distribution(params: ModelParams, n: int) -> ExactDistribution:
    """``sum_y P(y) sum_k P(N = n-k) law(L_n(k) | y)``, N binomial(n, p)."""
    m = params.m
    _check_budget(m**n * sum(m**k for k in range(n + 1)), PAIR_BUDGET, "exact_mixture_distribution")
    p = params.p_exact
    support: dict[int, Fraction] = {}
    y_weight = Fraction(1, m**n)
    for y in _words(m, n):
        for k in range(n + 1):
            weight = comb(n, k) * p ** (n - k) * (1 - p) ** k * y_weight
            for value, prob in exact_profile_distribution(params, n, y, k).support.items():
                support[value] = support.get(value, Fraction(0)) + weight * prob
    return ExactDistribution(support)


def exact_variance_table(params: ModelParams, n_max: int) -> dict[int, Fraction]:
    """Exact ``Var LC_n`` for ``n = 1 .. n_max``."""
    m = params.m
    _check_budget((m + 1) ** n_max * m**n_max, PAIR_BUDGET, "exact_variance_table")
    return {n: exact_lc_distribution(params, n).variance for n in range(1, n_max + 1)}


def distributions_to_csv(table: Mapping[int, ExactDistribution]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "value", "probability", "probability_float"])
    for n, dist in table.items():
        for value, q in dist.support.items():
            writer.writerow([n, value, str(q), repr(float(q))])
    return buf.getvalue()


def distributions_to_json(table: Mapping[int, ExactDistribution], **meta) -> str:
    payload = {"schema_version": 1, **meta, "distributions": {str(n): d.to_dict() for n, d in table.items()}}
    return json.dumps(payload, indent=2)


def subsequence_set(word: Sequence[int]) -> set[tuple[int, ...]]:
    """Every subsequence of ``word`` (as tuples), including the empty one."""
    word = tuple(int(c) for c in word)
    out = {()}
    for letter in word:
        out |= {s + (letter,) for s in out}
    return out


def brute_force_lcs_length(a: Sequence[int], b: Sequence[int]) -> int:
    """LCS length as the longest tuple common to both subsequence sets."""
    return max(len(s) for s in subsequence_set(a) & subsequence_set(b))
