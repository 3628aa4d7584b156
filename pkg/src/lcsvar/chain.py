"""Random insertion chain Z(1), ..., Z(n) and its LCS profile against a Y-word.

``Z(1) = U_1``, ``Z(2) = U_1 U_2``, and for k >= 3 the word ``Z(k)`` is
``Z(k-1)`` with ``U_k`` inserted at position ``T_k``, uniform on ``{2, ..., k-1}``.
Letters at and after ``T_k`` shift right by one.
"""
from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np
from scipy import stats

from . import _kernels
from .errors import BudgetExceeded
from .words import ModelParams, RngLike, as_word, resolve_rng

__all__ = [
    "InsertionChain",
    "LcsProfile",
    "build_chain",
    "materialize",
    "lcs_profile",
    "exact_chain_law",
    "verify_distribution_identity",
    "DistributionReport",
]


@dataclass(frozen=True, eq=False)
class InsertionChain:
    """Letters ``U`` and insertion positions ``T``.

    ``U[k-1]`` is ``U_k``. ``T[k-1]`` is ``T_k`` (1-based position) for k >= 3;
    entries for k = 1, 2 are 0 and unused.
    """

    U: np.ndarray
    T: np.ndarray
    m: int

    def __post_init__(self):
        U = as_word(self.U, self.m, y_word=True).copy()
        T = np.array(self.T, dtype=np.int64)
        if T.shape != U.shape:
            raise ValueError("U and T must have the same length")
        for k in range(3, U.size + 1):
            if not 2 <= T[k - 1] <= k - 1:
                raise ValueError(f"T_{k}={int(T[k - 1])} outside 2..{k - 1}")
        U.setflags(write=False)
        T.setflags(write=False)
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "T", T)

    @property
    def n(self) -> int:
        return int(self.U.size)

    def to_json(self) -> str:
        return json.dumps({"m": self.m, "U": self.U.tolist(), "T": self.T.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "InsertionChain":
        obj = json.loads(text)
        return cls(np.array(obj["U"]), np.array(obj["T"]), int(obj["m"]))


@dataclass(frozen=True, eq=False)
class LcsProfile:
    """``values[k]`` = LCS length of ``Z(k)`` and the Y-word, for k = 0..n."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.int64)
        if v.size == 0 or v[0] != 0:
            raise ValueError("profile must start at L(0) = 0")
        steps = np.diff(v)
        if np.any((steps != 0) & (steps != 1)):
            raise ValueError("profile increments must be 0 or 1")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self) -> int:
        return int(self.values.size)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "L"])
        writer.writerows(enumerate(self.values.tolist()))
        return buf.getvalue()


def build_chain(params: ModelParams, n: int, seed: RngLike) -> InsertionChain:
    if n < 1:
        raise ValueError("chain length must be >= 1")
    rng = resolve_rng(seed)
    U = rng.integers(0, params.m, size=n, dtype=np.int64)
    T = np.zeros(n, dtype=np.int64)
    if n >= 3:
        # T_k uniform on {2, ..., k-1}
        T[2:] = rng.integers(2, np.arange(3, n + 1), dtype=np.int64)
    return InsertionChain(U, T, params.m)


def materialize(chain: InsertionChain, k: int) -> np.ndarray:
    """The word ``Z(k)``."""
    if not 1 <= k <= chain.n:
        raise ValueError(f"k={k} outside 1..{chain.n}")
    z = chain.U[: min(k, 2)].tolist()
    for step in range(3, k + 1):
        z.insert(int(chain.T[step - 1]) - 1, int(chain.U[step - 1]))
    return np.array(z, dtype=np.int64)


def lcs_profile(chain: InsertionChain, y: Sequence[int]) -> LcsProfile:
    y = as_word(y, chain.m, y_word=True)
    n_alpha = chain.m
    return LcsProfile(_kernels.chain_profile(chain.U, chain.T, y, n_alpha))


def exact_chain_law(m: int, k: int) -> dict[tuple[int, ...], Fraction]:
    """Exact law of ``Z(k)`` by summing over every ``(U, T)`` outcome."""
    if k < 1:
        raise ValueError("k must be >= 1")
    t_ranges = [range(2, step) for step in range(3, k + 1)]
    t_weight = Fraction(1)
    for r in t_ranges:
        t_weight /= len(r)
    u_weight = Fraction(1, m**k)
    law: dict[tuple[int, ...], Fraction] = {}
    for U in product(range(m), repeat=k):
        for T in product(*t_ranges):
            z = list(U[:2])
            for step, t in enumerate(T, start=3):
                z.insert(t - 1, U[step - 1])
            key = tuple(z)
            law[key] = law.get(key, Fraction(0)) + u_weight * t_weight
    return law


@dataclass
class DistributionReport:
    m: int
    k: int
    samples: int
    chi2: float
    dof: int
    p_value: float
    exact_checked: bool
    exact_uniform: bool | None

    @property
    def passed(self) -> bool:
        return self.p_value > 1e-3 and self.exact_uniform is not False


def verify_distribution_identity(
    params: ModelParams, k: int, samples: int, seed: RngLike, *, exact_up_to: int = 4
) -> DistributionReport:
    """Compare the law of ``Z(k)`` with the uniform law on all ``m**k`` strings.

    The uniform law is that of the stripped X-word conditioned on its length.
    A chi-square test runs on ``samples`` chains; for ``k <= exact_up_to`` the
    law is also computed exactly and compared with ``m**-k`` for equality.
    """
    m = params.m
    if k < 1:
        raise ValueError("k must be >= 1")
    if k * math.log(m) > math.log(1e6) + 1e-12:
        raise BudgetExceeded(f"m**k = {m}**{k} too large to tabulate (limit 1e6)")
    rng = resolve_rng(seed)
    counts: Counter = Counter()
    for _ in range(samples):
        chain = build_chain(params, k, rng)
        counts[tuple(materialize(chain, k).tolist())] += 1
    n_cells = m**k
    observed = np.zeros(n_cells)
    for key, c in counts.items():
        idx = 0
        for letter in key:
            idx = idx * m + letter
        observed[idx] = c
    chi2, p_value = stats.chisquare(observed)
    exact_uniform = None
    if k <= exact_up_to:
        law = exact_chain_law(m, k)
        target = Fraction(1, n_cells)
        exact_uniform = len(law) == n_cells and all(v == target for v in law.values())
    return DistributionReport(
        m=m, k=k, samples=samples, chi2=float(chi2), dof=n_cells - 1,
        p_value=float(p_value), exact_checked=k <= exact_up_to, exact_uniform=exact_uniform,
    )
