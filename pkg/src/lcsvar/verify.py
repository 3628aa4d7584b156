"""Invariant suite behind ``lcsvar verify``.

Each check returns a :class:`CheckResult`; ``run_suite`` runs one tier.
The quick tier is sized for CI, the full tier for release validation.
"""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import partial
from itertools import product
from typing import Callable

import numpy as np

from . import _kernels
from .chain import build_chain, exact_chain_law, lcs_profile, materialize
from .constants import build_ledger, efron_stein_upper, expected_l22
from .errors import InvariantViolation
from .experiments import (
    ExperimentConfig,
    estimate_conditional_variance_N,
    estimate_event_E,
    estimate_lc_variance,
)
from .lcs import extract_minimal_matching, lcs_length, minimal_matchings
from .oracle import (
    exact_lc_distribution,
    exact_mixture_distribution,
    exact_uniform_lc_distribution,
    subsequence_set,
)
from .words import ModelParams, SeedSpec

__all__ = ["CheckResult", "TIERS", "run_suite"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def _all_words(alphabet: int, max_len: int) -> list[tuple[int, ...]]:
    return [w for n in range(max_len + 1) for w in product(range(alphabet), repeat=n)]


def check_oracle_equivalence(max_len: int = 6, alphabet: int = 3) -> CheckResult:
    """DP LCS against longest common subsequence by set intersection, all pairs."""
    words = _all_words(alphabet, max_len)
    arrays = [np.array(w, dtype=np.int64) for w in words]
    subs = [subsequence_set(w) for w in words]
    bad = 0
    for i, a in enumerate(arrays):
        for j, b in enumerate(arrays):
            brute = max(len(s) for s in subs[i] & subs[j])
            if _kernels.dp_lcs_length(a, b) != brute:
                bad += 1
    return CheckResult("oracle equivalence", bad == 0,
                       f"{len(words) ** 2} pairs, lengths <= {max_len}, alphabet {alphabet}: {bad} mismatches")


def check_kernel_equivalence(pairs: int = 10_000, max_n: int = 512, max_m: int = 4,
                             seed: int = 1) -> CheckResult:
    rng = SeedSpec(seed).rng()
    bad = 0
    for _ in range(pairs):
        m = int(rng.integers(1, max_m + 1))
        a = rng.integers(0, m, size=int(rng.integers(0, max_n + 1)))
        b = rng.integers(0, m, size=int(rng.integers(0, max_n + 1)))
        if _kernels.bitparallel_lcs_length(a, b, m) != _kernels.dp_lcs_length(a, b):
            bad += 1
    return CheckResult("kernel equivalence", bad == 0,
                       f"{pairs} random pairs, n <= {max_n}, m <= {max_m}: {bad} mismatches")


def check_distribution_identity(m: int = 2, k_max: int = 4) -> CheckResult:
    """Every ``Z(k)`` string has probability exactly ``m**-k``."""
    bad = []
    for k in range(1, k_max + 1):
        law = exact_chain_law(m, k)
        if len(law) != m**k or any(v != Fraction(1, m**k) for v in law.values()):
            bad.append(k)
    return CheckResult("distribution identity", not bad,
                       f"m={m}, k=1..{k_max}, non-uniform at k={bad}" if bad else f"m={m}, k=1..{k_max} exact")


def check_l22_closed_form(m: int = 2) -> CheckResult:
    exact = exact_uniform_lc_distribution(m, 2).mean / 2
    target = Fraction(4 * m**2 - 5 * m + 3, 2 * m**3)
    near = float(exact_lc_distribution(ModelParams(m, 1e-6), 2).mean) / 2
    ok = exact == target and abs(near - expected_l22(m)) <= 1e-4
    return CheckResult("E L2(2)/2 closed form", ok,
                       f"uniform enumeration {exact}, closed form {target}, p=1e-6 gives {near:.7f}")


def check_efron_stein_exact(n_max: int = 4, m: int = 2, ps=(0.25, 0.5)) -> CheckResult:
    rows, ok = [], True
    for p in ps:
        params = ModelParams(m, p)
        for n in range(1, n_max + 1):
            var = float(exact_lc_distribution(params, n).variance)
            bound = efron_stein_upper(params, n)
            ok &= var <= bound
            rows.append(f"p={p} n={n}: {var:.4f} <= {bound:.4f}")
    return CheckResult("Efron-Stein exact", ok, "; ".join(rows))


def check_ledger(ms=range(2, 11), p: float = 0.5) -> CheckResult:
    failed = []
    for m in ms:
        try:
            build_ledger(ModelParams(m, p))
        except InvariantViolation as exc:
            failed.append(str(exc))
    return CheckResult("ledger invariants", not failed,
                       "; ".join(failed) if failed else f"m in {list(ms)} all hold")


def check_mixture(n: int = 4, m: int = 2, p: float = 0.5) -> CheckResult:
    params = ModelParams(m, p)
    direct = exact_lc_distribution(params, n).support
    mixed = exact_mixture_distribution(params, n).support
    return CheckResult("mixture identity", direct == mixed, f"n={n}, m={m}, p={p}: exact equality {direct == mixed}")


def check_profile(chains: int = 1000, n: int = 200, spot: int = 50, spot_n: int = 64,
                  m: int = 2, seed: int = 2) -> CheckResult:
    params = ModelParams(m, 0.5)
    bad_steps = bad_spot = 0
    for i in range(chains):
        rng = SeedSpec(seed, i).rng()
        y = rng.integers(0, m, size=n)
        steps = np.diff(lcs_profile(build_chain(params, n, rng), y).values)
        bad_steps += int(np.any((steps != 0) & (steps != 1)))
    for i in range(spot):
        rng = SeedSpec(seed + 1, i).rng()
        y = rng.integers(0, m, size=spot_n)
        chain = build_chain(params, spot_n, rng)
        prof = lcs_profile(chain, y).values
        again = [0] + [lcs_length(materialize(chain, k), y) for k in range(1, spot_n + 1)]
        bad_spot += int(not np.array_equal(prof, again))
    ok = bad_steps == 0 and bad_spot == 0
    return CheckResult("profile sanity", ok,
                       f"{chains} chains n={n}: {bad_steps} bad; {spot} recomputed n={spot_n}: {bad_spot} differ")


def check_minimality(max_len: int = 6, m: int = 2) -> CheckResult:
    words = _all_words(m, max_len)
    bad = 0
    for a in words:
        for b in words:
            if extract_minimal_matching(a, b) not in minimal_matchings(a, b):
                bad += 1
    return CheckResult("canonical pair in M_min", bad == 0,
                       f"{len(words) ** 2} pairs, lengths <= {max_len}, m={m}: {bad} violations")


def check_mc_efron_stein(ns=(100, 250, 500), replicates: int = 100_000, ps=(0.25, 0.5), m: int = 2,
                         seed: int = 3) -> CheckResult:
    rows, ok = [], True
    for p in ps:
        for n in ns:
            s = estimate_lc_variance(ExperimentConfig(ModelParams(m, p), n, replicates, seed))
            ok &= bool(s.check)
            rows.append(f"p={p} n={n}: {s.estimate:.2f}+-{s.std_error:.2f} vs {s.extras['efron_stein_bound']:.1f}")
    return CheckResult("Efron-Stein Monte Carlo", ok, "; ".join(rows))


def check_mc_event_E(ns=(100, 200), replicates: int = 10_000, m: int = 2, seed: int = 4) -> CheckResult:
    rows, ok = [], True
    for n in ns:
        s = estimate_event_E(ExperimentConfig(ModelParams(m, 0.5), n, replicates, seed, nu=1 / (2 * m)))
        ok &= bool(s.check)
        rows.append(f"n={n}: {s.estimate:.4f} vs bound {s.extras['lower_bound']:.4f}")
    return CheckResult("event E lower bound", ok, "; ".join(rows))


def check_mc_window(n: int = 4000, replicates: int = 100_000, p: float = 0.5, seed: int = 5) -> CheckResult:
    s = estimate_conditional_variance_N(ExperimentConfig(ModelParams(2, p), n, replicates, seed))
    return CheckResult("normal window for N", bool(s.check),
                       f"P(N in I)={s.extras['p_in_I']:.4f}, Var(N | I)={s.estimate:.1f} "
                       f"(floor {s.extras['bound_p1p_n_over_1000']:.1f})")


Check = Callable[[], CheckResult]

TIERS: dict[str, list[Check]] = {
    "quick": [
        partial(check_oracle_equivalence, 5, 3),
        partial(check_kernel_equivalence, 2000, 512, 4),
        partial(check_distribution_identity, 2, 4),
        check_l22_closed_form,
        check_efron_stein_exact,
        check_ledger,
        check_mixture,
        partial(check_profile, 200, 200, 20, 64),
        partial(check_minimality, 5),
        partial(check_mc_efron_stein, (100,), 2000, (0.5,)),
        partial(check_mc_event_E, (100,), 2000),
        partial(check_mc_window, 4000, 20_000),
    ],
    "full": [
        check_oracle_equivalence,
        check_kernel_equivalence,
        check_distribution_identity,
        partial(check_distribution_identity, 3, 4),
        check_l22_closed_form,
        partial(check_l22_closed_form, 3),
        check_efron_stein_exact,
        check_ledger,
        check_mixture,
        check_profile,
        check_minimality,
        partial(check_minimality, 5, 3),
        check_mc_efron_stein,
        check_mc_event_E,
        check_mc_window,
    ],
}


def run_suite(tier: str = "quick", report: Callable[[CheckResult], None] | None = None) -> list[CheckResult]:
    if tier not in TIERS:
        raise ValueError(f"unknown tier {tier!r}; choose from {sorted(TIERS)}")
    results = []
    for check in TIERS[tier]:
        start = time.perf_counter()
        result = check()
        result.seconds = time.perf_counter() - start
        results.append(result)
        if report is not None:
            report(result)
    return results
