"""Seeded Monte Carlo estimators.

Replicate ``i`` always draws from ``SeedSpec(master_seed, i)``, and results
are assembled in replicate order, so every estimate is a pure function of
the config whatever the worker count.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from multiprocessing import get_context
from typing import Callable

import numpy as np

from . import _kernels
from .chain import build_chain, lcs_profile, materialize
from .constants import (
    berry_esseen_center,
    berry_esseen_radius,
    build_ledger,
    c1,
    conditional_variance_N_lower,
    efron_stein_upper,
    interval_I,
    on_probability_lower,
)
from .lcs import (
    count_nonempty_matches,
    decompose_compartments,
    extract_minimal_matching,
    letters_in_long_compartments,
    minimal_matchings,
)
from .words import ModelParams, SeedSpec, sample_x_word, sample_y_word

__all__ = [
    "DEFAULT_SEED",
    "ExperimentConfig",
    "ExperimentSummary",
    "EXPERIMENTS",
    "jackknife_variance",
    "run_replicates",
    "estimate_lc_variance",
    "estimate_event_E",
    "estimate_drift",
    "estimate_slope_event",
    "estimate_nonempty_matches",
    "estimate_conditional_variance_N",
    "slope_window",
]

DEFAULT_SEED = int(os.environ.get("LCSVAR_SEED", "20190611"))
Z95 = 1.959963984540054


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo run. Knobs left as ``None`` fall back to ledger values."""

    params: ModelParams
    n: int
    replicates: int = 10_000
    master_seed: int = DEFAULT_SEED
    k: int | None = None
    nu: float | None = None
    K: float | None = None
    h: int | None = None
    D: int | None = None
    epsilon: float | None = None

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.n < 0:
            raise ValueError("n must be >= 0")

    @property
    def interval(self) -> tuple[float, float]:
        return interval_I(self.n, self.params.p)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["params"] = self.params.to_dict()
        return out

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class ExperimentSummary:
    experiment: str
    estimate: float
    std_error: float
    ci95: tuple[float, float]
    replicates: int
    master_seed: int
    config: dict
    extras: dict = field(default_factory=dict)
    check: bool | None = None
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    def csv_fields(self) -> dict:
        """Deterministic columns only; wall time is left out on purpose."""
        cfg = self.config
        row = {
            "experiment": self.experiment,
            "m": cfg["params"]["m"],
            "p": repr(cfg["params"]["p"]),
            "n": cfg["n"],
            "replicates": self.replicates,
            "seed": self.master_seed,
            "estimate": repr(self.estimate),
            "std_error": repr(self.std_error),
            "ci95_low": repr(self.ci95[0]),
            "ci95_high": repr(self.ci95[1]),
            "check": "" if self.check is None else str(self.check).lower(),
        }
        for key, value in sorted(self.extras.items()):
            row[key] = repr(value) if isinstance(value, float) else value
        return row


def summaries_to_csv(summaries: list[ExperimentSummary], header_lines: list[str] = ()) -> str:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    rows = [s.csv_fields() for s in summaries]
    columns: list[str] = []
    for row in rows:
        columns += [c for c in row if c not in columns]
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def jackknife_variance(values: np.ndarray) -> tuple[float, float]:
    """Unbiased sample variance and its delete-one jackknife standard error."""
    x = np.asarray(values, dtype=float)
    R = x.size
    if R < 2:
        return float("nan"), float("nan")
    c = x - x.mean()
    s2 = float(np.dot(c, c))
    var = s2 / (R - 1)
    if R < 3:
        return var, float("nan")
    loo = (s2 - c * c - c * c / (R - 1)) / (R - 2)
    dev = loo - loo.mean()
    se = math.sqrt((R - 1) / R * float(np.dot(dev, dev)))
    return var, se


def _proportion(hits: np.ndarray) -> tuple[float, float]:
    est = float(np.mean(hits))
    return est, math.sqrt(max(est * (1 - est), 0.0) / hits.size)


def _mean(values: np.ndarray) -> tuple[float, float]:
    est = float(np.mean(values))
    se = float(np.std(values, ddof=1) / math.sqrt(values.size)) if values.size > 1 else float("nan")
    return est, se


def _ci(est: float, se: float) -> tuple[float, float]:
    if math.isnan(se):
        return est, est
    return est - Z95 * se, est + Z95 * se


def _run_range(args) -> np.ndarray:
    func, cfg, ctx, start, stop = args
    out = [func(cfg, ctx, SeedSpec(cfg.master_seed, i).rng()) for i in range(start, stop)]
    return np.asarray(out, dtype=float)


def run_replicates(func: Callable, cfg: ExperimentConfig, ctx: dict | None = None, workers: int = 1) -> np.ndarray:
    """Evaluate ``func(cfg, ctx, rng)`` for every replicate, in replicate order."""
    R = cfg.replicates
    if workers <= 1 or R < 2 * workers:
        return _run_range((func, cfg, ctx, 0, R))
    edges = np.linspace(0, R, 4 * workers + 1).astype(int)
    jobs = [(func, cfg, ctx, int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    with ProcessPoolExecutor(workers, mp_context=get_context("fork")) as pool:
        return np.concatenate(list(pool.map(_run_range, jobs)))


def _lcs(a: np.ndarray, b: np.ndarray, n_alpha: int) -> int:
    return int(_kernels.bitparallel_lcs_length(a, b, n_alpha))


# -- variance of LC_n ---------------------------------------------------------

def _rep_lc_direct(cfg, ctx, rng):
    x = sample_x_word(cfg.params, cfg.n, rng)
    y = sample_y_word(cfg.params, cfg.n, rng)
    return _lcs(x, y, cfg.params.m + 1)


def _rep_lc_chain(cfg, ctx, rng):
    # L_n(n - N) with N ~ Binomial(n, p), same law as LC_n
    n, params = cfg.n, cfg.params
    y = sample_y_word(params, n, rng)
    k = n - int(rng.binomial(n, params.p))
    if k == 0:
        return 0
    z = materialize(build_chain(params, k, rng), k)
    return _lcs(z, y, params.m)


def estimate_lc_variance(cfg: ExperimentConfig, *, via: str = "direct", workers: int = 1) -> ExperimentSummary:
    """Sample variance of ``LC_n`` with a jackknife standard error.

    ``via="chain"`` draws ``L_n(n - N)`` from the insertion chain instead of
    sampling the X-word directly.
    """
    start = time.perf_counter()
    func = {"direct": _rep_lc_direct, "chain": _rep_lc_chain}[via]
    values = run_replicates(func, cfg, workers=workers)
    var, se = jackknife_variance(values)
    bound = efron_stein_upper(cfg.params, cfg.n)
    mean, mean_se = _mean(values)
    extras = {
        "via": via,
        "mean": mean,
        "mean_se": mean_se,
        "efron_stein_bound": bound,
        "var_over_n": var / cfg.n if cfg.n else float("nan"),
        "var_over_n_se": se / cfg.n if cfg.n else float("nan"),
        "ledger_C9": build_ledger(cfg.params).C9,
    }
    check = None if math.isnan(se) else bool(var <= bound + 4 * se)
    return ExperimentSummary("variance", var, se, _ci(var, se), cfg.replicates, cfg.master_seed,
                             cfg.to_dict(), extras, check, time.perf_counter() - start)


# -- event E: the first floor(nu n) chain letters all match ---------------------

def _rep_event_E(cfg, ctx, rng):
    k = ctx["k"]
    y = sample_y_word(cfg.params, cfg.n, rng)
    if k == 0:
        return 1.0
    z = materialize(build_chain(cfg.params, k, rng), k)
    return float(_lcs(z, y, cfg.params.m) == k)


def estimate_event_E(cfg: ExperimentConfig, *, workers: int = 1) -> ExperimentSummary:
    start = time.perf_counter()
    m = cfg.params.m
    nu = cfg.nu if cfg.nu is not None else 1 / (2 * m)
    if not nu < 1 / m:
        raise ValueError(f"event E needs nu < 1/m, got nu={nu}")
    k = math.floor(nu * cfg.n)
    hits = run_replicates(_rep_event_E, cfg, {"k": k}, workers)
    est, se = _proportion(hits)
    bound = 1 - math.exp(-c1(nu, m) * cfg.n)
    extras = {"nu": nu, "k": k, "C1": c1(nu, m), "lower_bound": bound}
    check = bool(est >= bound - 4 * se)
    return ExperimentSummary("eventE", est, se, _ci(est, se), cfg.replicates, cfg.master_seed,
                             cfg.to_dict(), extras, check, time.perf_counter() - start)


# -- drift P(L(k+1) - L(k) = 1) --------------------------------------------

def _rep_drift(cfg, ctx, rng):
    k = ctx["k"]
    y = sample_y_word(cfg.params, cfg.n, rng)
    chain = build_chain(cfg.params, k + 1, rng)
    before = _lcs(materialize(chain, k), y, cfg.params.m) if k else 0
    after = _lcs(materialize(chain, k + 1), y, cfg.params.m)
    return float(after - before)


def estimate_drift(cfg: ExperimentConfig, k: int | None = None, *, workers: int = 1) -> ExperimentSummary:
    """Probability that one more insertion raises the LCS against a length-n Y-word.

    The drift floor ``lambda/m`` is asserted only for ``k >= nu n``.
    """
    start = time.perf_counter()
    k = cfg.k if k is None else k
    if k is None or not 0 <= k < cfg.n:
        raise ValueError(f"drift needs 0 <= k < n, got k={k}, n={cfg.n}")
    ledger = build_ledger(cfg.params)
    nu = cfg.nu if cfg.nu is not None else ledger.nu
    hits = run_replicates(_rep_drift, cfg, {"k": k}, workers)
    est, se = _proportion(hits)
    floor_ = ledger.lam / cfg.params.m
    in_regime = k >= nu * cfg.n
    extras = {"k": k, "nu": nu, "ledger_lambda_over_m": floor_, "in_drift_regime": in_regime}
    check = bool(est >= floor_ - 4 * se) if in_regime else None
    return ExperimentSummary("drift", est, se, _ci(est, se), cfg.replicates, cfg.master_seed,
                             replace(cfg, k=k).to_dict(), extras, check, time.perf_counter() - start)


# -- slope event O_n ---------------------------------------------------------

def slope_window(n: int, p: float) -> np.ndarray:
    """Integer chain lengths ``n - N`` for ``N`` in the interval I."""
    lo, hi = interval_I(n, p)
    ks = np.arange(0, n + 1)
    return ks[(n - ks >= lo - 1e-12) & (n - ks <= hi + 1e-12)]


def _rep_slope(cfg, ctx, rng):
    y = sample_y_word(cfg.params, cfg.n, rng)
    prof = lcs_profile(build_chain(cfg.params, cfg.n, rng), y).values
    Lw = prof[ctx["window"]]
    rise = Lw[None, :] - Lw[:, None]
    mask = ctx["mask"]
    return float(np.all(rise[mask] >= ctx["required"][mask]))


def estimate_slope_event(cfg: ExperimentConfig, *, workers: int = 1) -> ExperimentSummary:
    """Probability that ``L(j) - L(i) >= K (j - i)`` for all window points ``j >= i + h``.

    The window is the set of chain lengths ``n - N`` with ``N`` in I, the
    lengths at which the profile is actually read by ``L_n(n - N)``.
    """
    start = time.perf_counter()
    if cfg.n < 1:
        raise ValueError("slope event needs n >= 1")
    ledger = build_ledger(cfg.params)
    K = ledger.K if cfg.K is None else cfg.K
    h = ledger.h_of_n(cfg.n, strict=False) if cfg.h is None else cfg.h
    nu = cfg.nu if cfg.nu is not None else ledger.nu
    window = slope_window(cfg.n, cfg.params.p)
    if not np.any(window >= nu * cfg.n):
        raise ValueError(f"window [nu n, n] meets no chain length n - N with N in I (n={cfg.n})")
    gaps = window[None, :] - window[:, None]
    mask = gaps >= max(h, 1)
    ctx = {"window": window, "mask": mask, "required": K * gaps}
    hits = run_replicates(_rep_slope, cfg, ctx, workers)
    est, se = _proportion(hits)
    uses_ledger = cfg.K is None and cfg.h is None
    bound = on_probability_lower(ledger, cfg.n) if uses_ledger else float("nan")
    extras = {
        "K": K, "h": h, "window_lo": int(window.min()), "window_hi": int(window.max()),
        "pairs_checked": int(mask.sum()), "ledger_K": ledger.K,
        "ledger_h": ledger.h_of_n(cfg.n, strict=False), "theorem_lower_bound": bound,
    }
    check = bool(est >= bound - 4 * se) if uses_ledger else None
    return ExperimentSummary("slope", est, se, _ci(est, se), cfg.replicates, cfg.master_seed,
                             replace(cfg, K=K, h=h).to_dict(), extras, check, time.perf_counter() - start)


# -- non-empty matches of the canonical minimal pair ----------------------

def _rep_matches(cfg, ctx, rng):
    k = ctx["k"]
    y = sample_y_word(cfg.params, cfg.n, rng)
    z = materialize(build_chain(cfg.params, k, rng), k) if k else np.zeros(0, np.int64)
    pair = extract_minimal_matching(z, y)
    count = count_nonempty_matches(pair)
    ell = len(pair)
    last = pair.eta[-1] if ell else 0
    unmatched_frac = (last - ell) / last if last else 0.0
    decomp = decompose_compartments(y, cfg.params.m)
    n_long = letters_in_long_compartments(decomp, ctx["D"])
    row = [count, unmatched_frac, float(ell <= (1 - ctx["epsilon"]) * last), n_long]
    if ctx["exhaustive"]:
        mins = minimal_matchings(z, y)
        row.append(min(count_nonempty_matches(p) for p in mins))
    return row


def estimate_nonempty_matches(cfg: ExperimentConfig, k: int | None = None, *, exhaustive: bool = False,
                              workers: int = 1) -> ExperimentSummary:
    """Mean count of non-empty matches of the canonical minimal pair for ``Z(k)`` vs Y.

    With ``exhaustive`` (short words only) the minimum over every minimal
    pair is computed as well, and the agreement rate is reported.
    """
    start = time.perf_counter()
    k = cfg.k if k is None else k
    if k is None or not 0 <= k <= cfg.n:
        raise ValueError(f"matches needs 0 <= k <= n, got k={k}")
    if exhaustive and max(k, cfg.n) > 14:
        raise ValueError("exhaustive minimal-pair enumeration is limited to n <= 14")
    ledger = build_ledger(cfg.params)
    D = ledger.D if cfg.D is None else cfg.D
    eps = ledger.epsilon if cfg.epsilon is None else cfg.epsilon
    ctx = {"k": k, "D": D, "epsilon": eps, "exhaustive": exhaustive}
    rows = run_replicates(_rep_matches, cfg, ctx, workers)
    counts = rows[:, 0]
    est, se = _mean(counts)
    lam_n = ledger.lam * cfg.n
    extras = {
        "k": k,
        "D": D,
        "epsilon": eps,
        "ledger_lambda_n": lam_n,
        "fraction_below_lambda_n": float(np.mean(counts < lam_n)),
        "count_min": float(counts.min()),
        "count_median": float(np.median(counts)),
        "count_max": float(counts.max()),
        "mean_unmatched_fraction": float(rows[:, 1].mean()),
        "fraction_unmatched_at_least_eps": float(rows[:, 2].mean()),
        "mean_letters_in_long_compartments": float(rows[:, 3].mean()),
    }
    if exhaustive:
        extras["fraction_canonical_equals_min"] = float(np.mean(rows[:, 4] == counts))
    return ExperimentSummary("matches", est, se, _ci(est, se), cfg.replicates, cfg.master_seed,
                             replace(cfg, k=k).to_dict(), extras, None, time.perf_counter() - start)


# -- conditional variance of N --------------------------------------------

def _rep_binomial(cfg, ctx, rng):
    return int(rng.binomial(cfg.n, cfg.params.p))


def estimate_conditional_variance_N(cfg: ExperimentConfig, *, workers: int = 1) -> ExperimentSummary:
    """``Var(N | N in I)`` and ``P(N in I)`` against the normal-approximation window."""
    start = time.perf_counter()
    n, p = cfg.n, cfg.params.p
    N = run_replicates(_rep_binomial, cfg, workers=workers)
    lo, hi = cfg.interval
    inside = (N >= lo) & (N <= hi)
    prob, prob_se = _proportion(inside)
    center = berry_esseen_center()
    radius = berry_esseen_radius(n, p) if n else float("inf")
    floor_ = p * (1 - p) * n / 1000
    extras = {
        "interval_lo": lo, "interval_hi": hi, "p_in_I": prob, "p_in_I_se": prob_se,
        "normal_mass": center, "berry_esseen_radius": radius,
        "bound_p1p_n_over_1000": floor_,
        "analytic_lower_bound": conditional_variance_N_lower(n, p) if n else 0.0,
        "in_I_count": int(inside.sum()),
    }
    if inside.sum() < 3:
        extras["note"] = "fewer than 3 replicates landed in I"
        return ExperimentSummary("condvarN", float("nan"), float("nan"), (float("nan"),) * 2,
                                 cfg.replicates, cfg.master_seed, cfg.to_dict(), extras, None,
                                 time.perf_counter() - start)
    var, se = jackknife_variance(N[inside])
    window_ok = abs(prob - center) <= radius + 4 * prob_se
    if n >= 900 / (p * (1 - p)):
        check = bool(window_ok and var >= floor_ - 4 * se)
    else:
        check = bool(window_ok)
    return ExperimentSummary("condvarN", var, se, _ci(var, se), cfg.replicates, cfg.master_seed,
                             cfg.to_dict(), extras, check, time.perf_counter() - start)


EXPERIMENTS = {
    "variance": estimate_lc_variance,
    "eventE": estimate_event_E,
    "drift": estimate_drift,
    "slope": estimate_slope_event,
    "matches": estimate_nonempty_matches,
    "condvarN": estimate_conditional_variance_N,
}
