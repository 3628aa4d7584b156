"""Closed-form constants and bounds for the variance lower-bound argument.

All values are doubles. Quantities that are rational in ``m`` are also kept
as exact fractions in :attr:`ConstantsLedger.exact`. Very small or very
large terms (``((m-1)/m)**D``, the ``h(n)`` window) are handled in log space.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Mapping

from scipy.optimize import brentq, minimize_scalar
from scipy.special import erf

from .errors import InvariantViolation
from .words import ModelParams

__all__ = [
    "efron_stein_upper",
    "c1",
    "c2",
    "delta_of_epsilon",
    "expected_l22",
    "l22_law",
    "l22_mgf",
    "ConstantsLedger",
    "build_ledger",
    "lower_bound_constant",
    "partial_c10",
    "on_probability_lower",
    "conditional_variance_N_lower",
    "berry_esseen_center",
    "berry_esseen_radius",
    "interval_I",
]

E9 = math.exp(9.0)


def efron_stein_upper(params: ModelParams, n: int) -> float:
    m, p = params.m, params.p
    return n / 2 * (2 - p**2 - (1 + (1 - p) ** 2) / m)


def c1(nu: float, m: int) -> float:
    """Exponential rate of ``P(L_n(nu n) < nu n)``; zero at ``nu = 1/m``."""
    if not 0 < nu <= 1 / m + 1e-15:
        raise ValueError(f"c1 needs 0 < nu <= 1/m, got nu={nu}, m={m}")
    nu = min(nu, 1 / m)
    return (
        math.log(m)
        + (nu - 1) * math.log(m - 1)
        + nu * math.log(nu)
        - (nu - 1) * math.log(1 - nu)
    )


def c2(m: int) -> float:
    return m / (2 * (m - 1))


def delta_of_epsilon(epsilon: float, m: int) -> float:
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    inner = epsilon * (math.log(m) - math.log(epsilon)) - (1 - epsilon) * math.log1p(-epsilon)
    return epsilon + math.sqrt(2 / c2(m) * inner)


def l22_law(m: int) -> dict[int, Fraction]:
    """Exact law of the LCS of two independent uniform length-2 words."""
    m3 = Fraction(m**3)
    return {
        0: (m**3 - 4 * m**2 + 6 * m - 3) / m3,
        1: (4 * m**2 - 7 * m + 3) / m3,
        2: Fraction(m) / m3,
    }


def expected_l22(m: int) -> float:
    """Half the expected LCS of two uniform length-2 words."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return float(Fraction(4 * m**2 - 5 * m + 3, 2 * m**3))


def l22_mgf(s: float, m: int) -> float:
    """``E exp(s (L - 2 xi_m))`` for the length-2 LCS ``L`` with ``xi_m = 11/(10m)``."""
    return math.exp(-11 * s / (5 * m)) * (
        m * math.exp(2 * s) + (4 * m**2 - 7 * m + 3) * math.exp(s) + m**3 - 4 * m**2 + 6 * m - 3
    ) / m**3


def interval_I(n: int, p: float) -> tuple[float, float]:
    """``[np - sqrt(np(1-p)), np + sqrt(np(1-p))]``."""
    sd = math.sqrt(n * p * (1 - p))
    return n * p - sd, n * p + sd


def berry_esseen_center() -> float:
    """Standard normal mass of ``[-1, 1]``."""
    return float(erf(1 / math.sqrt(2)))


def berry_esseen_radius(n: int, p: float) -> float:
    return 1 / math.sqrt(n * p * (1 - p))


def conditional_variance_N_lower(n: int, p: float) -> float:
    """Lower bound on ``Var(N | N in I)`` from normal approximation error terms.

    Returns 0 when the two approximation terms cross (the bound is then void).
    """
    s = math.sqrt(n * p * (1 - p))
    root2pi = math.sqrt(2 * math.pi)
    mass = root2pi * berry_esseen_center()  # integral of exp(-x^2/2) over [-1, 1]
    second = mass - 2 * math.exp(-0.5)  # integral of x^2 exp(-x^2/2) over [-1, 1]
    ratio = (second - 2 * root2pi / s) / (mass + root2pi / s)
    if ratio <= 0:
        return 0.0
    shift = 2 / (mass / root2pi - 1 / s)
    gap = s * math.sqrt(ratio) - shift
    return gap * gap if gap > 0 else 0.0


@dataclass
class ConstantsLedger:
    """Every constant of the lower-bound argument for one ``(m, p)``."""

    m: int
    p: float
    nu: float
    epsilon: float
    C2: float
    delta_eps: float
    xi_m: float
    expected_l22_half: float
    tau_m: float
    c_tau: float
    C1: float
    C3: float
    C4: float
    C5: float
    C6: float
    D: int
    C7: int
    log_P_tilde_bound: float
    c_delta: float
    C8: float
    lam: float
    K: float
    K1: float
    C9: float
    A: float
    B: float
    A_from_constants: float
    B_from_constants: float
    n_On_threshold: float
    n_var_threshold: float
    n_h_window: float
    l22_mgf_inf: float
    exact: dict = field(default_factory=dict)

    def h_of_n(self, n: float, *, strict: bool = True) -> int:
        """``ceil(2 ln n / K^2)``; with ``strict`` it must also be ``<= K1 sqrt(n)``."""
        if strict and n < self.n_h_window:
            raise ValueError(
                f"h(n) window 2 ln n / K^2 <= h <= K1 sqrt(n) is empty for n={n:g} "
                f"(needs n >= {self.n_h_window:.6g})"
            )
        return math.ceil(2 * math.log(n) / self.K**2)

    def invariants(self) -> list[tuple[str, bool]]:
        m = self.m
        log_choose_d = math.log(2 * self.D * m) + self.D * math.log((m - 1) / m)
        return [
            ("nu < 1/m", self.nu < 1 / m),
            ("1/m < xi_m", 1 / m < self.xi_m),
            ("xi_m < E L2(2)/2", self.xi_m < self.expected_l22_half),
            ("delta(eps) < 1/11", self.delta_eps < 1 / 11),
            ("1/(1 - delta(eps)) < xi_m m", 1 / (1 - self.delta_eps) < self.xi_m * m),
            (
                "2 D m ((m-1)/m)^D < xi_m nu eps",
                log_choose_d < math.log(self.xi_m * self.nu * self.epsilon),
            ),
            ("lambda <= 1", self.lam <= 1),
            ("K = lambda/(2m) <= 1/(2m)", self.K <= 1 / (2 * m)),
            ("C3 >= e^-10", self.C3 >= math.exp(-10)),
            ("C4 <= e^11", self.C4 <= math.exp(11)),
            ("C5 <= 1 + 2000m", self.C5 <= 1 + 2000 * m),
            ("C8 >= 1/(2m)", self.C8 >= 1 / (2 * m)),
            ("inf_{s<0} mgf < exp(-c(tau_m))", self.l22_mgf_inf < math.exp(-self.c_tau)),
            ("B <= min(C3 nu, C6, C8)", self.B <= self.B_from_constants),
        ]

    def failed_invariants(self) -> list[str]:
        return [name for name, ok in self.invariants() if not ok]

    def to_dict(self) -> dict:
        out = asdict(self)
        out["exact"] = {k: str(v) for k, v in self.exact.items()}
        return out

    def to_json(self) -> str:
        return json.dumps({"schema_version": 1, "ledger": self.to_dict()}, indent=2)

    def to_table(self) -> str:
        rows = [(k, v) for k, v in self.to_dict().items() if k != "exact"]
        rows += [(f"{k} (exact)", v) for k, v in self.to_dict()["exact"].items()]
        width = max(len(k) for k, _ in rows)
        lines = []
        for k, v in rows:
            text = f"{v:.10g}" if isinstance(v, float) else str(v)
            lines.append(f"{k.ljust(width)}  {text}")
        lines.append("")
        for name, ok in self.invariants():
            lines.append(f"[{'ok' if ok else 'FAIL'}] {name}")
        return "\n".join(lines)


def _h_window_threshold(K: float, K1: float) -> float:
    # larger root in t = ln n of  ln K1 + t/2 = ln(2t) - 2 ln K
    g = lambda t: math.log(K1) + t / 2 - math.log(2 * t) + 2 * math.log(K)
    hi = 4.0
    while g(hi) < 0:
        hi *= 2
    return math.exp(brentq(g, 2.0, hi, xtol=1e-12))


def build_ledger(params: ModelParams) -> ConstantsLedger:
    """Populate every constant with the fixed choices ``nu = 1/(2m)``,
    ``eps = e^-9/(1 + ln m)``, ``xi_m = 11/(10m)``, ``c(tau_m) = 1/(1000m)``.

    Raises :class:`InvariantViolation` naming any inequality that fails.
    """
    m, p = params.m, params.p
    nu = 1 / (2 * m)
    epsilon = math.exp(-9) / (1 + math.log(m))
    C2 = c2(m)
    delta_eps = delta_of_epsilon(epsilon, m)
    xi_m = 11 / (10 * m)
    el22_half = expected_l22(m)
    tau_m = 2 * el22_half - 2 * xi_m
    c_tau = 1 / (1000 * m)

    C1 = c1(nu, m)
    C3 = (delta_eps - epsilon) ** 2 * C2 / 2
    C4 = 1 / (-math.expm1(-C3))
    C5 = math.exp(c_tau / 2) / math.expm1(c_tau / 2)
    C6 = c_tau * nu / 2

    x = (m - 1) / m
    D = math.ceil(40 * E9 * m**3 * (1 + math.log(m)) / (11 * math.log(x) ** 2))
    # P(window of length D lies in one compartment) <= m x^D
    log_P_tilde_bound = math.log(m) + D * math.log(x)
    c_delta = -log_P_tilde_bound
    C8 = c_delta / D

    lam = xi_m * nu / 2 * epsilon / (D - 1)
    K = lam / (2 * m)
    K1 = math.sqrt(p * (1 - p)) / (20 * math.sqrt(5))
    C9 = K**2 / 64000 * p * (1 - p)

    A = max(1 + 2000 * m, 20 * E9)
    B = math.exp(-10) / m**2
    A_from_constants = max(C4, C5, float(D))
    B_from_constants = min(C3 * nu, C6, C8)

    mgf = minimize_scalar(lambda s: l22_mgf(s, m), bounds=(-50.0, 0.0), method="bounded",
                          options={"xatol": 1e-10})
    exact = {
        "nu": Fraction(1, 2 * m),
        "xi_m": Fraction(11, 10 * m),
        "C2": Fraction(m, 2 * (m - 1)),
        "expected_l22_half": Fraction(4 * m**2 - 5 * m + 3, 2 * m**3),
        "tau_m": Fraction(4 * m**2 - 5 * m + 3, m**3) - Fraction(22, 10 * m),
        "c_tau": Fraction(1, 1000 * m),
        "C6": Fraction(1, 4000 * m**2),
    }
    ledger = ConstantsLedger(
        m=m, p=p, nu=nu, epsilon=epsilon, C2=C2, delta_eps=delta_eps, xi_m=xi_m,
        expected_l22_half=el22_half, tau_m=tau_m, c_tau=c_tau, C1=C1, C3=C3, C4=C4,
        C5=C5, C6=C6, D=D, C7=D, log_P_tilde_bound=log_P_tilde_bound, c_delta=c_delta,
        C8=C8, lam=lam, K=K, K1=K1, C9=C9, A=A, B=B, A_from_constants=A_from_constants,
        B_from_constants=B_from_constants,
        n_On_threshold=math.exp(10) * m**2 * math.log(80 * E9 + 8000 * m),
        n_var_threshold=900 / (p * (1 - p)),
        n_h_window=_h_window_threshold(K, K1),
        l22_mgf_inf=float(mgf.fun),
        exact=exact,
    )
    failed = ledger.failed_invariants()
    if failed:
        raise InvariantViolation(f"ledger invariants fail for m={m}, p={p}: {failed}")
    return ledger


def on_probability_lower(ledger: ConstantsLedger, n: float, *, A: float | None = None,
                         B: float | None = None) -> float:
    """``1 - A e^{-Bn} - n e^{-2 K^2 h(n)}`` with ``h(n) = ceil(2 ln n / K^2)``."""
    A = ledger.A if A is None else A
    B = ledger.B if B is None else B
    h = ledger.h_of_n(n, strict=False)
    return 1 - A * math.exp(-B * n) - n * math.exp(-2 * ledger.K**2 * h)


def lower_bound_constant(params: ModelParams, c10: float, ledger: ConstantsLedger | None = None) -> float:
    """``min(C9, C10)`` for a supplied (partial) ``C10``."""
    if not c10 > 0:
        raise ValueError(f"C10 must be positive, got {c10}")
    ledger = ledger or build_ledger(params)
    return min(ledger.C9, c10)


def partial_c10(variance_by_n: Mapping[int, float]) -> float:
    """``min Var LC_n / n`` over the supplied (small) range of ``n``."""
    if not variance_by_n:
        raise ValueError("no variances supplied")
    return min(float(v) / n for n, v in variance_by_n.items() if n >= 1)
