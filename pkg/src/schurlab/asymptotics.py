"""Two-term Bessel asymptotics for B_{d,r}(n) and C_{d,r}(n) and the numeric
checks around q = 1 that feed them.

Coefficients reach e^(pi sqrt(2n/3d)), so every comparison between exact and
estimated values happens on natural logs.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import identities as ids
from .identities import Mismatch, VerificationReport
from .partitions import SchurParams
from .qseries import NumericValue, QSeries, SeriesError, qs_eval_complex

DEFAULT_BUDGET = 20_000


# -- Bessel functions ------------------------------------------------------------


def log_bessel_i(order: int, x: float) -> float:
    """log I_s(x) for integer s and x > 0, summed in log space from the peak term."""
    s = abs(int(order))
    if x <= 0:
        raise ValueError("log_bessel_i needs x > 0")
    lx = math.log(x / 2)

    def logterm(k: int) -> float:
        return (2 * k + s) * lx - math.lgamma(k + 1) - math.lgamma(k + s + 1)

    # terms t_k peak where t_{k+1}/t_k = (x/2)^2 / ((k+1)(k+s+1)) crosses 1
    peak = max(0, int((-(s + 2) + math.sqrt(s * s + x * x)) / 2))
    top = logterm(peak)
    total = 1.0
    k = peak + 1
    while True:
        t = math.exp(logterm(k) - top)
        total += t
        if t < 1e-17 * total:
            break
        k += 1
    k = peak - 1
    while k >= 0:
        t = math.exp(logterm(k) - top)
        total += t
        if t < 1e-17 * total:
            break
        k -= 1
    return top + math.log(total)


def bessel_i(order: int, x: float, scaled: bool = False) -> float:
    """Modified Bessel I_s(x) from its power series; ``scaled`` returns e^(-x) I_s(x)."""
    if x < 0:
        raise ValueError("bessel_i needs x >= 0")
    if x == 0:
        return 1.0 if order == 0 else 0.0
    lv = log_bessel_i(order, x)
    return math.exp(lv - x) if scaled else math.exp(lv)


# -- constants -------------------------------------------------------------------


@dataclass(frozen=True)
class AsymptoticConstants:
    alpha1: float
    alpha2: float
    beta1: float
    beta2: float
    alphaP1: float
    alphaP2: float
    betaP1: float
    betaP2: float

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def constants(params: SchurParams) -> AsymptoticConstants:
    d, r = params.d, params.r
    bp1 = d / 12 - r / 2 + r * r / (2 * d)
    bp2 = 11 * d / 108 - r / 6 + r * r / (6 * d)
    scale_a = math.pi / math.sqrt(6 * d)
    scale_b = math.pi**2 / (6 * d)
    return AsymptoticConstants(
        alpha1=scale_a,
        alpha2=math.pi / (3 * math.sqrt(6 * d)),
        beta1=scale_b * bp1,
        beta2=scale_b * bp2,
        alphaP1=1.0,
        alphaP2=1 / 3,
        betaP1=bp1,
        betaP2=bp2,
    )


# -- log-space numbers ------------------------------------------------------------


@dataclass(frozen=True, order=True)
class LogMagnitude:
    """A positive quantity stored as its natural log."""

    log: float

    def __post_init__(self):
        if not math.isfinite(self.log):
            raise ValueError(f"log magnitude must be finite, got {self.log}")

    @classmethod
    def from_int(cls, n: int) -> LogMagnitude:
        """Exact bit length plus a 64-bit top mantissa; no float overflow."""
        if n <= 0:
            raise ValueError("only positive integers have a log magnitude")
        b = n.bit_length()
        shift = max(0, b - 64)
        return cls(math.log(n >> shift) + shift * math.log(2))

    def mantissa_exponent(self) -> tuple[float, int]:
        e10 = self.log / math.log(10)
        exp = math.floor(e10)
        return 10 ** (e10 - exp), exp

    def __str__(self):
        m, e = self.mantissa_exponent()
        return f"{m:.6f}e{e:+d}"

    def ratio(self, other: LogMagnitude) -> float:
        return math.exp(self.log - other.log)


# -- estimates ---------------------------------------------------------------------


def _which(which: str) -> str:
    w = which.upper()
    if w not in ("B", "C"):
        raise ValueError(f"which must be 'B' or 'C', got {which!r}")
    return w


def bessel_argument(params: SchurParams, n: int) -> float:
    return math.pi * math.sqrt(2 * n / (3 * params.d))


def estimate_coefficient(which: str, params: SchurParams, n: int, terms: int = 2) -> LogMagnitude:
    """Log of the one-term closed form or the two-term Bessel expansion."""
    w = _which(which)
    if n < 1:
        raise ValueError("n must be at least 1")
    x = bessel_argument(params, n)
    if terms == 1:
        lead = x - (1.25 * math.log(2) + 0.25 * math.log(3) + 0.25 * math.log(params.d) + 0.75 * math.log(n))
        return LogMagnitude(lead if w == "B" else lead - math.log(3))
    if terms != 2:
        raise ValueError("terms must be 1 or 2")
    c = constants(params)
    alpha, beta = (c.alpha1, c.beta1) if w == "B" else (c.alpha2, c.beta2)
    # alpha n^-1/2 I_1(x) + beta n^-1 I_2(x), factored around the first term
    l1 = math.log(alpha) - 0.5 * math.log(n) + log_bessel_i(1, x)
    rel = beta / alpha / math.sqrt(n) * math.exp(log_bessel_i(2, x) - log_bessel_i(1, x))
    if 1 + rel <= 0:
        raise ValueError(f"two-term estimate is not positive at n={n}")
    return LogMagnitude(l1 + math.log1p(rel))


# -- exact coefficients ---------------------------------------------------------------

_coefficient_cache: dict[tuple[str, int, int], tuple[int, ...]] = {}


def exact_coefficients(which: str, params: SchurParams, N: int, budget: int = DEFAULT_BUDGET) -> list[int]:
    """B(0..N) from the E product or C(0..N) from the bilateral form.

    Builds are cached per (which, d, r); a longer cached build is sliced.
    """
    w = _which(which)
    if N > budget:
        # sweeps cost about N^2/d big-integer additions
        cost = N * N // params.d
        raise ValueError(
            f"N={N} exceeds the compute budget {budget} (estimated {cost:.3g} coefficient updates); "
            "raise the budget explicitly"
        )
    key = (w, params.d, params.r)
    cached = _coefficient_cache.get(key)
    if cached is None or len(cached) < N + 1:
        s = ids.series_E_product(params, N) if w == "B" else ids.series_C_bilateral(params, N)
        cached = s.coeffs
        _coefficient_cache[key] = cached
    return list(cached[: N + 1])


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    exact_log: float
    estimate_log: float

    @property
    def ratio(self) -> float:
        return math.exp(self.exact_log - self.estimate_log)


@dataclass(frozen=True)
class ConvergenceTable:
    which: str
    params: SchurParams
    terms: int
    rows: tuple[ConvergenceRow, ...] = field(default_factory=tuple)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["n", "exact_log", "estimate_log", "ratio"])
        for row in self.rows:
            wr.writerow([row.n, repr(row.exact_log), repr(row.estimate_log), repr(row.ratio)])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "which": self.which,
            "d": self.params.d,
            "r": self.params.r,
            "terms": self.terms,
            "rows": [
                {"n": r.n, "exact_log": repr(r.exact_log), "estimate_log": repr(r.estimate_log), "ratio": repr(r.ratio)}
                for r in self.rows
            ],
        }


def convergence_report(
    which: str, params: SchurParams, n_list: Sequence[int], terms: int = 2, budget: int = DEFAULT_BUDGET
) -> ConvergenceTable:
    coeffs = exact_coefficients(which, params, max(n_list), budget)
    rows = tuple(
        ConvergenceRow(n, LogMagnitude.from_int(coeffs[n]).log, estimate_coefficient(which, params, n, terms).log)
        for n in n_list
    )
    return ConvergenceTable(_which(which), params, terms, rows)


def difference_constant(params: SchurParams, which: str = "B") -> float:
    """Limit of (X_{d,r-1}(n) - X_{d,r}(n)) n^(5/4) e^(-pi sqrt(2n/3d))."""
    d, r = params.d, params.r
    power3 = 0.75 if _which(which) == "B" else 1.75
    return math.pi / (2**1.75 * 3**power3 * d**0.75) * (0.5 - r / d + 1 / (2 * d))


def scaled_difference(params: SchurParams, n: int, which: str = "B", budget: int = DEFAULT_BUDGET) -> float:
    """(X_{d,r-1}(n) - X_{d,r}(n)) n^(5/4) e^(-pi sqrt(2n/3d)) from exact coefficients."""
    if params.r < 2:
        raise ValueError("the difference needs r >= 2")
    lower = SchurParams(params.d, params.r - 1)
    diff = exact_coefficients(which, lower, n, budget)[n] - exact_coefficients(which, params, n, budget)[n]
    sign = 1 if diff > 0 else -1
    if diff == 0:
        return 0.0
    lg = LogMagnitude.from_int(abs(diff)).log + 1.25 * math.log(n) - bessel_argument(params, n)
    return sign * math.exp(lg)


# -- inequalities ----------------------------------------------------------------------


def crossover(
    paramsA: SchurParams, paramsB: SchurParams, which: str = "B", n_max: int = 2000, budget: int = DEFAULT_BUDGET
) -> int | None:
    """Least N0 with coefficient_B(n) > coefficient_A(n) for every N0 <= n <= n_max.

    None when the strict inequality fails at n_max itself.  A finite answer only
    certifies the scanned window.
    """
    a = exact_coefficients(which, paramsA, n_max, budget)
    b = exact_coefficients(which, paramsB, n_max, budget)
    n0 = None
    for n in range(n_max, -1, -1):
        if b[n] > a[n]:
            n0 = n
        else:
            break
    return n0


def crossover_table(paramsA: SchurParams, paramsB: SchurParams, which: str, n_max: int) -> list[tuple[int, int, int]]:
    a = exact_coefficients(which, paramsA, n_max)
    b = exact_coefficients(which, paramsB, n_max)
    return [(n, a[n], b[n]) for n in range(n_max + 1)]


# -- behaviour near q = 1 -------------------------------------------------------------


def near_one_trunc(params: SchurParams, re_z: float) -> int:
    """N >= 4 (pi sqrt(2/(3d)) / Re z)^2, past the saddle of growth against decay."""
    return math.ceil(4 * (math.pi * math.sqrt(2 / (3 * params.d)) / re_z) ** 2)


def eval_F_near_one(which: int, params: SchurParams, z: complex, tol: float = 1e-10, budget: int = 10 * DEFAULT_BUDGET) -> NumericValue:
    """F_1 = B(q) or F_2 = C(q) at q = e^(-z) with truncation chosen from Re z."""
    z = complex(z)
    if z.real <= 0:
        raise ValueError("need Re z > 0")
    if which not in (1, 2):
        raise ValueError("which must be 1 (B) or 2 (C)")
    N = near_one_trunc(params, z.real)
    if N > budget:
        raise SeriesError(f"Re z = {z.real} needs trunc {N}, above the budget {budget}")
    s = ids.series_E_product(params, N) if which == 1 else ids.series_C_bilateral(params, N)
    return qs_eval_complex(s, z, tol=tol)


def scaled_F(which: int, params: SchurParams, z: float, tol: float = 1e-10) -> float:
    """F_j(e^(-z)) e^(-pi^2/(6dz)) for real z, to compare with alpha'_j + beta'_j z."""
    v = eval_F_near_one(which, params, z, tol)
    return (complex(v.value) * math.exp(-math.pi**2 / (6 * params.d * z))).real


def G_value(params: SchurParams, z: float, tol: float = 1e-16) -> float:
    """G(e^(-z)) = sum_n q^(dn(n+1)) / (-q^r, -q^(d-r); q^d)_(n+1) by direct summation."""
    d, r = params.d, params.r
    q = math.exp(-z)
    total = 0.0
    denom = 1.0
    n = 0
    while True:
        denom *= (1 + q ** (r + d * n)) * (1 + q ** (d - r + d * n))
        term = q ** (d * n * (n + 1)) / denom
        total += term
        if term < tol * total:
            return total
        n += 1


def fit_G(params: SchurParams, z_list: Sequence[float] = (0.2, 0.1, 0.05)) -> tuple[float, float]:
    """G(0) and G'(0) from the quadratic through the sampled points.

    Exact interpolation with three nodes is Richardson extrapolation of order 2:
    the z^2 term is cancelled rather than fitted away.
    """
    zs = list(z_list)
    if len(zs) != 3:
        raise ValueError("fit_G needs exactly three z values")
    g = [G_value(params, z) for z in zs]
    (z0, z1, z2), (g0, g1, g2) = zs, g
    # Newton divided differences, then expand about 0
    d01 = (g1 - g0) / (z1 - z0)
    d12 = (g2 - g1) / (z2 - z1)
    d012 = (d12 - d01) / (z2 - z0)
    c0 = g0 - d01 * z0 + d012 * z0 * z1
    c1 = d01 - d012 * (z0 + z1)
    return c0, c1


def check_G_expansion(
    params: SchurParams, z_list: Sequence[float] = (0.2, 0.1, 0.05), tol0: float = 1e-3, rel1: float = 0.02
) -> VerificationReport:
    g0, g1 = fit_G(params, z_list)
    want1 = 2 * params.d / 27
    details = {"G0": g0, "G1": g1, "G0_target": 1 / 3, "G1_target": want1, "z_list": list(z_list)}
    if abs(g0 - 1 / 3) > tol0:
        return VerificationReport("g-expansion", len(z_list), "fail", Mismatch("G(0)", g0, 1 / 3), details)
    if abs(g1 - want1) > rel1 * want1:
        return VerificationReport("g-expansion", len(z_list), "fail", Mismatch("G'(0)", g1, want1), details)
    return VerificationReport("g-expansion", len(z_list), "pass", None, details)


def F1_residuals(params: SchurParams, z_list: Iterable[float] = (0.2, 0.1, 0.05)) -> list[tuple[float, float, float]]:
    """(z, scaled F_1, scaled F_1 - (alpha'_1 + beta'_1 z)) for each z."""
    c = constants(params)
    out = []
    for z in z_list:
        v = scaled_F(1, params, z)
        out.append((z, v, v - (c.alphaP1 + c.betaP1 * z)))
    return out
