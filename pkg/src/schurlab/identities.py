"""Generating functions for Schur-type partitions and checks of their identities.

Every builder returns an exact :class:`~schurlab.qseries.QSeries` (or a
:class:`BivariateSeries` in x and q).  Verifiers compare two independently
assembled sides coefficient by coefficient and report the first mismatch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from . import partitions as pt
from .partitions import SchurParams
from .qseries import (
    QSeries,
    SeriesError,
    align,
    eta_series,
    over_binomials,
    qs_inverse,
    qs_mul,
    theta_half_shift_series,
    theta_sum_series,
    times_binomials,
)


@dataclass(frozen=True)
class Mismatch:
    exponent: Any
    lhs: int
    rhs: int

    def to_json(self) -> dict:
        exp = list(self.exponent) if isinstance(self.exponent, tuple) else self.exponent
        return {"exponent": exp, "lhs": str(self.lhs), "rhs": str(self.rhs)}


@dataclass(frozen=True)
class VerificationReport:
    identity_name: str
    trunc: Any
    status: str
    first_mismatch: Mismatch | None = None
    details: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.status not in ("pass", "fail"):
            raise ValueError(f"status must be 'pass' or 'fail', got {self.status!r}")
        if self.status == "fail" and self.first_mismatch is None:
            raise ValueError("a failing report must locate its first mismatch")

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        trunc = list(self.trunc) if isinstance(self.trunc, tuple) else self.trunc
        return {
            "identity_name": self.identity_name,
            "trunc": trunc,
            "status": self.status,
            "first_mismatch": self.first_mismatch.to_json() if self.first_mismatch else None,
            "details": self.details,
        }

    def describe(self) -> str:
        if self.passed:
            return f"{self.identity_name}: pass (trunc {self.trunc})"
        m = self.first_mismatch
        return f"{self.identity_name}: FAIL at exponent {m.exponent}: lhs {m.lhs} != rhs {m.rhs}"


def _report(name: str, trunc, mismatch: Mismatch | None, **details) -> VerificationReport:
    return VerificationReport(name, trunc, "fail" if mismatch else "pass", mismatch, details)


def compare_sequences(lhs: Sequence[int], rhs: Sequence[int], name: str, start: int = 0) -> VerificationReport:
    """Entrywise equality of two integer sequences indexed from ``start``."""
    n = min(len(lhs), len(rhs))
    for i in range(n):
        if lhs[i] != rhs[i]:
            return _report(name, start + n - 1, Mismatch(start + i, lhs[i], rhs[i]))
    return _report(name, start + n - 1, None)


def verify_equal(lhs: QSeries, rhs: QSeries, name: str) -> VerificationReport:
    """Compare two series to their common truncation.

    Raises :class:`SeriesError` when the offsets are not comparable.
    """
    a, b = align(lhs, rhs)
    base = a.offset24 / 24
    for i, (x, y) in enumerate(zip(a.coeffs, b.coeffs)):
        if x != y:
            exp = base + i
            return _report(name, a.trunc, Mismatch(int(exp) if exp == int(exp) else exp, x, y))
    return _report(name, a.trunc, None)


def first_failure(name: str, reports: Sequence[VerificationReport]) -> VerificationReport:
    """Fold sub-checks into one report, failing on the first failing part."""
    for rep in reports:
        if not rep.passed:
            return VerificationReport(
                name, rep.trunc, "fail", rep.first_mismatch, {"failed_part": rep.identity_name}
            )
    return VerificationReport(
        name, max((r.trunc for r in reports), default=0), "pass", None,
        {"parts": [r.identity_name for r in reports]},
    )


# -- bivariate series ---------------------------------------------------------


def _qshift(s: QSeries, k: int, n: int) -> QSeries:
    """q^k * s truncated to q^n."""
    if k > n:
        return QSeries((0,) * (n + 1))
    return QSeries(((0,) * k + s.coeffs)[: n + 1])


def _zero(n: int) -> QSeries:
    return QSeries((0,) * (n + 1))


@dataclass(frozen=True)
class BivariateSeries:
    """sum_{m <= x_trunc} coeffs[m](q) x^m with every coefficient truncated at q^q_trunc."""

    coeffs: tuple[QSeries, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if not self.coeffs:
            raise SeriesError("a BivariateSeries needs at least one x-coefficient")
        n = self.coeffs[0].trunc
        for c in self.coeffs:
            if c.offset24 != 0 or c.trunc != n:
                raise SeriesError("bivariate coefficients must share trunc and have offset24 = 0")

    @property
    def x_trunc(self) -> int:
        return len(self.coeffs) - 1

    @property
    def q_trunc(self) -> int:
        return self.coeffs[0].trunc

    @classmethod
    def one(cls, x_trunc: int, q_trunc: int) -> BivariateSeries:
        return cls((QSeries.one(q_trunc).truncate(q_trunc),) + (_zero(q_trunc),) * x_trunc)

    @classmethod
    def from_x_poly(cls, polys: Sequence[QSeries], x_trunc: int, q_trunc: int) -> BivariateSeries:
        """Build from a short list of q-series coefficients of 1, x, x^2, ..."""
        out = []
        for m in range(x_trunc + 1):
            if m < len(polys):
                out.append(QSeries(polys[m].truncate(q_trunc).coeffs[: q_trunc + 1]))
            else:
                out.append(_zero(q_trunc))
        return cls(tuple(out))

    def coefficient(self, m: int, n: int) -> int:
        return self.coeffs[m].coeffs[n]

    def _fit(self, other: BivariateSeries) -> tuple[int, int]:
        return min(self.x_trunc, other.x_trunc), min(self.q_trunc, other.q_trunc)

    def __add__(self, other: BivariateSeries) -> BivariateSeries:
        m, n = self._fit(other)
        return BivariateSeries(
            tuple(QSeries((a + b).coeffs[: n + 1]) for a, b in zip(self.coeffs[: m + 1], other.coeffs))
        )

    def __neg__(self):
        return BivariateSeries(tuple(-c for c in self.coeffs))

    def __sub__(self, other: BivariateSeries) -> BivariateSeries:
        return self + (-other)

    def __mul__(self, other: BivariateSeries) -> BivariateSeries:
        m, n = self._fit(other)
        out = []
        for k in range(m + 1):
            acc = [0] * (n + 1)
            for i in range(k + 1):
                a, b = self.coeffs[i], other.coeffs[k - i]
                if any(a.coeffs) and any(b.coeffs):
                    prod = qs_mul(a.truncate(n), b.truncate(n))
                    for t, v in enumerate(prod.coeffs[: n + 1]):
                        acc[t] += v
            out.append(QSeries(tuple(acc)))
        return BivariateSeries(tuple(out))

    def times_x_binomial(self, sign: int, k: int) -> BivariateSeries:
        """Multiply by (1 + sign * x q^k)."""
        n = self.q_trunc
        out = [self.coeffs[0]]
        for m in range(1, self.x_trunc + 1):
            out.append(self.coeffs[m] + _qshift(self.coeffs[m - 1], k, n).scale(sign))
        return BivariateSeries(tuple(out))

    def over_x_binomial(self, sign: int, k: int) -> BivariateSeries:
        """Divide by (1 + sign * x q^k)."""
        n = self.q_trunc
        out = [self.coeffs[0]]
        for m in range(1, self.x_trunc + 1):
            out.append(self.coeffs[m] - _qshift(out[m - 1], k, n).scale(sign))
        return BivariateSeries(tuple(out))

    def times_q_series(self, s: QSeries) -> BivariateSeries:
        n = self.q_trunc
        return BivariateSeries(tuple(QSeries(qs_mul(c, s.truncate(n)).coeffs[: n + 1]) for c in self.coeffs))

    def substitute(self, k: int) -> BivariateSeries:
        """x -> x q^k, an exact reindexing of the q-coefficients."""
        n = self.q_trunc
        return BivariateSeries(tuple(_qshift(c, k * m, n) for m, c in enumerate(self.coeffs)))

    def at_x_power(self, k: int) -> QSeries:
        """Specialize x = q^k (k >= 1).

        Dropped x-terms start at q^(k*(x_trunc+1)), so the result is known
        through q^min(q_trunc, k*(x_trunc+1) - 1).
        """
        if k < 1:
            raise SeriesError("use collapse_at_one for x = 1")
        n = min(self.q_trunc, k * (self.x_trunc + 1) - 1)
        acc = [0] * (n + 1)
        for m, c in enumerate(self.coeffs):
            for t, v in enumerate(c.coeffs[: max(0, n + 1 - k * m)]):
                acc[t + k * m] += v
        return QSeries(tuple(acc))

    def collapse_at_one(self, known_through: int) -> QSeries:
        """Sum all x-coefficients, i.e. x = 1, trusting the caller that the
        omitted x^m (m > x_trunc) terms vanish through q^known_through."""
        n = min(self.q_trunc, known_through)
        acc = [0] * (n + 1)
        for c in self.coeffs:
            for t, v in enumerate(c.coeffs[: n + 1]):
                acc[t] += v
        return QSeries(tuple(acc))

    def mutated(self, m: int, n: int, delta: int = 1) -> BivariateSeries:
        out = list(self.coeffs)
        out[m] = out[m].mutated(n, delta)
        return BivariateSeries(tuple(out))


def verify_equal_bivariate(lhs: BivariateSeries, rhs: BivariateSeries, name: str) -> VerificationReport:
    m_max, n_max = lhs._fit(rhs)
    for m in range(m_max + 1):
        for n in range(n_max + 1):
            a, b = lhs.coefficient(m, n), rhs.coefficient(m, n)
            if a != b:
                return _report(name, (m_max, n_max), Mismatch((m, n), a, b))
    return _report(name, (m_max, n_max), None)


# -- univariate generating functions ----------------------------------------


def _residue_exponents(residue: int, step: int, n: int) -> range:
    return range(residue, n + 1, step)


def series_E_product(params: SchurParams, N: int) -> QSeries:
    """(-q^r, -q^(d-r); q^d)_inf: distinct parts congruent to +-r mod d."""
    d, r = params.d, params.r
    factors = [(1, k) for k in _residue_exponents(r, d, N)]
    factors += [(1, k) for k in _residue_exponents(d - r, d, N)]
    return times_binomials(QSeries.one(N).truncate(N), factors)


def _qd_inverse(d: int, N: int) -> QSeries:
    """1 / (q^d; q^d)_inf."""
    return QSeries(qs_inverse(eta_series(d, N)).coeffs)


def series_C_bilateral(params: SchurParams, N: int) -> QSeries:
    """E_{d,r}(q)/(q^d;q^d)_inf * sum_{n in Z} (-1)^n q^(3dn(n+1)/2) / (1 + q^(r+dn)).

    Terms with n <= -1 are folded to m = -n-1 >= 0 using
    1/(1+q^(-k)) = q^k/(1+q^k), k = d(m+1) - r, which gives
    -(-1)^m q^(3dm(m+1)/2 + k) / (1 + q^k).
    """
    d, r = params.d, params.r
    s = bilateral_sum(params, N)
    return qs_mul(qs_mul(series_E_product(params, N), s), _qd_inverse(d, N))


def _add_geometric(acc: list[int], sign: int, e: int, k: int) -> None:
    """acc += sign * q^e / (1 + q^k)."""
    n = len(acc) - 1
    j = 0
    while e + j * k <= n:
        acc[e + j * k] += sign if j % 2 == 0 else -sign
        j += 1


def bilateral_sum(params: SchurParams, N: int) -> QSeries:
    """The folded bilateral sum alone, without the product prefactor."""
    d, r = params.d, params.r
    acc = [0] * (N + 1)
    n = 0
    while 3 * d * n * (n + 1) // 2 <= N:
        _add_geometric(acc, (-1) ** n, 3 * d * n * (n + 1) // 2, r + d * n)
        n += 1
    m = 0
    while True:
        k = d * (m + 1) - r
        e = 3 * d * m * (m + 1) // 2 + k
        if e > N:
            break
        _add_geometric(acc, -((-1) ** m), e, k)
        m += 1
    return QSeries(tuple(acc))


def series_C_unilateral(params: SchurParams, N: int) -> QSeries:
    """E/(q^d;q^d)_inf * sum_{n>=0} (-1)^n (1 - q^(d(2n+1))) q^(3dn(n+1)/2)
    / ((1 + q^(r+dn)) (1 + q^(d-r+dn)))."""
    d, r = params.d, params.r
    acc = [0] * (N + 1)
    n = 0
    while 3 * d * n * (n + 1) // 2 <= N:
        e = 3 * d * n * (n + 1) // 2
        num = QSeries.polynomial({0: 1, d * (2 * n + 1): -1}, trunc=N - e)
        term = over_binomials(num, [(1, r + d * n), (1, d - r + d * n)])
        sign = (-1) ** n
        for t, v in enumerate(term.coeffs):
            acc[e + t] += sign * v
        n += 1
    s = QSeries(tuple(acc))
    return qs_mul(qs_mul(series_E_product(params, N), s), _qd_inverse(d, N))


def series_C_andrews_rhs(N: int) -> QSeries:
    """(-q;q)_inf/(q^6;q^6)_inf * sum_n (-1)^n q^(9n(n+1)/2) (1 - q^(6n+3))
    / ((1 + q^(3n+1)) (1 + q^(3n+2)))."""
    acc = [0] * (N + 1)
    n = 0
    while 9 * n * (n + 1) // 2 <= N:
        e = 9 * n * (n + 1) // 2
        num = QSeries.polynomial({0: 1, 6 * n + 3: -1}, trunc=N - e)
        term = over_binomials(num, [(1, 3 * n + 1), (1, 3 * n + 2)])
        sign = (-1) ** n
        for t, v in enumerate(term.coeffs):
            acc[e + t] += sign * v
        n += 1
    s = QSeries(tuple(acc))
    minus_q = times_binomials(QSeries.one(N).truncate(N), [(1, k) for k in range(1, N + 1)])
    q6 = over_binomials(s, [(-1, k) for k in range(6, N + 1, 6)])
    return qs_mul(minus_q, q6)


def series_g3(a: int, m: int, N: int) -> QSeries:
    """g_3(-q^a; q^m) = sum_n q^(mn(n+1)) / ((-q^a; q^m)_{n+1} (-q^(m-a); q^m)_{n+1})."""
    if not (1 <= a < m):
        raise ValueError(f"need 1 <= a < m, got a={a}, m={m}")
    acc = [0] * (N + 1)
    running = QSeries.one(N).truncate(N)
    n = 0
    while m * n * (n + 1) <= N:
        e = m * n * (n + 1)
        running = over_binomials(QSeries(running.coeffs[: N - e + 1]), [(1, a + m * n), (1, m - a + m * n)])
        for t, v in enumerate(running.coeffs):
            acc[e + t] += v
        n += 1
    return QSeries(tuple(acc))


def series_theta_quotient(params: SchurParams, N: int) -> QSeries:
    """-q^(-d/12 + r/2) theta(1/2 + r tau; d tau) / eta(d tau) as an integral series."""
    d, r = params.d, params.r
    prefactor = QSeries((-1,), -2 * d + 12 * r, exact=True)
    theta = theta_half_shift_series(d, r, N)
    eta = eta_series(d, N)
    out = qs_mul(qs_mul(prefactor, theta), qs_inverse(eta))
    if out.offset24 != 0:
        raise RuntimeError(f"theta quotient left a fractional exponent: offset24 = {out.offset24}")
    return out


def series_B(params: SchurParams, N: int) -> QSeries:
    return series_E_product(params, N)


def series_C(params: SchurParams, N: int) -> QSeries:
    return series_C_bilateral(params, N)


# -- the bivariate generating function ---------------------------------------


def hypergeometric_A(params: SchurParams, n_max: int, N: int) -> list[QSeries]:
    """A_n = (-q^r, -q^(d-r); q^d)_n / (q^d; q^d)_n for n = 0..n_max."""
    d, r = params.d, params.r
    out = []
    one = QSeries.one(N).truncate(N)
    for n in range(n_max + 1):
        num = times_binomials(one, [(1, r + d * j) for j in range(n)] + [(1, d - r + d * j) for j in range(n)])
        out.append(over_binomials(num, [(-1, d * (j + 1)) for j in range(n)]))
    return out


def series_g_bivariate(params: SchurParams, M: int, N: int) -> BivariateSeries:
    return BivariateSeries(tuple(hypergeometric_A(params, M, N)))


def x_pochhammer_inf(step: int, M: int, N: int, sign: int = -1, start: int = 0) -> BivariateSeries:
    """(-sign * x q^start; q^step)_inf = prod_j (1 + sign x q^(start + j*step)) to (M, N)."""
    out = BivariateSeries.one(M, N)
    k = start
    while k <= N:
        out = out.times_x_binomial(sign, k)
        k += step
    return out


def series_f_bivariate(params: SchurParams, M: int, N: int) -> BivariateSeries:
    """f(x; q) = (x; q^d)_inf * sum_n A_n x^n, truncated at x^M and q^N."""
    return x_pochhammer_inf(params.d, M, N) * series_g_bivariate(params, M, N)


def series_f_second_form(params: SchurParams, M: int, N: int) -> BivariateSeries:
    """(-xq^r, -xq^(d-r); q^d)_inf * sum_n (x;q^d)_n x^n q^(dn^2) / (q^d, -xq^r, -xq^(d-r); q^d)_n."""
    d, r = params.d, params.r
    total = None
    n = 0
    while n <= M and d * n * n <= N:
        term = BivariateSeries.one(M, N)
        for j in range(n):
            term = term.times_x_binomial(-1, d * j)
        for j in range(n):
            term = term.over_x_binomial(1, r + d * j).over_x_binomial(1, d - r + d * j)
        qpart = over_binomials(QSeries.monomial(d * n * n).truncate(N), [(-1, d * (j + 1)) for j in range(n)])
        shifted = BivariateSeries(((_zero(N),) * n + term.coeffs)[: M + 1])
        term = shifted.times_q_series(qpart)
        total = term if total is None else total + term
        n += 1
    prefactor = x_pochhammer_inf(d, M, N, sign=1, start=r) * x_pochhammer_inf(d, M, N, sign=1, start=d - r)
    return prefactor * total


def min_weight(params: SchurParams, m: int) -> int:
    """Smallest weight of an m-part partition with consecutive gaps >= d."""
    return m + params.d * m * (m - 1) // 2


def f_collapse_at_one(params: SchurParams, N: int) -> QSeries:
    """f(1; q) by summing x-coefficients, with x_trunc large enough that no
    dropped m-part term reaches q^N."""
    M = 0
    while min_weight(params, M + 1) <= N:
        M += 1
    f = series_f_bivariate(params, M, N)
    return f.collapse_at_one(N)


# -- verifiers ---------------------------------------------------------------


def verify_qdifference(
    params: SchurParams, M: int, N: int, drop_factor: bool = False, perturb: tuple[int, int] | None = None
) -> VerificationReport:
    """f(x) = (1 + xq^r + xq^(d-r)) f(xq^d) + xq^d (1 - xq^d) f(xq^(2d)) to (x^M, q^N).

    ``drop_factor`` removes the (1 - xq^d) factor as a negative control.
    """
    d, r = params.d, params.r
    f = series_f_bivariate(params, M, N)
    first = BivariateSeries.from_x_poly(
        [QSeries.one(0), QSeries.polynomial({r: 1, d - r: 1})], M, N
    )
    second_terms = [QSeries.one(0).scale(0), QSeries.monomial(d)]
    if not drop_factor:
        second_terms.append(QSeries.monomial(2 * d, -1))
    second = BivariateSeries.from_x_poly(second_terms, M, N)
    rhs = first * f.substitute(d) + second * f.substitute(2 * d)
    lhs = f.mutated(*perturb) if perturb else f
    name = "qdifference" + (" (dropped factor)" if drop_factor else "")
    return verify_equal_bivariate(lhs, rhs, name)


def verify_An_recurrence(
    params: SchurParams, n_max: int, N: int, perturb: tuple[int, int] | None = None
) -> VerificationReport:
    """(1 - q^(dn)) A_n = (1 + q^(d(n-1)+r)) (1 + q^(dn-r)) A_{n-1}, 1 <= n <= n_max."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    d, r = params.d, params.r
    A = hypergeometric_A(params, n_max, N)
    if perturb:
        n0, k0 = perturb
        A[n0] = A[n0].mutated(k0)
    for n in range(1, n_max + 1):
        lhs = times_binomials(A[n], [(-1, d * n)])
        rhs = times_binomials(A[n - 1], [(1, d * (n - 1) + r), (1, d * n - r)])
        for k, (x, y) in enumerate(zip(lhs.coeffs, rhs.coeffs)):
            if x != y:
                return _report("an-recurrence", (n_max, N), Mismatch((n, k), x, y))
    return _report("an-recurrence", (n_max, N), None)


def _maybe_mutate(s: QSeries, perturb: int | None) -> QSeries:
    return s.mutated(perturb) if perturb is not None else s


def verify_schur(params: SchurParams, N: int, perturb: int | None = None) -> VerificationReport:
    e = _maybe_mutate(series_E_product(params, N), perturb)
    b = [pt.count_schur(params, 0, n) for n in range(N + 1)]
    dc = [pt.count_distinct_congruent(params, n) for n in range(N + 1)]
    return first_failure(
        "schur",
        [
            compare_sequences(list(e.coeffs), b, "E product vs B oracle"),
            compare_sequences(list(e.coeffs), dc, "E product vs E oracle"),
        ],
    )


def verify_andrews(N: int, perturb: int | None = None, oracle_max: int = 60) -> VerificationReport:
    p = SchurParams(3, 1)
    lhs = _maybe_mutate(series_C_andrews_rhs(N), perturb)
    oracle = [pt.count_schur(p, 3, n) for n in range(min(N, oracle_max) + 1)]
    return first_failure(
        "andrews-c31",
        [
            verify_equal(lhs, series_C_bilateral(p, N), "Andrews form vs bilateral form"),
            compare_sequences(list(lhs.coeffs[: len(oracle)]), oracle, "Andrews form vs C oracle"),
        ],
    )


def verify_bilateral(params: SchurParams, N: int, perturb: int | None = None) -> VerificationReport:
    lhs = _maybe_mutate(series_C_bilateral(params, N), perturb)
    rhs = qs_mul(series_E_product(params, N), series_g3(params.r, params.d, N))
    return verify_equal(lhs, rhs, "bilateral")


def verify_theta_quotient(params: SchurParams, N: int, perturb: int | None = None) -> VerificationReport:
    lhs = _maybe_mutate(series_theta_quotient(params, N), perturb)
    return verify_equal(lhs, series_E_product(params, N), "theta-quotient")


def verify_univ(params: SchurParams, N: int, perturb: int | None = None) -> VerificationReport:
    lhs = qs_mul(series_theta_quotient(params, N), series_g3(params.r, params.d, N))
    lhs = _maybe_mutate(lhs, perturb)
    return verify_equal(lhs, series_C_bilateral(params, N), "univ-factorization")


def verify_triple_product(params: SchurParams, N: int, perturb: int | None = None) -> VerificationReport:
    lhs = _maybe_mutate(theta_sum_series(params.d, params.r, N), perturb)
    return verify_equal(lhs, theta_half_shift_series(params.d, params.r, N), "triple-product")


def verify_c_unilateral(params: SchurParams, N: int, perturb: int | None = None) -> VerificationReport:
    lhs = _maybe_mutate(series_C_unilateral(params, N), perturb)
    return verify_equal(lhs, series_C_bilateral(params, N), "c-unilateral")


def verify_c_oracle(params: SchurParams, N: int, perturb: int | None = None) -> VerificationReport:
    lhs = _maybe_mutate(series_C_bilateral(params, N), perturb)
    oracle = [pt.count_schur(params, params.d, n) for n in range(N + 1)]
    return compare_sequences(list(lhs.coeffs), oracle, "c-oracle")


def verify_f_second_form(params: SchurParams, M: int, N: int, perturb: tuple[int, int] | None = None) -> VerificationReport:
    lhs = series_f_second_form(params, M, N)
    if perturb:
        lhs = lhs.mutated(*perturb)
    return verify_equal_bivariate(lhs, series_f_bivariate(params, M, N), "f-second-form")


def verify_f_oracle(params: SchurParams, M: int, N: int, perturb: tuple[int, int] | None = None) -> VerificationReport:
    f = series_f_bivariate(params, M, N)
    if perturb:
        f = f.mutated(*perturb)
    for m in range(M + 1):
        for n in range(N + 1):
            want = pt.count_schur_by_parts(params, 0, n, m)
            if f.coefficient(m, n) != want:
                return _report("f-oracle", (M, N), Mismatch((m, n), f.coefficient(m, n), want))
    return _report("f-oracle", (M, N), None)


def verify_f_collapse(params: SchurParams, N: int, perturb: int | None = None) -> VerificationReport:
    """f(1) = B and f(q^d) = C via exact specialization of the bivariate series."""
    at_one = _maybe_mutate(f_collapse_at_one(params, N), perturb)
    M = N // params.d + 1
    at_qd = series_f_bivariate(params, M, N).at_x_power(params.d)
    return first_failure(
        "f-collapse",
        [
            verify_equal(at_one, series_E_product(params, N), "f(1) vs E product"),
            verify_equal(at_qd, series_C_bilateral(params, N), "f(q^d) vs C bilateral"),
        ],
    )


def verify_rr(N: int, perturb: int | None = None) -> VerificationReport:
    reps = []
    for j, res in ((1, {1, 4}), (2, {2, 3})):
        lhs = [pt.count_gap_partitions(2, j, n) for n in range(N + 1)]
        if perturb is not None and j == 1:
            lhs[perturb] += 1
        rhs = [pt.count_congruence_classes(5, res, n) for n in range(N + 1)]
        reps.append(compare_sequences(lhs, rhs, f"q_2,{j} vs Q_2,{j}"))
    return first_failure("rr", reps)


def verify_euler(N: int, perturb: int | None = None) -> VerificationReport:
    lhs = [pt.count_distinct_parts(n) for n in range(N + 1)]
    if perturb is not None:
        lhs[perturb] += 1
    rhs = [pt.count_congruence_classes(2, {1}, n) for n in range(N + 1)]
    return compare_sequences(lhs, rhs, "euler")


def verify_mod6_classes(N: int) -> VerificationReport:
    p = SchurParams(3, 1)
    lhs = [pt.count_distinct_congruent(p, n) for n in range(N + 1)]
    rhs = [pt.count_congruence_classes(6, {1, 5}, n) for n in range(N + 1)]
    return compare_sequences(lhs, rhs, "E31 vs D61")


def verify_alder_andrews(
    d_values: Sequence[int] = (4, 5, 6, 7, 8), n_max: int = 200, perturb: tuple[int, int] | None = None
) -> VerificationReport:
    """q_{d,1}(n) > Q_{d,1}(n) for 2d + 9 <= n <= n_max; mismatch = first n where it fails."""
    for d in d_values:
        for n in range(2 * d + 9, n_max + 1):
            lhs = pt.count_gap_partitions(d, 1, n)
            rhs = pt.count_congruence_classes(d + 3, {1, d + 2}, n)
            if perturb == (d, n):
                lhs = rhs
            if not lhs > rhs:
                return _report("alder-andrews", n_max, Mismatch((d, n), lhs, rhs), d_values=list(d_values))
    return _report("alder-andrews", n_max, None, d_values=list(d_values))


# -- registry ----------------------------------------------------------------

Verifier = Callable[..., VerificationReport]

IDENTITIES: dict[str, str] = {
    "schur": "E product equals the B and E brute-force counts",
    "andrews-c31": "Andrews' C_{3,1} series equals the bilateral form and the C oracle",
    "bilateral": "bilateral C form equals E times g3(-q^r; q^d)",
    "theta-quotient": "theta/eta quotient equals the E product with zero final offset",
    "univ-factorization": "theta quotient times g3 equals C",
    "qdifference": "bivariate f satisfies its q-difference equation",
    "an-recurrence": "closed-form A_n satisfy the first-order recurrence",
    "triple-product": "theta bilateral sum equals its product form",
    "rr": "Rogers-Ramanujan gap/congruence counts agree",
    "euler": "distinct-part and odd-part counts agree",
    "alder-andrews": "q_{d,1}(n) > Q_{d,1}(n) on the window 2d+9 <= n",
    "c-unilateral": "one-sided C sum equals the bilateral form",
    "c-oracle": "bilateral C coefficients equal the C brute-force counts",
    "f-second-form": "second hypergeometric form of f equals f",
    "f-oracle": "f coefficients equal the by-parts counts",
    "f-collapse": "f(1) = B and f(q^d) = C",
}


def verify_identity(
    name: str,
    params: SchurParams | None = None,
    trunc: int = 200,
    perturb: Any = None,
    **options,
) -> VerificationReport:
    """Run a named identity check.  ``perturb`` mutates one lhs coefficient."""
    params = params or SchurParams(3, 1)
    if name == "schur":
        return verify_schur(params, trunc, perturb)
    if name == "andrews-c31":
        return verify_andrews(trunc, perturb)
    if name == "bilateral":
        return verify_bilateral(params, trunc, perturb)
    if name == "theta-quotient":
        return verify_theta_quotient(params, trunc, perturb)
    if name == "univ-factorization":
        return verify_univ(params, trunc, perturb)
    if name == "qdifference":
        M = options.get("x_trunc", 5)
        if isinstance(perturb, int):
            perturb = (1, perturb)
        return verify_qdifference(params, M, trunc, options.get("drop_factor", False), perturb)
    if name == "an-recurrence":
        if isinstance(perturb, int):
            perturb = (1, perturb)
        return verify_An_recurrence(params, options.get("n_max", 8), trunc, perturb)
    if name == "triple-product":
        return verify_triple_product(params, trunc, perturb)
    if name == "rr":
        return verify_rr(trunc, perturb)
    if name == "euler":
        return verify_euler(trunc, perturb)
    if name == "alder-andrews":
        d_values = options.get("d_values", (4, 5, 6, 7, 8))
        if isinstance(perturb, int):
            # an n below the window start is moved onto the window
            perturb = (d_values[0], max(perturb, 2 * d_values[0] + 9))
        return verify_alder_andrews(d_values, trunc, perturb)
    if name == "c-unilateral":
        return verify_c_unilateral(params, trunc, perturb)
    if name == "c-oracle":
        return verify_c_oracle(params, trunc, perturb)
    if name == "f-second-form":
        if isinstance(perturb, int):
            perturb = (1, perturb)
        return verify_f_second_form(params, options.get("x_trunc", 5), trunc, perturb)
    if name == "f-oracle":
        if isinstance(perturb, int):
            perturb = (1, perturb)
        return verify_f_oracle(params, options.get("x_trunc", 6), trunc, perturb)
    if name == "f-collapse":
        return verify_f_collapse(params, trunc, perturb)
    raise KeyError(f"unknown identity {name!r}; choose from {', '.join(IDENTITIES)}")
