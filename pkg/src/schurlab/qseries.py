"""Exact truncated power series in q over Python integers.

A :class:`QSeries` stores the coefficients ``c[0..trunc]`` of

    q^(offset24/24) * (c[0] + c[1] q + ... + c[trunc] q^trunc + O(q^(trunc+1)))

so that the fractional prefactors of eta and theta products (q^(1/24),
q^(d/8), ...) live in a single integer exponent ledger.  Series flagged
``exact`` are polynomials: every coefficient past ``trunc`` is known to be 0.

Heavy products are built from binomial factors (1 +/- q^k) by in-place
sweeps over numpy object arrays; dense products use Kronecker substitution
with gmpy2 big-integer multiplication.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import gmpy2
import mpmath
import numpy as np

INFINITE = None

# Below this many coefficients the schoolbook product beats packing.
_KRONECKER_MIN = 48
# Unit-constant series with at most this many nonzero terms are inverted by
# the sparse triangular recurrence instead of Newton iteration.
_SPARSE_INVERSE_MAX = 40
_TAIL_WINDOW = 20


class SeriesError(ValueError):
    """Raised for malformed or incomparable series."""


@dataclass(frozen=True)
class NumericValue:
    """A numeric evaluation together with a bound on its truncation error."""

    value: complex | float | mpmath.mpf | mpmath.mpc
    tail_bound: float

    def __post_init__(self):
        if not self.tail_bound >= 0:
            raise ValueError(f"tail_bound must be non-negative, got {self.tail_bound}")


@dataclass(frozen=True)
class QSeries:
    coeffs: tuple[int, ...]
    offset24: int = 0
    exact: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not self.coeffs:
            raise SeriesError("a QSeries needs at least one coefficient")
        if not isinstance(self.coeffs, tuple):
            object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    # -- construction -----------------------------------------------------

    @classmethod
    def from_list(cls, coeffs: Iterable[int], offset24: int = 0, exact: bool = False) -> QSeries:
        return cls(tuple(int(c) for c in coeffs), offset24, exact)

    @classmethod
    def one(cls, trunc: int = 0) -> QSeries:
        return cls((1,) + (0,) * trunc, 0, True)

    @classmethod
    def monomial(cls, k: int, coeff: int = 1) -> QSeries:
        """coeff * q^k as an exact polynomial."""
        if k < 0:
            raise SeriesError("monomial exponent must be non-negative; use offset24 for shifts")
        return cls((0,) * k + (coeff,), 0, True)

    @classmethod
    def polynomial(cls, terms: dict[int, int], trunc: int | None = None) -> QSeries:
        """Exact polynomial from {exponent: coefficient}."""
        deg = max(terms, default=0)
        n = deg if trunc is None else trunc
        c = [0] * (n + 1)
        for k, v in terms.items():
            if k <= n:
                c[k] += v
        exact = trunc is None or deg <= trunc
        return cls(tuple(c), 0, exact)

    # -- basic properties -------------------------------------------------

    @property
    def trunc(self) -> int:
        return len(self.coeffs) - 1

    @property
    def integral(self) -> bool:
        return self.offset24 % 24 == 0

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        head = ", ".join(str(c) for c in self.coeffs[:8])
        more = ", ..." if len(self.coeffs) > 8 else ""
        flag = " exact" if self.exact else ""
        return f"QSeries(offset24={self.offset24}, trunc={self.trunc}{flag}, [{head}{more}])"

    def coefficient(self, n: int) -> int:
        return qs_coefficient(self, n)

    def truncate(self, n: int) -> QSeries:
        """Drop coefficients above q^n (relative to the offset); never extends."""
        if n < 0:
            raise SeriesError("truncation order must be non-negative")
        if n >= self.trunc:
            if self.exact:
                return QSeries(self.coeffs + (0,) * (n - self.trunc), self.offset24, True)
            return self
        tail_zero = self.exact and not any(self.coeffs[n + 1 :])
        return QSeries(self.coeffs[: n + 1], self.offset24, tail_zero)

    def with_offset(self, offset24: int) -> QSeries:
        """Re-express on a lower exponent base by prepending zeros."""
        diff = self.offset24 - offset24
        if diff < 0 or diff % 24:
            raise SeriesError(
                f"cannot move offset24 {self.offset24} down to {offset24}: "
                "difference must be a non-negative multiple of 24"
            )
        k = diff // 24
        return QSeries((0,) * k + self.coeffs, offset24, self.exact)

    def shift(self, k: int) -> QSeries:
        """Multiply by q^k (k >= 0 integer), keeping the offset fixed."""
        if k < 0:
            raise SeriesError("shift must be non-negative")
        if k == 0:
            return self
        return QSeries((0,) * k + self.coeffs, self.offset24, self.exact)

    def scale(self, c: int) -> QSeries:
        return QSeries(tuple(c * x for x in self.coeffs), self.offset24, self.exact)

    def mutated(self, n: int, delta: int = 1) -> QSeries:
        """Copy with the coefficient of q^n (relative to the offset) moved by delta."""
        c = list(self.coeffs)
        c[n] += delta
        return QSeries(tuple(c), self.offset24, self.exact)

    # -- ring operations --------------------------------------------------

    def __neg__(self):
        return self.scale(-1)

    def __add__(self, other):
        if isinstance(other, int):
            other = QSeries.one(0).scale(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        a, b = align(self, other)
        return QSeries(tuple(x + y for x, y in zip(a.coeffs, b.coeffs)), a.offset24, a.exact and b.exact)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = QSeries.one(0).scale(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        return qs_mul(self, other)

    __rmul__ = __mul__

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "offset24": self.offset24,
            "trunc": self.trunc,
            "exact": self.exact,
            "coeffs": [str(c) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, obj: dict | str) -> QSeries:
        if isinstance(obj, str):
            obj = json.loads(obj)
        coeffs = tuple(int(c) for c in obj["coeffs"])
        if len(coeffs) != obj["trunc"] + 1:
            raise SeriesError("coeffs length does not match trunc")
        return cls(coeffs, int(obj["offset24"]), bool(obj.get("exact", False)))


def _common_trunc(a: QSeries, b: QSeries) -> int:
    if a.exact and b.exact:
        return max(a.trunc, b.trunc)
    if a.exact:
        return b.trunc
    if b.exact:
        return a.trunc
    return min(a.trunc, b.trunc)


def align(a: QSeries, b: QSeries) -> tuple[QSeries, QSeries]:
    """Bring two series to a common offset and truncation.

    Offsets must differ by a multiple of 24.  The common truncation is the
    coarsest inexact one, so no unknown coefficient is ever invented.
    """
    if (a.offset24 - b.offset24) % 24:
        raise SeriesError(
            f"offsets {a.offset24} and {b.offset24} (units of q^(1/24)) are not comparable"
        )
    base = min(a.offset24, b.offset24)
    a, b = a.with_offset(base), b.with_offset(base)
    n = _common_trunc(a, b)
    return a.truncate(n), b.truncate(n)


# -- multiplication ---------------------------------------------------------


def _schoolbook(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    out = [0] * (n + 1)
    for i, x in enumerate(a[: n + 1]):
        if x:
            for j, y in enumerate(b[: n + 1 - i]):
                if y:
                    out[i + j] += x * y
    return out


def _pack(values: Sequence[int], wbytes: int) -> int:
    pos = b"".join((v if v > 0 else 0).to_bytes(wbytes, "little") for v in values)
    neg = b"".join((-v if v < 0 else 0).to_bytes(wbytes, "little") for v in values)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _kronecker(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    a, b = list(a[: n + 1]), list(b[: n + 1])
    amax = max((abs(x) for x in a), default=0)
    bmax = max((abs(x) for x in b), default=0)
    if amax == 0 or bmax == 0:
        return [0] * (n + 1)
    bits = amax.bit_length() + bmax.bit_length() + min(len(a), len(b)).bit_length() + 2
    wbytes = (bits + 7) // 8
    w = 8 * wbytes
    z = int(gmpy2.mpz(_pack(a, wbytes)) * gmpy2.mpz(_pack(b, wbytes)))
    slots = n + 1
    half = 1 << (w - 1)
    bias = int.from_bytes(half.to_bytes(wbytes, "little") * slots, "little")
    z = (z + bias) & ((1 << (w * slots)) - 1)
    raw = z.to_bytes(wbytes * slots, "little")
    return [
        int.from_bytes(raw[i * wbytes : (i + 1) * wbytes], "little") - half for i in range(slots)
    ]


def _sparse_terms(c: Sequence[int], limit: int) -> list[tuple[int, int]] | None:
    terms = []
    for i, x in enumerate(c):
        if x:
            terms.append((i, x))
            if len(terms) > limit:
                return None
    return terms


def _convolve(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    """First n+1 coefficients of the product of two coefficient lists."""
    if min(len(a), len(b)) < _KRONECKER_MIN:
        return _schoolbook(a, b, n)
    for s, d in ((a, b), (b, a)):
        terms = _sparse_terms(s[: n + 1], 8)
        if terms is not None:
            acc = np.zeros(n + 1, dtype=object)
            acc[:] = 0
            dense = np.array(list(d[: n + 1]) + [0] * max(0, n + 1 - len(d)), dtype=object)
            for k, x in terms:
                acc[k:] += x * dense[: n + 1 - k]
            return [int(v) for v in acc]
    return _kronecker(a, b, n)


def qs_mul(a: QSeries, b: QSeries) -> QSeries:
    """Product of two series; offsets add and the coarsest truncation wins."""
    if a.exact and b.exact:
        n = a.trunc + b.trunc
    else:
        n = _common_trunc(a, b)
    out = _convolve(a.coeffs, b.coeffs, n)
    out += [0] * (n + 1 - len(out))
    return QSeries(tuple(out), a.offset24 + b.offset24, a.exact and b.exact)


# -- inversion ---------------------------------------------------------------


def _check_unit(a: QSeries) -> int:
    c0 = a.coeffs[0]
    if c0 not in (1, -1):
        raise SeriesError(
            f"series is not invertible over the integers: constant coefficient is {c0}, "
            "expected +1 or -1"
        )
    return c0


def _newton_inverse(c: Sequence[int], n: int, u: int) -> list[int]:
    b = [u]
    prec = 1
    while prec < n + 1:
        prec = min(2 * prec, n + 1)
        ab = _convolve(c[:prec], b, prec - 1)
        ab = [-x for x in ab]
        ab[0] += 2
        b = _convolve(b, ab, prec - 1)
    return b


def qs_inverse(a: QSeries) -> QSeries:
    """Multiplicative inverse of a series with constant term +1 or -1."""
    u = _check_unit(a)
    n = a.trunc
    terms = _sparse_terms(a.coeffs, _SPARSE_INVERSE_MAX)
    if terms is not None:
        rest = [(k, x) for k, x in terms if k]
        b = [0] * (n + 1)
        b[0] = u
        for i in range(1, n + 1):
            s = 0
            for k, x in rest:
                if k > i:
                    break
                s += x * b[i - k]
            b[i] = -u * s
    else:
        b = _newton_inverse(a.coeffs, n, u)
    exact = a.exact and a.trunc == 0
    return QSeries(tuple(b), -a.offset24, exact)


# -- binomial sweeps ---------------------------------------------------------


def _as_array(c: Sequence[int], n: int) -> np.ndarray:
    arr = np.zeros(n + 1, dtype=object)
    arr[:] = 0
    m = min(len(c), n + 1)
    arr[:m] = list(c[:m])
    return arr


def times_binomials(a: QSeries, factors: Iterable[tuple[int, int]]) -> QSeries:
    """Multiply by prod (1 + s*q^k) over (s, k) in factors, keeping a.trunc."""
    n = a.trunc
    arr = _as_array(a.coeffs, n)
    for s, k in factors:
        if k <= 0:
            raise SeriesError("binomial factors need positive exponents")
        if k > n:
            continue
        # numpy buffers overlapping operands, so the right side is the old array
        if s == 1:
            arr[k:] += arr[: n + 1 - k]
        else:
            arr[k:] += s * arr[: n + 1 - k]
    return QSeries(tuple(int(x) for x in arr), a.offset24, False)


def over_binomials(a: QSeries, factors: Iterable[tuple[int, int]]) -> QSeries:
    """Divide by prod (1 + s*q^k) over (s, k) in factors, keeping a.trunc."""
    n = a.trunc
    arr = _as_array(a.coeffs, n)
    for s, k in factors:
        if k <= 0:
            raise SeriesError("binomial factors need positive exponents")
        if k > n:
            continue
        # b[i] = a[i] - s*b[i-k], done one stride block at a time
        for start in range(k, n + 1, k):
            stop = min(start + k, n + 1)
            arr[start:stop] -= s * arr[start - k : stop - k]
    return QSeries(tuple(int(x) for x in arr), a.offset24, False)


def qs_pochhammer(sign: int, k: int, step: int, count: int | None, trunc: int) -> QSeries:
    """(sign*q^k; q^step)_count truncated at q^trunc.

    ``count=None`` (:data:`INFINITE`) gives the infinite product, for which
    factors with exponent above ``trunc`` are skipped.
    """
    if sign not in (1, -1):
        raise SeriesError("sign must be +1 or -1")
    if k < 0 or step < 1 or trunc < 0:
        raise SeriesError("need k >= 0, step >= 1, trunc >= 0")
    if count is INFINITE:
        if k == 0:
            raise SeriesError("(±1; q^m)_inf does not converge to a unit series (k = 0)")
        exps = range(k, trunc + 1, step)
        exact = False
    else:
        if count < 0:
            raise SeriesError("count must be non-negative")
        exps = [k + j * step for j in range(count)]
        exact = sum(exps) <= trunc
    base = QSeries.one(trunc)
    if k == 0 and count:
        # leading factor (1 - sign) is a constant
        base = base.scale(1 - sign)
        exps = exps[1:]
    out = times_binomials(base, [(-sign, e) for e in exps])
    return QSeries(out.coeffs, 0, exact)


def qs_coefficient(a: QSeries, n: int | float) -> int:
    """Coefficient of q^n; n may be fractional when the offset is."""
    pos = n - a.offset24 / 24
    k = round(pos)
    if abs(pos - k) > 1e-9:
        raise SeriesError(f"exponent {n} is not on the lattice of a series with offset24 {a.offset24}")
    if k < 0:
        raise SeriesError(f"exponent {n} lies below the leading exponent {a.offset24 / 24}")
    if k > a.trunc:
        if a.exact:
            return 0
        raise SeriesError(f"exponent {n} exceeds the truncation q^{a.offset24 / 24 + a.trunc}")
    return a.coeffs[k]


# -- numeric evaluation ------------------------------------------------------


def _tail_growth(coeffs: Sequence[int]) -> tuple[float, float]:
    """Largest |c| over the trailing window and a per-step envelope growth rate.

    The rate compares the window maximum with the maximum of the window
    before it, (M_last / M_prev)^(1/W), floored at 1.  Consecutive ratios
    are useless for sign-oscillating coefficients; they are only used when
    the previous window is all zero.
    """
    mags = [abs(int(c)) for c in coeffs[-2 * _TAIL_WINDOW :]]
    last, prev = mags[-_TAIL_WINDOW:], mags[:-_TAIL_WINDOW]
    cmax = max(last, default=0)
    pmax = max(prev, default=0)
    rho = 1.0
    if cmax and pmax:
        rho = max(1.0, math.exp((math.log(cmax) - math.log(pmax)) / len(last)))
    elif cmax:
        for x, y in zip(last, last[1:]):
            if x and y:
                rho = max(rho, y / x)
    return float(cmax), rho


def tail_estimate(a: QSeries, modulus: float) -> float:
    """Geometric tail bound for |sum_{n > trunc} c_n q^n| at |q| = modulus.

    Uses the largest coefficient magnitude M over the last 20 coefficients and
    the envelope growth rate rho from :func:`_tail_growth`:
    bound = M * modulus^(trunc+1) / (1 - rho*modulus).
    """
    if a.exact:
        return 0.0
    cmax, rho = _tail_growth(a.coeffs)
    if rho * modulus >= 1:
        raise SeriesError(
            f"coefficient growth ratio {rho:.6g} times |q| = {modulus:.6g} is not below 1; "
            "tail cannot be bounded at this truncation"
        )
    if cmax == 0:
        return 0.0
    logb = math.log(cmax) + (a.trunc + 1) * math.log(modulus) - math.log1p(-rho * modulus)
    return math.exp(logb) if logb > -745 else 0.0


def required_trunc(a: QSeries, modulus: float, tol: float) -> int:
    """Rough truncation at which the tail model drops below tol.

    Uses the geometric model when it applies at the current truncation.
    Otherwise fits log|c_n| ~ c sqrt(n), the growth of every product in
    scope, and searches for the n where that model's tail falls below tol.
    """
    cmax, rho = _tail_growth(a.coeffs)
    if cmax == 0 or a.exact:
        return a.trunc
    step = math.log(rho * modulus)
    if step < 0:
        excess = math.log(cmax) + (a.trunc + 1) * math.log(modulus) - math.log1p(-rho * modulus) - math.log(tol)
        return a.trunc + max(0, math.ceil(excess / -step))
    c = math.log(cmax) / math.sqrt(max(a.trunc, 1))
    lq = math.log(modulus)
    n = max(a.trunc, 1)
    while n < 10**9:
        local = c / (2 * math.sqrt(n)) + lq
        if local < 0:
            logtail = c * math.sqrt(n) + (n + 1) * lq - math.log(-math.expm1(local))
            if logtail < math.log(tol):
                return n
        n = math.ceil(n * 1.25)
    return -1


def _horner(coeffs: Sequence[int], x):
    acc = 0 * x
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def qs_eval_real(a: QSeries, q0: float, dps: int | None = None) -> NumericValue:
    """Evaluate at real 0 < q0 < 1.  ``dps`` selects mpmath at that many digits."""
    if not 0 < q0 < 1:
        raise ValueError(f"q0 must lie in (0, 1), got {q0}")
    tail = tail_estimate(a, float(q0))
    if dps is None:
        val = _horner([float(c) for c in a.coeffs], float(q0))
        if a.offset24:
            val *= float(q0) ** (a.offset24 / 24)
        return NumericValue(val, tail)
    with mpmath.workdps(dps):
        x = mpmath.mpf(q0)
        val = _horner([mpmath.mpf(c) for c in a.coeffs], x)
        if a.offset24:
            val *= x ** (mpmath.mpf(a.offset24) / 24)
        return NumericValue(+val, tail)


def qs_eval_complex(a: QSeries, z: complex, tol: float | None = None, dps: int | None = None) -> NumericValue:
    """Evaluate at q = exp(-z) with Re z > 0.

    The fractional prefactor uses the principal branch exp(-z*offset24/24).
    If ``tol`` is given and the tail estimate exceeds it, raises with the
    truncation that would be needed.
    """
    z = complex(z)
    if z.real <= 0:
        raise ValueError(f"need Re z > 0, got {z}")
    modulus = math.exp(-z.real)
    try:
        tail = tail_estimate(a, modulus)
    except SeriesError as exc:
        if tol is None:
            raise
        need = required_trunc(a, modulus, tol)
        raise SeriesError(f"{exc}; estimated trunc needed: {need if need >= 0 else 'unbounded'}") from exc
    if tol is not None and tail > tol:
        need = required_trunc(a, modulus, tol)
        raise SeriesError(
            f"tail bound {tail:.3g} exceeds tolerance {tol:.3g} at trunc {a.trunc}; "
            f"estimated trunc needed: {need if need >= 0 else 'unbounded'}"
        )
    if dps is None:
        q = cmath.exp(-z)
        val = _horner([float(c) for c in a.coeffs], q)
        if a.offset24:
            val *= cmath.exp(-z * a.offset24 / 24)
        return NumericValue(val, tail)
    with mpmath.workdps(dps):
        zz = mpmath.mpc(z.real, z.imag)
        val = _horner([mpmath.mpf(c) for c in a.coeffs], mpmath.exp(-zz))
        if a.offset24:
            val *= mpmath.exp(-zz * a.offset24 / 24)
        return NumericValue(+val, tail)


# -- eta and theta -----------------------------------------------------------


def eta_series(scale: int, trunc: int) -> QSeries:
    """eta(m*tau) = q^(m/24) prod_{n>=1} (1 - q^(mn)), via the pentagonal numbers."""
    if scale < 1:
        raise SeriesError("eta scale must be a positive integer")
    c = [0] * (trunc + 1)
    k = 0
    while True:
        e1 = scale * k * (3 * k - 1) // 2
        if e1 > trunc:
            break
        sign = -1 if k % 2 else 1
        c[e1] += sign
        if k:
            e2 = scale * k * (3 * k + 1) // 2
            if e2 <= trunc:
                c[e2] += sign
        k += 1
    return QSeries(tuple(c), scale, False)


def _check_dr(d: int, r: int) -> None:
    if not (d >= 3 and 1 <= r and 2 * r < d):
        raise SeriesError(f"need d >= 3 and 1 <= r < d/2, got (d, r) = ({d}, {r})")


def theta_half_shift_series(d: int, r: int, trunc: int) -> QSeries:
    """theta(1/2 + r tau; d tau) from the product side of the triple product.

    With zeta = -q^r the prefactor -i*zeta^(-1/2) equals -q^(-r/2), giving
    -q^((3d - 12r)/24) (q^d; q^d)_inf (-q^r; q^d)_inf (-q^(d-r); q^d)_inf.
    """
    _check_dr(d, r)
    factors = [(-1, k) for k in range(d, trunc + 1, d)]
    factors += [(1, k) for k in range(r, trunc + 1, d)]
    factors += [(1, k) for k in range(d - r, trunc + 1, d)]
    prod = times_binomials(QSeries.one(trunc), factors)
    return QSeries(tuple(-c for c in prod.coeffs), 3 * d - 12 * r, False)


def theta_sum_series(d: int, r: int, trunc: int, w_sign: int = 1) -> QSeries:
    """theta(w; d tau) at w = w_sign*(1/2 + r tau), summed over n in 1/2 + Z.

    Each term e^(pi i n^2 d tau + 2 pi i n (w + 1/2)) becomes
    phase * q^(d n^2/2 + w_sign r n), with phase = e^(2 pi i n (1 + w_sign)/2).
    Writing n = t/2 with t odd, exponents in 1/24 units are
    3 d t^2 + 12 w_sign r t.
    """
    _check_dr(d, r)
    if w_sign not in (1, -1):
        raise SeriesError("w_sign must be +1 or -1")
    phase = -1 if w_sign == 1 else 1
    base = 3 * d - 12 * r
    c = [0] * (trunc + 1)
    limit = base + 24 * trunc
    t = 1
    while 3 * d * t * t - 12 * r * t <= limit:
        for tt in (t, -t):
            e24 = 3 * d * tt * tt + 12 * w_sign * r * tt
            if e24 <= limit:
                k, rem = divmod(e24 - base, 24)
                if rem:
                    raise SeriesError("theta exponent left the 1/24 lattice")
                c[k] += phase
        t += 2
    return QSeries(tuple(c), base, False)


def theta_eval(w: complex, tau: complex, tol: float = 1e-15) -> NumericValue:
    """Numeric theta(w; tau) from the defining bilateral sum over n in 1/2 + Z."""
    tau = complex(tau)
    w = complex(w)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    total = 0j
    last = []
    m = 0
    while True:
        batch = 0j
        for n in ((m + 0.5), -(m + 0.5)):
            batch += cmath.exp(1j * math.pi * n * n * tau + 2j * math.pi * n * (w + 0.5))
        total += batch
        last.append(abs(batch))
        m += 1
        # terms decay like exp(-pi Im(tau) n^2): stop once the next is negligible
        n_next = m + 0.5
        bound = 2 * math.exp(-math.pi * tau.imag * n_next * n_next + 2 * math.pi * n_next * abs(w.imag))
        if m > 2 and bound < tol * max(1.0, abs(total)):
            return NumericValue(total, bound / (1 - math.exp(-math.pi * tau.imag)))
        if m > 10_000:
            raise SeriesError("theta sum did not converge")


def theta_product_eval(w: complex, tau: complex, tol: float = 1e-16) -> complex:
    """Numeric theta(w; tau) from the triple-product form, with the principal
    zeta^(-1/2) = e^(-pi i w) and q^(1/8) = e^(pi i tau / 4)."""
    tau = complex(tau)
    w = complex(w)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    q = cmath.exp(2j * math.pi * tau)
    zeta = cmath.exp(2j * math.pi * w)
    prod = 1 - zeta
    qn = q
    n = 1
    while True:
        prod *= (1 - qn) * (1 - zeta * qn) * (1 - qn / zeta)
        if abs(qn) * (1 + abs(zeta) + 1 / abs(zeta)) < tol:
            break
        qn *= q
        n += 1
        if n > 100_000:
            raise SeriesError("theta product did not converge")
    return -1j * cmath.exp(1j * math.pi * tau / 4) * cmath.exp(-1j * math.pi * w) * prod
