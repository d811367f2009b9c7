"""Independent events E_j with P(E_j) = q^j/(1+q^j), the events U and V built
from the Schur gap conditions, and the universal mock theta function g3 as a
conditional probability.

Exact values come from the renormalized generating function h_{d,r}; the
Monte Carlo simulator is a separate route to the same numbers.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import identities as ids
from .identities import Mismatch, VerificationReport
from .partitions import SchurParams
from .qseries import NumericValue, SeriesError, qs_eval_real

DEFAULT_EPSILON = 1e-9
CHUNK = 20_000
SCHEMA_VERSION = 1


def event_prob(j: int, q: float) -> float:
    """p_j = q^j / (1 + q^j)."""
    if j < 1:
        raise ValueError("events are indexed from 1")
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    x = q**j
    return x / (1 + x)


def complement_prob(j: int, q: float) -> float:
    return 1 / (1 + q**j)


def truncation_index(q: float, epsilon: float) -> int:
    """Smallest J with q^J <= epsilon (1-q); then sum_{j>J} p_j < q^(J+1)/(1-q) < epsilon."""
    J = math.ceil(math.log(epsilon * (1 - q)) / math.log(q))
    return max(J, 1)


@dataclass(frozen=True)
class ProbabilityModel:
    q: float
    params: SchurParams
    epsilon: float = DEFAULT_EPSILON
    J: int = 0

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise ValueError(f"q must lie in (0, 1), got {self.q}")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.J <= 0:
            object.__setattr__(self, "J", truncation_index(self.q, self.epsilon))
        if self.q ** (self.J + 1) / (1 - self.q) > self.epsilon:
            raise ValueError(f"J = {self.J} leaves a tail above epsilon = {self.epsilon}")

    def p(self, j: int) -> float:
        return event_prob(j, self.q)

    def probs(self) -> np.ndarray:
        """p_1..p_J as an array (index 0 holds p_1)."""
        x = self.q ** np.arange(1, self.J + 1, dtype=float)
        return x / (1 + x)


@dataclass(frozen=True)
class EventConfiguration:
    """occurred[j-1] is True when E_j occurred; indices past J never occur."""

    occurred: tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "occurred", tuple(bool(x) for x in self.occurred))

    @classmethod
    def from_indices(cls, indices: Sequence[int], J: int) -> EventConfiguration:
        occ = [False] * J
        for j in indices:
            occ[j - 1] = True
        return cls(tuple(occ))

    @property
    def J(self) -> int:
        return len(self.occurred)

    def __getitem__(self, j: int) -> bool:
        return 1 <= j <= len(self.occurred) and self.occurred[j - 1]

    def indices(self) -> list[int]:
        return [j + 1 for j, x in enumerate(self.occurred) if x]


def _gap_conditions(get, d: int, r: int, J: int, start: int):
    """Yield (trigger, forbidden...) index groups for n >= start, literal to the event definition."""
    n = start
    while n * d + r <= J:
        yield get(n * d + r), (get(n * d + d - r), get((n + 1) * d))
        yield get(n * d + d - r), (get((n + 1) * d), get((n + 1) * d + r))
        yield get((n + 1) * d), (get((n + 1) * d + r), get((n + 1) * d + d - r), get((n + 2) * d))
        n += 1


def _satisfies(config: EventConfiguration, params: SchurParams, start: int) -> bool:
    for trig, forbidden in _gap_conditions(config.__getitem__, params.d, params.r, config.J, start):
        if trig and any(forbidden):
            return False
    return True


def satisfies_U(config: EventConfiguration, params: SchurParams) -> bool:
    return _satisfies(config, params, 0)


def satisfies_V(config: EventConfiguration, params: SchurParams) -> bool:
    return _satisfies(config, params, 1)


def _satisfies_batch(E: np.ndarray, params: SchurParams, start: int) -> np.ndarray:
    """Vectorized predicate over rows of a (trials, J) boolean array."""
    trials, J = E.shape
    none = np.zeros(trials, dtype=bool)

    def get(j):
        return E[:, j - 1] if 1 <= j <= J else none

    ok = np.ones(trials, dtype=bool)
    for trig, forbidden in _gap_conditions(get, params.d, params.r, J, start):
        bad = forbidden[0].copy()
        for f in forbidden[1:]:
            bad |= f
        ok &= ~(trig & bad)
    return ok


def satisfies_U_batch(E: np.ndarray, params: SchurParams) -> np.ndarray:
    return _satisfies_batch(E, params, 0)


def satisfies_V_batch(E: np.ndarray, params: SchurParams) -> np.ndarray:
    return _satisfies_batch(E, params, 1)


# -- exact evaluation via h_{d,r} ---------------------------------------------------


def _inf_product(q: float, start: int, step: int, sign: float) -> float:
    """prod_{j>=0} (1 + sign q^(start + j*step)) to double precision."""
    out = 1.0
    e = start
    while True:
        t = q**e
        if t < 1e-18:
            return out
        out *= 1 + sign * t
        e += step


def _h_fqseries(params: SchurParams, q: float, x: float, tol: float) -> NumericValue:
    """h(x) = (x;q^d)_inf sum_n A_n x^n / (-xq^r, -xq^(d-r), -xq^d; q^d)_inf, for 0 < x < 1.

    A_n increases to A_inf, so the tail after the last term is below
    A_inf x^(n+1)/(1-x) times the prefactor.
    """
    d, r = params.d, params.r
    if not 0 < x < 1:
        raise ValueError("the first hypergeometric form needs 0 < x < 1")
    a_inf = _inf_product(q, r, d, 1) * _inf_product(q, d - r, d, 1) / _inf_product(q, d, d, -1)
    pref = 1.0
    k = 0
    while True:
        t = x * q ** (d * k)
        if t < 1e-18:
            break
        pref *= (1 - t) / ((1 + t * q**r) * (1 + t * q ** (d - r)) * (1 + t * q**d))
        k += 1
    total, A, xn, n = 0.0, 1.0, 1.0, 0
    while True:
        total += A * xn
        tail = pref * a_inf * xn * x / (1 - x)
        if tail < tol / 10 or n > 100_000:
            break
        n += 1
        A *= (1 + q ** (d * (n - 1) + r)) * (1 + q ** (d * n - r)) / (1 - q ** (d * n))
        xn *= x
    if tail > tol:
        raise SeriesError(f"h({x}) tail {tail:.3g} above tolerance {tol:.3g}")
    return NumericValue(pref * total, tail)


def _h_second_form(params: SchurParams, q: float, x: float, tol: float) -> NumericValue:
    """h(x) = sum_n (x;q^d)_n x^n q^(dn^2) / (q^d, -xq^r, -xq^(d-r); q^d)_n / (-xq^d; q^d)_inf.

    Valid for every x >= 0; at x = 1 only n = 0 survives.
    """
    d, r = params.d, params.r
    total, term, n = 0.0, 1.0, 0
    while True:
        total += term
        num = (1 - x * q ** (d * n)) * x * q ** (d * (2 * n + 1))
        den = (1 - q ** (d * (n + 1))) * (1 + x * q ** (r + d * n)) * (1 + x * q ** (d - r + d * n))
        term *= num / den
        n += 1
        # consecutive ratios fall off like q^(2dn), so the next term bounds the tail
        if abs(term) < tol / 10 and q ** (2 * d * n) < 0.5:
            break
    pref = 1.0
    k = 1
    while True:
        t = x * q ** (d * k)
        if t < 1e-18:
            break
        pref *= 1 + t
        k += 1
    return NumericValue(total / pref, 2 * abs(term))


def exact_prob_Uk(params: SchurParams, q: float, k: int, tol: float = 1e-12, route: str = "auto") -> NumericValue:
    """P(U_k) = h_{d,r}(q^(kd)), where U_k asks the gap conditions from E_{kd+r} on.

    ``route`` picks the summation: "fqseries" (first hypergeometric form,
    k >= 1 only), "second" (the form whose x = 1 value collapses), or "auto".
    """
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    if k < 0:
        raise ValueError("k must be non-negative")
    if tol < 1e-15:
        raise SeriesError(f"tolerance {tol:.3g} is below double precision; use tol >= 1e-15")
    x = q ** (k * params.d)
    if route == "auto":
        route = "second" if k == 0 else "fqseries"
    if route == "fqseries":
        if k == 0:
            raise ValueError("the first hypergeometric form degenerates at x = 1; use route='second'")
        return _h_fqseries(params, q, x, tol)
    if route == "second":
        return _h_second_form(params, q, x, tol)
    raise ValueError(f"unknown route {route!r}")


def prob_U(params: SchurParams, q: float) -> float:
    """Closed form P(U) = 1/(-q^d; q^d)_inf."""
    return 1 / _inf_product(q, params.d, params.d, 1)


def g3_value(params: SchurParams, q: float, tol: float = 1e-13, perturb: int | None = None) -> NumericValue:
    """g3(-q^r; q^d) from the exact integer series, truncation doubled until the tail is below tol."""
    N = 64
    while True:
        s = ids.series_g3(params.r, params.d, N)
        if perturb is not None:
            s = s.mutated(perturb)
        try:
            v = qs_eval_real(s, q)
        except SeriesError:
            v = None
        if v is not None and v.tail_bound < tol:
            return v
        if N > 50_000:
            raise SeriesError(f"g3 at q={q} did not reach tolerance {tol:.3g}")
        N *= 2


def theorem_prob_check(
    params: SchurParams, q: float, tol: float = 1e-6, g3_perturb: int | None = None
) -> VerificationReport:
    """Both parts of the conditional-probability theorem from two independent routes.

    Probability side: P(U) = h(1) and P(V) = h(q^d) summed from different
    hypergeometric forms.  Series side: g3 from its exact integer coefficients.
    """
    d, r = params.d, params.r
    H0 = exact_prob_Uk(params, q, 0, tol=1e-14)
    H1 = exact_prob_Uk(params, q, 1, tol=1e-14)
    g = g3_value(params, q, perturb=g3_perturb)
    pbar = (1 / (1 + q**r)) * (1 / (1 + q ** (d - r))) * (1 / (1 + q**d))
    lhs1 = H0.value / H1.value
    rhs1 = pbar / g.value
    lhs2 = pbar * H1.value / H0.value
    rhs2 = g.value
    details = {
        "q": q,
        "P(U)": H0.value,
        "P(V)": H1.value,
        "P(U|V)": lhs1,
        "P(U|V) target": rhs1,
        "P(F|U)": lhs2,
        "g3": rhs2,
        "g3 tail": g.tail_bound,
    }
    slack = g.tail_bound + H0.tail_bound + H1.tail_bound
    if abs(lhs1 - rhs1) > tol + slack:
        return VerificationReport("theorem-prob", tol, "fail", Mismatch("part 1", lhs1, rhs1), details)
    if abs(lhs2 - rhs2) > tol + slack:
        return VerificationReport("theorem-prob", tol, "fail", Mismatch("part 2", lhs2, rhs2), details)
    return VerificationReport("theorem-prob", tol, "pass", None, details)


def _Uk_coefficients(params: SchurParams, q: float, k: int, p_override: dict[int, float] | None):
    d, r = params.d, params.r
    override = p_override or {}

    def p(j):
        return override.get(j, event_prob(j, q))

    def pb(j):
        return 1 - p(j)

    a, b, c = k * d + r, k * d + d - r, (k + 1) * d
    a2, b2, c2 = (k + 1) * d + r, (k + 1) * d + d - r, (k + 2) * d
    first = p(a) * pb(b) * pb(c) + pb(a) * p(b) * pb(c) + pb(a) * pb(b) * pb(c)
    second = pb(a) * pb(b) * p(c) * pb(a2) * pb(b2) * pb(c2) - pb(a) * p(b) * pb(c) * p(a2) * pb(b2) * pb(c2)
    return first, second


def verify_Uk_recurrence(
    params: SchurParams, q: float, k_max: int = 6, tol: float = 1e-10, p_override: dict[int, float] | None = None
) -> VerificationReport:
    """P(U_k) = c1 P(U_{k+1}) + c2 P(U_{k+2}) for 0 <= k <= k_max, with U_k values from h.

    ``p_override`` replaces individual p_j in the coefficients (negative control).
    """
    H = [exact_prob_Uk(params, q, k, tol=1e-14).value for k in range(k_max + 3)]
    worst = 0.0
    for k in range(k_max + 1):
        c1, c2 = _Uk_coefficients(params, q, k, p_override)
        rhs = c1 * H[k + 1] + c2 * H[k + 2]
        err = abs(H[k] - rhs)
        worst = max(worst, err)
        if err > tol:
            return VerificationReport("uk-recurrence", k_max, "fail", Mismatch(k, H[k], rhs), {"residual": err})
    return VerificationReport("uk-recurrence", k_max, "pass", None, {"max_residual": worst})


# -- Monte Carlo -----------------------------------------------------------------------


@dataclass(frozen=True)
class Estimate:
    name: str
    hits: int
    trials: int
    target: float

    @property
    def estimate(self) -> float:
        return self.hits / self.trials if self.trials else float("nan")

    @property
    def stderr(self) -> float:
        if not self.trials:
            return float("nan")
        p = self.estimate
        return math.sqrt(max(p * (1 - p), 0.0) / self.trials)

    @property
    def z(self) -> float:
        """Score statistic: the deviation over the binomial standard error at
        the target, which stays finite when every trial hits."""
        if not self.trials:
            return float("nan")
        se0 = math.sqrt(self.target * (1 - self.target) / self.trials)
        if se0 == 0:
            return 0.0 if self.estimate == self.target else math.inf
        return (self.estimate - self.target) / se0

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "hits": self.hits,
            "trials": self.trials,
            "estimate": repr(self.estimate),
            "stderr": repr(self.stderr),
            "target": repr(self.target),
            "z": repr(self.z),
        }


@dataclass(frozen=True)
class SimulationReport:
    params: SchurParams
    q: float
    trials: int
    seed: int
    J: int
    epsilon: float
    estimates: tuple[Estimate, ...] = field(default_factory=tuple)

    def __getitem__(self, name: str) -> Estimate:
        for e in self.estimates:
            if e.name == name:
                return e
        raise KeyError(name)

    def within(self, sigmas: float = 4.0) -> bool:
        return all(abs(e.z) <= sigmas for e in self.estimates)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "d": self.params.d,
            "r": self.params.r,
            "q": repr(self.q),
            "trials": self.trials,
            "seed": self.seed,
            "J": self.J,
            "epsilon": repr(self.epsilon),
            "caveat": f"events beyond E_{self.J} are treated as not occurring (per-trial probability < {self.epsilon:g})",
            "estimates": [e.to_json() for e in self.estimates],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["quantity", "estimate", "stderr", "target", "z"])
        for e in self.estimates:
            wr.writerow([e.name, repr(e.estimate), repr(e.stderr), repr(e.target), repr(e.z)])
        return buf.getvalue()


def _chunk_tally(params: SchurParams, probs: np.ndarray, seed: int, index: int, size: int) -> np.ndarray:
    """Counts (V, U, F and U) for one chunk drawn from its own Philox stream."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))
    E = rng.random((size, probs.size)) < probs
    U = satisfies_U_batch(E, params)
    V = satisfies_V_batch(E, params)
    d, r = params.d, params.r
    free = ~(E[:, r - 1] | E[:, d - r - 1] | E[:, d - 1])
    return np.array([V.sum(), U.sum(), (U & free).sum()], dtype=np.int64)


def simulate(
    params: SchurParams, q: float, trials: int, seed: int = 0, workers: int = 1, epsilon: float | None = None
) -> SimulationReport:
    """Monte Carlo estimates of P(U), P(V), P(U|V) and P(F_r F_(d-r) F_d | U).

    Trials are split into fixed chunks of CHUNK; chunk i draws from a Philox
    stream keyed on (seed, i), so the tallies do not depend on ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if epsilon is None:
        epsilon = min(DEFAULT_EPSILON, 0.05 / trials)
    model = ProbabilityModel(q, params, epsilon)
    J = max(model.J, 2 * params.d)
    probs = ProbabilityModel(q, params, epsilon, J).probs()
    sizes = [min(CHUNK, trials - i * CHUNK) for i in range(math.ceil(trials / CHUNK))]

    def run(i):
        return _chunk_tally(params, probs, seed, i, sizes[i])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]
    nV, nU, nFU = (int(x) for x in np.sum(parts, axis=0))

    d, r = params.d, params.r
    g = g3_value(params, q).value
    pU = exact_prob_Uk(params, q, 0).value
    pV = exact_prob_Uk(params, q, 1).value
    pbar = 1 / ((1 + q**r) * (1 + q ** (d - r)) * (1 + q**d))
    estimates = (
        Estimate("P(U)", nU, trials, pU),
        Estimate("P(V)", nV, trials, pV),
        Estimate("P(U|V)", nU, nV, pbar / g),
        Estimate("P(F|U)", nFU, nU, g),
    )
    return SimulationReport(params, q, trials, seed, J, epsilon, estimates)
