"""Brute-force partition counters used as ground truth for the series code.

Everything here works by recursive descent over parts, largest part first.
Nothing consults a generating function, so these stay an independent check
on the product and hypergeometric builders.  Memoization only collapses
identical subtrees of the same descent.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence


@dataclass(frozen=True)
class SchurParams:
    """The pair (d, r) with d >= 3 and 1 <= r < d/2.

    No gcd reduction is applied; (6, 2) stays (6, 2).
    """

    d: int
    r: int

    def __post_init__(self):
        if not isinstance(self.d, int) or not isinstance(self.r, int):
            raise TypeError("d and r must be integers")
        if self.d < 3:
            raise ValueError(f"d must be at least 3, got {self.d}")
        if not (1 <= self.r and 2 * self.r < self.d):
            raise ValueError(f"r must satisfy 1 <= r < d/2, got r={self.r} for d={self.d}")

    @property
    def residues(self) -> frozenset[int]:
        """Admissible residues mod d: 0, r and d - r."""
        return frozenset({0, self.r, self.d - self.r})

    def admits(self, part: int) -> bool:
        return part % self.d in self.residues

    def __str__(self):
        return f"({self.d},{self.r})"


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(self.parts)
        object.__setattr__(self, "parts", parts)
        if any(p < 1 for p in parts):
            raise ValueError("parts must be positive")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError("parts must be weakly decreasing")

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)


def _parts(p: Partition | Sequence[int]) -> tuple[int, ...]:
    return p.parts if isinstance(p, Partition) else tuple(p)


def _schur_cap(part: int, d: int) -> int:
    """Largest part allowed directly below ``part``."""
    return part - d - (1 if part % d == 0 else 0)


def is_schur_admissible(p: Partition | Sequence[int], params: SchurParams, min_exclusive: int = 0) -> bool:
    """Check the Schur gap conditions with every part strictly above ``min_exclusive``."""
    parts = _parts(p)
    d = params.d
    for i, lam in enumerate(parts):
        if lam <= min_exclusive or not params.admits(lam):
            return False
        if i + 1 < len(parts) and parts[i + 1] > _schur_cap(lam, d):
            return False
    return True


def enumerate_schur(params: SchurParams, j: int, n: int) -> Iterator[tuple[int, ...]]:
    """Yield every Schur-admissible partition of n with parts > j, largest part first."""
    d = params.d

    def descend(remaining: int, cap: int, prefix: tuple[int, ...]):
        if remaining == 0:
            yield prefix
            return
        for lam in range(min(cap, remaining), j, -1):
            if params.admits(lam):
                yield from descend(remaining - lam, _schur_cap(lam, d), prefix + (lam,))

    yield from descend(n, n, ())


@lru_cache(maxsize=None)
def _schur(d: int, r: int, j: int, remaining: int, cap: int, parts: int) -> int:
    # parts < 0 means "any number of parts"
    if remaining == 0:
        return 1 if parts <= 0 else 0
    if parts == 0:
        return 0
    total = 0
    for lam in range(min(cap, remaining), j, -1):
        if lam % d in (0, r, d - r):
            total += _schur(d, r, j, remaining - lam, _schur_cap(lam, d), parts - 1 if parts > 0 else -1)
    return total


def count_schur(params: SchurParams, j: int, n: int) -> int:
    """B_{d,r}(n) for j = 0 and C_{d,r}(n) for j = d."""
    if n < 0:
        return 0
    return _schur(params.d, params.r, j, n, n, -1)


def count_schur_by_parts(params: SchurParams, j: int, n: int, m: int) -> int:
    """Schur-admissible partitions of n with parts > j and exactly m parts."""
    if n < 0 or m < 0:
        return 0
    if m == 0:
        return 1 if n == 0 else 0
    return _schur(params.d, params.r, j, n, n, m)


@lru_cache(maxsize=None)
def _distinct(allowed_key: tuple, remaining: int, cap: int) -> int:
    modulus, residues = allowed_key
    if remaining == 0:
        return 1
    total = 0
    for lam in range(min(cap, remaining), 0, -1):
        if lam % modulus in residues:
            total += _distinct(allowed_key, remaining - lam, lam - 1)
    return total


def count_distinct_congruent(params: SchurParams, n: int) -> int:
    """E_{d,r}(n): partitions of n into distinct parts congruent to +-r mod d."""
    if n < 0:
        return 0
    key = (params.d, frozenset({params.r % params.d, (-params.r) % params.d}))
    return _distinct(key, n, n)


def _normalize_residues(modulus: int, residues: Iterable[int]) -> frozenset[int]:
    if modulus < 1:
        raise ValueError("modulus must be positive")
    res = frozenset(x % modulus for x in residues)
    if not res:
        raise ValueError("residue set must be non-empty")
    if modulus > 1 and 0 in res:
        raise ValueError("residue 0 is not allowed; residues must lie in [1, M-1] after reduction")
    return res


@lru_cache(maxsize=None)
def _unrestricted(allowed_key: tuple, remaining: int, cap: int) -> int:
    modulus, residues = allowed_key
    if remaining == 0:
        return 1
    total = 0
    for lam in range(min(cap, remaining), 0, -1):
        if lam % modulus in residues:
            total += _unrestricted(allowed_key, remaining - lam, lam)
    return total


def count_congruence_classes(modulus: int, residues: Iterable[int], n: int) -> int:
    """Partitions of n (any multiplicity) with every part in the given residue classes."""
    res = _normalize_residues(modulus, residues)
    if n < 0:
        return 0
    return _unrestricted((modulus, res), n, n)


@lru_cache(maxsize=None)
def _gap(gap: int, min_part: int, remaining: int, cap: int) -> int:
    if remaining == 0:
        return 1
    total = 0
    for lam in range(min(cap, remaining), min_part - 1, -1):
        total += _gap(gap, min_part, remaining - lam, lam - gap)
    return total


def count_gap_partitions(gap: int, min_part: int, n: int) -> int:
    """q_{d,j}(n): consecutive parts differ by at least ``gap``, smallest part >= ``min_part``."""
    if gap < 1 or min_part < 1:
        raise ValueError("gap and min_part must be at least 1")
    if n < 0:
        return 0
    return _gap(gap, min_part, n, n)


def count_distinct_parts(n: int) -> int:
    return count_gap_partitions(1, 1, n)


def table(fn, n_max: int) -> list[int]:
    """[fn(0), ..., fn(n_max)] for a one-argument counter."""
    return [fn(n) for n in range(n_max + 1)]
