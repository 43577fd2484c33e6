"""Exact arithmetic kernel: rising factorials, lcm tables, Bernoulli
numbers, and truncated power series over exact rationals.

Everything here is pure and exact.  Values are ``fractions.Fraction``
(kept in lowest terms with positive denominator by construction) or
plain ``int``; series arithmetic truncates at a fixed order K, so all
operations are closed over the quotient ring mod eps^K and results are
independent of evaluation order.  The lcm and Bernoulli caches are
append-only tables guarded by a lock: concurrent readers always observe
a consistent prefix.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from typing import Iterable

__all__ = [
    "pochhammer",
    "lcm_upto",
    "bernoulli",
    "TruncatedSeries",
]


def pochhammer(alpha: Fraction | int, k: int) -> Fraction:
    """Rising factorial (alpha)_k = alpha*(alpha+1)*...*(alpha+k-1).

    The empty product (k = 0) is 1.  Exact for rational alpha.
    """
    if k < 0:
        raise ValueError(f"pochhammer: k must be >= 0, got {k}")
    out = Fraction(1)
    alpha = Fraction(alpha)
    for i in range(k):
        out *= alpha + i
    return out


_lcm_lock = threading.Lock()
_lcm_table: list[int] = [1, 1]  # index n -> lcm(1..n); lcm of nothing is 1


def lcm_upto(n: int) -> int:
    """lcm(1, 2, ..., n), with the n = 0 convention lcm() = 1.

    Values are memoized in a monotone table, so sweeps over increasing n
    cost one ``math.lcm`` each and repeated queries are O(1).
    """
    if n < 0:
        raise ValueError(f"lcm_upto: n must be >= 0, got {n}")
    if n >= len(_lcm_table):
        with _lcm_lock:
            while len(_lcm_table) <= n:
                m = len(_lcm_table)
                _lcm_table.append(math.lcm(_lcm_table[-1], m))
    return _lcm_table[n]


_bernoulli_lock = threading.Lock()
_bernoulli_table: list[Fraction] = [Fraction(1)]


def bernoulli(m: int) -> Fraction:
    """Bernoulli number B_m (with B_1 = -1/2), computed exactly.

    Uses the defining recurrence sum_{i<=m} C(m+1, i) B_i = 0 and caches
    all values up to the largest m requested; the even-index values feed
    the Euler-Maclaurin corrections in the floating-point layer.
    """
    if m < 0:
        raise ValueError(f"bernoulli: m must be >= 0, got {m}")
    if m >= len(_bernoulli_table):
        with _bernoulli_lock:
            while len(_bernoulli_table) <= m:
                k = len(_bernoulli_table)
                acc = Fraction(0)
                for i in range(k):
                    bi = _bernoulli_table[i]
                    if bi:
                        acc += math.comb(k + 1, i) * bi
                _bernoulli_table.append(-acc / (k + 1))
    return _bernoulli_table[m]


class TruncatedSeries:
    """Power series in a formal variable eps, truncated at a fixed order.

    ``TruncatedSeries([c0, c1, ..., c_{K-1}])`` represents
    c0 + c1*eps + ... + c_{K-1}*eps^(K-1) + O(eps^K).  All arithmetic
    stays in the ring mod eps^K; mixing different orders is an error
    rather than an implicit coercion.  Instances are immutable.
    """

    __slots__ = ("coeffs",)

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable[Fraction | int]):
        cs = tuple(Fraction(c) for c in coeffs)
        if not cs:
            raise ValueError("TruncatedSeries needs order >= 1")
        object.__setattr__(self, "coeffs", cs)

    def __setattr__(self, name, value):
        raise AttributeError("TruncatedSeries is immutable")

    @classmethod
    def constant(cls, value: Fraction | int, order: int) -> "TruncatedSeries":
        return cls([value] + [0] * (order - 1))

    @classmethod
    def affine(cls, c0: Fraction | int, order: int) -> "TruncatedSeries":
        """The series c0 + eps (the linear term is dropped at order 1)."""
        cs = [Fraction(c0)] + [Fraction(0)] * (order - 1)
        if order >= 2:
            cs[1] = Fraction(1)
        return cls(cs)

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k]

    def __eq__(self, other) -> bool:
        return isinstance(other, TruncatedSeries) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"TruncatedSeries({list(self.coeffs)!r})"

    def _check_order(self, other: "TruncatedSeries") -> None:
        if self.order != other.order:
            raise ValueError(
                f"order mismatch: {self.order} vs {other.order}"
            )

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check_order(other)
        return TruncatedSeries(a + b for a, b in zip(self.coeffs, other.coeffs))

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check_order(other)
        return TruncatedSeries(a - b for a, b in zip(self.coeffs, other.coeffs))

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(-c for c in self.coeffs)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            self._check_order(other)
            K = self.order
            out = [Fraction(0)] * K
            for i, a in enumerate(self.coeffs):
                if a:
                    for j in range(K - i):
                        b = other.coeffs[j]
                        if b:
                            out[i + j] += a * b
            return TruncatedSeries(out)
        c = Fraction(other)
        return TruncatedSeries(c * x for x in self.coeffs)

    __rmul__ = __mul__

    def inverse(self) -> "TruncatedSeries":
        """Multiplicative inverse mod eps^K; needs a nonzero constant term."""
        if not self.coeffs[0]:
            raise ZeroDivisionError("series with zero constant term has no inverse")
        K = self.order
        inv0 = 1 / self.coeffs[0]
        out = [inv0] + [Fraction(0)] * (K - 1)
        for m in range(1, K):
            acc = Fraction(0)
            for i in range(1, m + 1):
                ci = self.coeffs[i]
                if ci:
                    acc += ci * out[m - i]
            out[m] = -inv0 * acc
        return TruncatedSeries(out)

    def __pow__(self, e: int) -> "TruncatedSeries":
        """Nonnegative integer power by binary powering (s**0 == 1)."""
        if e < 0:
            raise ValueError(f"exponent must be >= 0, got {e}")
        result = TruncatedSeries.constant(1, self.order)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result
