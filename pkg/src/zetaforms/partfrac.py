"""Partial-fraction expansion of the rational kernel behind the zeta
linear forms.

For parameters (a, r, n) with 1 <= r < a/2 the kernel is

    R(t) = n!^(a-2r) * (t-rn+1)_{rn} * (t+n+2)_{rn} / ((t+1)_{n+1})^a

a rational function whose only poles are t = -1, ..., -n-1, each of
order a.  Its expansion

    R(t) = sum_{i=1..a} sum_{j=0..n} c[i][j] / (t+j+1)^i

is computed exactly here and drives everything downstream: the
coefficient polynomials sum_j c[i][j] z^j attached to the polylogarithm
of weight i, the companion polynomial attached to 1, and the scaled
integers obtained by clearing denominators with powers of lcm(1..n).

The c[i][j] are extracted by truncated-series expansion around each
pole: substituting t = -j-1 + eps into R(t)*(t+j+1)^a cancels the pole's
own factors and leaves a product of linear factors eps + m with m != 0,
which is expanded at order a by the exact series ring.  Columns are
independent, so the table can be built in parallel with bitwise-
identical results.
"""

from __future__ import annotations

import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .errors import InconsistencyError, ParameterError
from .exact import TruncatedSeries, lcm_upto

__all__ = [
    "FormParams",
    "PartialFractionTable",
    "kernel_value",
    "decompose",
    "eval_coeff_poly",
    "eval_free_poly",
    "check_symmetry",
    "integer_scaled",
    "sample_points",
    "reconstruction_ok",
]

# Bound on numerators/denominators of sampled evaluation points; small
# enough to keep exact evaluation cheap, large enough that collisions
# with the finitely many poles are impossible in practice.
SAMPLE_MAGNITUDE = 10**6


@dataclass(frozen=True)
class FormParams:
    """Parameter triple (a, r, n): zeta height a, acceleration r,
    approximation index n, constrained to 1 <= r < a/2 and n >= 0."""

    a: int
    r: int
    n: int

    def __post_init__(self):
        if self.a < 3:
            raise ParameterError(f"need a >= 3, got a={self.a}")
        if self.r < 1:
            raise ParameterError(f"need r >= 1, got r={self.r}")
        if 2 * self.r >= self.a:
            raise ParameterError(
                f"need 2r < a, got r={self.r}, a={self.a}"
            )
        if self.n < 0:
            raise ParameterError(f"need n >= 0, got n={self.n}")

    @property
    def odd_route(self) -> bool:
        """True when only odd zeta values survive at z = 1 (n even, a odd)."""
        return self.n % 2 == 0 and self.a % 2 == 1

    @property
    def decay_exponent(self) -> int:
        """Order of vanishing of the kernel at infinity: a(n+1) - 2rn."""
        return self.a * (self.n + 1) - 2 * self.r * self.n


def kernel_value(params: FormParams, x: Fraction | int) -> Fraction:
    """Exact value of the kernel R at a rational point x.

    At nonnegative integers k this is the k-th series coefficient; it
    vanishes for 0 <= k < rn because the first rising factorial crosses
    zero.  Evaluating at a pole (x in {-1, ..., -n-1}) raises
    ZeroDivisionError.
    """
    a, r, n = params.a, params.r, params.n
    rn = r * n
    x = Fraction(x)
    num = Fraction(math.factorial(n) ** (a - 2 * r))
    for s in range(rn):
        num *= x - rn + 1 + s
    if not num:
        return Fraction(0)
    for s in range(rn):
        num *= x + n + 2 + s
    den = Fraction(1)
    for i in range(n + 1):
        den *= x + 1 + i
    return num / den**a


def _pole_column(args: tuple[int, int, int, int]) -> tuple[Fraction, ...]:
    """Coefficients (c[1][j], ..., c[a][j]) for the pole t = -j-1.

    Shifting t = -j-1 + eps turns R(t)*(t+j+1)^a into

        n!^(a-2r) * prod_s (eps + s-rn-j) * prod_s (eps + n+1-j+s)
                  / prod_{i != j} (eps + i-j)^a

    with every constant term nonzero; c[i][j] is the eps^(a-i)
    coefficient of the order-a expansion.  The denominator factors are
    multiplied out once, inverted once, and raised to the power a by
    binary powering, which is cheaper than inverting each factor.
    """
    a, r, n, j = args
    rn = r * n
    num = TruncatedSeries.constant(math.factorial(n) ** (a - 2 * r), a)
    for s in range(rn):
        num = num * TruncatedSeries.affine(s - rn - j, a)
    for s in range(rn):
        num = num * TruncatedSeries.affine(n + 1 - j + s, a)
    den = TruncatedSeries.constant(1, a)
    for i in range(n + 1):
        if i != j:
            den = den * TruncatedSeries.affine(i - j, a)
    series = num * den.inverse() ** a
    return tuple(series[a - i] for i in range(1, a + 1))


@dataclass(frozen=True)
class PartialFractionTable:
    """Expansion coefficients c[i][j] (pole order i = 1..a, pole index
    j = 0..n) for fixed parameters.  Immutable once built."""

    params: FormParams
    c: tuple[tuple[Fraction, ...], ...]  # c[i-1][j]

    def coeff(self, i: int, j: int) -> Fraction:
        if not 1 <= i <= self.params.a:
            raise ParameterError(f"pole order i={i} outside 1..{self.params.a}")
        if not 0 <= j <= self.params.n:
            raise ParameterError(f"pole index j={j} outside 0..{self.params.n}")
        return self.c[i - 1][j]

    def to_json(self) -> str:
        """Schema: {"a":int, "r":int, "n":int, "c":[[["num","den"],...],...]}
        with rows i = 1..a and integers as decimal strings."""
        obj = {
            "a": self.params.a,
            "r": self.params.r,
            "n": self.params.n,
            "c": [
                [[str(v.numerator), str(v.denominator)] for v in row]
                for row in self.c
            ],
        }
        return json.dumps(obj)

    @classmethod
    def from_json(cls, text: str | dict) -> "PartialFractionTable":
        obj = json.loads(text) if isinstance(text, str) else text
        params = FormParams(obj["a"], obj["r"], obj["n"])
        c = tuple(
            tuple(Fraction(int(num), int(den)) for num, den in row)
            for row in obj["c"]
        )
        if len(c) != params.a or any(len(row) != params.n + 1 for row in c):
            raise ParameterError("coefficient table shape does not match (a, n)")
        return cls(params, c)


def decompose(params: FormParams, workers: int = 1) -> PartialFractionTable:
    """Build the full coefficient table for ``params``.

    ``workers > 1`` distributes pole columns over processes; the result
    is bitwise identical to the serial one because each column is a pure
    function of (a, r, n, j) and columns are reassembled in j order.
    """
    a, r, n = params.a, params.r, params.n
    jobs = [(a, r, n, j) for j in range(n + 1)]
    if workers > 1 and n > 0:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            columns = list(pool.map(_pole_column, jobs))
    else:
        columns = [_pole_column(job) for job in jobs]
    c = tuple(
        tuple(columns[j][i - 1] for j in range(n + 1)) for i in range(1, a + 1)
    )
    return PartialFractionTable(params, c)


def eval_coeff_poly(table: PartialFractionTable, i: int, z: Fraction | int) -> Fraction:
    """Exact value of the weight-i coefficient polynomial
    sum_{j=0..n} c[i][j] z^j."""
    if not 1 <= i <= table.params.a:
        raise ParameterError(f"pole order i={i} outside 1..{table.params.a}")
    z = Fraction(z)
    row = table.c[i - 1]
    # Horner, highest power first
    acc = Fraction(0)
    for cj in reversed(row):
        acc = acc * z + cj
    return acc


def eval_free_poly(table: PartialFractionTable, z: Fraction | int) -> Fraction:
    """Exact value of the companion polynomial attached to 1:

        - sum_{i=1..a} sum_{j=1..n} c[i][j] * sum_{k=0..j-1} z^(j-k)/(k+1)^i

    Every term carries a positive power of z, so the value at z = 0 is 0,
    and for n = 0 the empty sum gives 0.
    """
    a, n = table.params.a, table.params.n
    z = Fraction(z)
    total = Fraction(0)
    for i in range(1, a + 1):
        row = table.c[i - 1]
        # w(j) = sum_{k=0..j-1} z^(j-k)/(k+1)^i via
        # w(j+1) = z*(w(j) + (j+1)^-i), w(0) = 0
        w = Fraction(0)
        for j in range(1, n + 1):
            w = z * (w + Fraction(1, j**i))
            cij = row[j]
            if cij:
                total += cij * w
    return -total


def check_symmetry(table: PartialFractionTable) -> bool:
    """Exact check of the reflection law
    c[i][n-j] == (-1)^(a-i) * (-1)^(a*n) * c[i][j] for all i, j."""
    a, n = table.params.a, table.params.n
    sign_an = -1 if (a * n) % 2 else 1
    for i in range(1, a + 1):
        row = table.c[i - 1]
        sign = (-1 if (a - i) % 2 else 1) * sign_an
        for j in range(n + 1):
            if row[n - j] != sign * row[j]:
                return False
    return True


def integer_scaled(table: PartialFractionTable) -> list[int]:
    """The a+1 integers obtained by clearing denominators at z = 1:
    index 0 holds d^a * (free polynomial at 1) and index i holds
    d^(a-i) * (weight-i polynomial at 1), where d = lcm(1..n).

    Non-integrality after scaling is impossible for a correct table, so
    it is reported as an internal error rather than returned.
    """
    a, n = table.params.a, table.params.n
    d = lcm_upto(n)
    values = [eval_free_poly(table, 1) * d**a]
    for i in range(1, a + 1):
        values.append(eval_coeff_poly(table, i, 1) * d ** (a - i))
    out = []
    for i, v in enumerate(values):
        if v.denominator != 1:
            raise InconsistencyError(
                f"scaled value at i={i} is not an integer for "
                f"(a={a}, r={table.params.r}, n={n}): {v}"
            )
        out.append(v.numerator)
    return out


def sample_points(params: FormParams, count: int, seed: int = 0) -> list[Fraction]:
    """Deterministic rational sample points avoiding the poles.

    Numerators and denominators are bounded by SAMPLE_MAGNITUDE and the
    stream depends only on (seed, count), so reconstruction checks are
    reproducible across runs and platforms.
    """
    rng = random.Random(seed)
    points: set[Fraction] = set()
    poles = {Fraction(-m) for m in range(1, params.n + 2)}
    while len(points) < count:
        x = Fraction(
            rng.randint(-SAMPLE_MAGNITUDE, SAMPLE_MAGNITUDE),
            rng.randint(1, SAMPLE_MAGNITUDE),
        )
        if x in poles:
            continue
        points.add(x)
    return sorted(points)


def reconstruction_ok(
    table: PartialFractionTable, count: int | None = None, seed: int = 0
) -> bool:
    """Exact verification that the table reproduces the kernel.

    Both sides are rational functions with denominator degree a(n+1) and
    numerator degree < a(n+1), so agreement at more than 2*a*(n+1)
    distinct points forces identity; the default count 3*a*(n+1) leaves
    margin.
    """
    params = table.params
    a, n = params.a, params.n
    if count is None:
        count = 3 * a * (n + 1)
    for x in sample_points(params, count, seed):
        lhs = Fraction(0)
        for j in range(n + 1):
            base = x + j + 1
            powers = base
            for i in range(1, a + 1):
                cij = table.c[i - 1][j]
                if cij:
                    lhs += cij / powers
                if i < a:
                    powers *= base
        if lhs != kernel_value(params, x):
            return False
    return True
