"""Growth bounds and dimension lower bounds.

Everything here is plain floating point evaluated in log space: the
outputs feed inequalities whose finite-size slack (documented at the
call sites) dwarfs double-precision rounding.  The two growth-rate
bounds, the g = log(beta)/2 and f = g - a - log(s) pair, and the
resulting dimension lower bound f/g follow the same parameter
constraints as the exact layer: 1 <= r < a/2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .errors import CriterionInapplicableError, ParameterError, ScanCapError

__all__ = [
    "BoundReport",
    "RateEstimate",
    "s_bound",
    "s_bound_log",
    "s_bound_exact",
    "p_growth_bound",
    "p_growth_bound_log",
    "nesterenko_lb",
    "f_g",
    "r_paper",
    "optimize_r",
    "min_a_for_dim",
    "empirical_rate",
    "asymptotic_check",
]

# optimize_r switches from exhaustive scan to a multi-scale geometric
# sweep above this many candidates; sweep resolution and the final
# exhaustive window are sized so the two methods agree on delta_lb.
EXHAUSTIVE_R_LIMIT = 50_000
SWEEP_GRID = 2048
SWEEP_WINDOW = 4096

SCAN_CAP_A = 10**6


def _check_ra(r: int, a: int) -> None:
    if r < 1 or 2 * r >= a:
        raise ParameterError(f"need 1 <= r < a/2, got r={r}, a={a}")


def s_bound_log(r: int, a: int) -> float:
    """log of the decay-rate bound on the z = 1 series:
    (2r+1)^(2r+1) * (ra+r)^(ra+r) * (a-2r)^(a-2r) / (ra+a-r)^(ra+a-r)."""
    _check_ra(r, a)
    w = 2 * r + 1
    v = r * a + r
    t = a - 2 * r
    u = r * a + a - r
    return (
        w * math.log(w) + v * math.log(v) + t * math.log(t) - u * math.log(u)
    )


def s_bound(r: int, a: int) -> float:
    """Linear value of the decay-rate bound (inf when not representable)."""
    lg = s_bound_log(r, a)
    try:
        return math.exp(lg)
    except OverflowError:
        return math.inf


def s_bound_exact(r: int, a: int) -> Fraction:
    """The decay-rate bound as an exact rational (integer powers only);
    intended for small parameters where the exact value is assertable."""
    _check_ra(r, a)
    w = 2 * r + 1
    v = r * a + r
    t = a - 2 * r
    u = r * a + a - r
    return Fraction(w**w * v**v * t**t, u**u)


def p_growth_bound_log(r: int, a: int) -> float:
    """log of the coefficient growth bound 2^(a-2r) * (2r+1)^(2r+1)."""
    _check_ra(r, a)
    w = 2 * r + 1
    return (a - 2 * r) * math.log(2) + w * math.log(w)


def p_growth_bound(r: int, a: int) -> float:
    """Linear value of the coefficient growth bound (inf on overflow)."""
    try:
        return math.exp(p_growth_bound_log(r, a))
    except OverflowError:
        return math.inf


def nesterenko_lb(log_alpha: float, log_beta: float) -> float:
    """Dimension lower bound 1 - log(alpha)/log(beta) from Nesterenko's
    linear-independence criterion; applicable only for 0 < alpha < 1 < beta."""
    if not log_alpha < 0:
        raise CriterionInapplicableError(
            f"criterion needs alpha < 1 (log_alpha < 0), got {log_alpha}"
        )
    if not log_beta > 0:
        raise CriterionInapplicableError(
            f"criterion needs beta > 1 (log_beta > 0), got {log_beta}"
        )
    return 1 - log_alpha / log_beta


def f_g(a: int, r: int) -> tuple[float, float]:
    """The numerator/denominator pair of the dimension bound:

        f = (a-2r) log 2 + (ra+a-r) log(ra+a-r)
            - (ra+r) log(ra+r) - (a-2r) log(a-2r)
        g = a + (a-2r) log 2 + (2r+1) log(2r+1)

    Algebraically f = g - a - s_bound_log(r, a); both are evaluated
    directly so the identity doubles as a cross-check."""
    _check_ra(r, a)
    t = a - 2 * r
    u = r * a + a - r
    v = r * a + r
    w = 2 * r + 1
    f = t * math.log(2) + u * math.log(u) - v * math.log(v) - t * math.log(t)
    g = a + t * math.log(2) + w * math.log(w)
    return f, g


def r_paper(a: int) -> int:
    """The integer nearest a/(log a)^2, clamped to the admissible range
    [1, ceil(a/2) - 1]; exact half-integers round down."""
    if a < 3:
        raise ParameterError(f"need a >= 3, got {a}")
    x = a / math.log(a) ** 2
    lo = math.floor(x)
    r = lo if x - lo <= 0.5 else lo + 1
    return max(1, min(r, (a - 1) // 2))


@dataclass(frozen=True)
class BoundReport:
    """One evaluated dimension bound: delta_lb = f/g at (a, r), with the
    log-space ingredients kept for auditing."""

    a: int
    r: int
    log_s_bound: float
    log_alpha: float
    log_beta: float
    f: float
    g: float
    delta_lb: float

    def to_json(self) -> str:
        obj = {
            "a": self.a,
            "r": self.r,
            "f": self.f,
            "g": self.g,
            "delta_lb": self.delta_lb,
            "log_alpha": self.log_alpha,
            "log_beta": self.log_beta,
        }
        return json.dumps(obj)


def _report(a: int, r: int) -> BoundReport:
    f, g = f_g(a, r)
    ls = s_bound_log(r, a)
    return BoundReport(
        a=a,
        r=r,
        log_s_bound=ls,
        log_alpha=2 * (a + ls),
        log_beta=2 * g,
        f=f,
        g=g,
        delta_lb=f / g,
    )


def _best_r_exhaustive(a: int, lo: int, hi: int) -> int:
    best_r = lo
    best = -math.inf
    for r in range(lo, hi + 1):
        f, g = f_g(a, r)
        d = f / g
        if d > best:
            best = d
            best_r = r
    return best_r


def optimize_r(a: int) -> BoundReport:
    """Best dimension bound over admissible r (ties go to the smaller r).

    Small ranges are scanned exhaustively.  Large ones use a multi-scale
    geometric sweep: f/g is smooth and single-peaked in r, but adjacent
    integers are indistinguishable in double precision near the peak, so
    predicate-based searches mislocate it; bracketing the coarse argmax
    and re-sweeping is robust against those flat stretches.
    """
    if a < 3:
        raise ParameterError(f"need a >= 3, got {a}")
    r_max = (a - 1) // 2
    lo, hi = 1, r_max
    if r_max > EXHAUSTIVE_R_LIMIT:
        while hi - lo > SWEEP_WINDOW:
            ratio = (hi / lo) ** (1.0 / SWEEP_GRID)
            grid = sorted(
                {
                    min(hi, max(lo, int(round(lo * ratio**i))))
                    for i in range(SWEEP_GRID + 1)
                }
            )
            best_i = max(
                range(len(grid)), key=lambda i: f_g(a, grid[i])[0] / f_g(a, grid[i])[1]
            )
            lo = grid[max(0, best_i - 1)]
            hi = grid[min(len(grid) - 1, best_i + 1)]
    return _report(a, _best_r_exhaustive(a, lo, hi))


def min_a_for_dim(target: float) -> int:
    """Smallest odd a >= 3 whose optimized bound reaches ``target``,
    by increasing scan; gives up at a = 10^6."""
    if target <= 0:
        raise ParameterError(f"need a positive target, got {target}")
    a = 3
    while a <= SCAN_CAP_A:
        if optimize_r(a).delta_lb >= target:
            return a
        a += 2
    raise ScanCapError(f"no odd a <= {SCAN_CAP_A} reaches delta_lb >= {target}")


def _log_magnitude(v) -> float:
    """Natural log of |v| for int/Fraction/float of any size."""
    if isinstance(v, Fraction):
        return float(mp.log(mp.mpf(abs(v.numerator))) - mp.log(mp.mpf(v.denominator)))
    if isinstance(v, int):
        return float(mp.log(mp.mpf(abs(v))))
    return float(mp.log(abs(mp.mpf(v))))


@dataclass(frozen=True)
class RateEstimate:
    """Empirical limsup estimate of |v_n|^(1/n) from finitely many terms."""

    values: tuple[tuple[int, float], ...]  # (n, log |v_n|)
    estimate: float
    method: str


def empirical_rate(values, method: str = "root") -> RateEstimate:
    """Estimate lim |v_n|^(1/n) from (n, magnitude) pairs.

    ``root``  uses |v_n|^(1/n) at the largest n;
    ``ratio`` averages |v_{n'}/v_n|^(1/(n'-n)) over the last three
    consecutive steps (fewer when fewer are available).
    """
    pts = sorted((int(n), v) for n, v in values)
    if len(pts) < 3:
        raise ParameterError(f"need at least 3 data points, got {len(pts)}")
    logs = []
    for n, v in pts:
        lm = _log_magnitude(v)
        if not math.isfinite(lm):
            raise ParameterError(f"magnitude at n={n} is not a positive number")
        logs.append((n, lm))
    if method == "root":
        n, lv = logs[-1]
        estimate = math.exp(lv / n)
    elif method == "ratio":
        steps = [
            (l2 - l1) / (n2 - n1)
            for (n1, l1), (n2, l2) in list(zip(logs, logs[1:]))[-3:]
        ]
        estimate = math.exp(sum(steps) / len(steps))
    else:
        raise ParameterError(f"unknown method {method!r} (want 'root' or 'ratio')")
    return RateEstimate(values=tuple(logs), estimate=estimate, method=method)


def asymptotic_check(a_grid: list[int]) -> list[tuple[int, float]]:
    """ratio(a) = delta_lb(a) * (1 + log 2) / log a over an increasing
    grid; the ratio tends to 1 from below as a grows."""
    if not a_grid or any(a < 10 for a in a_grid):
        raise ParameterError("grid entries must be >= 10")
    if any(b <= a for a, b in zip(a_grid, a_grid[1:])):
        raise ParameterError("grid must be strictly increasing")
    scale = 1 + math.log(2)
    return [(a, optimize_r(a).delta_lb * scale / math.log(a)) for a in a_grid]
