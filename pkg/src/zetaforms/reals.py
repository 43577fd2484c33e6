"""Configurable-precision evaluation layer.

mpmath's binary floats (sign/mantissa/exponent) are the value carrier;
every public entry point takes an explicit ``precision_bits`` target and
works internally at that target plus guard bits, so the documented error
bounds refer to the requested precision, not the working one.

Three summation engines live here, each with a certified tail:

* power-sum tails  sum_{k>=N} k^-sigma  via Euler-Maclaurin, remainder
  bounded by twice the first omitted correction term;
* the series sum_k R(k) z^-k at z = 1, where polynomial decay makes
  naive truncation hopeless at high precision: the kernel's exact
  expansion in inverse powers of k (computed in the exact series ring,
  with an exact polynomial remainder) reduces the tail to finitely many
  power sums plus an explicitly bounded rest;
* the same series at z > 1, where a monotone bound on the term ratio
  certifies a geometric tail.

The linear-form assembly cross-checks all exact and floating components
against each other and records the discrepancy as a residual
certificate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np

from .errors import InconsistencyError, ParameterError, PrecisionUnreachableError
from .exact import TruncatedSeries, bernoulli, lcm_upto, pochhammer
from .partfrac import FormParams, decompose, eval_coeff_poly, eval_free_poly, integer_scaled

__all__ = [
    "IntegerLinearForm",
    "zeta_odd",
    "polylog",
    "eval_series",
    "build_linear_form",
    "verify_identity_at_z",
    "verify_exported_form",
    "mc_integral",
]

GUARD_BITS = 48
MIN_PRECISION_BITS = 16
# Euler-Maclaurin anchor: direct terms per target bit (the classical
# sweet spot N ~ 0.4 * bits keeps correction terms decaying fast).
EM_ANCHOR_FACTOR = 0.4
EM_MAX_TERMS = 4000
# Longest direct summation tolerated before switching to the
# accelerated tail at z = 1, and the hard cap for z > 1.
DIRECT_TERM_CAP = 200_000
GEOMETRIC_TERM_CAP = 5_000_000
MC_CHUNK = 1 << 17
MC_MIN_SAMPLES = 10**4


def _to_mpf(q: Fraction | int) -> mp.mpf:
    q = Fraction(q)
    return mp.mpf(q.numerator) / q.denominator


def _power_tail(sigma: int, anchor: int, target: mp.mpf) -> tuple[mp.mpf, mp.mpf]:
    """sum_{k >= anchor} k^-sigma for integer sigma >= 2, by
    Euler-Maclaurin anchored at ``anchor``.

    Returns (value, remainder_bound).  The summand's derivatives keep a
    constant sign, so the remainder after the j-th correction is bounded
    in magnitude by the first omitted term; the returned bound doubles
    it to absorb rounding.  The caller must check bound < target: when
    the corrections bottom out above target (anchor too small) the last
    computed bound is returned as is.
    """
    if sigma < 2:
        raise ParameterError(f"power tail needs sigma >= 2, got {sigma}")
    N = mp.mpf(anchor)
    val = N ** (1 - sigma) / (sigma - 1) + N ** (-sigma) / 2
    poch = Fraction(sigma)  # (sigma)_{2j-1}, built incrementally
    npow = N ** (-sigma - 1)  # anchor^(-sigma-2j+1)
    shift = mp.mpf(1) / (anchor * anchor)
    bound = mp.inf
    for j in range(1, EM_MAX_TERMS + 1):
        if j > 1:
            poch *= (sigma + 2 * j - 3) * (sigma + 2 * j - 2)
        c = bernoulli(2 * j) / math.factorial(2 * j) * poch
        val += _to_mpf(c) * npow
        nxt_poch = poch * (sigma + 2 * j - 1) * (sigma + 2 * j)
        nxt_c = bernoulli(2 * j + 2) / math.factorial(2 * j + 2) * nxt_poch
        bound = 2 * abs(_to_mpf(nxt_c)) * npow * shift
        if bound < target:
            break
        npow *= shift
    return val, bound


def zeta_odd(s: int, precision_bits: int) -> mp.mpf:
    """zeta(s) for odd integer s >= 3 with absolute error < 2^(-precision+2).

    Direct summation up to an anchor proportional to the bit target,
    then the certified Euler-Maclaurin tail; the anchor doubles until
    the remainder bound certifies.
    """
    if precision_bits < MIN_PRECISION_BITS:
        raise ParameterError(f"precision below {MIN_PRECISION_BITS} bits rejected")
    if s < 3 or s % 2 == 0:
        raise ParameterError(f"need odd s >= 3, got {s}")
    W = precision_bits + GUARD_BITS
    with mp.workprec(W):
        target = mp.mpf(2) ** (-(precision_bits + 2))
        anchor = max(16, int(EM_ANCHOR_FACTOR * precision_bits))
        for _ in range(8):
            tail, bound = _power_tail(s, anchor, target)
            if bound < target:
                total = mp.mpf(0)
                for k in range(1, anchor):
                    total += mp.mpf(1) / mp.mpf(k**s)
                return total + tail
            anchor *= 2
    raise PrecisionUnreachableError(
        f"zeta({s}) tail would not certify at {precision_bits} bits"
    )


def polylog(i: int, x: Fraction, precision_bits: int) -> mp.mpf:
    """sum_{k>=0} x^k / (k+1)^i for |x| < 1 strictly, with absolute
    error < 2^(-precision+2) from the geometric tail bound."""
    if precision_bits < MIN_PRECISION_BITS:
        raise ParameterError(f"precision below {MIN_PRECISION_BITS} bits rejected")
    if i < 1:
        raise ParameterError(f"need weight i >= 1, got {i}")
    x = Fraction(x)
    if abs(x) >= 1:
        raise ParameterError(f"polylog needs |x| < 1, got {x}")
    if x == 0:
        return mp.mpf(1)
    W = precision_bits + GUARD_BITS
    with mp.workprec(W):
        target = mp.mpf(2) ** (-(precision_bits + 2))
        xf = _to_mpf(x)
        ax = abs(xf)
        geom = 1 / (1 - ax)
        total = mp.mpf(0)
        xk = mp.mpf(1)
        k = 0
        while True:
            total += xk / mp.mpf((k + 1) ** i)
            xk *= xf
            k += 1
            if abs(xk) * geom < target:
                return total
            if k > GEOMETRIC_TERM_CAP:
                raise PrecisionUnreachableError(
                    f"polylog({i}, {x}) needs more than {GEOMETRIC_TERM_CAP} terms"
                )


def _first_term(params: FormParams) -> Fraction:
    """Exact kernel value at the first nonvanishing index k = rn."""
    a, r, n = params.a, params.r, params.n
    rn = r * n
    num = (
        Fraction(math.factorial(n) ** (a - 2 * r))
        * pochhammer(1, rn)
        * pochhammer(rn + n + 2, rn)
    )
    den = pochhammer(rn + 1, n + 1) ** a
    return num / den


def _monomial_tail_bound(params: FormParams, K: int) -> mp.mpf:
    """Certified bound on sum_{k>K} R(k) from the leading monomial:
    for k > K every numerator factor is <= k resp. <= k*(1+(n+rn+1)/K),
    and the denominator is >= k^(a(n+1)), so R(k) <= C * k^-s with
    s the decay exponent; the power sum is bounded by integral
    comparison.  Requires K >= rn + n + 2."""
    a, r, n = params.a, params.r, params.n
    rn = r * n
    s = params.decay_exponent
    C = _to_mpf(
        Fraction(math.factorial(n) ** (a - 2 * r))
        * (1 + Fraction(n + rn + 1, K)) ** rn
    )
    Kf = mp.mpf(K + 1)
    return C * (Kf**-s + Kf ** (1 - s) / (s - 1))


def _direct_sum(params: FormParams, zn: int, zd: int, K: int) -> mp.mpf:
    """sum_{k=rn..K} R(k) (zd/zn)^k by the exact-integer term-ratio
    recurrence; one floating division per step at working precision."""
    rn = params.r * params.n
    a, n = params.a, params.n
    t0 = _first_term(params)
    term = _to_mpf(t0)
    if zn != zd and rn:
        term *= mp.mpf(zd**rn) / mp.mpf(zn**rn)
    total = term
    for k in range(rn, K):
        num = (k + 1) ** (a + 1) * (k + rn + n + 2) * zd
        den = (k - rn + 1) * (k + n + 2) ** (a + 1) * zn
        term = term * mp.mpf(num) / mp.mpf(den)
        total += term
    return total


def _series_at_one_direct(params: FormParams, precision_bits: int) -> mp.mpf | None:
    """Direct route at z = 1: usable when the monomial tail bound
    certifies within DIRECT_TERM_CAP terms; returns None otherwise."""
    rn = params.r * params.n
    target = mp.mpf(2) ** (-(precision_bits + 1))
    K = max(rn + params.n + 2, 16)
    while _monomial_tail_bound(params, K) >= target:
        K *= 2
        if K > DIRECT_TERM_CAP:
            return None
    return _direct_sum(params, 1, 1, K)


def _expansion_at_infinity(
    params: FormParams, M: int
) -> tuple[list[Fraction], list[Fraction]]:
    """Exact inverse-power expansion of the kernel at infinity.

    With u = 1/k the kernel is n!^(a-2r) * k^-s * A(u)/B(u), where
    A(u) = prod (1 + c u) over the 2rn numerator offsets c and
    B(u) = prod_{i=1..n+1} (1 + i u)^a; both have constant term 1.
    Returns (g, rem): the first M Taylor coefficients of A/B and the
    exact remainder polynomial rem with

        A(u)/B(u) = sum_{m<M} g[m] u^m + u^M * rem(u)/B(u),

    so the expansion error is controlled by rem's coefficients alone
    (B >= 1 on [0, 1/k] because all its roots are negative).
    """
    a, r, n = params.a, params.r, params.n
    rn = r * n

    def reversed_factor(c: int) -> TruncatedSeries:
        # the factor (1 + c u) as an order-M series
        coeffs = [Fraction(1)] + [Fraction(0)] * (M - 1)
        if M >= 2:
            coeffs[1] = Fraction(c)
        return TruncatedSeries(coeffs)

    A = TruncatedSeries.constant(1, M)
    for q in range(rn):
        A = A * reversed_factor(q - rn + 1)
    for q in range(rn):
        A = A * reversed_factor(n + 2 + q)
    B = TruncatedSeries.constant(1, M)
    for i in range(1, n + 2):
        B = B * reversed_factor(i) ** a
    g = list((A * B.inverse()).coeffs)

    # exact remainder polynomial: rem = (A_full - P_M * B_full) / u^M
    def poly_mul(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
        out = [Fraction(0)] * (len(p) + len(q) - 1)
        for ii, xx in enumerate(p):
            if xx:
                for jj, yy in enumerate(q):
                    if yy:
                        out[ii + jj] += xx * yy
        return out

    A_full = [Fraction(1)]
    for q in range(rn):
        A_full = poly_mul(A_full, [Fraction(1), Fraction(q - rn + 1)])
    for q in range(rn):
        A_full = poly_mul(A_full, [Fraction(1), Fraction(n + 2 + q)])
    B_full = [Fraction(1)]
    for i in range(1, n + 2):
        lin = [Fraction(1), Fraction(i)]
        for _ in range(a):
            B_full = poly_mul(B_full, lin)
    PB = poly_mul(g, B_full)
    diff = [Fraction(0)] * max(len(A_full), len(PB))
    for ii, xx in enumerate(A_full):
        diff[ii] += xx
    for ii, xx in enumerate(PB):
        diff[ii] -= xx
    if any(diff[m] for m in range(min(M, len(diff)))):
        raise InconsistencyError("inverse-power expansion lost exactness")
    return g, diff[M:]


def _series_at_one_accelerated(params: FormParams, precision_bits: int) -> mp.mpf:
    """z = 1 evaluation: direct sum to an anchor K, then the exact
    inverse-power tail.  Total certified error below 2^-precision_bits:
    the power-sum remainders and the expansion remainder are each kept
    under a quarter of the budget."""
    a, r, n = params.a, params.r, params.n
    rn = r * n
    s = params.decay_exponent
    K = max(rn + n + 2, int(EM_ANCHOR_FACTOR * precision_bits) + 8, 8 * (n + 1))
    target = mp.mpf(2) ** (-(precision_bits + 2))
    pref = mp.mpf(math.factorial(n) ** (a - 2 * r))

    M = int((precision_bits + 40) / max(1.0, math.log2((K + 1) / (n + 1)))) + 12
    for _ in range(5):
        g, rem = _expansion_at_infinity(params, M)
        rem_bound = mp.mpf(0)
        Kf = mp.mpf(K + 1)
        for ell, cl in enumerate(rem):
            if cl:
                rem_bound += abs(_to_mpf(cl)) * Kf ** (-ell)
        sM = s + M
        rem_bound *= pref * (Kf**-sM + Kf ** (1 - sM) / (sM - 1))
        if rem_bound < target / 2:
            break
        M += M // 2 + 8
    else:
        raise PrecisionUnreachableError(
            f"inverse-power expansion would not certify for {params}"
        )

    direct = _direct_sum(params, 1, 1, K)
    tail = mp.mpf(0)
    per_term = target / (4 * M)
    for m, gm in enumerate(g):
        if not gm:
            continue
        gmf = _to_mpf(gm)
        val, bound = _power_tail(s + m, K + 1, per_term / (abs(gmf) + 1))
        if bound * (abs(gmf) + 1) >= per_term * 4:
            raise PrecisionUnreachableError(
                f"power-sum tail at sigma={s + m} would not certify"
            )
        tail += gmf * val
    return direct + pref * tail


def _series_geometric(params: FormParams, z: Fraction, precision_bits: int) -> mp.mpf:
    """z > 1 evaluation with a certified geometric tail.

    The term ratio R(k+1)/R(k) is bounded above by the decreasing
    function (k+1)(k+rn+n+2) / ((k-rn+1)(k+n+2)); once that bound times
    1/z drops below 1 the remaining tail is a geometric series."""
    a, r, n = params.a, params.r, params.n
    rn = r * n
    zn, zd = z.numerator, z.denominator
    target = mp.mpf(2) ** (-(precision_bits + 1))
    t0 = _first_term(params)
    term = _to_mpf(t0)
    if rn:
        term *= mp.mpf(zd**rn) / mp.mpf(zn**rn)
    total = term
    k = rn
    while True:
        ratio_cap = mp.mpf((k + 1) * (k + rn + n + 2)) / mp.mpf(
            (k - rn + 1) * (k + n + 2)
        )
        q = ratio_cap * zd / zn
        if q < 1 and abs(term) * q / (1 - q) < target:
            return total
        num = (k + 1) ** (a + 1) * (k + rn + n + 2) * zd
        den = (k - rn + 1) * (k + n + 2) ** (a + 1) * zn
        term = term * mp.mpf(num) / mp.mpf(den)
        total += term
        k += 1
        if k - rn > GEOMETRIC_TERM_CAP:
            raise PrecisionUnreachableError(
                f"series at z={z} needs more than {GEOMETRIC_TERM_CAP} terms"
            )


def eval_series(params: FormParams, z: Fraction, precision_bits: int) -> mp.mpf:
    """sum_{k>=0} R(k) z^-k for rational z >= 1, absolute error below
    2^-precision_bits.

    At z = 1 the cheap monomial-bounded truncation is used whenever it
    certifies within the direct-term cap; otherwise the accelerated
    inverse-power tail takes over.  For z > 1 the tail is geometric.
    """
    if precision_bits < MIN_PRECISION_BITS:
        raise ParameterError(f"precision below {MIN_PRECISION_BITS} bits rejected")
    z = Fraction(z)
    if z < 1:
        raise ParameterError(f"series evaluation needs z >= 1, got {z}")
    if params.decay_exponent < 2:
        raise ParameterError(
            f"convergence at |z| = 1 needs a(n+1) - 2rn >= 2, got {params.decay_exponent}"
        )
    W = precision_bits + GUARD_BITS
    with mp.workprec(W):
        if z == 1:
            value = _series_at_one_direct(params, precision_bits)
            if value is None:
                value = _series_at_one_accelerated(params, precision_bits)
            return value
        return _series_geometric(params, z, precision_bits)


@dataclass(frozen=True)
class IntegerLinearForm:
    """Integer combination p0 + sum_m p[m-1] * zeta(2m+1) together with
    the independently summed series value ell and the certified
    discrepancy between the two."""

    params: FormParams
    p0: int
    p: tuple[int, ...]
    ell: mp.mpf
    residual: mp.mpf
    precision_bits: int

    def to_json(self) -> str:
        """Schema: {"a","r","n","p0","p","ell","residual","precision_bits"}
        with all big integers as decimal strings."""
        dps = int(self.precision_bits * 0.30103) + 10
        obj = {
            "a": self.params.a,
            "r": self.params.r,
            "n": self.params.n,
            "p0": str(self.p0),
            "p": [str(v) for v in self.p],
            "ell": mp.nstr(self.ell, dps),
            "residual": mp.nstr(self.residual, 8),
            "precision_bits": self.precision_bits,
        }
        return json.dumps(obj)


def build_linear_form(params: FormParams, precision_bits: int) -> IntegerLinearForm:
    """Assemble the integer linear form at z = 1 for n even, a odd >= 3.

    The integers come from the exact table scaled by d^a (d = lcm(1..n));
    ell = d^a * (series at z = 1) is evaluated at a working precision
    widened by the bit size of the integers involved, so the residual
    |ell - p0 - sum p_m zeta(2m+1)| measures genuine inconsistency, not
    rounding.  A residual at or above 2^(-precision/2) after one
    automatic doubling of the working precision is reported as a bug.
    """
    if precision_bits < MIN_PRECISION_BITS:
        raise ParameterError(f"precision below {MIN_PRECISION_BITS} bits rejected")
    if not params.odd_route:
        raise ParameterError(
            f"linear form at z = 1 needs n even and a odd, got a={params.a}, n={params.n}"
        )
    table = decompose(params)
    scaled = integer_scaled(table)  # [d^a P0(1)] + [d^(a-i) Pi(1), i=1..a]
    d = lcm_upto(params.n)
    if scaled[1] != 0:
        raise InconsistencyError("weight-1 polynomial did not vanish at 1")
    for i in range(2, params.a + 1, 2):
        if scaled[i] != 0:
            raise InconsistencyError(f"even weight-{i} polynomial did not vanish at 1")
    p0 = scaled[0]
    p = tuple(scaled[i] * d**i for i in range(3, params.a + 1, 2))
    da = d**params.a
    magnitude = abs(p0) + 2 * sum(abs(v) for v in p) + da
    threshold = mp.mpf(2) ** (-(precision_bits // 2))

    W = precision_bits + magnitude.bit_length() + 2 * GUARD_BITS
    for attempt in range(2):
        series = eval_series(params, Fraction(1), W)
        with mp.workprec(W):
            ell = da * series
            combo = mp.mpf(p0)
            for m, pm in enumerate(p, start=1):
                combo += pm * zeta_odd(2 * m + 1, W)
            residual = abs(ell - combo)
        if residual < threshold:
            return IntegerLinearForm(params, p0, p, ell, residual, precision_bits)
        W *= 2
    raise InconsistencyError(
        f"residual {mp.nstr(residual, 6)} not below 2^-{precision_bits // 2} "
        f"for (a={params.a}, r={params.r}, n={params.n})"
    )


def verify_exported_form(text: str | dict) -> tuple[mp.mpf, bool]:
    """Re-verify an exported linear form from its JSON: recompute the
    zeta combination from the parsed integers, compare against the
    parsed ell, and apply the form's own acceptance threshold."""
    obj = json.loads(text) if isinstance(text, str) else text
    precision = int(obj["precision_bits"])
    p0 = int(obj["p0"])
    p = [int(v) for v in obj["p"]]
    W = precision + max(v.bit_length() for v in [abs(p0) + 1] + [abs(x) for x in p]) + GUARD_BITS
    with mp.workprec(W):
        ell = mp.mpf(obj["ell"])
        combo = mp.mpf(p0)
        for m, pm in enumerate(p, start=1):
            combo += pm * zeta_odd(2 * m + 1, W)
        residual = abs(ell - combo)
        # string serialization of ell rounds at ~precision bits; allow for it
        slack = mp.mpf(2) ** (-(precision // 2))
        return residual, bool(residual < 2 * slack)


def verify_identity_at_z(params: FormParams, z: Fraction, precision_bits: int) -> mp.mpf:
    """Residual of the full decomposition identity at rational z > 1:

        series(z)  vs  free_poly(z) + sum_i coeff_poly_i(z) * polylog(i, 1/z)

    All polynomial values are exact; the working precision is widened by
    their magnitude so the returned residual reflects only certified
    tails and rounding (callers compare against 2^(-precision+8)).
    """
    z = Fraction(z)
    if z <= 1:
        raise ParameterError(f"identity check needs z > 1, got {z}")
    table = decompose(params)
    free = eval_free_poly(table, z)
    coeffs = [eval_coeff_poly(table, i, z) for i in range(1, params.a + 1)]
    mag_bits = 1
    for v in coeffs + [free]:
        if v:
            mag_bits = max(
                mag_bits, v.numerator.bit_length() - v.denominator.bit_length() + 1
            )
    W = precision_bits + mag_bits + GUARD_BITS
    lhs = eval_series(params, z, W)
    with mp.workprec(W):
        rhs = _to_mpf(free)
        for i, ci in enumerate(coeffs, start=1):
            if ci:
                rhs += _to_mpf(ci) * polylog(i, 1 / z, W)
        return abs(lhs - rhs)


def mc_integral(
    params: FormParams, z: Fraction, samples: int, seed: int
) -> tuple[float, float]:
    """Monte-Carlo estimate of the (a+1)-dimensional integral
    representation of the series:

        ((2r+1)n+1)!/n!^(2r+1) * z^((r+1)n+2)
          * int_{[0,1]^(a+1)} (prod x_i^r (1-x_i) / (z - prod x_i)^(2r+1))^n
            dx / (z - prod x_i)^2

    Returns (estimate, standard_error) from plain sample mean/variance.
    Sampling is chunked with one counter-based stream per fixed-size
    chunk (Philox, keyed by the seed and jumped per chunk), so results
    are deterministic and independent of any worker layout.
    """
    z = Fraction(z)
    if z < 1:
        raise ParameterError(f"integral representation needs z >= 1, got {z}")
    if samples < MC_MIN_SAMPLES:
        raise ParameterError(f"need at least {MC_MIN_SAMPLES} samples, got {samples}")
    a, r, n = params.a, params.r, params.n
    dim = a + 1
    zf = float(z)
    log_pref = (
        math.lgamma((2 * r + 1) * n + 2)
        - (2 * r + 1) * math.lgamma(n + 1)
        + ((r + 1) * n + 2) * math.log(zf)
    )
    power = (2 * r + 1) * n + 2
    total = 0.0
    total_sq = 0.0
    done = 0
    chunk_index = 0
    while done < samples:
        m = min(MC_CHUNK, samples - done)
        gen = np.random.Generator(np.random.Philox(key=seed).jumped(chunk_index))
        x = gen.random((m, dim))
        u = np.prod(x, axis=1)
        if n > 0:
            log_w = (
                n * (r * np.log(x).sum(axis=1) + np.log1p(-x).sum(axis=1))
                - power * np.log(zf - u)
                + log_pref
            )
        else:
            log_w = -2.0 * np.log(zf - u) + log_pref
        w = np.exp(log_w)
        total += float(w.sum())
        total_sq += float((w * w).sum())
        done += m
        chunk_index += 1
    mean = total / samples
    variance = max(0.0, (total_sq - samples * mean * mean) / (samples - 1))
    return mean, math.sqrt(variance / samples)
