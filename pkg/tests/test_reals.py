import json
import math
from fractions import Fraction

import mpmath as mp
import pytest

import zetaforms.reals as reals
from zetaforms.errors import InconsistencyError, ParameterError, PrecisionUnreachableError
from zetaforms.partfrac import FormParams
from zetaforms.reals import (
    build_linear_form,
    eval_series,
    mc_integral,
    polylog,
    verify_exported_form,
    verify_identity_at_z,
    zeta_odd,
)


def raw_zeta_bracket(s, terms=10**6):
    """Independent oracle: raw float summation of the defining series
    with an integral bracket on the tail."""
    partial = math.fsum(k**-s for k in range(1, terms + 1))
    lo = partial + (terms + 1) ** (1 - s) / (s - 1)
    hi = partial + terms ** (1 - s) / (s - 1)
    return lo, hi


class TestZetaOdd:
    def test_zeta3_against_raw_summation(self):
        lo, hi = raw_zeta_bracket(3)
        value = float(zeta_odd(3, 256))
        assert lo - 1e-12 <= value <= hi + 1e-12

    def test_zeta5_against_raw_summation(self):
        lo, hi = raw_zeta_bracket(5)
        value = float(zeta_odd(5, 256))
        assert lo - 1e-13 <= value <= hi + 1e-13

    def test_zeta3_digits(self):
        # 64-digit check against the independently computed decimal string
        with mp.workprec(280):
            got = zeta_odd(3, 260)
            assert abs(got - mp.mpf("1.2020569031595942854")) < mp.mpf("1e-19")
            assert abs(got - mp.zeta(3)) < mp.mpf(2) ** -250

    def test_zeta5_digits(self):
        with mp.workprec(280):
            got = zeta_odd(5, 260)
            assert abs(got - mp.mpf("1.0369277551433699")) < mp.mpf("1e-16")
            assert abs(got - mp.zeta(5)) < mp.mpf(2) ** -250

    @pytest.mark.parametrize("s", [3, 5, 7, 9])
    def test_doubling_precision_is_stable(self, s):
        for bits in (64, 128, 256):
            with mp.workprec(2 * bits + 32):
                delta = abs(zeta_odd(s, bits) - zeta_odd(s, 2 * bits))
                assert delta < mp.mpf(2) ** (-bits + 2)

    def test_rejections(self):
        with pytest.raises(ParameterError):
            zeta_odd(3, 8)  # precision too small
        with pytest.raises(ParameterError):
            zeta_odd(4, 64)  # even
        with pytest.raises(ParameterError):
            zeta_odd(1, 64)  # too small


class TestPolylog:
    def test_weight_one_closed_form(self):
        # sum x^k/(k+1) = -log(1-x)/x
        with mp.workprec(200):
            got = polylog(1, Fraction(1, 2), 160)
            assert abs(got - 2 * mp.log(2)) < mp.mpf(2) ** -158

    def test_at_zero(self):
        assert polylog(5, Fraction(0), 64) == 1

    @pytest.mark.parametrize(
        "i,x",
        [(1, Fraction(1, 3)), (2, Fraction(-2, 3)), (3, Fraction(1, 2)), (4, Fraction(7, 10))],
    )
    def test_against_mpmath(self, i, x):
        # Li_i(x)/x equals this normalization for x != 0
        with mp.workprec(200):
            expected = mp.polylog(i, mp.mpf(x.numerator) / x.denominator) / (
                mp.mpf(x.numerator) / x.denominator
            )
            assert abs(polylog(i, x, 160) - expected) < mp.mpf(2) ** -155

    def test_rejects_unit_disk_boundary(self):
        with pytest.raises(ParameterError):
            polylog(2, Fraction(1), 64)
        with pytest.raises(ParameterError):
            polylog(2, Fraction(-3, 2), 64)

    def test_degenerate_series_connection(self):
        # with n = 0 the z-series is exactly the weight-a polylog of 1/z
        with mp.workprec(180):
            lhs = eval_series(FormParams(3, 1, 0), Fraction(2), 150)
            rhs = polylog(3, Fraction(1, 2), 150)
            assert abs(lhs - rhs) < mp.mpf(2) ** -145


class TestEvalSeries:
    def test_degenerate_is_zeta(self):
        with mp.workprec(300):
            got = eval_series(FormParams(3, 1, 0), Fraction(1), 256)
            assert abs(got - mp.zeta(3)) < mp.mpf(2) ** -252

    def test_positive_and_decreasing_in_n(self):
        with mp.workprec(120):
            s0 = eval_series(FormParams(3, 1, 0), Fraction(1), 96)
            s2 = eval_series(FormParams(3, 1, 2), Fraction(1), 96)
            s4 = eval_series(FormParams(3, 1, 4), Fraction(1), 96)
            assert s0 > s2 > s4 > 0

    @pytest.mark.parametrize("a,r,n", [(3, 1, 6), (5, 1, 4), (5, 2, 4)])
    def test_direct_and_accelerated_routes_agree(self, a, r, n):
        params = FormParams(a, r, n)
        bits = 180
        with mp.workprec(bits + reals.GUARD_BITS):
            fast = reals._series_at_one_accelerated(params, bits)
            slow = reals._series_at_one_direct(params, bits)
            if slow is None:
                pytest.skip("direct route out of reach at this precision")
            assert abs(fast - slow) < mp.mpf(2) ** (-bits + 2)

    def test_brute_force_partial_sums_bracket(self):
        # positive terms: partial sums increase toward the value
        params = FormParams(3, 1, 2)
        with mp.workprec(150):
            value = eval_series(params, Fraction(1), 120)
            from zetaforms.partfrac import kernel_value

            partial = mp.mpf(0)
            for k in range(2, 4000):
                t = kernel_value(params, k)
                partial += mp.mpf(t.numerator) / t.denominator
            assert partial < value
            assert value - partial < mp.mpf(4000) ** -4  # tail scale

    def test_geometric_route_against_polylog_identity(self):
        with mp.workprec(220):
            got = eval_series(FormParams(5, 2, 0), Fraction(3, 2), 180)
            want = polylog(5, Fraction(2, 3), 180)
            assert abs(got - want) < mp.mpf(2) ** -175

    def test_rejects_z_below_one(self):
        with pytest.raises(ParameterError):
            eval_series(FormParams(3, 1, 1), Fraction(1, 2), 64)

    def test_geometric_cap_raises(self, monkeypatch):
        monkeypatch.setattr(reals, "GEOMETRIC_TERM_CAP", 50)
        with pytest.raises(PrecisionUnreachableError):
            eval_series(FormParams(3, 1, 0), Fraction(1000001, 1000000), 64)


class TestBuildLinearForm:
    def test_degenerate_form_is_zeta3(self):
        form = build_linear_form(FormParams(3, 1, 0), 128)
        assert form.p0 == 0
        assert form.p == (1,)
        with mp.workprec(160):
            assert abs(form.ell - mp.zeta(3)) < mp.mpf(2) ** -126
        assert form.residual < mp.mpf(2) ** -64

    def test_small_even_index(self):
        form = build_linear_form(FormParams(3, 1, 2), 128)
        assert form.p0 == 577 and form.p == (-480,)
        assert form.residual < mp.mpf("1e-30")

    def test_two_zeta_heights(self):
        form = build_linear_form(FormParams(5, 1, 2), 128)
        assert len(form.p) == 2  # coefficients of zeta(3), zeta(5)
        assert form.residual < mp.mpf(2) ** -64
        with mp.workprec(170):
            combo = form.p0 + form.p[0] * mp.zeta(3) + form.p[1] * mp.zeta(5)
            assert abs(form.ell - combo) < mp.mpf(2) ** -120

    def test_rejects_wrong_parity(self):
        with pytest.raises(ParameterError):
            build_linear_form(FormParams(3, 1, 1), 128)  # odd n
        with pytest.raises(ParameterError):
            build_linear_form(FormParams(4, 1, 2), 128)  # even a

    def test_residual_certified_and_monotone(self):
        params = FormParams(3, 1, 2)
        r256 = build_linear_form(params, 256).residual
        r512 = build_linear_form(params, 512).residual
        assert r256 < mp.mpf(2) ** -128
        assert r512 < mp.mpf(2) ** -256
        assert r512 <= r256


class TestExportedForm:
    def test_schema(self):
        form = build_linear_form(FormParams(5, 1, 2), 128)
        obj = json.loads(form.to_json())
        assert set(obj) == {
            "a", "r", "n", "p0", "p", "ell", "residual", "precision_bits",
        }
        assert obj["p0"] == str(form.p0)
        assert obj["p"] == [str(v) for v in form.p]
        assert obj["precision_bits"] == 128

    def test_roundtrip_reverification(self):
        form = build_linear_form(FormParams(3, 1, 4), 128)
        residual, ok = verify_exported_form(form.to_json())
        assert ok
        assert residual < mp.mpf(2) ** -60

    def test_corrupted_form_fails(self):
        form = build_linear_form(FormParams(3, 1, 4), 128)
        obj = json.loads(form.to_json())
        obj["p0"] = str(int(obj["p0"]) + 1)
        residual, ok = verify_exported_form(obj)
        assert not ok
        assert residual > mp.mpf("0.5")


class TestIdentityAtZ:
    @pytest.mark.parametrize(
        "a,r,n,z",
        [
            (3, 1, 0, Fraction(2)),
            (3, 1, 1, Fraction(2)),
            (3, 1, 2, Fraction(2)),
            (5, 2, 2, Fraction(3, 2)),
        ],
    )
    def test_residual_small(self, a, r, n, z):
        bits = 128
        residual = verify_identity_at_z(FormParams(a, r, n), z, bits)
        assert residual < mp.mpf(2) ** (-bits + 8)

    def test_rejects_z_at_or_below_one(self):
        with pytest.raises(ParameterError):
            verify_identity_at_z(FormParams(3, 1, 1), Fraction(1), 64)


class TestMcIntegral:
    def test_deterministic(self):
        params = FormParams(3, 1, 2)
        first = mc_integral(params, Fraction(1), 50_000, seed=5)
        second = mc_integral(params, Fraction(1), 50_000, seed=5)
        assert first == second

    def test_matches_zeta3_for_degenerate_kernel(self):
        estimate, stderr = mc_integral(FormParams(3, 1, 0), Fraction(1), 400_000, seed=3)
        target = float(zeta_odd(3, 64))
        assert abs(estimate - target) <= 3 * stderr
        assert abs(estimate - target) / target < 0.02

    def test_matches_series_for_n2(self):
        estimate, stderr = mc_integral(FormParams(3, 1, 2), Fraction(1), 400_000, seed=3)
        target = float(eval_series(FormParams(3, 1, 2), Fraction(1), 80))
        assert abs(estimate - target) <= 3 * stderr

    def test_matches_polylog_at_z2(self):
        estimate, stderr = mc_integral(FormParams(3, 1, 0), Fraction(2), 200_000, seed=11)
        target = float(polylog(3, Fraction(1, 2), 80)) * 1.0
        assert abs(estimate - target) <= 3 * stderr

    def test_sample_floor(self):
        with pytest.raises(ParameterError):
            mc_integral(FormParams(3, 1, 0), Fraction(1), 5000, seed=0)

    def test_twenty_seed_battery(self):
        # documented statistical tolerance: >= 95% of seeds within 3 SE
        for n in (0, 2):
            params = FormParams(3, 1, n)
            target = float(eval_series(params, Fraction(1), 80))
            hits = 0
            for seed in range(20):
                estimate, stderr = mc_integral(params, Fraction(1), 100_000, seed)
                if abs(estimate - target) <= 3 * stderr:
                    hits += 1
            assert hits >= 19, (n, hits)

    def test_chunking_invisible(self):
        # totals must not depend on where the fixed-size chunks fall
        params = FormParams(3, 1, 0)
        small = mc_integral(params, Fraction(1), reals.MC_CHUNK - 7, seed=2)
        assert all(math.isfinite(v) for v in small)
        crossing = mc_integral(params, Fraction(1), reals.MC_CHUNK + 7, seed=2)
        assert all(math.isfinite(v) for v in crossing)
