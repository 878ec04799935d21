import math
import random
from fractions import Fraction

import pytest

from multmono.arith import (bougaief_derivative, bougaief_integral,
                            dirichlet_convolve, is_mult_monotone,
                            mult_increasing_envelope, set_of_multiples_indicator)
from multmono.primes import mobius, mobius_upto
from multmono.sets import IntegerSet, parse_integer_set
from multmono.tabulated import TabulatedFunction


def table(values):
    return TabulatedFunction(values)


def indicator(spec, N):
    return TabulatedFunction([int(v) for v in parse_integer_set(spec).indicator_upto(N)[1:]])


def naive_divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


class TestMobius:
    def test_point_values(self):
        assert mobius(1) == 1
        assert mobius(6) == 1
        assert mobius(12) == 0

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            mobius(0)

    def test_sieve_matches_scalar(self):
        mu = mobius_upto(300)
        for n in range(1, 301):
            assert mu[n] == mobius(n)


class TestConvolution:
    def test_divisor_count(self):
        one = table([1] * 10)
        d = dirichlet_convolve(one, one)
        assert d(6) == 4
        # oracle: direct divisor enumeration
        for n in range(1, 11):
            assert d(n) == len(naive_divisors(n))

    def test_mobius_inversion_unit(self):
        N = 50
        one = table([1] * N)
        mu = table([mobius(n) for n in range(1, N + 1)])
        eps = dirichlet_convolve(mu, one)
        assert eps(1) == 1
        assert all(eps(n) == 0 for n in range(2, N + 1))

    def test_mismatched_bounds_rejected(self):
        with pytest.raises(ValueError):
            dirichlet_convolve(table([1] * 5), table([1] * 6))

    def test_exact_mode_preserved(self):
        f = table([Fraction(1, n) for n in range(1, 8)])
        g = dirichlet_convolve(f, f)
        assert g.mode == "exact"
        assert g(4) == Fraction(1, 4) + Fraction(1, 4) + Fraction(1, 4)


class TestBougaief:
    def test_derivative_of_constant_is_unit(self):
        df = bougaief_derivative(table([1] * 30))
        assert df(1) == 1
        assert all(df(n) == 0 for n in range(2, 31))

    def test_multiples_witness_at_six(self):
        f = indicator("multiples:2,3", 10)
        assert bougaief_derivative(f)(6) == -1

    def test_identity_function_gives_totient(self):
        # oracle: Df(6) = sum_{d|6} d * mu(6/d) by direct evaluation
        expected = sum(d * mobius(6 // d) for d in naive_divisors(6))
        assert expected == 2
        f = table(list(range(1, 13)))
        assert bougaief_derivative(f)(6) == expected

    def test_integral_of_unit(self):
        eps = table([1] + [0] * 19)
        assert bougaief_integral(eps).values == tuple([1] * 20)

    def test_integral_of_one_counts_divisors(self):
        g = bougaief_integral(table([1] * 12))
        assert g(12) == 6

    def test_round_trip_random(self):
        rng = random.Random(7)
        for _ in range(20):
            f = table([rng.randint(-9, 9) for _ in range(200)])
            assert bougaief_integral(bougaief_derivative(f)) == f
            assert bougaief_derivative(bougaief_integral(f)) == f


class TestMonotonicity:
    def test_log_is_increasing(self):
        f = TabulatedFunction([math.log(n) for n in range(1, 80)], "float")
        assert is_mult_monotone(f, "increasing").holds

    def test_single_point_violation(self):
        f = table([1 if n == 2 else 0 for n in range(1, 11)])
        v = is_mult_monotone(f, "increasing")
        assert not v.holds
        assert v.violation == (2, 4)

    def test_divisor_count_increasing_exhaustive(self):
        N = 1000
        one = table([1] * N)
        d = dirichlet_convolve(one, one)
        assert is_mult_monotone(d, "increasing").holds
        # independent oracle: per-n trial-division divisor scan
        vals = d.values
        for n in range(2, N + 1, 37):
            for k in naive_divisors(n):
                assert vals[k - 1] <= vals[n - 1]

    def test_matches_naive_on_random_tables(self):
        rng = random.Random(3)
        for _ in range(30):
            N = rng.randint(2, 60)
            f = table([rng.randint(0, 4) for _ in range(N)])
            got = is_mult_monotone(f, "increasing")
            naive = None
            for n in range(2, N + 1):
                for k in naive_divisors(n)[:-1]:
                    if f(k) > f(n):
                        naive = (k, n)
                        break
                if naive:
                    break
            assert got.holds == (naive is None)
            if naive:
                assert got.violation == naive

    def test_decreasing_direction(self):
        f = table([Fraction(1, n) for n in range(1, 50)])
        assert is_mult_monotone(f, "decreasing").holds
        assert not is_mult_monotone(f, "increasing").holds

    def test_float_tolerance_absorbs_noise(self):
        vals = [1.0, 1.0, 1.0, 1.0 - 2.0 ** -40, 1.0, 1.0]  # dip below f(1), within tau at 53 bits
        f = TabulatedFunction(vals, "float", precision_bits=53)
        assert is_mult_monotone(f, "increasing").holds
        g = TabulatedFunction(vals, "float", precision_bits=96)
        assert not is_mult_monotone(g, "increasing").holds

    def test_sub_ulp_tolerance_at_high_precision(self):
        # margins between 2^-100 and 2^-60 are invisible at double precision
        # but must be resolved for 128-bit tabulations (tau = 2^-64 here)
        import gmpy2
        with gmpy2.context(precision=128):
            base = gmpy2.mpfr(1) / 3
            vals = [base, base, base, base - gmpy2.mpfr(2) ** -100,
                    base, base - gmpy2.mpfr(2) ** -60]
        f = TabulatedFunction(vals, "float", precision_bits=128)
        v = is_mult_monotone(f, "increasing")
        assert not v.holds and v.violation == (1, 6)
        assert v.worst_margin == pytest.approx(2.0 ** -60)
        g = TabulatedFunction(vals[:5], "float", precision_bits=128)
        assert is_mult_monotone(g, "increasing").holds


class TestEnvelope:
    def test_indicator_envelope_is_set_of_multiples(self):
        f = table([1 if n in (2, 3) else 0 for n in range(1, 25)])
        g = mult_increasing_envelope(f)
        assert g.values == indicator("multiples:2,3", 24).values
        assert g(6) == 1

    def test_constant_fixed_point(self):
        f = table([5] * 17)
        assert mult_increasing_envelope(f) == f

    def test_negative_identity_collapses(self):
        f = table([-n for n in range(1, 20)])
        g = mult_increasing_envelope(f)
        assert all(v == -1 for v in g.values)

    def test_envelope_properties_random(self):
        rng = random.Random(11)
        for _ in range(25):
            N = rng.randint(2, 120)
            f = table([rng.randint(-5, 5) for _ in range(N)])
            g = mult_increasing_envelope(f)
            assert is_mult_monotone(g, "increasing").holds
            assert all(gv >= fv for gv, fv in zip(g.values, f.values))
            if is_mult_monotone(f, "increasing").holds:
                assert g == f

    def test_minimality_against_dominating_increasing(self):
        rng = random.Random(13)
        for _ in range(15):
            N = rng.randint(4, 100)
            f = table([rng.randint(-4, 4) for _ in range(N)])
            g = mult_increasing_envelope(f)
            # any increasing h >= f must dominate g
            h = bougaief_integral(table([rng.randint(0, 3) for _ in range(N)]))
            shift = max(fv - hv for fv, hv in zip(f.values, h.values))
            h = table([hv + max(shift, 0) for hv in h.values])
            assert is_mult_monotone(h, "increasing").holds
            assert all(hv >= gv for hv, gv in zip(h.values, g.values))


class TestSetOfMultiples:
    def test_two_three(self):
        A = parse_integer_set("list:2,3")
        f = set_of_multiples_indicator(A, 10)
        hits = {n for n in range(1, 11) if f(n)}
        assert hits == {2, 3, 4, 6, 8, 9, 10}
        assert is_mult_monotone(f, "increasing").holds

    def test_one_gives_everything(self):
        f = set_of_multiples_indicator(parse_integer_set("list:1"), 12)
        assert all(v == 1 for v in f.values)

    def test_empty_set(self):
        empty = IntegerSet(name="empty", kind="list", params=((),),
                           member=lambda n: False)
        f = set_of_multiples_indicator(empty, 12)
        assert all(v == 0 for v in f.values)

    def test_enumeration_cap_enforced(self):
        A = IntegerSet(name="capped", kind="list", params=(((2,)),),
                       enumeration_cap=5, member=lambda n: n == 2)
        with pytest.raises(ValueError):
            set_of_multiples_indicator(A, 10)


def random_increasing(rng, N, lo=0, hi=4):
    """Divisibility-increasing table via a nonnegative derivative."""
    return bougaief_integral(table([rng.randint(lo, hi) for _ in range(N)]))


class TestClosureProperties:
    def test_monotone_postcomposition(self):
        rng = random.Random(23)
        maps = [lambda t: min(t, 7), lambda t: math.exp(t / 10.0), lambda t: 0 if t < 3 else 1]
        for _ in range(10):
            f = random_increasing(rng, 150)
            for a in maps:
                mapped = [a(v) for v in f.values]
                mode = "exact" if all(isinstance(v, int) for v in mapped) else "float"
                g = TabulatedFunction(mapped, mode)
                assert is_mult_monotone(g, "increasing").holds

    def test_cone_combinations(self):
        rng = random.Random(29)
        for _ in range(10):
            f = random_increasing(rng, 150)
            g = random_increasing(rng, 150)
            lam, mu = rng.randint(0, 5), rng.randint(0, 5)
            h = table([lam * a + mu * b for a, b in zip(f.values, g.values)])
            assert is_mult_monotone(h, "increasing").holds

    def test_pointwise_sup(self):
        rng = random.Random(31)
        for _ in range(10):
            fs = [random_increasing(rng, 120) for _ in range(4)]
            h = table([max(vals) for vals in zip(*(f.values for f in fs))])
            assert is_mult_monotone(h, "increasing").holds

    def test_convolution_with_increasing_factor(self):
        # f >= 0 arbitrary, g >= 0 increasing => f*g increasing
        rng = random.Random(37)
        for _ in range(100):
            N = rng.randint(10, 300)
            f = table([rng.randint(0, 6) for _ in range(N)])
            g = random_increasing(rng, N)
            assert is_mult_monotone(dirichlet_convolve(f, g), "increasing").holds

    def test_nonnegative_derivative_implies_increasing(self):
        rng = random.Random(41)
        for _ in range(30):
            f = random_increasing(rng, 200)
            assert all(v >= 0 for v in bougaief_derivative(f).values)
            assert is_mult_monotone(f, "increasing").holds

    def test_converse_fails_on_witness(self):
        f = indicator("multiples:2,3", 50)
        assert is_mult_monotone(f, "increasing").holds
        df = bougaief_derivative(f)
        assert df(6) == -1  # increasing, yet the derivative goes negative


class TestCsvRoundTrip:
    def test_exact_values(self, tmp_path):
        f = table([1, Fraction(3, 4), -2, Fraction(-5, 7)])
        p = tmp_path / "t.csv"
        with open(p, "w") as fh:
            f.to_csv(fh)
        with open(p) as fh:
            g = TabulatedFunction.from_csv(fh)
        assert g.values == f.values and g.mode == "exact"

    def test_float_values(self, tmp_path):
        f = TabulatedFunction([0.1, -1.5, math.pi], "float")
        p = tmp_path / "t.csv"
        with open(p, "w") as fh:
            f.to_csv(fh)
        with open(p) as fh:
            g = TabulatedFunction.from_csv(fh)
        assert g.values == f.values

    def test_header_required(self):
        with pytest.raises(ValueError):
            TabulatedFunction.from_csv(["a,b", "1,2"])
