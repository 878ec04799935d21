import math
from fractions import Fraction

import pytest

from multmono.engine import QC, DeterminantSequence
from multmono.kernels import (AdditiveSymbol, hilberdink_kernel, identity_kernel,
                              parse_kernel, sigma_cm_power, sigma_cm_table,
                              sigma_prime_power_rule, sigma_prime_power_table,
                              sigma_recip, KernelGrammarError)
from multmono.primes import factorize, primes_upto
from multmono.sets import parse_integer_set
from multmono.toeplitz import (KernelNotPDAtPrime, additive_toeplitz_dets,
                               build_multiplicative_matrix, check_ratio_mult_monotone,
                               cm_limit, exact_additive_minor_dets, exact_minor_dets,
                               hilberdink_product_formula,
                               hilberdink_product_formula_exact,
                               incremental_cholesky_dets, prop29_summary,
                               prop30_factorization_check, scale_kernel,
                               szego_symbol_tools)

RECIP = hilberdink_kernel(sigma_recip())
NONCM = hilberdink_kernel(sigma_prime_power_rule(
    lambda p, k: Fraction(1, 2) if k == 1 else Fraction(0), name="halfprime"))


@pytest.fixture(scope="module")
def recip64():
    return incremental_cholesky_dets(RECIP, 64, 96)


class TestMatrixBuild:
    def test_two_by_two(self):
        m = build_multiplicative_matrix(RECIP, 2, exact=True)
        assert m[0][0] == QC(1) and m[1][1] == QC(1)
        assert m[0][1] == QC(Fraction(1, 2)) == m[1][0]

    def test_diagonal_is_c1(self):
        m = build_multiplicative_matrix(NONCM, 6, exact=True)
        for i in range(6):
            assert m[i][i] == QC(1)

    def test_gcd_reduction_entry(self):
        # entry (4, 2) reduces to ratio 2/1
        m = build_multiplicative_matrix(RECIP, 4, exact=True)
        assert m[3][1] == QC(Fraction(1, 2))

    def test_hermitian_float_matrix(self):
        k = hilberdink_kernel(sigma_cm_table(
            {p: QC(Fraction(1, 5), Fraction(2, 5)) for p in (2, 3, 5, 7)}))
        m = build_multiplicative_matrix(k, 8)
        for i in range(8):
            for j in range(8):
                assert m[i, j] == m[j, i].conjugate()


class TestRatioMonotonicity:
    def test_recip_holds_with_equalities(self, recip64):
        v = check_ratio_mult_monotone(recip64)
        assert v.holds
        # closed-form oracle: r_n = prod over p | n of (1 - p^-2)
        for n in range(1, 65):
            rn = 1.0
            for p, _ in factorize(n):
                rn *= 1 - p ** -2
            assert recip64.r[n - 1] == pytest.approx(rn, rel=1e-12)
        assert recip64.r[3] == pytest.approx(recip64.r[1], rel=1e-20)

    def test_identity_trivially_holds(self):
        seq = incremental_cholesky_dets(identity_kernel(), 32, 64)
        assert check_ratio_mult_monotone(seq).holds

    def test_complex_cm_kernel_at_full_size(self):
        sig = sigma_cm_table({p: QC(Fraction(3, 10), Fraction(4, 10))
                              for p in primes_upto(256)})
        seq = incremental_cholesky_dets(hilberdink_kernel(sig), 256, 64)
        assert check_ratio_mult_monotone(seq).holds

    def test_noncm_kernel_at_full_size(self):
        seq = incremental_cholesky_dets(NONCM, 256, 64)
        assert check_ratio_mult_monotone(seq).holds

    def test_corrupted_sequence_caught(self, recip64):
        ratios = list(recip64.ratios)
        ratios[3] = ratios[1] * gmpy_mpfr("1.1")
        bad = DeterminantSequence(ratios=tuple(ratios),
                                  precision_bits=recip64.precision_bits,
                                  pivot_floor=recip64.pivot_floor)
        v = check_ratio_mult_monotone(bad)
        assert not v.holds
        assert v.violation == (2, 4)


def gmpy_mpfr(s):
    import gmpy2
    return gmpy2.mpfr(s)


class TestProp29:
    def test_identity_kernel_all_zero(self):
        seq = incremental_cholesky_dets(identity_kernel(), 100, 64)
        rep = prop29_summary(seq)
        assert rep.alpha_proxy == 0.0
        assert rep.exp_alpha_proxy == 1.0
        assert rep.root_max == pytest.approx(1.0)
        assert rep.bound_ok

    def test_recip_tracks_euler_sum(self):
        # oracle: the limit is sum over p of ln(1 - p^-2)/p; truncate at 23
        euler23 = sum(math.log(1 - p ** -2) / p for p in primes_upto(23))
        assert euler23 == pytest.approx(-0.196, abs=5e-4)
        gaps = []
        for N in (128, 256, 512):
            lnr = []
            for n in range(1, N + 1):
                v = 0.0
                for p, _ in factorize(n):
                    v += math.log(1 - p ** -2)
                lnr.append(v)
            proxy = sum(v / k for k, v in enumerate(lnr, start=1)) / math.log(N)
            gaps.append(abs(proxy - euler23))
        assert gaps[0] > gaps[1] > gaps[2]

    def test_engine_proxy_matches_closed_form(self, recip64):
        rep = prop29_summary(recip64)
        lnr = []
        for n in range(1, 65):
            v = 0.0
            for p, _ in factorize(n):
                v += math.log(1 - p ** -2)
            lnr.append(v)
        proxy = sum(v / k for k, v in enumerate(lnr, start=1)) / math.log(64)
        assert rep.alpha_proxy == pytest.approx(proxy, abs=1e-12)
        assert rep.bound_ok

    def test_bound_for_all_suite_kernels(self, recip64):
        for seq in (recip64,
                    incremental_cholesky_dets(NONCM, 32, 64),
                    incremental_cholesky_dets(identity_kernel(), 32, 64)):
            assert prop29_summary(seq).bound_ok

    def test_engine_gap_to_euler_sum_shrinks(self):
        euler23 = sum(math.log(1 - p ** -2) / p for p in primes_upto(23))
        gaps = []
        for N in (64, 128, 256):
            seq = incremental_cholesky_dets(RECIP, N, 64)
            gaps.append(abs(prop29_summary(seq).alpha_proxy - euler23))
        assert gaps[0] > gaps[1] > gaps[2], gaps

    def test_root_trace_decreases_toward_limit(self):
        # ratios are divisibility-decreasing with r_1 maximal, so D_n^(1/n)
        # (a geometric mean of the ratios) must decrease
        seq = additive_toeplitz_dets(AdditiveSymbol((Fraction(2), Fraction(1, 2))), 64, 64)
        roots = seq.root_trace()
        assert all(b <= a + 1e-12 for a, b in zip(roots, roots[1:]))


class TestProductFormula:
    def test_exact_values_recip(self):
        assert hilberdink_product_formula_exact(sigma_recip(), 1) == Fraction(1)
        assert hilberdink_product_formula_exact(sigma_recip(), 2) == Fraction(3, 4)
        assert hilberdink_product_formula_exact(sigma_recip(), 4) == Fraction(1, 2)

    def test_kms_block_oracle(self):
        # per-prime tridiagonal-free oracle: Delta_k = (1 - q^2)^(k-1), q = 1/p
        from multmono.toeplitz import exact_additive_minor_dets
        for p in (2, 3):
            sym = AdditiveSymbol(tuple(Fraction(1, p) ** m for m in range(6)))
            dets = exact_additive_minor_dets(sym, 5)
            q2 = Fraction(1, p * p)
            assert dets == [(1 - q2) ** k for k in range(5)]

    def test_matches_engine_cm(self, recip64):
        lnpf = hilberdink_product_formula(sigma_recip(), 64, 96)
        assert abs(lnpf - recip64.ln_D[-1]) < 1e-10

    def test_matches_engine_noncm(self):
        seq = incremental_cholesky_dets(NONCM, 16, 96)
        lnpf = hilberdink_product_formula(NONCM.sigma, 16, 96)
        assert abs(lnpf - seq.ln_D[-1]) < 1e-10
        # and exactly, against the independent dense oracle
        assert (hilberdink_product_formula_exact(NONCM.sigma, 16)
                == exact_minor_dets(NONCM, 16)[-1])

    def test_non_pd_reports_prime_level(self):
        bad = sigma_prime_power_rule(lambda p, k: Fraction(1), name="ones")
        with pytest.raises(KernelNotPDAtPrime) as exc:
            hilberdink_product_formula(bad, 8, 64)
        assert exc.value.p == 2 and exc.value.k >= 1

    def test_random_sigma_families_match_engine(self):
        # randomized prime-power tables; |sigma(p^k)| <= sqrt(2)/32 keeps every
        # per-prime symbol >= 1 - 12*sqrt(2)/32 > 0, hence all matrices PD
        import random
        rng = random.Random(271828)
        for trial in range(6):
            values = {}
            for p in primes_upto(48):
                for k in range(1, 7):
                    num = rng.randint(-1, 1)
                    values[(p, k)] = Fraction(num, 32) if rng.random() < 0.7 else \
                        QC(Fraction(num, 32), Fraction(rng.randint(-1, 1), 32))
            sig = sigma_prime_power_table(values, name=f"rand{trial}")
            kernel = hilberdink_kernel(sig)
            seq = incremental_cholesky_dets(kernel, 48, 96)
            lnD = seq.ln_D
            for n in (7, 20, 48):
                lnpf = hilberdink_product_formula(sig, n, 96)
                assert abs(lnpf - lnD[n - 1]) < 1e-10, (trial, n)
            # and the exact paths agree with each other
            assert (hilberdink_product_formula_exact(sig, 12)
                    == exact_minor_dets(kernel, 12)[-1])


class TestCmLimit:
    def test_zero_sigma_gives_one(self):
        sig = sigma_cm_table({p: Fraction(0) for p in primes_upto(100)})
        res = cm_limit(sig, 100, decay=(0.0, 1.0))
        assert res.interval.contains(1.0)
        assert res.interval.width() < 1e-12

    def test_recip_interval(self):
        res = cm_limit(sigma_recip(), 10**5)
        # float64 cross-check carries ~1e-13 of its own accumulation error
        target = math.exp(sum(math.log(1 - p ** -2) / p for p in primes_upto(10**5)))
        assert float(res.interval.lo) - 1e-12 <= target <= float(res.interval.hi) + 1e-12
        assert res.interval.width() < 1e-8
        assert not res.heuristic

    def test_sigma_at_least_one_rejected(self):
        sig = sigma_cm_table({p: Fraction(1) for p in primes_upto(10)})
        with pytest.raises(ValueError, match="positive-definite"):
            cm_limit(sig, 10)

    def test_constant_half_divergence_evidence(self):
        for P in (10**3, 10**4):
            sig = sigma_cm_table({p: Fraction(1, 2) for p in primes_upto(P)})
            res = cm_limit(sig, P, decay=(0.5, 0.0))
            assert res.divergent_evidence
            assert res.interval.lo == 0
        hi3 = cm_limit(sigma_cm_table({p: Fraction(1, 2) for p in primes_upto(10**3)}),
                       10**3, decay=(0.5, 0.0)).interval.hi
        hi4 = cm_limit(sigma_cm_table({p: Fraction(1, 2) for p in primes_upto(10**4)}),
                       10**4, decay=(0.5, 0.0)).interval.hi
        assert hi4 < hi3  # evidence strengthens with P

    def test_missing_envelope_flagged(self):
        sig = sigma_cm_table({p: Fraction(1, p) for p in primes_upto(100)})
        res = cm_limit(sig, 100)
        assert res.heuristic


def pow2_table(levels=7, q=Fraction(1, 2)):
    return {(2 ** m, 1): QC(q ** m) for m in range(levels)}


class TestProp30:
    def test_powers_of_two_block_structure(self):
        A = parse_integer_set("powers:2")
        B = parse_integer_set("sifted:2")
        rep = prop30_factorization_check(A, B, pow2_table(), 64, precision=96)
        assert rep.orthogonality_ok
        assert rep.worst_block_log_discrepancy < 1e-10
        assert rep.worst_ratio_log_discrepancy < 1e-10
        assert rep.blocks_checked == 32  # odd numbers up to 64

    def test_ratio_equals_block_determinant(self):
        # r_6 = r_2 = 1 - q^2 = 3/4
        from multmono.kernels import direct_factor_kernel
        k = direct_factor_kernel(parse_integer_set("powers:2"), pow2_table())
        seq = incremental_cholesky_dets(k, 8, 96)
        assert seq.r[5] == pytest.approx(0.75, abs=1e-12)
        assert seq.r[1] == pytest.approx(0.75, abs=1e-12)

    def test_singleton_support_is_diagonal(self):
        A = parse_integer_set("list:1")
        B = parse_integer_set("multiples:1")
        rep = prop30_factorization_check(A, B, {(1, 1): QC(Fraction(3, 2))}, 16, 64)
        assert rep.orthogonality_ok
        assert rep.worst_block_log_discrepancy < 1e-12
        # D_n = c(1)^n: each block contributes ln(3/2)
        k = parse_kernel_dfactor(A, {(1, 1): QC(Fraction(3, 2))})
        seq = incremental_cholesky_dets(k, 8, 64)
        for r in seq.r:
            assert r == pytest.approx(1.5)

    def test_unit_kernel_on_friable_support(self):
        A = parse_integer_set("friable:3")
        B = parse_integer_set("sifted:3")
        rep = prop30_factorization_check(A, B, {(1, 1): QC(1)}, 32, 64)
        assert rep.orthogonality_ok
        assert rep.worst_block_log_discrepancy < 1e-12

    def test_support_leakage_rejected(self):
        A = parse_integer_set("powers:2")
        B = parse_integer_set("sifted:2")
        table = pow2_table()
        table[(3, 1)] = QC(Fraction(1, 3))  # 3 is not a ratio of powers of two
        with pytest.raises(ValueError, match="support leakage"):
            prop30_factorization_check(A, B, table, 16, 64)

    def test_multiplication_closure_required(self):
        A = parse_integer_set("list:1,2")  # 2*2 = 4 missing
        B = parse_integer_set("multiples:1")
        with pytest.raises(ValueError):
            prop30_factorization_check(A, B, {(1, 1): QC(1)}, 16, 64)


def parse_kernel_dfactor(A, table):
    from multmono.kernels import direct_factor_kernel
    return direct_factor_kernel(A, table)


class TestSzego:
    def test_constant_one(self):
        res = szego_symbol_tools([1])
        assert res.geometric_mean == 1.0
        assert res.symbol.value(0) == 1 and res.symbol.value(3) == 0

    def test_shifted_cosine_closed_form(self):
        # oracle: integral of ln(a + cos 2 pi t) = ln((a + sqrt(a^2-1))/2)
        res = szego_symbol_tools([2, Fraction(1, 2)])
        target = (2 + math.sqrt(3)) / 2
        assert res.geometric_mean == pytest.approx(target, abs=1e-9)
        assert res.quad_error < 1e-6
        assert res.min_f == pytest.approx(1.0, abs=1e-6)

    def test_boundary_zero_minimum(self):
        res = szego_symbol_tools([2, 1])  # |1 + e^{2 pi i t}|^2
        assert res.geometric_mean is None
        assert res.min_f == pytest.approx(0.0, abs=1e-9)
        assert res.symbol.coeffs == (2, 1)

    def test_negative_symbol_rejected(self):
        with pytest.raises(ValueError, match="negative"):
            szego_symbol_tools([1, 2])

    def test_root_converges_to_geometric_mean(self):
        res = szego_symbol_tools([2, Fraction(1, 2)])
        seq = additive_toeplitz_dets(AdditiveSymbol((Fraction(2), Fraction(1, 2))), 128, 64)
        root = math.exp(seq.ln_D[-1] / 128)
        assert abs(root - res.geometric_mean) < 0.02


class TestScaleCovariance:
    def test_log_ratios_shift_by_constant(self):
        lam = Fraction(7, 5)
        base = incremental_cholesky_dets(RECIP, 24, 64)
        scaled = incremental_cholesky_dets(scale_kernel(RECIP, lam), 24, 64)
        shift = math.log(float(lam))
        for a, b in zip(base.ln_r, scaled.ln_r):
            assert b - a == pytest.approx(shift, abs=1e-14)
        assert check_ratio_mult_monotone(scaled).holds == \
            check_ratio_mult_monotone(base).holds

    def test_exact_determinants_scale_geometrically(self):
        lam = Fraction(3, 2)
        d1 = exact_minor_dets(RECIP, 6)
        d2 = exact_minor_dets(scale_kernel(RECIP, lam), 6)
        assert all(d2[i] == lam ** (i + 1) * d1[i] for i in range(6))


class TestKernelEvaluation:
    def test_recip_point_values(self):
        # c(3/2) = sigma(3) * conj(sigma(2)) = 1/6
        assert RECIP.exact(3, 2) == QC(Fraction(1, 6))
        assert RECIP.exact(1, 1) == QC(1)
        assert RECIP.exact(4, 2) == QC(Fraction(1, 2))

    def test_cm_extension_on_prime_powers(self):
        sig = sigma_cm_table({p: Fraction(1, 2) for p in (2, 3)})
        k = hilberdink_kernel(sig)
        assert k.exact(4, 1) == QC(Fraction(1, 4))  # sigma(4) = sigma(2)^2

    def test_shifted_cosine_ratios_nonincreasing_exactly(self):
        # exact oracle check at n <= 12 for the 2 + cos symbol
        dets = exact_additive_minor_dets(AdditiveSymbol((Fraction(2), Fraction(1, 2))), 12)
        ratios = [dets[0]] + [dets[i] / dets[i - 1] for i in range(1, 12)]
        assert all(b <= a for a, b in zip(ratios, ratios[1:]))


class TestKernelGrammar:
    def test_known_specs(self):
        assert parse_kernel("identity").family == "identity"
        assert parse_kernel("hilberdink:sigma=recip").sigma.kind == "recip"
        k = parse_kernel("hilberdink:sigma=cm,s=1.5")
        assert k.sigma.s == 1.5
        sym = parse_kernel("additive:coeffs=2,0.5")
        assert isinstance(sym, AdditiveSymbol)
        assert sym.value(1) == 0.5 and sym.value(-1) == 0.5

    def test_bad_specs_name_token(self):
        with pytest.raises(KernelGrammarError, match="nope"):
            parse_kernel("nope:")
        with pytest.raises(KernelGrammarError, match="sigma"):
            parse_kernel("hilberdink:s=1.0")
        with pytest.raises(KernelGrammarError, match="cm requires"):
            parse_kernel("hilberdink:sigma=cm")

    def test_cm_power_entries_match_closed_form(self):
        k = parse_kernel("hilberdink:sigma=cm,s=1.0")
        m = build_multiplicative_matrix(k, 6)
        for i in range(1, 7):
            for j in range(1, 7):
                g = math.gcd(i, j)
                assert m[i - 1, j - 1].real == pytest.approx(g * g / (i * j), rel=1e-12)
