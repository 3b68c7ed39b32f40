import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zetamom import prime_tools as pt
from zetamom.errors import (
    DegenerateSchedule,
    DenominatorVanishes,
    FactorizationIncomplete,
    LimitTooLarge,
    RangeBeyondTable,
)

SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
                53, 59, 61, 67, 71, 73, 79, 83, 89, 97]


class TestSieve:
    def test_prime_counts(self, table_small, table_mid):
        assert table_small.count() == 1229
        assert table_mid.count() == 9592

    def test_first_and_last(self, table_small):
        assert int(table_small.primes[0]) == 2
        assert int(table_small.primes[-1]) == 9973

    def test_small_list(self):
        t = pt.sieve(100)
        assert t.primes.tolist() == SMALL_PRIMES

    def test_segmented_agrees_with_simple(self):
        # limit above the segment size exercises the segmented path
        seg = pt.sieve(5_000_000)
        assert seg.count() == 348513
        simple = pt.sieve(100_000)
        assert np.array_equal(seg.primes[: simple.count()], simple.primes)

    def test_limit_validation(self):
        with pytest.raises(LimitTooLarge):
            pt.sieve(10**10)
        with pytest.raises(ValueError):
            pt.sieve(1)

    def test_cache_roundtrip(self, table_small, tmp_path):
        path = str(tmp_path / "primes.bin")
        pt.save_table(table_small, path)
        back = pt.load_table(path)
        assert back.limit == table_small.limit
        assert np.array_equal(back.primes, table_small.primes)

    def test_cache_rejects_garbage(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"not a prime table")
        with pytest.raises(ValueError):
            pt.load_table(str(path))


class TestSchedules:
    def test_upper_bound_shape(self):
        sch = pt.block_schedule(1e5, 1.0, "UpperBound")
        assert sch.ell >= 1
        assert all(b < c for b, c in zip(sch.boundaries, sch.boundaries[1:]))
        assert all(p > 0 for p in sch.P)
        for k, p in zip(sch.K, sch.P):
            assert abs(k - 250.0 * p) < 1e-12

    def test_subunit_variant(self):
        sch = pt.block_schedule(1e6, 4.0, "LowerSubunit")
        assert sch.ell >= 1
        for k, p in zip(sch.K, sch.P):
            assert abs(k - 250.0 * p) < 1e-12

    def test_superunit_collapses_at_desk_scale(self):
        # the superunit boundary formula divides log T by beta^2 (log T)^2 at
        # j = 1, which stays below T_0 for any sievable T
        with pytest.raises(DegenerateSchedule):
            pt.block_schedule(1e6, 1.5, "LowerSuperunit")

    def test_block_accessor(self):
        sch = pt.block_schedule(1e5, 1.0, "UpperBound")
        lo, hi = sch.block(1)
        assert (lo, hi) == (sch.boundaries[0], sch.boundaries[1])

    def test_degenerate_at_tiny_T(self):
        with pytest.raises(DegenerateSchedule):
            pt.block_schedule(100.0, 1.0, "UpperBound")

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            pt.block_schedule(1e5, 1.0, "Sideways")

    def test_custom_boundaries(self, table_mid):
        sch = pt.schedule_from_boundaries([5.0, 50.0, 500.0], T=1e5, beta=0.5,
                                          table=table_mid)
        assert sch.ell == 2
        # block variances add up over a split range
        whole = pt.block_variance(table_mid, 5.0, 500.0)
        assert abs(sum(sch.P) - whole) < 1e-14

    def test_custom_rejects_primeless_block(self, table_mid):
        with pytest.raises(DegenerateSchedule):
            pt.schedule_from_boundaries([24.0, 28.0], T=1e5, beta=0.5,
                                        table=table_mid)
        with pytest.raises(ValueError):
            pt.schedule_from_boundaries([50.0, 5.0], T=1e5, beta=0.5,
                                        table=table_mid)


class TestPrimeSums:
    def test_block_variance_exact(self, table_small):
        # lo is exclusive: starting at 2 drops the prime 2 itself
        ref = math.fsum(1.0 / p for p in SMALL_PRIMES[1:])
        assert pt.block_variance(table_small, 2.0, 100.0) == ref

    def test_block_variance_range_check(self, table_small):
        with pytest.raises(RangeBeyondTable):
            pt.block_variance(table_small, 2.0, 1e9)

    def test_prime_cos_sum_h_zero(self, table_small):
        ref = math.fsum(1.0 / p for p in SMALL_PRIMES)
        assert abs(pt.prime_cos_sum(0.0, 100.0, table_small) - ref) < 1e-15

    def test_prime_cos_sum_direct(self, table_small):
        h = 1.7
        ref = math.fsum(math.cos(h * math.log(p)) / p for p in SMALL_PRIMES)
        assert abs(pt.prime_cos_sum(h, 100.0, table_small) - ref) < 1e-14

    def test_prime_cos_sum_even_in_h(self, table_small):
        a = pt.prime_cos_sum(3.25, 5000.0, table_small)
        b = pt.prime_cos_sum(-3.25, 5000.0, table_small)
        assert a == b


class TestMultiplicative:
    def test_factorize(self, table_small):
        assert pt.factorize(360, table_small) == [(2, 3), (3, 2), (5, 1)]
        assert pt.factorize(1, table_small) == []
        assert pt.factorize(9973, table_small) == [(9973, 1)]

    def test_factorize_incomplete(self):
        t = pt.sieve(100)
        with pytest.raises(FactorizationIncomplete):
            pt.factorize(10007 * 10009, t)

    def test_omega_and_g(self, table_small):
        assert pt.omega_big(360, table_small) == 6
        assert pt.g_mult(12, table_small) == Fraction(1, 2)
        assert pt.g_mult(8, table_small) == Fraction(1, 6)
        assert pt.g_mult(1, table_small) == 1

    def test_divisor_functions(self, table_small):
        assert pt.divisor_d(12, table_small) == 6
        assert pt.divisor_d3(12, table_small) == 18
        assert pt.divisor_d3(1, table_small) == 1

    def test_sigma_shifted_brute_force(self, table_small):
        z1, z2 = 0.3 + 0.5j, -0.1 - 0.2j
        for n in (12, 60, 97, 128):
            ref = sum(a ** -z1 * (n // a) ** -z2
                      for a in range(1, n + 1) if n % a == 0)
            val = pt.sigma_shifted(z1, z2, n, table_small)
            assert abs(val - ref) < 1e-12 * abs(ref)

    def test_sigma_shifted_equal_shifts(self, table_small):
        # near-degenerate shifts take the direct-sum branch
        z = 0.2 + 1.0j
        val = pt.sigma_shifted(z, z + 1e-12, 8, table_small)
        ref = sum((2**a) ** -z * (2 ** (3 - a)) ** -(z + 1e-12) for a in range(4))
        assert abs(val - ref) < 1e-10 * abs(ref)


class TestBCoefficient:
    def test_closed_form_vs_series(self, table_small):
        rng = np.random.default_rng(3)
        for _ in range(30):
            z = tuple(rng.uniform(-0.2, 0.2) + 1j * rng.uniform(-2.0, 2.0)
                      for _ in range(4))
            p = int(rng.choice([2, 3, 5, 7, 11]))
            m = int(rng.integers(1, 4))
            closed = pt.b_coeff(z, p**m, table_small)
            series = pt.b_coeff_series(z, p, m)
            assert abs(closed - series) <= 1e-9 * max(abs(series), 1e-30)

    def test_multiplicative_over_coprime(self, table_small):
        z = (0.1 + 0.3j, -0.05j, 0.02 - 0.1j, 0.0)
        v = pt.b_coeff(z, 12, table_small)
        ref = pt.b_coeff(z, 4, table_small) * pt.b_coeff(z, 3, table_small)
        assert abs(v - ref) < 1e-13 * abs(ref)

    def test_denominator_vanishes(self, table_small):
        z = (-0.5, -0.5, -0.5, -0.5)
        with pytest.raises(DenominatorVanishes):
            pt.b_coeff(z, 2, table_small)

    def test_continuity_gap(self):
        z = (0.1, 0.2j, -0.1j, 0.05)
        w = tuple(c + 1e-9 for c in z)
        assert pt.b_continuity_gap(7, z, w) < 1e-7


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=2, max_value=9999))
def test_factorize_reconstructs(n):
    table = pt.sieve(10_000)
    prod = 1
    for p, e in pt.factorize(n, table):
        prod *= p**e
    assert prod == n
