import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apmod.arith import (
    FactoredInt,
    ModFraction,
    P_MINUS_ONE_SENTINEL,
    ResidueClass,
    bezout_split,
    check_coprime_partition,
    coprime_partition,
    euler_phi,
    factorize,
    mobius,
    mod_inv,
    mult_eval,
    p_minus,
    p_plus,
    random_coprime_pairs,
    smooth_part,
    squarefull_part,
    tau_k,
)
from apmod.primes import least_prime_factor_table
from apmod.rng import SplitMix64


class TestFactorize:
    def test_unit(self):
        assert factorize(1).factors == ()

    def test_twelve(self):
        assert factorize(12).factors == ((2, 2), (3, 1))

    def test_prime(self):
        assert factorize(9973).factors == ((9973, 1),)

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            factorize(0)

    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            FactoredInt(12, ((3, 1), (2, 2)))
        with pytest.raises(ValueError):
            FactoredInt(12, ((2, 1), (3, 1)))

    def test_large_semiprime(self):
        n = 1000003 * 1000033
        f = factorize(n)
        assert f.factors == ((1000003, 1), (1000033, 1))

    @given(st.integers(min_value=1, max_value=10**12))
    @settings(max_examples=200, deadline=None)
    def test_product_reconstructs(self, n):
        f = factorize(n)
        prod = 1
        for p, e in f.factors:
            prod *= p**e
        assert prod == n


class TestModInv:
    def test_identity(self):
        for q in (2, 5, 97):
            assert mod_inv(1, q) == 1

    def test_examples(self):
        assert mod_inv(3, 5) == 2
        assert mod_inv(2, 9) == 5

    def test_q_one(self):
        assert mod_inv(7, 1) == 0

    def test_non_invertible(self):
        with pytest.raises(ValueError):
            mod_inv(6, 9)

    def test_involution_exhaustive(self):
        # inv(inv(a)) = a for every unit a mod q, all q <= 1000
        for q in range(2, 1001):
            for a in range(1, q):
                if math.gcd(a, q) == 1:
                    assert mod_inv(mod_inv(a, q), q) == a


class TestBezout:
    def test_degenerate_modulus(self):
        f1, f2 = bezout_split(3, 1, 7)
        assert (f1.as_fraction() + f2.as_fraction() - Fraction(3, 7)) % 1 == 0

    def test_examples(self):
        f1, f2 = bezout_split(1, 3, 5)
        assert (str(f1), str(f2)) == ("2/5", "2/3")
        f1, f2 = bezout_split(2, 3, 5)
        assert (f1.as_fraction() + f2.as_fraction() - Fraction(2, 15)) % 1 == 0

    def test_non_coprime_rejected(self):
        with pytest.raises(ValueError):
            bezout_split(1, 6, 9)

    def test_exhaustive_small(self):
        # exact mod-1 identity in integer arithmetic for all coprime
        # q1, q2 <= 50 and every residue a
        for q1 in range(1, 51):
            for q2 in range(1, 51):
                if math.gcd(q1, q2) != 1:
                    continue
                q = q1 * q2
                for a in range(q):
                    f1, f2 = bezout_split(a, q1, q2)
                    num = f1.numerator * (q // f1.denominator) + f2.numerator * (
                        q // f2.denominator
                    )
                    assert (num - a) % q == 0


class TestMultEval:
    def test_phi(self):
        assert euler_phi(12) == 4
        assert mult_eval("phi", 12) == 4

    def test_tau3_prime_square(self):
        for p in (2, 3, 5):
            assert tau_k(p * p, 3) == 6

    def test_squarefull_smooth(self):
        assert squarefull_part(12) == 4
        assert smooth_part(12, 2) == 4

    def test_p_minus_plus(self):
        assert p_minus(1) == P_MINUS_ONE_SENTINEL
        assert p_plus(1) == 1
        assert p_minus(15) == 3
        assert p_plus(15) == 5

    def test_aux_validation(self):
        with pytest.raises(ValueError):
            mult_eval("tau_k", 12)
        with pytest.raises(ValueError):
            mult_eval("phi", 12, aux=3)
        with pytest.raises(ValueError):
            mult_eval("nope", 12)

    def test_phi_multiplicative_sampled(self):
        rng = SplitMix64(5)
        done = 0
        while done < 10**4:
            m = rng.in_range(1, 3000)
            n = rng.in_range(1, 3000)
            if math.gcd(m, n) != 1:
                continue
            assert euler_phi(m * n) == euler_phi(m) * euler_phi(n)
            done += 1

    def test_squarefull_cofactor_exhaustive(self):
        lpf = least_prime_factor_table(10**5)
        for n in range(1, 10**5 + 1):
            sq = squarefull_part(_factor_via_lpf(n, lpf))
            cof = n // sq
            assert sq * cof == n
            assert mobius(_factor_via_lpf(cof, lpf)) != 0  # cofactor squarefree

    @pytest.mark.parametrize("z", [2, 10, 100])
    def test_smooth_rough_split_exhaustive(self, z):
        lpf = least_prime_factor_table(10**5)
        for n in range(1, 10**5 + 1):
            f = _factor_via_lpf(n, lpf)
            sm = smooth_part(f, z)
            cof = n // sm
            assert sm * cof == n
            assert p_plus(_factor_via_lpf(sm, lpf)) <= z or sm == 1
            assert cof == 1 or p_minus(_factor_via_lpf(cof, lpf)) > z


def _factor_via_lpf(n, lpf):
    fac = {}
    m = n
    while m > 1:
        p = int(lpf[m])
        fac[p] = fac.get(p, 0) + 1
        m //= p
    return FactoredInt(n, tuple(sorted(fac.items())))


class TestModFraction:
    def test_reduction_and_mod1(self):
        f = ModFraction(16, 15)
        assert (f.numerator, f.denominator) == (1, 15)

    def test_add(self):
        s = ModFraction(2, 5) + ModFraction(2, 3)
        assert (s.numerator, s.denominator) == (1, 15)

    @given(
        st.integers(min_value=-10**6, max_value=10**6),
        st.integers(min_value=1, max_value=300),
        st.integers(min_value=1, max_value=300),
    )
    @settings(max_examples=300, deadline=None)
    def test_bezout_identity_property(self, a, q1, q2):
        if math.gcd(q1, q2) != 1:
            return
        f1, f2 = bezout_split(a, q1, q2)
        total = f1.as_fraction() + f2.as_fraction()
        assert (total - Fraction(a, q1 * q2)) % 1 == 0

    @given(
        st.integers(min_value=1, max_value=10**9),
        st.integers(min_value=2, max_value=1000),
    )
    @settings(max_examples=200, deadline=None)
    def test_smooth_rough_property(self, n, z):
        sm = smooth_part(n, z)
        cof = n // sm
        assert sm * cof == n
        assert sm == 1 or p_plus(sm) <= z
        assert cof == 1 or p_minus(cof) > z


class TestResidueClass:
    def test_validation(self):
        with pytest.raises(ValueError):
            ResidueClass(5, 3)
        assert ResidueClass(2, 3).contains(5)
        assert ResidueClass(0, 1).is_unit()


class TestCoprimePartition:
    def test_singleton(self):
        assert coprime_partition([(2, 3)]) == [[0]]

    def test_conflict(self):
        assert coprime_partition([(2, 3), (3, 2)]) == [[0], [1]]

    def test_disjoint_primes(self):
        assert coprime_partition([(2, 3), (5, 7), (11, 13)]) == [[0, 1, 2]]

    def test_internally_non_coprime_rejected(self):
        with pytest.raises(ValueError):
            coprime_partition([(2, 3), (6, 9)])

    @pytest.mark.parametrize("seed", [0, 3, 11])
    def test_property_recheck(self, seed):
        pairs = random_coprime_pairs(120, seed=seed)
        classes = coprime_partition(pairs)
        assert check_coprime_partition(pairs, classes)
