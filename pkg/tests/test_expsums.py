import cmath
import math

import pytest

from apmod.arith import euler_phi, mobius, tau_k
from apmod.constants import (
    KL3_CORRELATION_INSTANCE,
    KL3_CORRELATION_LHS,
)
from apmod.expsums import (
    FSumKey,
    deligne_check,
    f_property_check,
    f_sum,
    kl3,
    kl3_correlation,
    kl3_full_loop,
    kl3_prime_table,
    kl3_squarefree,
    kloosterman,
    ramanujan,
    ramanujan_exact,
    weil_check,
)
from apmod.rng import SplitMix64


class TestRamanujan:
    def test_n_zero_gives_phi(self):
        for q in (1, 2, 12, 30):
            assert ramanujan(q, 0).real == pytest.approx(euler_phi(q), abs=1e-9)

    def test_examples(self):
        assert ramanujan(5, 1).real == pytest.approx(-1.0, abs=1e-9)
        assert ramanujan(4, 2).real == pytest.approx(-2.0, abs=1e-9)

    def test_closed_form_oracle(self):
        for q in range(1, 101):
            for n in range(q):
                v = ramanujan(q, n)
                assert v.real == pytest.approx(ramanujan_exact(q, n), abs=1e-9)
                assert abs(v.imag) <= 1e-9 * max(euler_phi(q), 1)


class TestKloosterman:
    def test_reduces_to_ramanujan(self):
        for q in (3, 8, 15):
            for n in range(3):
                assert kloosterman(0, n, q) == pytest.approx(
                    ramanujan(q, n), abs=1e-9
                )

    def test_examples(self):
        assert kloosterman(1, 1, 2).real == pytest.approx(1.0, abs=1e-12)
        assert kloosterman(1, 1, 3).real == pytest.approx(-1.0, abs=1e-12)

    def test_hand_computed_values(self):
        # S(1,1;5): inverse pairs (1,1),(2,3),(3,2),(4,4) give
        # e(2/5) + e(0) + e(0) + e(3/5) = 2 + 2 cos(4 pi / 5)
        assert kloosterman(1, 1, 5).real == pytest.approx(
            2.0 + 2.0 * math.cos(4 * math.pi / 5), abs=1e-12
        )
        # S(1,2;7) = sum e((b + 2 inv(b))/7) over units
        want = sum(
            cmath.exp(2j * cmath.pi * ((b + 2 * pow(b, -1, 7)) % 7) / 7)
            for b in range(1, 7)
        )
        assert kloosterman(1, 2, 7) == pytest.approx(want, abs=1e-12)

    def test_symmetry(self):
        rng = SplitMix64(17)
        for c in range(1, 101):
            for _ in range(20):
                m = rng.in_range(0, 3 * c)
                n = rng.in_range(0, 3 * c)
                assert abs(kloosterman(m, n, c) - kloosterman(n, m, c)) <= 1e-9 * c

    def test_diagonal_real(self):
        # S(m, m; c) is real (b -> inv(b) change of variables)
        for c in range(2, 60):
            for m in (1, 2, 5):
                assert abs(kloosterman(m, m, c).imag) <= 1e-9 * c


class TestKl3:
    def test_q_one(self):
        assert kl3(7, 1) == 1 + 0j

    def test_examples(self):
        assert kl3(1, 2) == pytest.approx(-0.5 + 0j, abs=1e-12)
        want = (1 + 3 * cmath.exp(2j * cmath.pi * 2 / 3)) / 3
        assert kl3(1, 3) == pytest.approx(want, abs=1e-12)

    def test_full_loop_oracle(self):
        rng = SplitMix64(23)
        for q in list(range(1, 16)) + [20, 24, 30]:
            for _ in range(4):
                a = rng.in_range(0, q - 1) if q > 1 else 0
                assert abs(kl3(a, q) - kl3_full_loop(a, q)) <= 1e-9 * q

    def test_prime_table_matches_direct(self):
        for p in (2, 3, 5, 13, 31):
            table = kl3_prime_table(p)
            for a in range(1, p):
                assert abs(table[a] - kl3(a, p)) <= 1e-9 * p

    def test_squarefree_multiplicative_matches_direct(self):
        for a, q in ((1, 15), (2, 21), (4, 35), (1, 30), (7, 33), (11, 105)):
            assert abs(kl3_squarefree(a, q) - kl3(a, q)) <= 1e-9 * q


class TestFSum:
    def test_q_one(self):
        assert f_sum(FSumKey(5, -2, 9, 4, 1)) == 1 + 0j

    def test_non_unit_a_vanishes(self):
        assert f_sum(FSumKey(1, 1, 1, 2, 4)) == 0j
        assert f_sum(FSumKey(3, 1, 2, 6, 9)) == 0j

    def test_equals_q_times_kl3(self):
        assert f_sum(FSumKey(1, 1, 1, 1, 2)) == pytest.approx(
            2 * kl3(1, 2), abs=1e-12
        )
        rng = SplitMix64(31)
        for q in range(1, 61):
            h = []
            while len(h) < 3:
                v = rng.in_range(1, 3 * q)
                if math.gcd(v, q) == 1:
                    h.append(v)
            a = next(v for v in range(1, q + 1) if math.gcd(v, q) == 1)
            lhs = f_sum(FSumKey(h[0], h[1], h[2], a, q))
            rhs = q * kl3((a * h[0] * h[1] * h[2]) % q, q)
            assert abs(lhs - rhs) <= 1e-6 * q * q

    def test_property3_example(self):
        assert f_sum(FSumKey(1, 2, 3, 2, 6)) == 0j

    def test_multiplicativity_squarefree(self):
        rep = f_property_check(60, 1, samples_per_q=40, seed=1)
        assert rep.passed, rep.failures[:3]


class TestFPropertySweeps:
    @pytest.mark.parametrize("pid", list(range(1, 8)))
    def test_property_q24(self, pid):
        rep = f_property_check(24, pid, samples_per_q=60, seed=0)
        assert rep.tested > 0
        assert rep.passed, rep.failures[:3]

    def test_unknown_property(self):
        with pytest.raises(ValueError):
            f_property_check(10, 9)

    def test_paper_blanket_hypothesis_counterexample(self):
        # q = 12, h = (3, 1, 1): q is not squarefree, gcd(h1 h2 h3, q) = 3 > 1
        # and gcd(h1, h2, h3, q) = 1, yet F != 0 because the shared prime 3
        # divides only the squarefree part of 12.  The vanishing needs the
        # shared prime at a square factor, which is what property check 6
        # enforces.
        v = f_sum(FSumKey(3, 1, 1, 1, 12))
        assert abs(v) > 0.5


class TestWeil:
    def test_prime_moduli_ratio(self):
        rep = weil_check(97, trials_per_c=20, seed=0)
        assert rep.passed
        assert rep.max_ratio < 1.0

    def test_degenerate_corner(self):
        # c = 12, m = n = 0: S = phi(12) = 4 <= tau(12) sqrt(12 * 12) = 72
        v = kloosterman(0, 0, 12)
        assert v.real == pytest.approx(4.0, abs=1e-9)
        assert 4.0 <= tau_k(12, 2) * math.sqrt(12 * 12)

    def test_contract_bound(self):
        with pytest.raises(ValueError):
            weil_check(5000)


class TestDeligne:
    def test_small(self):
        rep = deligne_check(50, squarefree_max=100)
        assert rep.passed
        assert rep.max_ratio < 1.0

    def test_kl3_mod2_value(self):
        assert abs(kl3(1, 2)) == pytest.approx(0.5, abs=1e-12)
        assert abs(kl3(1, 2)) <= 3.0

    def test_q1_bound(self):
        assert abs(kl3(1, 1)) <= tau_k(1, 3)


class TestCorrelation:
    def test_pinned_instance(self):
        H, a1, a2, r1, r2, s = KL3_CORRELATION_INSTANCE
        r = kl3_correlation(H, a1, a2, r1, r2, s)
        assert r["lhs"] == pytest.approx(KL3_CORRELATION_LHS, abs=1e-9)
        assert r["ratio"] == r["ratio"]  # finite

    def test_empty_support(self):
        # H so small that every h in [H/2, 5H/2] shares a factor with s r1 r2
        r = kl3_correlation(2.0, 1, 1, 2, 3, 5)
        assert r["lhs"] == 0j

    def test_conjugate_square_structure(self):
        r = kl3_correlation(12.0, 1, 1, 3, 3, 1)
        assert r["lhs"].imag == pytest.approx(0.0, abs=1e-9)
        assert r["lhs"].real >= 0.0

    def test_hypothesis_validation(self):
        with pytest.raises(ValueError):
            kl3_correlation(10.0, 1, 1, 4, 3, 5)  # r1 not squarefree
        with pytest.raises(ValueError):
            kl3_correlation(10.0, 1, 1, 3, 5, 3)  # gcd(s, r1) > 1
        with pytest.raises(ValueError):
            kl3_correlation(10.0, 3, 1, 3, 5, 7)  # a1 not unit mod r1 s

    def test_mobius_guard(self):
        assert mobius(4) == 0
