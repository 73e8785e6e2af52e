import pytest

from apmod.constants import (
    HARMAN_X1E4_FLAG_SNAPSHOT,
    HARMAN_X1E4_LEAF_COUNT,
    HARMAN_X1E4_ROOT_TRIPLE,
)
from apmod.harman import dump_tree, harman_tree


def spec_params(x=10**4):
    return dict(
        x=x,
        z1=x ** (1 / 7),
        z2=x ** (3 / 7),
        z3=x ** (4 / 7),
    )


class TestHarmanTree:
    def test_exact_at_reference_scale(self):
        root, rep = harman_tree(**spec_params(), q1=2, q2=1, a=1)
        assert rep.exact
        assert rep.root_value.triple() == HARMAN_X1E4_ROOT_TRIPLE
        assert rep.leaf_count == HARMAN_X1E4_LEAF_COUNT
        assert all(ok for _, ok in rep.split_checks)

    def test_flag_report_byte_stable(self):
        _, rep1 = harman_tree(**spec_params(), q1=2, q2=1, a=1)
        _, rep2 = harman_tree(**spec_params(), q1=2, q2=1, a=1)
        blob1 = "\n".join(rep1.flag_lines())
        blob2 = "\n".join(rep2.flag_lines())
        assert blob1 == blob2
        assert blob1 == HARMAN_X1E4_FLAG_SNAPSHOT

    def test_exact_with_informative_modulus(self):
        # q = 3 gives in_class != coprime generally, so the triple equality
        # is a stronger statement than the q = 2 case
        root, rep = harman_tree(**spec_params(), q1=3, q2=1, a=1)
        assert rep.exact
        ic, cp, phi = rep.root_value.triple()
        assert phi == 2 and (ic, cp) != (0, 0)

    def test_exact_with_composite_modulus(self):
        _, rep = harman_tree(**spec_params(5000), q1=3, q2=5, a=2)
        assert rep.exact
        assert all(ok for _, ok in rep.split_checks)

    def test_large_scale_with_deep_groups(self):
        # x = 1e6 populates the four-variable terminal group; the root must
        # match an independent count of primes in (x, 2x] by residue class
        import numpy as np

        from apmod.primes import sieve_upto

        x = 10**6
        root, rep = harman_tree(**spec_params(x), q1=3, q2=1, a=1)
        assert rep.exact
        g3 = next(n for n, _ in root.walk() if n.name == "G3")
        assert g3.svalue.triple() != (0, 0, 2)  # deep group nonempty here
        ps = sieve_upto(2 * x)
        ps = ps[ps > x]
        want = (
            int(np.count_nonzero(ps % 3 == 1)),
            int(np.count_nonzero(ps % 3 != 0)),
            2,
        )
        assert rep.root_value.triple() == want
        term_checks = [
            f for f in rep.flags if f.name.endswith("-terminal")
        ]
        assert all(f.ok for f in term_checks)

    def test_degenerate_z1_equals_z2(self):
        x = 2000
        _, rep = harman_tree(x, 5.0, 5.0, 50.0, 3, 1, 1)
        assert rep.exact
        # middle group over (z1, z2] is empty, so B1/G1 collapse
        assert rep.root_value.phi_q == 2

    def test_epsilon_shrinks_residual(self):
        x = 10**4
        _, rep0 = harman_tree(**spec_params(), q1=2, q2=1, a=1, epsilon=0.0)
        _, rep1 = harman_tree(**spec_params(), q1=2, q2=1, a=1, epsilon=0.08)
        res0 = next(f for f in rep0.flags if f.name == "residual-empty")
        res1 = next(f for f in rep1.flags if f.name == "residual-empty")
        n0 = int(res0.detail.split()[0].split("=")[1])
        n1 = int(res1.detail.split()[0].split("=")[1])
        assert n1 <= n0
        assert rep1.exact

    def test_validation(self):
        with pytest.raises(ValueError):
            harman_tree(100, 5.0, 4.0, 10.0, 1, 1, 0)
        with pytest.raises(ValueError):
            harman_tree(100, 2.0, 3.0, 10**4, 1, 1, 0)
        with pytest.raises(ValueError):
            harman_tree(100, 2.0, 3.0, 5.0, 2, 1, 0)  # residue not coprime

    def test_random_free_parameters_stay_exact(self):
        # exactness is structural: it must hold for any admissible
        # (z1, z2, z3, q1, q2, a), not just the reference shape
        import math

        from apmod.rng import SplitMix64

        rng = SplitMix64(99)
        done = 0
        while done < 12:
            x = rng.in_range(500, 5000)
            top = 2.0 * math.sqrt(x)
            z1 = 2.0 + rng.unit() * 6.0
            z2 = z1 + rng.unit() * (top - z1)
            z3 = z2 + rng.unit() * (2.0 * math.sqrt(2 * x) - z2)
            q1 = rng.in_range(1, 6)
            q2 = rng.in_range(1, 4)
            a = rng.in_range(0, max(q1 * q2 - 1, 0))
            if math.gcd(a, q1 * q2) != 1:
                continue
            _, rep = harman_tree(x, z1, z2, z3, q1, q2, a)
            assert rep.exact, (x, z1, z2, z3, q1, q2, a)
            assert all(ok for _, ok in rep.split_checks)
            done += 1

    def test_terminal_census(self):
        # the tree shape fixes the terminal-class counts regardless of scale
        root, _ = harman_tree(**spec_params(), q1=2, q2=1, a=1)
        census = {}
        for leaf, _sign in root.leaves():
            census[leaf.kind] = census.get(leaf.kind, 0) + 1
        assert census == {
            "sieve-asymptotic": 5,
            "type-II": 2,
            "three-primes": 1,
            "four-primes": 1,
            "five-or-six-primes": 1,
            "residual": 1,
        }

    def test_dump_contains_all_nodes(self):
        root, rep = harman_tree(**spec_params(2000), q1=3, q2=1, a=1)
        text = dump_tree(root)
        for name in ("root", "A0", "M", "B1", "G1", "G1a", "B2a", "G2",
                     "B4a", "G3", "G1b", "G1c", "B3a", "G3c", "G1d", "G1e", "C0"):
            assert name in text
        assert text.count("\n") + 1 == 17  # 6 internal + 11 leaves
