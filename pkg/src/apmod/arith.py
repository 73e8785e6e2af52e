"""Integer and modular arithmetic primitives plus multiplicative functions.

Everything here is exact integer arithmetic; no floating point.  Factorization
is deterministic (trial division by sieved primes, then Brent-Pollard rho with
a deterministic Miller-Rabin) and covers the full 64-bit range used elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

# P^-(1) sentinel: "+infinity" as the largest representable threshold, so the
# roughness condition P^-(n) > z includes n = 1 for every finite z.
P_MINUS_ONE_SENTINEL = (1 << 63) - 1

_TRIAL_LIMIT = 10**6


@lru_cache(maxsize=1)
def _trial_primes() -> tuple[int, ...]:
    from .primes import sieve_upto

    return tuple(int(p) for p in sieve_upto(_TRIAL_LIMIT))


@dataclass(frozen=True)
class FactoredInt:
    """A positive integer together with its full prime factorization.

    ``factors`` is ordered by strictly increasing prime; n == 1 iff it is
    empty.  The invariants are enforced at construction.
    """

    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"FactoredInt needs n >= 1, got {self.n}")
        prod = 1
        last_p = 0
        for p, e in self.factors:
            if p <= last_p:
                raise ValueError("primes must be strictly increasing")
            if e < 1:
                raise ValueError("exponents must be >= 1")
            prod *= p**e
            last_p = p
        if prod != self.n:
            raise ValueError(f"factorization product {prod} != n {self.n}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)


@dataclass(frozen=True)
class ResidueClass:
    """A residue a modulo q with 0 <= a < q."""

    a: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("modulus must be >= 1")
        if not 0 <= self.a < self.q:
            raise ValueError(f"residue {self.a} outside [0, {self.q})")

    def contains(self, n: int) -> bool:
        return n % self.q == self.a

    def is_unit(self) -> bool:
        return math.gcd(self.a, self.q) == 1


def _is_prime_u64(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3.3e24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """Brent's cycle variant with a deterministic sequence of constants."""
    if n % 2 == 0:
        return 2
    for c in range(1, 1000):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = 0
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"rho failed to split {n}")  # unreachable in 64 bits


def factorize(n: int) -> FactoredInt:
    """Full prime factorization of ``1 <= n < 2**63``."""
    if n < 1:
        raise ValueError(f"cannot factor n = {n}")
    if n >= 1 << 63:
        raise ValueError("inputs above 2**63 are out of contract")
    m = n
    fac: dict[int, int] = {}
    for p in _trial_primes():
        if p * p > m:
            break
        while m % p == 0:
            fac[p] = fac.get(p, 0) + 1
            m //= p
    stack = [m] if m > 1 else []
    while stack:
        v = stack.pop()
        if v == 1:
            continue
        if _is_prime_u64(v):
            fac[v] = fac.get(v, 0) + 1
            continue
        d = _pollard_rho(v)
        stack.append(d)
        stack.append(v // d)
    return FactoredInt(n, tuple(sorted(fac.items())))


def _as_factored(n: int | FactoredInt) -> FactoredInt:
    return n if isinstance(n, FactoredInt) else factorize(n)


def mod_inv(a: int, q: int) -> int:
    """Inverse of a modulo q, in [0, q).  Requires gcd(a, q) = 1; q = 1 gives 0."""
    if q < 1:
        raise ValueError(f"modulus must be >= 1, got {q}")
    if q == 1:
        return 0
    g = math.gcd(a, q)
    if g != 1:
        raise ValueError(f"{a} is not invertible mod {q} (gcd = {g})")
    return pow(a, -1, q)


@dataclass(frozen=True)
class ModFraction:
    """Exact rational viewed modulo 1; always stored in reduced form."""

    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator < 1:
            raise ValueError("denominator must be positive")
        g = math.gcd(self.numerator, self.denominator)
        if g != 1 and not (self.numerator == 0 and self.denominator == 1):
            object.__setattr__(self, "numerator", self.numerator // g)
            object.__setattr__(self, "denominator", self.denominator // g)
        # canonical representative in [0, 1)
        object.__setattr__(
            self, "numerator", self.numerator % self.denominator
        )
        if self.numerator == 0:
            object.__setattr__(self, "denominator", 1)

    def __add__(self, other: "ModFraction") -> "ModFraction":
        return ModFraction(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


def bezout_split(a: int, q1: int, q2: int) -> tuple[ModFraction, ModFraction]:
    """Split a/(q1*q2) mod 1 into a part over q2 and a part over q1.

    Returns (a*inv(q1, q2)/q2, a*inv(q2, q1)/q1); the two fractions sum to
    a/(q1*q2) modulo 1, exactly in integer arithmetic.
    """
    if q1 < 1 or q2 < 1:
        raise ValueError("moduli must be >= 1")
    if math.gcd(q1, q2) != 1:
        raise ValueError(f"moduli must be coprime, gcd({q1},{q2}) > 1")
    return (
        ModFraction(a * mod_inv(q1, q2), q2),
        ModFraction(a * mod_inv(q2, q1), q1),
    )


# ---------------------------------------------------------------------------
# multiplicative functions


def euler_phi(n: int | FactoredInt) -> int:
    f = _as_factored(n)
    out = 1
    for p, e in f.factors:
        out *= (p - 1) * p ** (e - 1)
    return out


def mobius(n: int | FactoredInt) -> int:
    f = _as_factored(n)
    if any(e > 1 for _, e in f.factors):
        return 0
    return -1 if len(f.factors) % 2 else 1


def tau_k(n: int | FactoredInt, k: int) -> int:
    """k-fold divisor function: number of ordered k-tuples with product n."""
    if k < 1:
        raise ValueError("tau_k needs k >= 1")
    f = _as_factored(n)
    out = 1
    for _, e in f.factors:
        out *= math.comb(e + k - 1, k - 1)
    return out


def p_minus(n: int | FactoredInt) -> int:
    """Smallest prime factor; P^-(1) is the +infinity sentinel."""
    f = _as_factored(n)
    return f.factors[0][0] if f.factors else P_MINUS_ONE_SENTINEL


def p_plus(n: int | FactoredInt) -> int:
    """Largest prime factor, with P^+(1) = 1."""
    f = _as_factored(n)
    return f.factors[-1][0] if f.factors else 1


def squarefull_part(n: int | FactoredInt) -> int:
    """Product of p^e over primes with p^2 | n."""
    f = _as_factored(n)
    out = 1
    for p, e in f.factors:
        if e >= 2:
            out *= p**e
    return out


def smooth_part(n: int | FactoredInt, z: int) -> int:
    """Product of p^e over primes p <= z dividing n."""
    f = _as_factored(n)
    out = 1
    for p, e in f.factors:
        if p <= z:
            out *= p**e
    return out


_MULT_FNS = {
    "phi": (euler_phi, False),
    "mobius": (mobius, False),
    "tau_k": (tau_k, True),
    "p_minus": (p_minus, False),
    "p_plus": (p_plus, False),
    "squarefull": (squarefull_part, False),
    "smooth_part": (smooth_part, True),
}


def mult_eval(fn_id: str, n: int | FactoredInt, aux: int | None = None) -> int:
    """Dispatch a multiplicative-function evaluation by name.

    ``aux`` is the order k for tau_k and the smoothness bound z for
    smooth_part; it is rejected as missing where required.
    """
    try:
        fn, needs_aux = _MULT_FNS[fn_id]
    except KeyError:
        raise ValueError(f"unknown fn_id {fn_id!r}; one of {sorted(_MULT_FNS)}")
    if needs_aux:
        if aux is None:
            raise ValueError(f"{fn_id} requires the aux parameter")
        return fn(n, aux)
    if aux is not None:
        raise ValueError(f"{fn_id} takes no aux parameter")
    return fn(n)


# ---------------------------------------------------------------------------
# coprime-set partition


def coprime_partition(pairs: Sequence[tuple[int, int]]) -> list[list[int]]:
    """Partition indices of internally-coprime pairs into cross-coprime classes.

    Within each returned class, every two members (a, b), (a', b') satisfy
    gcd(a, b') = gcd(a', b) = 1 (including a pair with itself, which is why
    inputs must have gcd(a, b) = 1).  Greedy colouring of the conflict graph:
    indices in input order, lowest-numbered admissible class.
    """
    for i, (a, b) in enumerate(pairs):
        if a < 1 or b < 1:
            raise ValueError(f"pair #{i} = ({a},{b}) must be positive")
        if math.gcd(a, b) != 1:
            raise ValueError(f"pair #{i} = ({a},{b}) is not internally coprime")
    classes: list[list[int]] = []
    for i, (a, b) in enumerate(pairs):
        placed = False
        for cls in classes:
            ok = True
            for j in cls:
                aj, bj = pairs[j]
                if math.gcd(a, bj) != 1 or math.gcd(aj, b) != 1:
                    ok = False
                    break
            if ok:
                cls.append(i)
                placed = True
                break
        if not placed:
            classes.append([i])
    return classes


def random_coprime_pairs(
    count: int, seed: int = 0, prime_max: int = 100, max_factors: int = 2
) -> list[tuple[int, int]]:
    """Deterministic internally-coprime pairs built from a small prime pool."""
    from .primes import sieve_upto
    from .rng import SplitMix64

    rng = SplitMix64(seed)
    pool = [int(p) for p in sieve_upto(prime_max)]
    pairs: list[tuple[int, int]] = []
    while len(pairs) < count:
        a = 1
        for _ in range(rng.in_range(1, max_factors)):
            a *= pool[rng.below(len(pool))]
        b = 1
        for _ in range(rng.in_range(1, max_factors)):
            b *= pool[rng.below(len(pool))]
        if math.gcd(a, b) == 1:
            pairs.append((a, b))
    return pairs


def check_coprime_partition(
    pairs: Sequence[tuple[int, int]], classes: Iterable[Iterable[int]]
) -> bool:
    """Exhaustively re-check the defining property of a produced partition."""
    seen: set[int] = set()
    for cls in classes:
        cls = list(cls)
        for i in cls:
            if i in seen:
                return False
            seen.add(i)
        for i in cls:
            for j in cls:
                if (
                    math.gcd(pairs[i][0], pairs[j][1]) != 1
                    or math.gcd(pairs[j][0], pairs[i][1]) != 1
                ):
                    return False
    return seen == set(range(len(pairs)))
