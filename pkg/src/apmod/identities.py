"""Exact combinatorial sieve identities.

Heath-Brown's decomposition of the von Mangoldt function, the combinatorial
fundamental-lemma weights lambda+/-, the alpha/beta reduction sequences, and
the exact Buchstab identity on S-values.  Everything here is checked by exact
arithmetic: the identities are exact, so the verifiers are too.

Convention that makes the Buchstab bookkeeping exact at prime powers: when a
sum is split on the least prime factor p of the cofactor, the subtracted
terms carry the inclusive roughness condition P^-(m) >= p (the cofactor may
still be divisible by p).  Displays that use the strict condition on both
sides differ from the exact identity on terms divisible by p^2, which are
invisible asymptotically but not at desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import mobius
from .primes import least_prime_factor_table, sieve_upto
from .progressions import SValue, s_value
from .rng import SplitMix64

# ---------------------------------------------------------------------------
# Heath-Brown identity

# Global sign of the j-th term.  Fixed once by matching the expansion against
# the von Mangoldt oracle on n <= 100 (see tests): (-1)^(j-1) reproduces
# Lambda(n); the opposite choice reproduces -Lambda(n).
HEATH_BROWN_SIGN = +1  # multiplies (-1)**(j-1)


def _divisor_lattice(n: int) -> list[int]:
    divs = [1]
    m = n
    f = []
    d = 2
    while d * d <= m:
        e = 0
        while m % d == 0:
            e += 1
            m //= d
        if e:
            f.append((d, e))
        d += 1
    if m > 1:
        f.append((m, 1))
    for p, e in f:
        divs = [v * p**k for v in divs for k in range(e + 1)]
    return sorted(divs)


def heath_brown_decompose(n: int, k: int, x: int) -> float:
    """Evaluate the k-fold expansion of Lambda(n) with cutoff m_i <= 2 x^(1/k).

    sum_{j=1..k} sign * (-1)^(j-1) C(k,j) sum_{n = m_1..m_j n_1..n_j,
    m_i <= 2 x^(1/k)} mu(m_1)..mu(m_j) log n_1,

    computed by Dirichlet convolutions on the divisor lattice of n.  Exact up
    to float log arithmetic; equals Lambda(n) for n <= 2x.
    """
    if not 1 <= k <= 4:
        raise ValueError("k must be in 1..4 at desk scale")
    if n < 1 or n > 2 * x:
        raise ValueError("requires 1 <= n <= 2x")
    cutoff = 2.0 * x ** (1.0 / k)
    divs = _divisor_lattice(n)
    pos = {d: i for i, d in enumerate(divs)}
    nd = len(divs)

    f_mu = np.array(
        [mobius(d) if d <= cutoff else 0 for d in divs], dtype=np.int64
    )
    one = np.ones(nd, dtype=np.int64)
    logv = np.log(np.array(divs, dtype=float))

    def conv(a, b):
        out = np.zeros(nd, dtype=a.dtype)
        for i, d1 in enumerate(divs):
            if a[i] == 0:
                continue
            lim = n // d1
            for j, d2 in enumerate(divs):
                if d2 > lim:
                    break
                if lim % d2 == 0:
                    out[pos[d1 * d2]] += a[i] * b[j]
        return out

    total = 0.0
    mu_pow = None  # mu-restricted convolution power f_mu^(*j)
    for j in range(1, k + 1):
        mu_pow = f_mu if mu_pow is None else conv(mu_pow, f_mu)
        # tau_{j-1} on the lattice (# ordered (j-1)-factorizations)
        tau_prev = np.zeros(nd, dtype=np.int64)
        tau_prev[0] = 1  # identity of Dirichlet convolution
        for _ in range(j - 1):
            tau_prev = conv(tau_prev, one)
        # L_j = log * tau_{j-1}
        lconv = np.zeros(nd, dtype=float)
        for i, d1 in enumerate(divs):
            if logv[i] == 0.0:
                continue
            lim = n // d1
            for jj, d2 in enumerate(divs):
                if d2 > lim:
                    break
                if lim % d2 == 0 and tau_prev[jj]:
                    lconv[pos[d1 * d2]] += logv[i] * tau_prev[jj]
        term = 0.0
        for i, d in enumerate(divs):
            if mu_pow[i]:
                term += mu_pow[i] * lconv[pos[n // d]]
        total += HEATH_BROWN_SIGN * (-1) ** (j - 1) * math.comb(k, j) * term
    return total


def z0_of(x: float) -> float:
    """Default sifting limit x^(1/(log log x)^3); requires x > e^e."""
    if math.log(math.log(x)) <= 0:
        raise ValueError("needs x > e^e")
    return x ** (1.0 / math.log(math.log(x)) ** 3)


def y0_of(x: float) -> float:
    """Default sieve level x^(1/log log x); requires x > e^e."""
    if math.log(math.log(x)) <= 0:
        raise ValueError("needs x > e^e")
    return x ** (1.0 / math.log(math.log(x)))


# ---------------------------------------------------------------------------
# fundamental-lemma weights (combinatorial sieve, truncated Buchstab iteration)


@dataclass
class SieveWeights:
    """Upper/lower combinatorial sieve weights of level y sifting primes <= z.

    lambda_plus / lambda_minus map squarefree d (primes <= z, d <= y) to
    mu(d) on the retained truncation chains.  Contract, for every n:
      - P^-(n) > z  =>  sum_{d|n} lambda+_d = sum_{d|n} lambda-_d = 1
      - P^-(n) <= z =>  sum_{d|n} lambda-_d <= 0 <= sum_{d|n} lambda+_d
    """

    z: float
    y: float
    lambda_plus: dict[int, int]
    lambda_minus: dict[int, int]

    def divisor_sum(self, n: int, side: str) -> int:
        table = self.lambda_plus if side == "+" else self.lambda_minus
        total = 0
        for d, w in table.items():
            if n % d == 0:
                total += w
        return total

    def sums_over_range(self, n_max: int, side: str) -> np.ndarray:
        """sum_{d|n} lambda_d for all n <= n_max at once."""
        table = self.lambda_plus if side == "+" else self.lambda_minus
        out = np.zeros(n_max + 1, dtype=np.int64)
        for d, w in table.items():
            if d <= n_max:
                out[d::d] += w
        return out

    def density_ratio(self) -> float:
        """Diagnostic: sum lambda+_d/d over prod_{p <= z}(1 - 1/p); not asserted."""
        main = math.fsum(w / d for d, w in self.lambda_plus.items())
        prod = 1.0
        for p in sieve_upto(int(self.z)):
            prod *= 1.0 - 1.0 / int(p)
        return main / prod


def fundamental_lemma_weights(z: float, y: float) -> SieveWeights:
    """Build lambda+/- by truncating the Buchstab iteration at level y.

    Chains are squarefree d = p_1 > p_2 > ... > p_r with all p_i <= z.  A
    chain is retained for lambda+ iff every odd-position prefix satisfies
    p_1...p_{m-1} p_m^3 <= y, and for lambda- iff every even-position prefix
    does.  Exits then happen only at odd (resp. even) depth, which gives the
    upper (resp. lower) majorant property; the cube cushion keeps every
    retained chain, including the forced even extensions, at or below y.
    """
    if z < 2:
        raise ValueError("z must be >= 2")
    if y < z:
        raise ValueError("level y must be >= z")
    ps = [int(p) for p in sieve_upto(int(z))][::-1]  # descending

    def build(parity: int) -> dict[int, int]:
        # parity 1 -> condition at odd depths (lambda+); 0 -> even (lambda-)
        out: dict[int, int] = {1: 1}
        stack = [(1, 0, 0)]  # (product, depth, min_index into ps)
        while stack:
            d, depth, idx = stack.pop()
            sign = -1 if (depth + 1) % 2 else 1
            for i in range(idx, len(ps)):
                p = ps[i]
                nd = d * p
                if (depth + 1) % 2 == parity and d * p**3 > y:
                    continue  # truncated exit at the conditioned parity
                if nd > y:
                    # only reachable at the unconditioned parity; the cube
                    # cushion makes this impossible, kept as a guard
                    continue
                out[nd] = sign
                stack.append((nd, depth + 1, i + 1))
        return out

    return SieveWeights(
        z=z, y=y, lambda_plus=build(1), lambda_minus=build(0)
    )


# ---------------------------------------------------------------------------
# reduction to fundamental-lemma-type condition (alpha/beta sequences)


@dataclass
class ReductionSequences:
    """1-bounded alpha/beta turning P^-(n) > z1 into P^-(m) > z2 conditions.

    alpha_d = (-1)^r on squarefree d = p_1 > ... > p_r with all primes in
    (z2, z1] (alpha_1 = 1), else 0; beta_d = -alpha_d.  The exact identity,
    for every n and level y:

      1[P^-(n) > z1] = sum_{n = d m, d <= y} alpha_d 1[P^-(m) > z2]
                     + sum_{n = d p m, z2 < p <= z1, P^-(d) > p,
                            d <= y < d p} beta_d 1[P^-(m) >= p]

    The exact form needs strictly decreasing chains (squarefree d), strict
    P^-(d) > p, and the inclusive condition P^-(m) >= p; the non-strict /
    strict variants seen in asymptotic displays fail on prime powers.
    """

    z1: float
    z2: float
    y: float
    alpha: dict[int, int]
    beta: dict[int, int]

    def identity_sides(self, n_max: int) -> tuple[np.ndarray, np.ndarray]:
        """(lhs, rhs) of the identity for all 1 <= n <= n_max, exactly."""
        lpf = least_prime_factor_table(n_max)
        lhs = (lpf[: n_max + 1] > self.z1).astype(np.int64)
        lhs[0] = 0
        rhs = np.zeros(n_max + 1, dtype=np.int64)
        window = [int(p) for p in sieve_upto(int(self.z1)) if p > self.z2]
        # alpha part
        for d, w in self.alpha.items():
            if d > min(self.y, n_max):
                continue
            m = np.arange(1, n_max // d + 1)
            rhs[d * m] += w * (lpf[m] > self.z2)
        # beta part
        for d, w in self.beta.items():
            if d > self.y:
                continue
            pd = min(self.alpha_pminus(d), self.z1 + 1)
            for p in window:
                if p >= pd:
                    break
                if d * p <= self.y or d * p > n_max:
                    continue
                m = np.arange(1, n_max // (d * p) + 1)
                rhs[d * p * m] += w * (lpf[m] >= p)
        return lhs, rhs[: n_max + 1]

    def alpha_pminus(self, d: int) -> float:
        if d == 1:
            return math.inf
        m = d
        p = 2
        while p * p <= m:
            if m % p == 0:
                return p
            p += 1
        return m


def reduction_sequences(z1: float, z2: float, y: float) -> ReductionSequences:
    if z2 > z1:
        raise ValueError("needs z2 <= z1")
    if y < 1:
        raise ValueError("needs y >= 1")
    window = [int(p) for p in sieve_upto(int(z1)) if p > z2]
    alpha: dict[int, int] = {1: 1}
    # products of distinct window primes; the identity only reads alpha and
    # beta at d <= y, so the support is capped there
    cap = y
    stack = [(1, 0, 0)]
    while stack:
        d, depth, idx = stack.pop()
        for i in range(idx, len(window)):
            p = window[i]
            nd = d * p
            if nd > cap:
                continue
            alpha[nd] = -1 if (depth + 1) % 2 else 1
            stack.append((nd, depth + 1, i + 1))
    beta = {d: -w for d, w in alpha.items()}
    return ReductionSequences(z1=z1, z2=z2, y=y, alpha=alpha, beta=beta)


# ---------------------------------------------------------------------------
# exact Buchstab identity on S-values


def buchstab_terms(
    x: int, d: int, z1: float, z2: float, q1: int, q2: int, a: int
) -> tuple[SValue, SValue, list[SValue]]:
    """(S_d(z2), S_d(z1), [subtracted dp-terms]) of the exact Buchstab split.

    S_d(z2) = S_d(z1) - sum over primes z1 < p <= z2 of the dp-term, where
    the dp-term sums over m ~ x/(dp) with the inclusive condition
    P^-(m) >= p.
    """
    left = s_value(x, d, z2, q1, q2, a)
    right = s_value(x, d, z1, q1, q2, a)
    subtracted = [
        s_value(x, d * p, p, q1, q2, a, inclusive=True)
        for p in _primes_between(z1, z2)
    ]
    return left, right, subtracted


@lru_cache(maxsize=64)
def _primes_upto_cached(hi: int) -> tuple[int, ...]:
    return tuple(int(p) for p in sieve_upto(hi))


def _primes_between(z1: float, z2: float) -> list[int]:
    return [p for p in _primes_upto_cached(int(math.floor(z2))) if z1 < p <= z2]


def verify_buchstab(
    x: int, d: int, z1: float, z2: float, q1: int, q2: int, a: int
) -> bool:
    """Exact integer-triple check of the Buchstab identity; no tolerance."""
    if z1 > z2:
        raise ValueError("needs z1 <= z2")
    left, right, subtracted = buchstab_terms(x, d, z1, z2, q1, q2, a)
    acc = right
    for t in subtracted:
        acc = acc - t
    return left.triple() == acc.triple()


def random_buchstab_configs(trials: int, x_max: int, seed: int = 0):
    """Deterministic stream of (x, d, z1, z2, q1, q2, a) configurations."""
    rng = SplitMix64(seed)
    out = []
    while len(out) < trials:
        x = rng.in_range(50, x_max)
        d = rng.in_range(1, 4)
        z1 = 1.5 + rng.unit() * 8.0
        z2 = z1 + rng.unit() * (math.sqrt(2 * x / d) - z1 if math.sqrt(2 * x / d) > z1 else 5.0)
        q1 = rng.in_range(1, 12)
        q2 = rng.in_range(1, 8)
        a = rng.in_range(0, q1 * q2 - 1) if q1 * q2 > 1 else 0
        if math.gcd(a, q1 * q2) != 1:
            continue
        out.append((x, d, z1, z2, q1, q2, a))
    return out
