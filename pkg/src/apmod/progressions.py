"""Exact prime counting in progressions, S-values, moduli families, scans.

Two range conventions coexist deliberately: pi_ap counts primes p <= x, while
s_value counts n ~ x/d, i.e. n in (x/d, 2x/d].  Every function documents which
one it uses.  S-values are exact integer triples (no floating point) so the
sieve identities downstream can be checked exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .arith import euler_phi, mobius
from .parallel import ordered_map
from .primes import least_prime_factor_table, sieve_upto


@dataclass(frozen=True)
class SValue:
    """Exact value of a signed progression count.

    Represents  in_class - coprime/phi_q  where in_class counts the summand
    weighted by the congruence indicator and coprime by the coprimality
    indicator.  Two SValues over the same modulus add componentwise.
    """

    in_class: int
    coprime: int
    phi_q: int

    def __post_init__(self):
        if self.phi_q < 1:
            raise ValueError("phi_q must be positive")

    @property
    def value(self) -> Fraction:
        return Fraction(self.in_class * self.phi_q - self.coprime, self.phi_q)

    def __add__(self, other: "SValue") -> "SValue":
        if self.phi_q != other.phi_q:
            raise ValueError("cannot add SValues over different moduli")
        return SValue(
            self.in_class + other.in_class, self.coprime + other.coprime, self.phi_q
        )

    def __sub__(self, other: "SValue") -> "SValue":
        if self.phi_q != other.phi_q:
            raise ValueError("cannot subtract SValues over different moduli")
        return SValue(
            self.in_class - other.in_class, self.coprime - other.coprime, self.phi_q
        )

    def __neg__(self) -> "SValue":
        return SValue(-self.in_class, -self.coprime, self.phi_q)

    @staticmethod
    def zero(phi_q: int) -> "SValue":
        return SValue(0, 0, phi_q)

    def triple(self) -> tuple[int, int, int]:
        return (self.in_class, self.coprime, self.phi_q)


@dataclass(frozen=True)
class DiscrepancyRecord:
    """One modulus of a discrepancy scan: pi(x; q, a) against pi(x)/phi(q)."""

    x: int
    q: int
    a: int
    pi_ap: int
    expected: Fraction
    delta: float

    def __post_init__(self):
        if math.gcd(self.a, self.q) != 1:
            raise ValueError(f"residue {self.a} not coprime to modulus {self.q}")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")


@dataclass
class ModuliFamily:
    """A realized set of moduli to scan, with its construction parameters.

    kind: "box" (pairs (q1, q2) with q1 <= Q1, q2 <= Q2), "divisor-window"
    (q <= x^(1/2+delta) having a divisor in an exponent window), or "dyadic"
    (q in [qlo, qhi]).  members holds the realized moduli; for the box kind,
    pairs holds the (q1, q2) list, so repeated moduli keep their multiplicity.
    """

    kind: str
    x: int
    a: int
    members: list[int]
    pairs: list[tuple[int, int]] = field(default_factory=list)
    params: dict = field(default_factory=dict)
    flagged: list[int] = field(default_factory=list)


def pi_ap(x: int, q: int, a: int) -> int:
    """#{p <= x prime : p = a mod q}.  gcd(a, q) > 1 is allowed (count 0 or 1)."""
    if q < 1:
        raise ValueError("modulus must be >= 1")
    if not 0 <= a < q:
        raise ValueError(f"residue {a} outside [0, {q})")
    primes = sieve_upto(int(x))
    if q == 1:
        return int(len(primes))
    return int(np.count_nonzero(primes % q == a))


def _rough_mask(lo: int, hi: int, z: float, inclusive: bool) -> np.ndarray:
    """Boolean mask over n in [lo, hi]: P^-(n) > z (or >= z when inclusive)."""
    lpf = least_prime_factor_table(hi)
    vals = lpf[lo : hi + 1]
    return vals >= z if inclusive else vals > z


def s_value(
    x: int,
    d: int,
    z: float,
    q1: int,
    q2: int,
    a: int,
    extra: Callable[[int], bool] | None = None,
    inclusive: bool = False,
) -> SValue:
    """Exact S_d(z) over n ~ x/d, i.e. n in (x/d, 2x/d].

    Sums, over integers n in the dyadic window with P^-(n) > z (P^-(n) >= z
    when ``inclusive`` is set, which is how the subtracted terms of an exact
    Buchstab split arise for prime thresholds z), the signed weight

        1[d*n = a mod q1*q2] - 1[(d*n, q1*q2) = 1] / phi(q1*q2),

    returned as an exact integer triple.  ``extra`` further restricts n.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    q = q1 * q2
    if q < 1:
        raise ValueError("moduli must be >= 1")
    if math.gcd(a, q) != 1:
        raise ValueError(f"residue {a} not coprime to modulus {q}")
    phi_q = euler_phi(q)
    lo = x // d + 1
    hi = (2 * x) // d
    if hi < lo:
        return SValue.zero(phi_q)
    mask = _rough_mask(lo, hi, z, inclusive)
    ns = np.arange(lo, hi + 1)[mask]
    if extra is not None:
        ns = np.array([n for n in ns if extra(int(n))], dtype=np.int64)
    if len(ns) == 0:
        return SValue.zero(phi_q)
    dn = d * ns
    in_class = int(np.count_nonzero(dn % q == a % q))
    coprime = int(np.count_nonzero(np.gcd(dn, q) == 1))
    return SValue(in_class, coprime, phi_q)


def bv_aggregate(
    x: int, family: ModuliFamily, threads: int = 1
) -> tuple[float, list[DiscrepancyRecord]]:
    """Total discrepancy sum(|pi(x;q,a) - pi(x)/phi(q)|) over family members.

    The expected value pi(x)/phi(q) is kept as an exact rational until the
    final absolute value.  Records are sorted by modulus.  The per-modulus
    jobs are pure; ``threads`` only batches them.
    """
    primes = sieve_upto(int(x))
    pix = len(primes)
    a = family.a
    items = family.pairs if family.kind == "box" else [(q, 1) for q in family.members]

    def job(pair: tuple[int, int]) -> DiscrepancyRecord:
        q1, q2 = pair
        q = q1 * q2
        aa = a % q
        cnt = pix if q == 1 else int(np.count_nonzero(primes % q == aa))
        expected = Fraction(pix, euler_phi(q))
        delta = abs(Fraction(cnt) - expected)
        return DiscrepancyRecord(
            x=x, q=q, a=aa, pi_ap=cnt, expected=expected, delta=float(delta)
        )

    records = ordered_map(job, items, threads)
    records.sort(key=lambda r: (r.q, r.a))
    total = float(sum((abs(Fraction(r.pi_ap) - r.expected) for r in records), Fraction(0)))
    return total, records


def box_constraints(x: int, q1_max: int, q2_max: int, epsilon: float = 0.0) -> dict[str, bool]:
    """The three box-shape constraints, evaluated and reported (not enforced).

    They govern when the asymptotic discrepancy bound applies; at desk scale
    they are pure diagnostics on the (Q1, Q2) exponent geometry.
    """
    return {
        "Q1*Q2^2<x^(1-100eps)": q1_max * q2_max**2 < x ** (1 - 100 * epsilon),
        "Q1^12*Q2^7<x^(4-100eps)": q1_max**12 * q2_max**7 < x ** (4 - 100 * epsilon),
        "Q1^20*Q2^19<x^(10-100eps)": q1_max**20 * q2_max**19 < x ** (10 - 100 * epsilon),
    }


def bifactor_box_family(
    x: int, q1_max: int, q2_max: int, a: int, epsilon: float = 0.0
) -> ModuliFamily:
    """All pairs (q1 <= Q1, q2 <= Q2) with (q1, a) = (q2, a) = 1.

    The shape constraints relating Q1, Q2 and x are evaluated into
    params["constraints"] for reporting; violating them never filters the
    family.
    """
    pairs = [
        (q1, q2)
        for q1 in range(1, q1_max + 1)
        if math.gcd(q1, a) == 1
        for q2 in range(1, q2_max + 1)
        if math.gcd(q2, a) == 1
    ]
    members = [q1 * q2 for q1, q2 in pairs]
    return ModuliFamily(
        kind="box",
        x=x,
        a=a,
        members=members,
        pairs=pairs,
        params={
            "Q1": q1_max,
            "Q2": q2_max,
            "constraints": box_constraints(x, q1_max, q2_max, epsilon),
        },
    )


def dyadic_family(x: int, q_lo: int, q_hi: int, a: int) -> ModuliFamily:
    """All q in [q_lo, q_hi] with (q, a) = 1."""
    members = [q for q in range(q_lo, q_hi + 1) if math.gcd(q, a) == 1]
    return ModuliFamily(
        kind="dyadic", x=x, a=a, members=members, params={"qlo": q_lo, "qhi": q_hi}
    )


def divisor_window(x: int, delta: float, eta: float) -> tuple[float, float]:
    """Open window (x^(2*delta+eta), min(x^(1/10-7*delta/5-eta), x^(1/2-19*delta-eta)))."""
    lo = x ** (2 * delta + eta)
    hi = min(x ** (0.1 - 7 * delta / 5 - eta), x ** (0.5 - 19 * delta - eta))
    return lo, hi


def _check_window_params(delta: float, eta: float) -> None:
    if not 0 < delta < 1 / 42:
        raise ValueError(f"delta = {delta} outside (0, 1/42)")
    if not 0 < eta < (1 - 42 * delta) / 4:
        raise ValueError(f"eta = {eta} outside (0, (1-42*delta)/4)")


def _has_window_divisor(q: int, lo: float, hi: float) -> bool:
    d = 1
    while d * d <= q:
        if q % d == 0:
            for t in (d, q // d):
                if lo < t < hi:
                    return True
        d += 1
    return False


def divisor_window_family(x: int, delta: float, eta: float, a: int) -> ModuliFamily:
    """All q <= x^(1/2+delta), (q, a) = 1, with a divisor in the open window.

    Window endpoints are floats; divisor testing is exact integer comparison
    against them.  A modulus whose membership flips when the endpoints are
    widened by one ulp on each side is recorded in ``flagged`` (borderline)
    rather than silently misclassified.
    """
    _check_window_params(delta, eta)
    lo, hi = divisor_window(x, delta, eta)
    lo_wide = math.nextafter(lo, -math.inf)
    hi_wide = math.nextafter(hi, math.inf)
    lo_narrow = math.nextafter(lo, math.inf)
    hi_narrow = math.nextafter(hi, -math.inf)
    q_max = int(x ** (0.5 + delta))
    members, flagged = [], []
    for q in range(1, q_max + 1):
        if math.gcd(q, a) != 1:
            continue
        nominal = _has_window_divisor(q, lo, hi)
        if _has_window_divisor(q, lo_wide, hi_wide) != _has_window_divisor(
            q, lo_narrow, hi_narrow
        ):
            flagged.append(q)
        if nominal:
            members.append(q)
    return ModuliFamily(
        kind="divisor-window",
        x=x,
        a=a,
        members=members,
        params={"delta": delta, "eta": eta, "window": (lo, hi), "q_max": q_max},
        flagged=flagged,
    )


def exceptional_fraction(
    Q: int, x: int, delta: float, eta: float, a: int
) -> dict[str, float]:
    """Fraction of q in [Q, 2Q], (q, a) = 1, with no divisor in the window.

    Returned alongside the asymptotic comparison value 18*delta*phi(a)/a as a
    diagnostic; the bound is not asserted.
    """
    _check_window_params(delta, eta)
    lo, hi = divisor_window(x, delta, eta)
    total = 0
    exceptional = 0
    for q in range(Q, 2 * Q + 1):
        if math.gcd(q, a) != 1:
            continue
        total += 1
        if not _has_window_divisor(q, lo, hi):
            exceptional += 1
    frac = exceptional / total if total else 0.0
    bound = 18 * delta * euler_phi(a) / a
    return {
        "fraction": frac,
        "exceptional": exceptional,
        "total": total,
        "reference_bound": bound,
    }


_BDH_SEQS = ("unit", "mobius", "prime-indicator")


def bdh_statistic(N: int, Q: int, seq_id: str = "unit") -> float:
    """Barban-Davenport-Halberstam style mean-square discrepancy, exact then rounded.

    sum_{q <= Q} sum_{b mod q, (b,q)=1} | sum_{n ~ N} alpha_n
        (1[n = b mod q] - 1[(n,q)=1]/phi(q)) |^2

    over n in (N, 2N], with alpha the unit, Mobius, or prime-indicator
    sequence.  Diagnostic only: the decay in N/Q is reported, not asserted.
    """
    if seq_id not in _BDH_SEQS:
        raise ValueError(f"seq_id must be one of {_BDH_SEQS}")
    if not Q < N:
        raise ValueError("requires Q < N")
    ns = np.arange(N + 1, 2 * N + 1, dtype=np.int64)
    if seq_id == "unit":
        alpha = np.ones(len(ns), dtype=np.int64)
    elif seq_id == "mobius":
        alpha = np.array([mobius(int(n)) for n in ns], dtype=np.int64)
    else:
        lpf = least_prime_factor_table(2 * N)
        alpha = (lpf[ns] == ns).astype(np.int64)
    total = Fraction(0)
    for q in range(1, Q + 1):
        phi_q = euler_phi(q)
        res = ns % q
        per_b = np.zeros(q, dtype=np.int64)
        np.add.at(per_b, res, alpha)
        units = [b for b in range(q) if math.gcd(b, q) == 1]
        cop = int(sum(per_b[b] for b in units))
        for b in units:
            diff = Fraction(int(per_b[b])) - Fraction(cop, phi_q)
            total += diff * diff
    return float(total)
