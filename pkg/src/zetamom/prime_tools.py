"""Prime sieving, block schedules, and multiplicative arithmetic functions.

Everything downstream (proxy polynomials, Euler products, main terms) pulls
its primes and coefficient arithmetic from here.  All prime sums are
accumulated with error-free transformations (math.fsum) in ascending order so
results are bit-stable across runs and worker counts.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    DegenerateSchedule,
    DenominatorVanishes,
    FactorizationIncomplete,
    LimitTooLarge,
    RangeBeyondTable,
)

_SIEVE_MAX = 10**9
_SEGMENT = 1 << 22
_CACHE_MAGIC = b"PTAB0001"


@dataclass(frozen=True)
class PrimeTable:
    """Immutable list of all primes up to `limit`, with cached logs."""

    limit: int
    primes: np.ndarray  # int64, ascending
    logs: np.ndarray    # float64, log of each prime

    def count(self) -> int:
        return int(self.primes.size)


def _simple_sieve(limit: int) -> np.ndarray:
    is_comp = np.zeros(limit + 1, dtype=bool)
    is_comp[:2] = True
    for p in range(2, int(math.isqrt(limit)) + 1):
        if not is_comp[p]:
            is_comp[p * p:: p] = True
    return np.nonzero(~is_comp)[0].astype(np.int64)


def sieve(limit: int) -> PrimeTable:
    """Segmented sieve of Eratosthenes; memory O(sqrt(limit) + segment)."""
    if limit > _SIEVE_MAX:
        raise LimitTooLarge(f"sieve limit {limit} exceeds {_SIEVE_MAX}")
    limit = int(limit)
    if limit < 2:
        raise ValueError("sieve limit must be at least 2")
    if limit <= _SEGMENT:
        primes = _simple_sieve(limit)
    else:
        base = _simple_sieve(int(math.isqrt(limit)))
        chunks = [base]
        lo = int(base[-1]) + 1
        while lo <= limit:
            hi = min(lo + _SEGMENT, limit + 1)
            flags = np.ones(hi - lo, dtype=bool)
            for p in base:
                p = int(p)
                if p * p >= hi:
                    break
                start = max(p * p, ((lo + p - 1) // p) * p)
                flags[start - lo:: p] = False
            chunks.append((np.nonzero(flags)[0] + lo).astype(np.int64))
            lo = hi
        primes = np.concatenate(chunks)
    return PrimeTable(limit=limit, primes=primes, logs=np.log(primes.astype(np.float64)))


def save_table(table: PrimeTable, path: str) -> None:
    """Flat binary cache: 8-byte magic, then little-endian uint64 primes."""
    with open(path, "wb") as f:
        f.write(_CACHE_MAGIC)
        f.write(struct.pack("<Q", table.limit))
        f.write(table.primes.astype("<u8").tobytes())


def load_table(path: str) -> PrimeTable:
    with open(path, "rb") as f:
        magic = f.read(8)
        if magic != _CACHE_MAGIC:
            raise ValueError("not a prime table cache")
        (limit,) = struct.unpack("<Q", f.read(8))
        primes = np.frombuffer(f.read(), dtype="<u8").astype(np.int64)
    return PrimeTable(limit=int(limit), primes=primes, logs=np.log(primes.astype(np.float64)))


# ---------------------------------------------------------------------------
# block schedules


@dataclass(frozen=True)
class BlockSchedule:
    """Prime-block parameters (T_j, P_j, K_j, ell) in the three variants.

    `boundaries` holds T_0 < T_1 < ... < T_ell after dropping any formula
    boundary that fails to increase or whose block contains no prime (both
    happen routinely at desk-scale T; the formulas only separate for
    astronomically large T).  `ell_nominal` is the raw iterated-log count.
    """

    variant: str
    T: float
    beta: float
    ell_threshold: float
    T0: float
    ell: int
    ell_nominal: int
    boundaries: tuple  # length ell + 1
    P: tuple           # length ell
    K: tuple           # length ell
    table: PrimeTable = field(repr=False, compare=False, default=None)

    def block(self, j: int):
        """Half-open prime range (lo, hi] of block j, 1-based."""
        return self.boundaries[j - 1], self.boundaries[j]


def _iterated_log_count(T: float, threshold: float) -> int:
    val = math.log(T)
    ell = 0
    while val >= threshold:
        ell += 1
        val = math.log(val)
    return ell


def _iterated_log(T: float, j: int) -> float:
    val = T
    for _ in range(j):
        val = math.log(val)
    return val


def block_schedule(T: float, beta: float, variant: str, ell_threshold: float = 2.0,
                   table: PrimeTable | None = None) -> BlockSchedule:
    """Build a block schedule; P_j computed exactly from the sieve."""
    if T < 100:
        raise ValueError("T must be at least 100")
    if not (0 < beta <= 4):
        raise ValueError("beta must lie in (0, 4]")
    if ell_threshold < 2:
        raise ValueError("ell_threshold must be at least 2")
    ell_nominal = _iterated_log_count(T, ell_threshold)
    if ell_nominal == 0:
        raise DegenerateSchedule(f"no blocks: log T = {math.log(T):.3g} < {ell_threshold}")

    logT = math.log(T)
    if variant == "UpperBound":
        T0 = math.e**2
        raw = [math.exp(logT / _iterated_log(T, j + 1) ** 2) for j in range(1, ell_nominal + 1)]
        k_factor = 250.0
    elif variant == "LowerSubunit":
        T0 = math.e**2
        raw = [math.exp(beta * logT / _iterated_log(T, j) ** 2) for j in range(1, ell_nominal + 1)]
        k_factor = 250.0
    elif variant == "LowerSuperunit":
        T0 = beta**4 * math.e**2
        raw = [math.exp(logT / (beta**2 * _iterated_log(T, j) ** 2)) for j in range(1, ell_nominal + 1)]
        k_factor = 250.0 * beta**2
    else:
        raise ValueError(f"unknown schedule variant {variant!r}")

    max_bound = max([T0] + raw)
    if table is None or table.limit < max_bound:
        if max_bound > _SIEVE_MAX:
            raise LimitTooLarge(f"schedule boundary {max_bound:.3g} beyond sievable range")
        table = sieve(max(int(math.ceil(max_bound)) + 1, 100))

    boundaries = [T0]
    P = []
    for Tj in raw:
        lo = boundaries[-1]
        if Tj <= lo * (1 + 1e-12):
            continue
        Pj = block_variance(table, max(lo, 2.0), Tj) if Tj > 2 else 0.0
        if Pj <= 0.0:
            continue
        boundaries.append(Tj)
        P.append(Pj)
    ell = len(P)
    if ell == 0:
        raise DegenerateSchedule(
            f"all formula boundaries collapse below T_0 = {T0:.3g} at T = {T:.3g}")
    K = [k_factor * Pj for Pj in P]
    return BlockSchedule(variant=variant, T=T, beta=beta, ell_threshold=ell_threshold,
                         T0=T0, ell=ell, ell_nominal=ell_nominal,
                         boundaries=tuple(boundaries), P=tuple(P), K=tuple(K),
                         table=table)


def schedule_from_boundaries(boundaries, T: float, beta: float,
                             table: PrimeTable) -> BlockSchedule:
    """Schedule with caller-chosen block boundaries (desk-scale experiments)."""
    boundaries = [float(b) for b in boundaries]
    if sorted(boundaries) != boundaries:
        raise ValueError("boundaries must be ascending")
    P = [block_variance(table, max(boundaries[j], 2.0), boundaries[j + 1])
         for j in range(len(boundaries) - 1)]
    if any(p <= 0 for p in P):
        raise DegenerateSchedule("custom schedule contains a primeless block")
    return BlockSchedule(variant="custom", T=T, beta=beta, ell_threshold=float("nan"),
                         T0=boundaries[0], ell=len(P), ell_nominal=len(P),
                         boundaries=tuple(boundaries), P=tuple(P),
                         K=tuple(250.0 * p for p in P), table=table)


# ---------------------------------------------------------------------------
# prime sums


def _primes_in(table: PrimeTable, lo: float, hi: float):
    i = np.searchsorted(table.primes, math.floor(lo), side="right")
    j = np.searchsorted(table.primes, math.floor(hi), side="right")
    return table.primes[i:j], table.logs[i:j]


def block_variance(table: PrimeTable, lo: float, hi: float) -> float:
    """P_j = sum of 1/p over primes lo < p <= hi (exact sieved sum)."""
    if lo < 2 or lo > hi or hi > table.limit:
        raise RangeBeyondTable(f"range ({lo}, {hi}] not covered by table limit {table.limit}")
    p, _ = _primes_in(table, lo, hi)
    return math.fsum(1.0 / p for p in p.astype(np.float64))


def prime_cos_sum(h: float, X: float, table: PrimeTable) -> float:
    """Sum of cos(h log p)/p over p <= X, ascending compensated accumulation."""
    if X < 2 or X > table.limit:
        raise RangeBeyondTable(f"X = {X} not covered by table limit {table.limit}")
    p, logs = _primes_in(table, 1.0, X)
    terms = np.cos(h * logs) / p.astype(np.float64)
    return math.fsum(terms.tolist())


# ---------------------------------------------------------------------------
# multiplicative functions


def factorize(n: int, table: PrimeTable):
    """(prime, exponent) pairs by trial division against the table."""
    if n < 1:
        raise ValueError("n must be positive")
    n = int(n)
    out = []
    for p in table.primes:
        p = int(p)
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    if n > 1:
        if n > table.limit**2:
            raise FactorizationIncomplete(f"cofactor {n} exceeds table.limit**2")
        out.append((n, 1))
    return out


def omega_big(n: int, table: PrimeTable) -> int:
    """Omega(n): number of prime factors with multiplicity."""
    return sum(e for _, e in factorize(n, table))


def g_mult(n: int, table: PrimeTable) -> Fraction:
    """g(p^a) = 1/a!, completely determined by multiplicativity."""
    out = Fraction(1)
    for _, e in factorize(n, table):
        out /= math.factorial(e)
    return out


def divisor_d(n: int, table: PrimeTable) -> int:
    out = 1
    for _, e in factorize(n, table):
        out *= e + 1
    return out


def divisor_d3(n: int, table: PrimeTable) -> int:
    """Ternary divisor function: d3(p^e) = (e+1)(e+2)/2."""
    out = 1
    for _, e in factorize(n, table):
        out *= (e + 1) * (e + 2) // 2
    return out


def _sigma_pp(z1: complex, z2: complex, p: int, m: int) -> complex:
    """sigma_{z1,z2}(p^m) per prime power."""
    if m < 0:
        return 0.0 + 0.0j  # convention sigma(p^{-1}) = 0
    if m == 0:
        return 1.0 + 0.0j
    lp = math.log(p)
    x1 = np.exp(-z1 * lp)
    x2 = np.exp(-z2 * lp)
    if abs(x1 - x2) > 1e-6 * max(abs(x1), abs(x2)):
        return (x1 ** (m + 1) - x2 ** (m + 1)) / (x1 - x2)
    # nearly equal shifts: the geometric ratio is ill-conditioned, sum directly
    return sum(x1**a * x2 ** (m - a) for a in range(m + 1))


def sigma_shifted(z1: complex, z2: complex, n: int, table: PrimeTable) -> complex:
    """Generalized divisor sum: sum over ab = n of a^{-z1} b^{-z2}."""
    out = 1.0 + 0.0j
    for p, e in factorize(n, table):
        out *= _sigma_pp(z1, z2, p, e)
    return out


def _b_pp(z, p: int, m: int) -> complex:
    z1, z2, z3, z4 = z
    lp = math.log(p)
    den = 1.0 - np.exp(-(2.0 + z1 + z2 + z3 + z4) * lp)
    if abs(den) < 1e-12:
        raise DenominatorVanishes(f"B denominator vanishes at p = {p}")
    num = (_sigma_pp(z3, z4, p, m)
           - _sigma_pp(z3, z4, p, m - 1) * np.exp(-(1.0 + z3 + z4) * lp)
           * (np.exp(-z1 * lp) + np.exp(-z2 * lp))
           + _sigma_pp(z3, z4, p, m - 2) * np.exp(-(2.0 + z1 + z2 + 2 * z3 + 2 * z4) * lp))
    return num / den


def b_coeff(z, n: int, table: PrimeTable) -> complex:
    """Fourth-moment correction factor B_z(n), multiplicative over p^m || n."""
    out = 1.0 + 0.0j
    for p, e in factorize(n, table):
        out *= _b_pp(z, p, e)
    return complex(out)


def b_coeff_series(z, p: int, m: int, terms: int = 60) -> complex:
    """Slow reference for B_z(p^m): ratio of two directly summed series.

    Production code always uses the closed form; this converges too slowly
    near the edge of the shift box and exists only as an independent oracle.
    """
    z1, z2, z3, z4 = z
    num = 0.0 + 0.0j
    den = 0.0 + 0.0j
    for j in range(terms):
        pj = math.exp(-j * math.log(p))
        s12 = _sigma_pp(z1, z2, p, j)
        num += s12 * _sigma_pp(z3, z4, p, j + m) * pj
        den += s12 * _sigma_pp(z3, z4, p, j) * pj
    return complex(num / den)


def b_continuity_gap(p: int, z, w) -> float:
    """|B_z(p) - B_w(p)| for a single prime."""
    return abs(_b_pp(tuple(z), p, 1) - _b_pp(tuple(w), p, 1))
