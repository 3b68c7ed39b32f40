"""Sparse Dirichlet polynomials and the proxy-polynomial machinery.

The prime sums P_j(s) = Re sum p^{-s} over a block, their truncated
exponentials N_j(s;beta), twisted coefficient products, the Q/R majorants,
and the mean-value / splitting / interpolation / Hoelder witness checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numba import njit
from scipy.special import logsumexp

from .errors import (
    BlockOutOfRange,
    BlocksNotDisjoint,
    LengthExceedsWindow,
    SupportOverflow,
)
from . import prime_tools as pt
from . import zeta_engine as ze

_SUPPORT_BUDGET = 2_000_000


@dataclass(frozen=True)
class DirichletPoly:
    """Sparse finite Dirichlet series sum a_n n^{-s}."""

    support: np.ndarray        # int64, strictly ascending
    coeffs: np.ndarray         # complex128, no stored zeros
    length_bound: int

    def __post_init__(self):
        if self.support.size != self.coeffs.size:
            raise ValueError("support/coeffs size mismatch")
        if self.support.size and self.length_bound < int(self.support[-1]):
            raise ValueError("length_bound below max support element")


def make_poly(support, coeffs, length_bound=None) -> DirichletPoly:
    support = np.asarray(support, dtype=np.int64)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    order = np.argsort(support, kind="stable")
    support, coeffs = support[order], coeffs[order]
    if support.size and np.any(np.diff(support) <= 0):
        raise ValueError("support must be strictly ascending (no duplicates)")
    keep = coeffs != 0
    support, coeffs = support[keep], coeffs[keep]
    if length_bound is None:
        length_bound = int(support[-1]) if support.size else 1
    return DirichletPoly(support=support, coeffs=coeffs, length_bound=int(length_bound))


def prime_block_poly(schedule: pt.BlockSchedule, j: int, s_shift: complex = 0.0) -> DirichletPoly:
    """P_j as a Dirichlet polynomial over the block primes, with the
    imaginary shift twist p^{-i Im(s_shift)} baked into the coefficients."""
    if not (1 <= j <= schedule.ell):
        raise BlockOutOfRange(f"block {j} outside 1..{schedule.ell}")
    lo, hi = schedule.block(j)
    i0 = np.searchsorted(schedule.table.primes, math.floor(lo), side="right")
    i1 = np.searchsorted(schedule.table.primes, math.floor(hi), side="right")
    p = schedule.table.primes[i0:i1]
    h = complex(s_shift).imag
    coeffs = np.exp(-1j * h * schedule.table.logs[i0:i1])
    return make_poly(p, coeffs, length_bound=int(p[-1]))


def _poly_mul_dict(d1: dict, poly2, length_cap: int) -> dict:
    out = {}
    s2, c2 = poly2
    for n1 in sorted(d1):
        c1 = d1[n1]
        for n2, cc in zip(s2.tolist(), c2.tolist()):
            n = n1 * n2
            if n > length_cap:
                break
            out[n] = out.get(n, 0.0 + 0.0j) + c1 * cc
    return out


def truncated_exp(poly: DirichletPoly, beta: float, K: int,
                  length_cap: int | None = None,
                  support_budget: int = _SUPPORT_BUDGET) -> DirichletPoly:
    """Truncated exponential sum_{m<=K} (beta * poly)^m / m! as a sparse poly.

    `poly` must be supported on primes, so the m-th power carries exactly
    Omega(n) = m and the Omega(n) <= K cap is the power cap.  Coefficient of n
    comes out as beta^{Omega(n)} g(n) times the baked-in twists.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    if poly.support.size and poly.support[0] <= 1:
        raise ValueError("truncated_exp needs a polynomial supported on primes")
    if length_cap is None:
        length_cap = _SUPPORT_BUDGET
    acc = {1: 1.0 + 0.0j}
    cur = {1: 1.0 + 0.0j}
    scaled = (poly.support, poly.coeffs)
    for m in range(1, K + 1):
        nxt = _poly_mul_dict(cur, scaled, length_cap)
        if not nxt:
            break
        cur = {n: c * (beta / m) for n, c in nxt.items()}
        if len(acc) + len(cur) > support_budget:
            raise SupportOverflow(f"support exceeded budget {support_budget}")
        for n in sorted(cur):
            acc[n] = acc.get(n, 0.0 + 0.0j) + cur[n]
    ns = sorted(acc)
    return make_poly(ns, [acc[n] for n in ns], length_bound=min(length_cap, max(ns)))


def poly_product(polys, length_cap: int | None = None) -> DirichletPoly:
    """Plain sparse product of several Dirichlet polynomials."""
    cap = length_cap
    if cap is None:
        cap = 1
        for p in polys:
            cap *= p.length_bound
    acc = {1: 1.0 + 0.0j}
    for p in polys:
        acc = _poly_mul_dict(acc, (p.support, p.coeffs), cap)
        if len(acc) > _SUPPORT_BUDGET:
            raise SupportOverflow("product support exceeded budget")
    ns = sorted(acc)
    return make_poly(ns, [acc[n] for n in ns], length_bound=cap)


def twisted_coeff(n: int, gamma: float, h1: float, h2: float, K: int,
                  table: pt.PrimeTable) -> complex:
    """Coefficient of n in N_j(s+ih1;gamma) N_j(s+ih2;gamma):
    sum over cd = n of gamma^{Omega(c)+Omega(d)} g(c) g(d) c^{-ih1} d^{-ih2},
    restricted to Omega(c), Omega(d) <= K (the two factors' truncations)."""
    divisors = [1]
    for p, e in pt.factorize(n, table):
        divisors = [d * p**k for d in divisors for k in range(e + 1)]
    total = 0.0 + 0.0j
    for c in sorted(divisors):
        d = n // c
        oc, od = pt.omega_big(c, table), pt.omega_big(d, table)
        if oc > K or od > K:
            continue
        gc = float(pt.g_mult(c, table)) * float(pt.g_mult(d, table))
        total += (gamma ** (oc + od)) * gc * np.exp(-1j * (h1 * math.log(c) + h2 * math.log(d)))
    return complex(total)


# ---------------------------------------------------------------------------
# evaluation


@njit(cache=True, nogil=True)
def _eval_kernel(logn, are, aim, ts, out):
    for i in range(ts.size):
        t = ts[i]
        sr = 0.0
        cr = 0.0
        si = 0.0
        ci = 0.0
        for k in range(logn.size):
            ph = -t * logn[k]
            c = np.cos(ph)
            s = np.sin(ph)
            xr = are[k] * c - aim[k] * s
            xi = are[k] * s + aim[k] * c
            # Neumaier compensated accumulation, fixed ascending-n order
            tr = sr + xr
            if abs(sr) >= abs(xr):
                cr += (sr - tr) + xr
            else:
                cr += (xr - tr) + sr
            sr = tr
            ti = si + xi
            if abs(si) >= abs(xi):
                ci += (si - ti) + xi
            else:
                ci += (xi - ti) + si
            si = ti
        out[i] = complex(sr + cr, si + ci)


def eval_grid(poly: DirichletPoly, sigma: float, t_grid, workers: int = 1) -> np.ndarray:
    """sum a_n n^{-sigma-it} for each t; bit-identical for any worker count."""
    ts = np.ascontiguousarray(t_grid, dtype=np.float64)
    logn = np.log(poly.support.astype(np.float64))
    amps = poly.coeffs * np.exp(-sigma * logn)
    are = np.ascontiguousarray(amps.real)
    aim = np.ascontiguousarray(amps.imag)
    out = np.empty(ts.size, dtype=np.complex128)
    if workers <= 1 or ts.size < 64:
        _eval_kernel(logn, are, aim, ts, out)
        return out
    # each grid point is independent; chunked threads write disjoint slices
    from concurrent.futures import ThreadPoolExecutor
    bounds = np.linspace(0, ts.size, workers + 1).astype(np.int64)
    with ThreadPoolExecutor(max_workers=workers) as ex:
        futs = [ex.submit(_eval_kernel, logn, are, aim, ts[a:b], out[a:b])
                for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        for f in futs:
            f.result()
    return out


def to_csv(poly: DirichletPoly, path: str) -> None:
    with open(path, "w") as f:
        f.write("n,re,im\n")
        for n, c in zip(poly.support.tolist(), poly.coeffs.tolist()):
            f.write(f"{n},{c.real:.17g},{c.imag:.17g}\n")


def from_csv(path: str) -> DirichletPoly:
    ns, cs = [], []
    with open(path) as f:
        next(f)
        for line in f:
            n, re, im = line.strip().split(",")
            ns.append(int(n))
            cs.append(complex(float(re), float(im)))
    return make_poly(ns, cs)


# ---------------------------------------------------------------------------
# real prime sums P_j and the proxy family


@njit(cache=True, nogil=True)
def _p_value_kernel(logp, rsqrtp, xs, out):
    for i in range(xs.size):
        x = xs[i]
        s = 0.0
        c = 0.0
        for k in range(logp.size):
            v = np.cos(x * logp[k]) * rsqrtp[k]
            t = s + v
            if abs(s) >= abs(v):
                c += (s - t) + v
            else:
                c += (v - t) + s
            s = t
        out[i] = s + c
    return out


@dataclass(frozen=True)
class ProxyFamily:
    """Per-block data needed to evaluate P_j and N_j(1/2+ix; gamma)."""

    beta: float
    schedule: pt.BlockSchedule
    shifts: tuple                      # (h1, h2)
    block_logp: tuple = field(repr=False)   # log p arrays per block
    block_rsqrtp: tuple = field(repr=False)  # p^{-1/2} arrays per block

    @property
    def ell(self) -> int:
        return self.schedule.ell


def proxy_family(beta: float, schedule: pt.BlockSchedule, shifts=(0.0, 0.0)) -> ProxyFamily:
    logs, rs = [], []
    for j in range(1, schedule.ell + 1):
        lo, hi = schedule.block(j)
        tab = schedule.table
        i0 = np.searchsorted(tab.primes, math.floor(lo), side="right")
        i1 = np.searchsorted(tab.primes, math.floor(hi), side="right")
        logs.append(np.ascontiguousarray(tab.logs[i0:i1]))
        rs.append(np.ascontiguousarray(1.0 / np.sqrt(tab.primes[i0:i1].astype(np.float64))))
    return ProxyFamily(beta=float(beta), schedule=schedule, shifts=tuple(shifts),
                       block_logp=tuple(logs), block_rsqrtp=tuple(rs))


def p_values(family: ProxyFamily, j: int, xs) -> np.ndarray:
    """P_j(1/2 + ix) = Re sum over block primes of p^{-1/2-ix}, batched over x."""
    if not (1 <= j <= family.ell):
        raise BlockOutOfRange(f"block {j} outside 1..{family.ell}")
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    out = np.empty(xs.size)
    _p_value_kernel(family.block_logp[j - 1], family.block_rsqrtp[j - 1], xs, out)
    return out


def trunc_exp_series(z: float, K: int) -> float:
    """sum_{m<=K} z^m/m! for real z, with early termination."""
    term = 1.0
    total = 1.0
    for m in range(1, K + 1):
        term *= z / m
        total += term
        if m > abs(z) and abs(term) < 1e-18 * max(abs(total), 1.0):
            break
    return total


# ---------------------------------------------------------------------------
# majorants


def _p_at(family: ProxyFamily, j: int, t: float, h: float) -> float:
    return float(p_values(family, j, np.array([t + h]))[0])


def q_majorant_log(schedule: pt.BlockSchedule, j: int, t: float, h: float,
                   beta: float, family: ProxyFamily | None = None) -> float:
    """log Q_{a,j}(t): Q = (12|P_j|/K_j)^{2K_j} sum_{r<=K_j/beta}(2e|P_j|/(r+1))^{2r}."""
    fam = family if family is not None else proxy_family(beta, schedule)
    if not (1 <= j <= schedule.ell):
        raise BlockOutOfRange(f"block {j} outside 1..{schedule.ell}")
    P = abs(_p_at(fam, j, t, h))
    K = int(math.ceil(schedule.K[j - 1]))
    if P == 0.0:
        return -math.inf
    lead = 2.0 * K * (math.log(12.0 * P) - math.log(K))
    rmax = int(K / beta)
    r = np.arange(rmax + 1, dtype=np.float64)
    logterms = 2.0 * r * (math.log(2.0 * math.e) + math.log(P) - np.log(r + 1.0))
    return lead + float(logsumexp(logterms))


def q_majorant(schedule, j, t, h, beta, family=None) -> float:
    lq = q_majorant_log(schedule, j, t, h, beta, family)
    return math.exp(lq) if lq < 700 else math.inf


def r_majorant_log(schedule: pt.BlockSchedule, j: int, t: float, h: float,
                   beta: float, family: ProxyFamily | None = None) -> float:
    """log R_{a,j}(t) with R = (12 beta |P_j| / K_j)^{2 K_j}."""
    fam = family if family is not None else proxy_family(beta, schedule)
    if not (1 <= j <= schedule.ell):
        raise BlockOutOfRange(f"block {j} outside 1..{schedule.ell}")
    P = abs(_p_at(fam, j, t, h))
    K = int(math.ceil(schedule.K[j - 1]))
    if P == 0.0:
        return -math.inf
    return 2.0 * K * (math.log(12.0 * beta * P) - math.log(K))


def r_majorant(schedule, j, t, h, beta, family=None) -> float:
    lr = r_majorant_log(schedule, j, t, h, beta, family)
    return math.exp(lr) if lr < 700 else math.inf


def trunc_exp_gap(z: complex, K: int) -> float:
    """|e^z - sum_{m<=K} z^m/m!|, stable deep below double underflow of the
    naive difference: computed as the scaled tail series when it converges."""
    if K < 1:
        raise ValueError("K must be at least 1")
    z = complex(z)
    az = abs(z)
    if az == 0.0:
        return 0.0
    if math.e * az >= K + 1:
        # tail not small; direct difference is well-conditioned here
        partial = 0.0 + 0.0j
        term = 1.0 + 0.0j
        partial += term
        for m in range(1, K + 1):
            term *= z / m
            partial += term
        return abs(np.exp(z) - partial)
    # tail = z^{K+1}/(K+1)! * sum_r z^r (K+1)!/(K+1+r)!
    s = 1.0 + 0.0j
    term = 1.0 + 0.0j
    r = 1
    while True:
        term *= z / (K + 1 + r)
        s += term
        if abs(term) < 1e-20 * abs(s):
            break
        r += 1
    log_mag = (K + 1) * math.log(az) - math.lgamma(K + 2)
    return math.exp(log_mag) * abs(s)


def trunc_exp_gap_bound(z: complex, K: int) -> float:
    """(e|z|/(K+1))^{K+1} / (1 - e|z|/(K+1)), valid when e|z| < K+1."""
    az = abs(complex(z))
    ratio = math.e * az / (K + 1)
    if ratio >= 1.0:
        raise ValueError("bound requires e|z| < K+1")
    if az == 0.0 or ratio == 0.0:   # ratio underflows for subnormal |z|
        return 0.0
    return math.exp((K + 1) * math.log(ratio)) / (1.0 - ratio)


# ---------------------------------------------------------------------------
# mean value and splitting


@njit(cache=True, nogil=True)
def _abs2_kernel(logn, are, aim, ts, out):
    for i in range(ts.size):
        t = ts[i]
        sr = 0.0
        si = 0.0
        for k in range(logn.size):
            ph = -t * logn[k]
            c = np.cos(ph)
            s = np.sin(ph)
            sr += are[k] * c - aim[k] * s
            si += are[k] * s + aim[k] * c
        out[i] = sr * sr + si * si


def _mean_abs2(poly: DirichletPoly, T: float, density: float) -> float:
    n = int(T * density)
    if n % 2 == 1:
        n += 1
    ts = np.linspace(T, 2.0 * T, n + 1)
    logn = np.log(poly.support.astype(np.float64))
    amps = poly.coeffs * np.exp(-0.5 * logn)
    vals = np.empty(ts.size)
    _abs2_kernel(logn, np.ascontiguousarray(amps.real),
                 np.ascontiguousarray(amps.imag), ts, vals)
    h = ts[1] - ts[0]
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float((h / 3.0) * np.dot(w, vals) / T)


def mean_value_gap(poly: DirichletPoly, T: float, density: float = 10.0) -> float:
    """|numeric (1/T) int_T^{2T} |poly(1/2+it)|^2 dt  -  sum |a_n|^2/n|."""
    if poly.length_bound > T / 10:
        raise LengthExceedsWindow(f"length {poly.length_bound} above T/10")
    target = float(np.sum(np.abs(poly.coeffs) ** 2 / poly.support.astype(np.float64)))
    return abs(_mean_abs2(poly, T, density) - target)


def _prime_sets(polys):
    maxn = max(int(p.support[-1]) for p in polys)
    table = pt.sieve(max(100, math.isqrt(maxn) + 1))
    sets = []
    for p in polys:
        s = set()
        for n in p.support.tolist():
            if n > 1:
                s.update(q for q, _ in pt.factorize(n, table))
        sets.append(s)
    return sets


def splitting_gap(polys, T: float, density: float = 10.0) -> float:
    """Relative gap between the mean of |product|^2 and the product of means."""
    if len(polys) == 1:
        polys = list(polys)
    sets = _prime_sets(polys)
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if sets[i] & sets[j]:
                raise BlocksNotDisjoint(f"polys {i} and {j} share primes")
    prod = poly_product(polys)
    if prod.length_bound > T / 10:
        raise LengthExceedsWindow(f"product length {prod.length_bound} above T/10")
    lhs = _mean_abs2(prod, T, density)
    rhs = 1.0
    for p in polys:
        rhs *= _mean_abs2(p, T, density)
    return abs(lhs - rhs) / rhs


# ---------------------------------------------------------------------------
# pointwise witnesses


@dataclass(frozen=True)
class InterpWitness:
    lhs: float
    rhs: float
    v_star: int


_INTERP_C = 64.0


def _zeta_abs_crit(x: float, ev: ze.ZetaEvaluator) -> float:
    """|zeta(1/2 + ix)|."""
    if abs(x) >= 50.0:
        return abs(float(ze.rs_z_batch(np.array([abs(x)]), ev)[0]))
    return abs(ze.zeta_em(0.5 + 1j * x, ev))


def interpolation_witness(t: float, h1: float, h2: float, beta: float,
                          family: ProxyFamily, ev: ze.ZetaEvaluator = ze.DEFAULT_EVAL
                          ) -> InterpWitness:
    """Both sides of the pointwise interpolation inequality with C = 64.

    lhs = |zeta(s) zeta(w)|^{2 beta} at s, w = 1/2 + i(t + h_a); rhs is the
    three-part majorant built from the N_j and the (|P_v|/50 P_v)^{2 ceil(50 P_v)}
    penalty terms, with v* = smallest v where either |P_v| exceeds 50 P_v.
    """
    if not (0.0 <= beta <= 1.0):
        raise ValueError("interpolation witness requires beta in [0, 1]")
    sch = family.schedule
    ell = family.ell
    xs = np.array([t + h1, t + h2])
    P = np.array([p_values(family, j + 1, xs) for j in range(ell)])  # (ell, 2)
    z1 = _zeta_abs_crit(xs[0], ev)
    z2 = _zeta_abs_crit(xs[1], ev)
    zz2 = (z1 * z2) ** 2
    lhs = (z1 * z2) ** (2.0 * beta)

    K = [int(math.ceil(k)) for k in sch.K]
    Nb = np.array([[trunc_exp_series(beta * P[j, a], K[j]) for a in (0, 1)]
                   for j in range(ell)])
    Nbm1 = np.array([[trunc_exp_series((beta - 1.0) * P[j, a], K[j]) for a in (0, 1)]
                     for j in range(ell)])

    def prod2(arr, upto):
        out = 1.0
        for j in range(upto):
            out *= (arr[j, 0] * arr[j, 1]) ** 2
        return out

    v_star = ell + 1
    for v in range(1, ell + 1):
        if abs(P[v - 1, 0]) > 50.0 * sch.P[v - 1] or abs(P[v - 1, 1]) > 50.0 * sch.P[v - 1]:
            v_star = v
            break

    rhs = zz2 * prod2(Nbm1, ell) + prod2(Nb, ell)
    for v in range(1, ell + 1):
        cap = int(math.ceil(50.0 * sch.P[v - 1]))
        pen = 0.0
        for a in (0, 1):
            ratio = abs(P[v - 1, a]) / (50.0 * sch.P[v - 1])
            if ratio > 0:
                pen += math.exp(min(2.0 * cap * math.log(ratio), 700.0))
        rhs += (zz2 * prod2(Nbm1, v - 1) + prod2(Nb, v - 1)) * pen
    return InterpWitness(lhs=lhs, rhs=_INTERP_C * rhs, v_star=v_star)


@dataclass(frozen=True)
class HolderWitness:
    lhs: float
    rhs: float


def holder_witness_lower(t: float, h1: float, h2: float, beta: float,
                         family: ProxyFamily, ev: ze.ZetaEvaluator = ze.DEFAULT_EVAL
                         ) -> HolderWitness:
    """Pointwise (integrand-level) form of the lower-bound Hoelder splits.

    beta <= 1: three factors with weights (1/2, (1-beta)/2, beta/2);
    beta >= 1: two factors with weights (1/(2 beta), 1 - 1/(2 beta)).
    The weighted AM-GM  prod y_i^{w_i} <= sum w_i y_i  is the inequality
    that integrates up to the displayed Hoelder bounds.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    ell = family.ell
    sch = family.schedule
    xs = np.array([t + h1, t + h2])
    P = np.array([p_values(family, j + 1, xs) for j in range(ell)])
    K = [int(math.ceil(k)) for k in sch.K]
    z1 = _zeta_abs_crit(xs[0], ev)
    z2 = _zeta_abs_crit(xs[1], ev)
    zz = z1 * z2
    nb = 1.0
    nbm1 = 1.0
    for j in range(ell):
        nb *= trunc_exp_series(beta * P[j, 0], K[j]) * trunc_exp_series(beta * P[j, 1], K[j])
        nbm1 *= (trunc_exp_series((beta - 1.0) * P[j, 0], K[j])
                 * trunc_exp_series((beta - 1.0) * P[j, 1], K[j]))
    nb, nbm1 = abs(nb), abs(nbm1)
    if beta <= 1.0:
        w = (0.5, (1.0 - beta) / 2.0, beta / 2.0)
        y = (zz ** (2.0 * beta), zz**2 * nbm1**2,
             nbm1**2 * nb ** (2.0 / beta))
        lhs = 1.0
        for wi, yi in zip(w, y):
            lhs *= yi ** wi
        rhs = sum(wi * yi for wi, yi in zip(w, y))
    else:
        w = (1.0 / (2.0 * beta), 1.0 - 1.0 / (2.0 * beta))
        y = (zz ** (2.0 * beta), (nbm1 * nb) ** (2.0 * beta / (2.0 * beta - 1.0)))
        lhs = y[0] ** w[0] * y[1] ** w[1]
        rhs = w[0] * y[0] + w[1] * y[1]
    return HolderWitness(lhs=lhs, rhs=rhs)
