"""Zeta evaluation and the Gamma-factor / V-kernel / AFE apparatus.

Two independent evaluation paths are provided: Euler-Maclaurin (any s with
Re s > -1, reflected through the functional equation otherwise) and
Riemann-Siegel (critical line, t >= 50).  They cross-check each other in the
test suite.  On top of these sit the lambda/X/Y factors, the smoothed kernels
V(x,t), and residual checks for the two approximate functional equations.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.special import bernoulli, loggamma

from .errors import (
    DegenerateShifts,
    GammaPole,
    HeightOutOfRange,
    HeightTooLow,
    PoleAtOne,
    QuadratureNotConverged,
    ShiftTooLarge,
    TruncationTooShort,
)

_LOG_2PI = math.log(2.0 * math.pi)
_HEIGHT_MAX = 1.0e6

# A = 3 decay-bound constants |V(x,t)| <= C * (1 + x/scale)^{-3}, scale = t/2pi
# for 2 shifts and (t/2pi)^2 for 4 shifts.  Calibrated on a log-spaced (x, t)
# grid (see the kernel decay fixtures); used to certify AFE truncation tails.
V_DECAY_C3_PAIR = 60.0
V_DECAY_C3_QUAD = 60.0
_TAIL_RAISE = 1.0e-6


@dataclass(frozen=True)
class ZetaEvaluator:
    """Immutable evaluation policy, shareable across workers."""

    em_cutoff: float = 1.0e5
    em_order: int = 12
    rs_corrections: int = 2
    target_abs_error: float = 1.0e-10

    def __post_init__(self):
        if self.em_order < 4:
            raise ValueError("em_order must be at least 4")
        if self.rs_corrections not in (0, 1, 2):
            raise ValueError("rs_corrections must be 0, 1 or 2")
        if self.target_abs_error <= 0:
            raise ValueError("target_abs_error must be positive")


DEFAULT_EVAL = ZetaEvaluator()


# ---------------------------------------------------------------------------
# Euler-Maclaurin


def _em_truncation(height: float) -> int:
    return max(32, int(0.8 * height) + 50)


def _bernoulli_over_fact(order: int) -> np.ndarray:
    b = bernoulli(2 * order)
    return np.array([b[2 * k] / math.factorial(2 * k) for k in range(1, order + 1)])


_TWO_PI_LD = 2.0 * np.longdouble("3.14159265358979323846264338327950288")


def _em_eval(s: np.ndarray, N: int, order: int) -> np.ndarray:
    """Euler-Maclaurin with N head terms and `order` Bernoulli corrections.

    s is a flat complex array; one shared truncation N for the whole batch.
    The head-sum phases t log n reach ~1e6 at the top of the height range,
    so they are formed and reduced mod 2 pi in 80-bit extended precision
    before the double-precision cos/sin; plain doubles lose ~1e-10 of
    absolute accuracy there, which matters next to zeros of zeta.
    """
    out = np.empty(s.shape, dtype=np.complex128)
    coeffs = _bernoulli_over_fact(order)
    logn = np.log(np.arange(1, N, dtype=np.float64))
    logn_ld = np.log(np.arange(1, N, dtype=np.longdouble))
    lognN = math.log(N)
    chunk = max(1, int(2.0e7) // max(N, 1))
    for lo in range(0, s.size, chunk):
        sc = s[lo: lo + chunk, None]
        amp = np.exp(-sc.real * logn[None, :])
        ph = np.remainder(sc.imag.astype(np.longdouble) * logn_ld[None, :],
                          _TWO_PI_LD).astype(np.float64)
        head = (amp * np.exp(-1j * ph)).sum(axis=1)
        sc = sc[:, 0]
        tail = np.exp((1.0 - sc) * lognN) / (sc - 1.0) + 0.5 * np.exp(-sc * lognN)
        # correction sum: B_2k/(2k)! * N^{1-s-2k} * prod_{j=0}^{2k-2}(s+j)
        prod = sc.copy()  # j = 0
        npow = np.exp((1.0 - sc) * lognN)
        for k in range(1, order + 1):
            npow /= N * N
            tail += coeffs[k - 1] * npow * prod
            prod = prod * (sc + (2 * k - 1)) * (sc + 2 * k)
        out[lo: lo + chunk] = head + tail
    return out


def zeta_em(s: complex, ev: ZetaEvaluator = DEFAULT_EVAL) -> complex:
    """zeta(s) by Euler-Maclaurin; requires Re s > -1."""
    s = complex(s)
    if abs(s - 1.0) < 1e-12:
        raise PoleAtOne(f"zeta pole at s = {s}")
    if abs(s.imag) > _HEIGHT_MAX:
        raise HeightOutOfRange(f"|Im s| = {abs(s.imag):.3g} above {_HEIGHT_MAX:.0e}")
    if s.real <= -1.0:
        raise ValueError("zeta_em requires Re s > -1; use zeta_any")
    N = _em_truncation(abs(s.imag))
    return complex(_em_eval(np.array([s]), N, ev.em_order)[0])


def zeta_any(s: complex, ev: ZetaEvaluator = DEFAULT_EVAL) -> complex:
    """zeta(s) anywhere (pole excluded), reflecting when Re s < -1/2."""
    s = complex(s)
    if abs(s - 1.0) < 1e-12:
        raise PoleAtOne(f"zeta pole at s = {s}")
    if s.real >= -0.5:
        return zeta_em(s, ev)
    return lambda_chi(s) * zeta_em(1.0 - s, ev)


def zeta_array(s: np.ndarray, ev: ZetaEvaluator = DEFAULT_EVAL) -> np.ndarray:
    """Vectorized zeta over an arbitrary-shape complex array (no poles)."""
    s = np.asarray(s, dtype=np.complex128)
    flat = s.ravel()
    if np.any(np.abs(flat - 1.0) < 1e-12):
        raise PoleAtOne("zeta pole inside batch")
    if np.any(np.abs(flat.imag) > _HEIGHT_MAX):
        raise HeightOutOfRange("batch contains |Im s| above the supported range")
    out = np.empty(flat.shape, dtype=np.complex128)
    direct = flat.real >= -0.5
    if np.any(direct):
        sd = flat[direct]
        N = _em_truncation(float(np.max(np.abs(sd.imag))) if sd.size else 0.0)
        out[direct] = _em_eval(sd, N, ev.em_order)
    if np.any(~direct):
        sr = flat[~direct]
        N = _em_truncation(float(np.max(np.abs(sr.imag))))
        out[~direct] = lambda_chi_array(sr) * _em_eval(1.0 - sr, N, ev.em_order)
    return out.reshape(s.shape)


# ---------------------------------------------------------------------------
# lambda and Gamma factors


def _check_gamma_args(*args):
    for a in args:
        if abs(a.imag) < 1e-9:
            k = round(a.real)
            if k <= 0 and abs(a.real - k) < 1e-12:
                raise GammaPole(f"Gamma argument {a} within 1e-12 of a pole")


def lambda_chi(s: complex) -> complex:
    """lambda(s) = pi^{s-1/2} Gamma((1-s)/2) / Gamma(s/2); zeta(s) = lambda(s) zeta(1-s)."""
    s = complex(s)
    _check_gamma_args((1.0 - s) / 2.0, s / 2.0)
    return cmath.exp((s - 0.5) * math.log(math.pi)
                     + loggamma((1.0 - s) / 2.0) - loggamma(s / 2.0))


def lambda_chi_array(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=np.complex128)
    return np.exp((s - 0.5) * math.log(math.pi)
                  + loggamma((1.0 - s) / 2.0) - loggamma(s / 2.0))


@dataclass(frozen=True)
class GammaFactors:
    alpha1: complex
    alpha2: complex
    t: float
    lambda1: complex
    lambda2: complex
    X: complex
    Y: complex


def y_exponent(a1, a2, t):
    """log Y_{a1,a2,t}; broadcasts over numpy inputs."""
    a1 = np.asarray(a1, dtype=np.complex128)
    a2 = np.asarray(a2, dtype=np.complex128)
    t = np.asarray(t, dtype=np.float64)
    # For purely imaginary a = ih this is (a+it)/2 log(2pi/(t+h)) +
    # (a'-it)/2 log(2pi/(t-h')) + i(h+h')/2, the combination that makes Y^2
    # match the Stirling approximation of X and keeps Y_{a1,a2}^{-1} =
    # Y_{-a2,-a1} exact; written via t -/+ i*a so it is analytic in the
    # shifts (required when Y is evaluated on contour nodes).
    return ((a1 + 1j * t) / 2.0 * np.log(2.0 * np.pi / (t - 1j * a1))
            + (a2 - 1j * t) / 2.0 * np.log(2.0 * np.pi / (t + 1j * a2))
            + 0.5 * (a1 + a2))


def gamma_factor_pair(alpha1: complex, alpha2: complex, t: float) -> GammaFactors:
    """X = lambda(1/2+a1+it) lambda(1/2+a2-it) and its symmetrized root Y."""
    alpha1, alpha2, t = complex(alpha1), complex(alpha2), float(t)
    if t < 10:
        raise ValueError("t must be at least 10")
    if abs(alpha1.imag) >= t / 10 or abs(alpha2.imag) >= t / 10:
        raise ShiftTooLarge(f"|Im alpha| >= t/10 at t = {t}")
    l1 = lambda_chi(0.5 + alpha1 + 1j * t)
    l2 = lambda_chi(0.5 + alpha2 - 1j * t)
    Y = complex(np.exp(y_exponent(alpha1, alpha2, t)))
    return GammaFactors(alpha1=alpha1, alpha2=alpha2, t=t,
                        lambda1=l1, lambda2=l2, X=l1 * l2, Y=Y)


def same_sign_gamma(alpha1: complex, alpha2: complex, t: float) -> complex:
    """X-tilde: both lambda factors taken at +it (one-sided shift pairs)."""
    alpha1, alpha2, t = complex(alpha1), complex(alpha2), float(t)
    if t < 10:
        raise ValueError("t must be at least 10")
    if abs(alpha1.imag) >= t / 10 or abs(alpha2.imag) >= t / 10:
        raise ShiftTooLarge(f"|Im alpha| >= t/10 at t = {t}")
    return lambda_chi(0.5 + alpha1 + 1j * t) * lambda_chi(0.5 + alpha2 + 1j * t)


# ---------------------------------------------------------------------------
# V kernels


@dataclass(frozen=True)
class VKernelSpec:
    """Contour data for V(x,t) = (1/2 pi i) int_(1) G(s)/s g(s,t) x^{-s} ds."""

    shifts: tuple
    variant: str = "opposite"       # "opposite" or "same"
    line_abscissa: float = 1.0
    U: float = 12.0
    step: float = 0.05
    drop_degenerate: bool = False   # replace degenerate G factors by 1 (AFE use)

    def __post_init__(self):
        if len(self.shifts) not in (2, 4):
            raise ValueError("spec needs 2 or 4 shifts")
        if self.variant not in ("opposite", "same"):
            raise ValueError("variant must be 'opposite' or 'same'")
        if self.U < 10 or self.step > 0.1:
            raise ValueError("need U >= 10 and step <= 0.1")


def _g_pair_log(a1: complex, a2: complex, s: np.ndarray, t: float,
                sign2: float) -> np.ndarray:
    """log g_{a1,a2}(s,t) with the second argument at sign2 * it."""
    return (-s * math.log(math.pi)
            + loggamma((0.5 + a1 + s + 1j * t) / 2.0)
            + loggamma((0.5 + a2 + s + sign2 * 1j * t) / 2.0)
            - loggamma((0.5 + a1 + 1j * t) / 2.0)
            - loggamma((0.5 + a2 + sign2 * 1j * t) / 2.0))


def _g_factor(spec: VKernelSpec, s: np.ndarray, t: float) -> np.ndarray:
    a = spec.shifts
    if len(a) == 2:
        sign2 = 1.0 if spec.variant == "same" else -1.0
        return np.exp(_g_pair_log(a[0], a[1], s, t, sign2))
    return np.exp(_g_pair_log(a[0], a[2], s, t, -1.0)
                  + _g_pair_log(a[1], a[3], s, t, -1.0))


def _G_factor(spec: VKernelSpec, s: np.ndarray) -> np.ndarray:
    G = np.exp(s * s)
    if spec.variant == "same":
        return G
    a = spec.shifts
    pairs = [(0, 1)] if len(a) == 2 else [(0, 2), (0, 3), (1, 2), (1, 3)]
    for i, j in pairs:
        ssum = a[i] + a[j]
        if abs(ssum) < 1e-14:
            if spec.drop_degenerate:
                continue
            raise DegenerateShifts(
                f"alpha_{i+1} + alpha_{j+1} = 0: pole-cancelling factor undefined")
        G = G * (1.0 - (2.0 * s / ssum) ** 2)
    return G


def _v_weights(spec: VKernelSpec, t: float, step: float):
    """Trapezoid nodes s_k on the vertical line and weights W_k with
    V(x) = sum_k W_k x^{-s_k}."""
    c = spec.line_abscissa
    u = np.arange(-spec.U, spec.U + step / 2, step)
    s = c + 1j * u
    W = (step / (2.0 * math.pi)) * _G_factor(spec, s) / s * _g_factor(spec, s, t)
    return s, W


def v_kernel(x: float, t: float, spec: VKernelSpec) -> complex:
    """Single V(x,t) evaluation with a step-halving convergence check."""
    if x <= 0:
        raise ValueError("x must be positive")
    if t < 50:
        raise HeightTooLow("V kernel requires t >= 50")
    lx = math.log(x)
    vals = []
    for step in (spec.step, spec.step / 2):
        s, W = _v_weights(spec, t, step)
        vals.append(complex(np.sum(W * np.exp(-s * lx))))
    if abs(vals[1] - vals[0]) > 1e-8:
        raise QuadratureNotConverged(
            f"V quadrature moved by {abs(vals[1]-vals[0]):.3g} under step halving")
    return vals[1]


def v_table(spec: VKernelSpec, t: float, x_max: float, n: int = 6000):
    """V on a uniform log-x grid padded for 4-point interpolation.

    Returns (x0, dx, values); values[i] = V(exp(x0 + i dx), t).
    """
    lx_hi = math.log(x_max)
    dx = lx_hi / (n - 1)
    x0 = -2.0 * dx
    lx = x0 + dx * np.arange(n + 5)
    s, W = _v_weights(spec, t, spec.step)
    vals = np.exp(-np.outer(lx, s)) @ W
    return x0, dx, np.ascontiguousarray(vals)


# ---------------------------------------------------------------------------
# AFE residuals


@njit(cache=True)
def _bilinear_v_sum(CA, CB, logn, x0, dx, vt, X):
    """sum over m*n <= X of CA[m] CB[n] V(log(mn)), V cubic-interpolated."""
    total = 0.0 + 0.0j
    for m in range(1, X + 1):
        am = CA[m]
        lm = logn[m]
        nmax = X // m
        for nn in range(1, nmax + 1):
            u = (lm + logn[nn] - x0) / dx
            i = int(u)
            f = u - i
            w_m1 = -f * (f - 1.0) * (f - 2.0) / 6.0
            w_0 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0
            w_1 = -(f + 1.0) * f * (f - 2.0) / 2.0
            w_2 = (f + 1.0) * f * (f - 1.0) / 6.0
            v = (w_m1 * vt[i - 1] + w_0 * vt[i] + w_1 * vt[i + 1] + w_2 * vt[i + 2])
            total += am * CB[nn] * v
    return total


@njit(cache=True)
def _sigma_sieve(pa, pb, X):
    """out[n] = sum over ab = n of pa[a] pb[b], for n <= X."""
    out = np.zeros(X + 1, dtype=np.complex128)
    for a in range(1, X + 1):
        xa = pa[a]
        for b in range(1, X // a + 1):
            out[a * b] += xa * pb[b]
    return out


def _coeff_powers(X: int, exponent: complex) -> np.ndarray:
    """[0, 1^e, 2^e, ...] as n^exponent for n <= X."""
    n = np.arange(X + 1, dtype=np.float64)
    n[0] = 1.0
    out = np.exp(exponent * np.log(n))
    out[0] = 0.0
    return out


def _check_afe_box(t: float, shifts, t_max: float):
    if not (50.0 <= t <= t_max):
        raise ValueError(f"t = {t} outside [50, {t_max:.0g}]")
    box = math.log(t) ** 2
    for a in shifts:
        if abs(complex(a).imag) > box:
            raise ShiftTooLarge(f"|Im alpha| > (log t)^2 at t = {t}")


def afe_pair_residual(t: float, alpha1: complex, alpha2: complex,
                      ev: ZetaEvaluator = DEFAULT_EVAL,
                      x_factor: float = 600.0) -> float:
    """|LHS - RHS| of the two-shift approximate functional equation.

    The kernel uses G = e^{s^2} (any even G with G(0) = 1 and rapid decay
    gives the same identity; the pole-cancelling quadratic factors are only
    needed inside main-term contour shifts and are ill-conditioned for
    near-degenerate shift sums).
    """
    t = float(t)
    alpha1, alpha2 = complex(alpha1), complex(alpha2)
    _check_afe_box(t, (alpha1, alpha2), 1e5)
    X = int(x_factor * t)
    tail = V_DECAY_C3_PAIR * (1.0 + X / (t / (2 * math.pi))) ** -3
    if tail > _TAIL_RAISE:
        raise TruncationTooShort(f"A=3 tail bound {tail:.3g} at mn = {X}")

    lhs = zeta_em(0.5 + alpha1 + 1j * t, ev) * zeta_em(0.5 + alpha2 - 1j * t, ev)

    spec1 = VKernelSpec(shifts=(alpha1, alpha2), variant="same")
    spec2 = VKernelSpec(shifts=(-alpha2, -alpha1), variant="same")
    # "same" variant supplies e^{s^2}; the g factor must still be the
    # opposite-sign one, so build weights explicitly:
    logn = np.log(np.arange(X + 1, dtype=np.float64), where=np.arange(X + 1) > 0,
                  out=np.zeros(X + 1))
    rhs = 0.0 + 0.0j
    gamma = gamma_factor_pair(alpha1, alpha2, t)
    for spec, (e_m, e_n), prefactor in (
            (spec1, (-0.5 - alpha1 - 1j * t, -0.5 - alpha2 + 1j * t), 1.0 + 0.0j),
            (spec2, (-0.5 + alpha2 - 1j * t, -0.5 + alpha1 + 1j * t), gamma.X)):
        x0, dx, vt = _v_table_opposite(spec.shifts, t, X)
        CA = _coeff_powers(X, e_m)
        CB = _coeff_powers(X, e_n)
        rhs += prefactor * _bilinear_v_sum(CA, CB, logn, x0, dx, vt, X)
    return abs(lhs - rhs)


def _v_table_opposite(shifts, t: float, X: int, n: int = 6000, step: float = 0.05):
    """V table for the opposite-sign g with plain e^{s^2} kernel."""
    c, U = 1.0, 12.0
    u = np.arange(-U, U + step / 2, step)
    s = c + 1j * u
    if len(shifts) == 2:
        glog = _g_pair_log(shifts[0], shifts[1], s, t, -1.0)
    else:
        glog = (_g_pair_log(shifts[0], shifts[2], s, t, -1.0)
                + _g_pair_log(shifts[1], shifts[3], s, t, -1.0))
    W = (step / (2.0 * math.pi)) * np.exp(s * s) / s * np.exp(glog)
    lx_hi = math.log(X)
    dx = lx_hi / (n - 1)
    x0 = -2.0 * dx
    lx = x0 + dx * np.arange(n + 5)
    vals = np.exp(-np.outer(lx, s)) @ W
    return x0, dx, np.ascontiguousarray(vals)


def afe_quad_residual(t: float, shifts, ev: ZetaEvaluator = DEFAULT_EVAL,
                      x_factor: float = 2000.0) -> float:
    """|LHS - RHS| of the four-shift approximate functional equation."""
    t = float(t)
    a1, a2, a3, a4 = (complex(a) for a in shifts)
    _check_afe_box(t, (a1, a2, a3, a4), 5000.0)
    tau = (t / (2.0 * math.pi)) ** 2
    X = int(x_factor * tau)
    tail = V_DECAY_C3_QUAD * (1.0 + X / tau) ** -3
    if tail > _TAIL_RAISE:
        raise TruncationTooShort(f"A=3 tail bound {tail:.3g} at mn = {X}")

    lhs = (zeta_em(0.5 + a1 + 1j * t, ev) * zeta_em(0.5 + a2 + 1j * t, ev)
           * zeta_em(0.5 + a3 - 1j * t, ev) * zeta_em(0.5 + a4 - 1j * t, ev))

    logn = np.log(np.arange(X + 1, dtype=np.float64), where=np.arange(X + 1) > 0,
                  out=np.zeros(X + 1))
    half_it = _coeff_powers(X, -0.5 - 1j * t)
    half_itc = _coeff_powers(X, -0.5 + 1j * t)
    Xfac = (gamma_factor_pair(a1, a3, t).X * gamma_factor_pair(a2, a4, t).X)

    rhs = 0.0 + 0.0j
    for (sh, (zm1, zm2), (zn1, zn2), prefactor) in (
            ((a1, a2, a3, a4), (a1, a2), (a3, a4), 1.0 + 0.0j),
            ((-a3, -a4, -a1, -a2), (-a3, -a4), (-a1, -a2), Xfac)):
        sm = _sigma_sieve(_coeff_powers(X, -zm1), _coeff_powers(X, -zm2), X)
        sn = _sigma_sieve(_coeff_powers(X, -zn1), _coeff_powers(X, -zn2), X)
        CA = sm * half_it
        CB = sn * half_itc
        x0, dx, vt = _v_table_opposite(sh, t, X)
        rhs += prefactor * _bilinear_v_sum(CA, CB, logn, x0, dx, vt, X)
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# Riemann-Siegel


def theta_rs(t: float) -> float:
    """theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log pi, exactly."""
    return float(loggamma(0.25 + 0.5j * t).imag) - 0.5 * t * math.log(math.pi)


_RS_TABLE_SIZE = 65536
_rs_tables_cache = None


def _psi_cauchy_derivs(p: np.ndarray, orders, r: float = 0.47, M: int = 256):
    """Derivatives of Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)
    via Cauchy-integral FFT on circles of radius r (Psi is entire)."""
    phi = 2.0 * math.pi * np.arange(M) / M
    z = p[:, None] + r * np.exp(1j * phi)[None, :]
    num = np.cos(2.0 * math.pi * (z * z - z - 0.0625))
    den = np.cos(2.0 * math.pi * z)
    samples = num / den
    coef = np.fft.fft(samples, axis=1) / M
    out = {}
    for k in orders:
        out[k] = (math.factorial(k) / r**k) * coef[:, k].real
    return out


def _rs_tables():
    global _rs_tables_cache
    if _rs_tables_cache is None:
        coarse = np.linspace(0.0, 1.0, 1025)
        d = _psi_cauchy_derivs(coarse, orders=(0, 2, 3, 6))
        c0 = d[0]
        c1 = -d[3] / (96.0 * math.pi**2)
        c2 = d[2] / (64.0 * math.pi**2) + d[6] / (18432.0 * math.pi**4)
        from scipy.interpolate import CubicSpline
        fine = np.linspace(0.0, 1.0, _RS_TABLE_SIZE + 1)
        _rs_tables_cache = tuple(np.ascontiguousarray(CubicSpline(coarse, c)(fine))
                                 for c in (c0, c1, c2))
    return _rs_tables_cache


@njit(cache=True)
def _rs_z_kernel(ts, rsqrt, logn, c0, c1, c2, n_corr, tbl_n):
    out = np.empty(ts.shape[0])
    for i in range(ts.shape[0]):
        t = ts[i]
        # theta asymptotic series, plenty for t >= 50
        th = (0.5 * t * np.log(t / (2.0 * np.pi)) - 0.5 * t - np.pi / 8.0
              + 1.0 / (48.0 * t) + 7.0 / (5760.0 * t**3) + 31.0 / (80640.0 * t**5))
        a = np.sqrt(t / (2.0 * np.pi))
        N = int(a)
        p = a - N
        total = 0.0
        for n in range(1, N + 1):
            total += np.cos(th - t * logn[n]) * rsqrt[n]
        total *= 2.0
        if n_corr > 0:
            u = p * tbl_n
            j = int(u)
            f = u - j
            corr = (1.0 - f) * c0[j] + f * c0[j + 1]
            if n_corr > 1:
                corr += ((1.0 - f) * c1[j] + f * c1[j + 1]) / a
                corr += ((1.0 - f) * c2[j] + f * c2[j + 1]) / (a * a)
            sign = 1.0 if (N - 1) % 2 == 0 else -1.0
            total += sign * corr / np.sqrt(a)
        out[i] = total
    return out


def rs_z_batch(ts: np.ndarray, ev: ZetaEvaluator = DEFAULT_EVAL) -> np.ndarray:
    """Hardy Z(t) for an array of heights t >= 50 (Riemann-Siegel)."""
    ts = np.ascontiguousarray(ts, dtype=np.float64)
    if ts.size and float(ts.min()) < 50.0:
        raise HeightTooLow("rs_z_batch requires t >= 50")
    maxN = int(math.sqrt(float(ts.max()) / (2.0 * math.pi))) + 1 if ts.size else 1
    n = np.arange(maxN + 1, dtype=np.float64)
    n[0] = 1.0
    rsqrt = 1.0 / np.sqrt(n)
    logn = np.log(n)
    c0, c1, c2 = _rs_tables()
    return _rs_z_kernel(ts, rsqrt, logn, c0, c1, c2, ev.rs_corrections,
                        float(_RS_TABLE_SIZE))


def z_function(t: float, ev: ZetaEvaluator = DEFAULT_EVAL) -> float:
    """Real Z(t); Riemann-Siegel for t >= 50, Euler-Maclaurin below."""
    t = float(t)
    if t >= 50.0:
        return float(rs_z_batch(np.array([t]), ev)[0])
    z = cmath.exp(1j * theta_rs(t)) * zeta_em(0.5 + 1j * t, ev)
    return float(z.real)


def zeta_rs(t: float, ev: ZetaEvaluator = DEFAULT_EVAL) -> complex:
    """zeta(1/2 + it) = Z(t) e^{-i theta(t)} by Riemann-Siegel."""
    t = float(t)
    if t < 50.0:
        raise HeightTooLow("zeta_rs requires t >= 50 (use zeta_em below)")
    Z = float(rs_z_batch(np.array([t]), ev)[0])
    return Z * cmath.exp(-1j * theta_rs(t))
