"""Contour-quadrature main terms for twisted second and fourth moments,
the diagonal Euler-product lower-bound main term, smooth weights, direct
integration oracles, and the oscillatory-integral bound check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import loggamma

from .errors import (
    PoleProximity,
    QuadratureNotConverged,
    ShiftTooLarge,
    StepTooCoarse,
)
from . import prime_tools as pt
from . import zeta_engine as ze

_GL_NODES = 200


# ---------------------------------------------------------------------------
# smooth weights


def _ramp(x):
    """S(x) = sigma(x)/(sigma(x)+sigma(1-x)) with sigma(x)=e^{-1/x}; a C-infinity
    switch rising from 0 at x<=0 to 1 at x>=1."""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    out[x >= 1.0] = 1.0
    mid = (x > 0.0) & (x < 1.0)
    xm = x[mid]
    a = np.exp(-1.0 / xm)
    b = np.exp(-1.0 / (1.0 - xm))
    out[mid] = a / (a + b)
    return out


@dataclass(frozen=True)
class SmoothWeight:
    support: tuple = (0.5, 4.0)
    plateau: tuple = (1.0, 3.0)
    scale: float = 1.0
    _mass: float = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        a, d = self.support
        b, c = self.plateau
        if not (a < b < c < d):
            raise ValueError("need support[0] < plateau[0] < plateau[1] < support[1]")
        if self._mass is None:
            # unit-scale shape mass; the scale factor is applied in .mass
            m, err = quad(lambda x: float(self(x)) / self.scale, a, d,
                          points=[b, c], epsabs=1e-12, limit=200)
            object.__setattr__(self, "_mass", float(m))

    def __call__(self, x):
        a, d = self.support
        b, c = self.plateau
        x = np.asarray(x, dtype=np.float64)
        up = _ramp((x - a) / (b - a))
        down = _ramp((d - x) / (d - c))
        return self.scale * np.minimum(up, down)

    @property
    def mass(self) -> float:
        return self.scale * self._mass


def weight_eval(w: SmoothWeight, x) -> float:
    return float(w(x)) if np.isscalar(x) else w(x)


def weight_mass(w: SmoothWeight) -> float:
    return w.mass


LOWER_BOUND_WEIGHT = SmoothWeight(support=(1.1, 1.9), plateau=(1.2, 1.8))


# ---------------------------------------------------------------------------
# contour and twist specifications


@dataclass(frozen=True)
class ContourSpec:
    centers: tuple
    T: float
    nodes_per_circle: int = 32

    def __post_init__(self):
        M = self.nodes_per_circle
        if M < 16 or (M & (M - 1)) != 0:
            raise ValueError("nodes_per_circle must be a power of two >= 16")

    def radius(self, j: int) -> float:
        """Clearance scale for circle j (1-based): 3j/(4 log T).  Distinct
        per variable so node products avoid the zeta diagonals; kept of size
        O(1/log T) because the t-integrand grows like T^|Re z| and larger
        circles trade well-conditioned poles for catastrophic cancellation."""
        return 0.75 * j / math.log(self.T)

    def nodes(self, j: int, poles):
        """(z values, quadrature weights) for variable j on a circle
        enclosing every point of `poles` with clearance radius(j); the
        weights fold the (1/2 pi i) dz factor so a contour integral is
        just sum f(z_m) * w_m."""
        M = self.nodes_per_circle
        poles = np.asarray(poles, dtype=np.complex128)
        c = poles.mean()
        R = float(np.max(np.abs(poles - c))) + self.radius(j)
        th = 2.0 * np.pi * np.arange(M) / M
        ph = np.exp(1j * th)
        z = c + R * ph
        if np.min(np.abs(z[:, None] - poles[None, :])) < self.radius(j) / 50.0:
            raise PoleProximity("contour node too close to a shift pole")
        return z, (R / M) * ph


@dataclass(frozen=True)
class TwistSpec:
    a_poly: object            # DirichletPoly
    b_poly: object
    eta: float
    T: float

    def __post_init__(self):
        cap = self.T ** self.eta
        for p in (self.a_poly, self.b_poly):
            if p.support.size and p.support[-1] > cap:
                raise ValueError(f"twist support exceeds T^eta = {cap:.3g}")

    @property
    def trivial(self) -> bool:
        return (self.a_poly.support.size == 1 and self.a_poly.support[0] == 1
                and self.a_poly.coeffs[0] == 1.0
                and self.b_poly.support.size == 1 and self.b_poly.support[0] == 1
                and self.b_poly.coeffs[0] == 1.0)


def trivial_twist(T: float, eta: float = 0.05):
    from .proxy_polys import make_poly
    one = make_poly([1], [1.0])
    return TwistSpec(a_poly=one, b_poly=one, eta=eta, T=T)


# ---------------------------------------------------------------------------
# twist sums F


def f_second(z1, z2, twist: TwistSpec):
    """sum_{n,m} a(n) conj(b(m)) / [n,m] * (n,m)^{z1+z2} / (n^{z2} m^{z1});
    broadcasts over array-valued z1, z2."""
    z1 = np.asarray(z1, dtype=np.complex128)
    z2 = np.asarray(z2, dtype=np.complex128)
    out = np.zeros(np.broadcast(z1, z2).shape, dtype=np.complex128)
    for n, an in zip(twist.a_poly.support.tolist(), twist.a_poly.coeffs.tolist()):
        for m, bm in zip(twist.b_poly.support.tolist(), twist.b_poly.coeffs.tolist()):
            g = math.gcd(n, m)
            lcm = n * m // g
            out += (an * np.conj(bm) / lcm) * np.exp(
                (z1 + z2) * math.log(g) - z2 * math.log(n) - z1 * math.log(m))
    return out if out.shape else complex(out)


def _sigma_pp_vec(p: int, m: int, x1, x2):
    """sigma_{x1,x2}(p^m) = sum_{a+b=m} p^{-a x1 - b x2}, broadcast over arrays."""
    if m < 0:
        return np.zeros(np.broadcast(np.asarray(x1), np.asarray(x2)).shape,
                        dtype=np.complex128)
    lp = math.log(p)
    tot = 0.0
    for a in range(m + 1):
        tot = tot + np.exp(-lp * (a * np.asarray(x1, dtype=np.complex128)
                                  + (m - a) * np.asarray(x2, dtype=np.complex128)))
    return tot


def _b_pp_vec(p: int, m: int, z1, z2, z3, z4):
    """Multiplicative factor of B_z at p^m, closed form, array-valued shifts."""
    lp = math.log(p)
    s0 = _sigma_pp_vec(p, m, z3, z4)
    s1 = _sigma_pp_vec(p, m - 1, z3, z4)
    s2 = _sigma_pp_vec(p, m - 2, z3, z4)
    t1 = np.exp(-lp * (1.0 + z3 + z4)) * (np.exp(-lp * z1) + np.exp(-lp * z2))
    t2 = np.exp(-lp * (2.0 + z1 + z2 + 2.0 * z3 + 2.0 * z4))
    den = 1.0 - np.exp(-lp * (2.0 + z1 + z2 + z3 + z4))
    return (s0 - s1 * t1 + s2 * t2) / den


def _b_vec(n: int, z, table: pt.PrimeTable):
    """B_z(n) as a product of prime-power factors, broadcast over shift arrays."""
    out = 1.0
    for p, e in pt.factorize(n, table):
        out = out * _b_pp_vec(p, e, *z)
    return out


def f_fourth(z, twist: TwistSpec, table: pt.PrimeTable | None = None):
    """sum_{n,m} a(n) conj(a(m)) / [n,m] * B_z(n/(n,m)) B_{-pi z}(m/(n,m))."""
    z1, z2, z3, z4 = [np.asarray(c, dtype=np.complex128) for c in z]
    npz = (-z3, -z4, -z1, -z2)
    if table is None:
        mx = max(2, int(twist.a_poly.support[-1]))
        table = pt.sieve(mx + 1)
    shape = np.broadcast(z1, z2, z3, z4).shape
    out = np.zeros(shape, dtype=np.complex128)
    sup = twist.a_poly.support.tolist()
    co = twist.a_poly.coeffs.tolist()
    for n, an in zip(sup, co):
        for m, am in zip(sup, co):
            g = math.gcd(n, m)
            lcm = n * m // g
            out += (an * np.conj(am) / lcm) * _b_vec(n // g, (z1, z2, z3, z4), table) \
                * _b_vec(m // g, npz, table)
    return out if out.shape else complex(out)


# ---------------------------------------------------------------------------
# A-ratio and Vandermonde


def a_ratio(z, ev: ze.ZetaEvaluator = ze.DEFAULT_EVAL) -> complex:
    """zeta(1+z1+z3) zeta(1+z1+z4) zeta(1+z2+z3) zeta(1+z2+z4) / zeta(2+sum z)."""
    z1, z2, z3, z4 = z
    num = 1.0 + 0.0j
    for a, b in ((z1, z3), (z1, z4), (z2, z3), (z2, z4)):
        if abs(a + b) < 1e-8:
            raise PoleProximity(f"zeta argument 1+{a + b} too close to the pole")
        num *= ze.zeta_any(1.0 + a + b, ev)
    return num / ze.zeta_any(2.0 + z1 + z2 + z3 + z4, ev)


def vandermonde(z) -> complex:
    out = 1.0 + 0.0j
    for j in range(4):
        for k in range(j + 1, 4):
            out *= z[k] - z[j]
    return out


# ---------------------------------------------------------------------------
# t-integrals of Y products


@lru_cache(maxsize=8)
def _gl_nodes(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _t_nodes(w: SmoothWeight, T: float, n: int = _GL_NODES):
    a, d = w.support
    x, wt = _gl_nodes(n)
    ts = 0.5 * (d - a) * T * x + 0.5 * (a + d) * T
    base = 0.5 * (d - a) * T * wt * w(ts / T)
    return ts, base


def second_main_term(alpha1: complex, alpha2: complex, twist: TwistSpec,
                     w: SmoothWeight, T: float,
                     spec: ContourSpec | None = None,
                     ev: ze.ZetaEvaluator = ze.DEFAULT_EVAL,
                     check: bool = True) -> complex:
    """Double contour quadrature of
    zeta(1+z1+z2)(z1+z2)^2 / ((z1-a1)(z1+a2)(z2-a2)(z2+a1)) * F(z1,z2)
    * int Y_{a1,a2,t} Y_{-z2,-z1,t} w(t/T) dt,
    with the z1-contour enclosing {a1, -a2} and the z2-contour {a2, -a1};
    the residues at (a1, a2) and (-a2, -a1) are the two terms of the
    symmetrized diagonal, and zeta(1+u)u^2 is entire so there are no other
    poles inside."""
    L = math.log(T)
    for a in (alpha1, alpha2):
        if abs(a.real) > 5.0 / L or abs(a.imag) > L ** 2:
            raise ShiftTooLarge(f"shift {a} outside the admissible box")
    if spec is None:
        spec = ContourSpec(centers=(alpha1, alpha2), T=T)

    def run(M: int) -> complex:
        sp = ContourSpec(centers=(alpha1, alpha2), T=T, nodes_per_circle=M)
        z1, w1 = sp.nodes(1, [alpha1, -alpha2])
        z2, w2 = sp.nodes(2, [alpha2, -alpha1])
        zsum = z1[:, None] + z2[None, :]
        # zeta(1+u)u^2 stays analytic through u = 0
        zz = ze.zeta_array(1.0 + zsum.ravel(), ev).reshape(M, M) * zsum ** 2
        F = f_second(z1[:, None], z2[None, :], twist) if not twist.trivial else 1.0
        num = zz * F
        den1 = (z1 - alpha1) * (z1 + alpha2)
        den2 = (z2 - alpha2) * (z2 + alpha1)
        ts, base = _t_nodes(w, T)
        ya = np.exp(ze.y_exponent(alpha1, alpha2, ts))
        yz = np.exp(ze.y_exponent(-z2[None, :, None], -z1[:, None, None],
                                  ts[None, None, :]))
        tint = np.tensordot(yz, base * ya, axes=([2], [0]))
        integrand = num * tint * (w1 / den1)[:, None] * (w2 / den2)[None, :]
        return complex(integrand.sum())

    out = run(spec.nodes_per_circle)
    if check:
        out2 = run(2 * spec.nodes_per_circle)
        if abs(out2 - out) > 0.01 * max(abs(out2), 1e-300):
            raise QuadratureNotConverged(
                f"doubling contour nodes moved the result by "
                f"{abs(out2 - out) / abs(out2):.2%}")
    return out


def fourth_main_term(shifts, twist: TwistSpec, w: SmoothWeight, T: float,
                     spec: ContourSpec | None = None,
                     ev: ze.ZetaEvaluator = ze.DEFAULT_EVAL,
                     check: bool = True,
                     table: pt.PrimeTable | None = None) -> complex:
    """Quadruple contour quadrature of
    A(z) Delta(z1,z2,-z3,-z4)^2 F(z) int Y_{a,t} Y_{-pi z,t} w(t/T) dt
    over the 16 pole factors, prefactor 1/4.

    In the symmetrized variables u = (z1, z2, -z3, -z4) the shift tuple is
    a = (a1, a2, -a3, -a4); each u_j-contour encloses all four entries of a,
    the pole factors are prod (u_j - a_l), and the Delta^2 zeros cancel every
    zeta pole of A on the u_i = u_j diagonals.  The 4! assignment residues
    cover the main-term swap sum four times over, hence the 1/4."""
    a1, a2, a3, a4 = [complex(s) for s in shifts]
    L = math.log(T)
    for a in (a1, a2, a3, a4):
        if abs(a.real) > 5.0 / L or abs(a.imag) > L ** 2:
            raise ShiftTooLarge(f"shift {a} outside the admissible box")
    if spec is None:
        spec = ContourSpec(centers=(a1, a2, a3, a4), T=T)
    if not twist.trivial and table is None:
        table = pt.sieve(max(2, int(twist.a_poly.support[-1])) + 1)

    plus = [a1, a2, -a3, -a4]        # pole set for z1, z2
    minus = [-a1, -a2, a3, a4]       # pole set for z3, z4

    def run(M: int) -> complex:
        sp = ContourSpec(centers=(a1, a2, a3, a4), T=T, nodes_per_circle=M)
        zs, wts = [], []
        for j, ps in zip((1, 2, 3, 4), (plus, plus, minus, minus)):
            z, wt = sp.nodes(j, ps)
            zs.append(z)
            wts.append(wt)
        z1, z2, z3, z4 = zs
        # per-axis weights over the 4 pole factors of z_j
        cax = []
        for j, ps in zip(range(4), (plus, plus, minus, minus)):
            den = np.ones(M, dtype=np.complex128)
            for a in ps:
                den *= zs[j] - a
            cax.append(wts[j] / den)

        # pairwise zeta factors of A times the Delta^2 pieces; the squared
        # difference zeros keep zeta(1+u)u^2-type products analytic
        def pair_zeta(za, zb):
            s = za[:, None] + zb[None, :]
            return ze.zeta_array(1.0 + s.ravel(), ev).reshape(M, M)

        P12 = (z2[None, :] - z1[:, None]) ** 2
        P34 = (z3[:, None] - z4[None, :]) ** 2
        P13 = pair_zeta(z1, z3) * (z1[:, None] + z3[None, :]) ** 2
        P14 = pair_zeta(z1, z4) * (z1[:, None] + z4[None, :]) ** 2
        P23 = pair_zeta(z2, z3) * (z2[:, None] + z3[None, :]) ** 2
        P24 = pair_zeta(z2, z4) * (z2[:, None] + z4[None, :]) ** 2

        # t-integral: Y_{a,t} = Y_{a1,a3,t} Y_{a2,a4,t};
        # Y_{-pi z,t} = Y_{-z3,-z1,t} Y_{-z4,-z2,t}
        ts, base = _t_nodes(w, T)
        ya = np.exp(ze.y_exponent(a1, a3, ts) + ze.y_exponent(a2, a4, ts))
        E13 = np.exp(ze.y_exponent(-z3[None, :, None], -z1[:, None, None],
                                   ts[None, None, :]))
        E24 = np.exp(ze.y_exponent(-z4[None, :, None], -z2[:, None, None],
                                   ts[None, None, :]))
        Q = ts.size
        tint = (E13.reshape(M * M, Q) * (base * ya)) @ E24.reshape(M * M, Q).T
        # tint[(m1,m3),(m2,m4)]

        big = np.empty((M, M, M, M), dtype=np.complex128)   # (m1,m2,m3,m4)
        big[:] = tint.reshape(M, M, M, M).transpose(0, 2, 1, 3)
        big *= P12[:, :, None, None]
        big *= P34[None, None, :, :]
        big *= P13[:, None, :, None]
        big *= P14[:, None, None, :]
        big *= P23[None, :, :, None]
        big *= P24[None, :, None, :]
        zsum = (z1[:, None, None, None] + z2[None, :, None, None]
                + z3[None, None, :, None] + z4[None, None, None, :])
        big /= ze.zeta_array(2.0 + zsum.ravel(), ev).reshape(M, M, M, M)
        if not twist.trivial:
            big *= f_fourth((z1[:, None, None, None], z2[None, :, None, None],
                             z3[None, None, :, None], z4[None, None, None, :]),
                            twist, table)
        big *= cax[0][:, None, None, None]
        big *= cax[1][None, :, None, None]
        big *= cax[2][None, None, :, None]
        big *= cax[3][None, None, None, :]
        return complex(0.25 * big.sum())

    out = run(spec.nodes_per_circle)
    if check:
        out2 = run(2 * spec.nodes_per_circle)
        if abs(out2 - out) > 0.02 * max(abs(out2), 1e-300):
            raise QuadratureNotConverged(
                f"doubling contour nodes moved the result by "
                f"{abs(out2 - out) / abs(out2):.2%}")
    return out


# ---------------------------------------------------------------------------
# direct oracles


@dataclass(frozen=True)
class OracleResult:
    value: complex
    err_estimate: float


def _crit_line_zeta(xs: np.ndarray, ev: ze.ZetaEvaluator) -> np.ndarray:
    """zeta(1/2 + ix) for x >= 50 via the Z-function."""
    Z = ze.rs_z_batch(xs, ev)
    th = (loggamma(0.25 + 0.5j * xs).imag - 0.5 * xs * math.log(math.pi))
    return Z * np.exp(-1j * th)


def _oracle_pass(T: float, hs, twist: TwistSpec, w: SmoothWeight,
                 ev: ze.ZetaEvaluator, dt: float) -> complex:
    from .proxy_polys import eval_grid
    a, d = w.support
    n = int(math.ceil((d - a) * T / dt))
    if n % 2 == 1:
        n += 1
    ts = np.linspace(a * T, d * T, n + 1)
    step = ts[1] - ts[0]
    sw = np.ones(n + 1)
    sw[1:-1:2] = 4.0
    sw[2:-1:2] = 2.0
    total = 0.0 + 0.0j
    chunk = 1 << 20
    for i0 in range(0, n + 1, chunk):
        tc = ts[i0:i0 + chunk]
        if len(hs) == 2:
            h1, h2 = hs
            vals = (_crit_line_zeta(tc + h1, ev)
                    * np.conj(_crit_line_zeta(tc - h2, ev)))
            tw = (eval_grid(twist.a_poly, 0.5, tc)
                  * np.conj(eval_grid(twist.b_poly, 0.5, tc))
                  if not twist.trivial else 1.0)
        else:
            h1, h2, h3, h4 = hs
            vals = (_crit_line_zeta(tc + h1, ev) * _crit_line_zeta(tc + h2, ev)
                    * np.conj(_crit_line_zeta(tc - h3, ev))
                    * np.conj(_crit_line_zeta(tc - h4, ev)))
            tw = (np.abs(eval_grid(twist.a_poly, 0.5, tc)) ** 2
                  if not twist.trivial else 1.0)
        total += np.sum(sw[i0:i0 + chunk] * vals * tw * w(tc / T))
    return (step / 3.0) * total


def lhs_oracle(T: float, shifts, twist: TwistSpec, w: SmoothWeight,
               ev: ze.ZetaEvaluator = ze.DEFAULT_EVAL, dt: float = 0.01,
               check: bool = True) -> OracleResult:
    """Direct Simpson integration of the twisted moment over the weight's
    support; shifts must be purely imaginary (i h)."""
    if dt > 0.02:
        raise StepTooCoarse("dt must be at most 0.02")
    if len(shifts) == 4 and T > 1e5:
        raise ValueError("four-shift oracle capped at T = 1e5")
    if len(shifts) == 2 and T > 1e6:
        raise ValueError("two-shift oracle capped at T = 1e6")
    hs = []
    for s in shifts:
        s = complex(s)
        if abs(s.real) > 1e-12:
            raise ValueError("oracle supports purely imaginary shifts only")
        hs.append(s.imag)
    v = _oracle_pass(T, hs, twist, w, ev, dt)
    if not check:
        return OracleResult(value=v, err_estimate=float("nan"))
    v2 = _oracle_pass(T, hs, twist, w, ev, dt / 2.0)
    err = abs(v2 - v)
    if err > 0.005 * max(abs(v2), 1e-300):
        raise StepTooCoarse(f"halving dt moved the oracle by {err / abs(v2):.2%}")
    return OracleResult(value=v2, err_estimate=err)


# ---------------------------------------------------------------------------
# diagonal Euler-product main term


@dataclass(frozen=True)
class DiagonalMain:
    value: float
    truncation_bound: float
    exp_correction_bound: float


def diagonal_euler_main(beta: float, h1: float, h2: float, T: float,
                        schedule: pt.BlockSchedule, w: SmoothWeight,
                        table: pt.PrimeTable | None = None) -> DiagonalMain:
    """T-normalized diagonal main term mass(w) * prod_j S_j, with each block
    factor S_j computed per prime as the exact double sum over (r, s) with
    r + s <= 2 of sigma_{ih1,ih2}(p^r) a(p^s) conj(b(p^{r+s})) / p^{r+s},
    where a, b carry the twisted coefficients at gamma = beta - 1 and beta.

    The dropped third-order terms are bounded by sum_p c/p^3-style tails and
    reported, as is the e^{-100 P_j} cap-removal correction.
    """
    if table is None:
        table = schedule.table
    total = 1.0 + 0.0j
    trunc = 0.0
    ecorr = 0.0
    g, gm1 = beta, beta - 1.0
    for j in range(1, schedule.ell + 1):
        lo, hi = schedule.block(j)
        i0 = np.searchsorted(table.primes, math.floor(lo), side="right")
        i1 = np.searchsorted(table.primes, math.floor(hi), side="right")
        ps = table.primes[i0:i1]
        Sj = 1.0 + 0.0j
        for p in ps.tolist():
            lp = math.log(p)
            e1 = np.exp(-1j * h1 * lp)
            e2 = np.exp(-1j * h2 * lp)
            # twisted coefficients of the two block polynomials at p, p^2
            a1c = gm1 * (e1 + e2)
            a2c = gm1 ** 2 * (0.5 * e1**2 + e1 * e2 + 0.5 * e2**2)
            b1c = g * (e1 + e2)
            b2c = g ** 2 * (0.5 * e1**2 + e1 * e2 + 0.5 * e2**2)
            s1 = e1 + e2                      # sigma_{ih1,ih2}(p)
            s2 = e1**2 + e1 * e2 + e2**2      # sigma_{ih1,ih2}(p^2)
            Sp = 1.0 + 0.0j
            Sp += (s1 + a1c) * np.conj(b1c) / p
            Sp += (s2 + s1 * a1c + a2c) * np.conj(b2c) / (p * p)
            Sj *= Sp
            trunc += 8.0 * (1.0 + abs(g)) ** 3 / p ** 3
        ecorr += math.exp(-min(100.0 * schedule.P[j - 1], 700.0))
        total *= Sj
    return DiagonalMain(value=float(total.real) * w.mass,
                        truncation_bound=trunc, exp_correction_bound=ecorr)


# ---------------------------------------------------------------------------
# oscillatory integral


def oscillatory_integral(alpha1: complex, alpha2: complex, T: float,
                         w: SmoothWeight,
                         ev: ze.ZetaEvaluator = ze.DEFAULT_EVAL,
                         step: float | None = None) -> complex:
    """int X~_{a1,a2,t} w(t/T) dt, X~ = lambda(1/2+a1+it) lambda(1/2+a2+it);
    the phase turns at rate ~ 2 log(t/2 pi), so the step must stay below
    2 pi / (20 log T)."""
    L = math.log(T)
    for a in (alpha1, alpha2):
        if abs(complex(a).imag) > L ** 2:
            raise ShiftTooLarge(f"shift {a} imaginary part above (log T)^2")
    limit = 2.0 * np.pi / (20.0 * L)
    if step is None:
        step = limit
    if step > limit * (1 + 1e-12):
        raise StepTooCoarse(f"step {step} above 2 pi/(20 log T) = {limit:.3g}")
    a, d = w.support
    n = int(math.ceil((d - a) * T / step))
    if n % 2 == 1:
        n += 1
    ts = np.linspace(a * T, d * T, n + 1)
    h = ts[1] - ts[0]
    sw = np.ones(n + 1)
    sw[1:-1:2] = 4.0
    sw[2:-1:2] = 2.0
    total = 0.0 + 0.0j
    chunk = 1 << 20
    for i0 in range(0, n + 1, chunk):
        tc = ts[i0:i0 + chunk]
        xt = (ze.lambda_chi_array(0.5 + alpha1 + 1j * tc)
              * ze.lambda_chi_array(0.5 + alpha2 + 1j * tc))
        total += np.sum(sw[i0:i0 + chunk] * xt * w(tc / T))
    return complex((h / 3.0) * total)
