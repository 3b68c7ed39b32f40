"""Moments of moments of zeta: estimators, predictions, and the transition scan.

MoM(T; beta, theta) = (1/T) int_T^{2T} ( int_{|h|<=(log T)^theta}
|zeta(1/2+it+ih)|^{2 beta} dh )^2 dt, estimated by stratified Monte Carlo
over t with a fixed-node Simpson rule in h.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.integrate import quad

from .errors import DegenerateFit, QuadratureUnstable
from . import zeta_engine as ze

_MOM_GROUPS = 16


@dataclass(frozen=True)
class MomConfig:
    T: float
    beta: float
    theta: float = 0.0
    n_t: int = 512
    n_h: int = 65
    seed: int = 0
    estimator: str = "median-of-means"   # or "plain"
    groups: int = _MOM_GROUPS

    def __post_init__(self):
        if self.n_h % 2 == 0 or self.n_h < 3:
            raise ValueError("n_h must be odd and >= 3")
        if self.n_t < 16:
            raise ValueError("n_t must be at least 16")
        if self.theta <= -1.0:
            raise ValueError("theta must exceed -1")
        if self.beta < 0.0:
            raise ValueError("beta must be nonnegative")
        if self.estimator not in ("plain", "median-of-means"):
            raise ValueError(f"unknown estimator {self.estimator!r}")

    @property
    def window(self) -> float:
        return math.log(self.T) ** self.theta


@dataclass(frozen=True)
class MomEstimate:
    value: float
    stderr: float
    dominance: float
    config: MomConfig

    def __post_init__(self):
        if not (self.value >= 0.0 and 0.0 <= self.dominance <= 1.0):
            raise ValueError("estimate out of range")


@dataclass(frozen=True)
class LadderFit:
    ladder: tuple
    log_values: tuple
    slope: float
    intercept: float
    residual_norm: float
    drift_flag: bool = False


def _abs_zeta_grid(ts: np.ndarray, ev: ze.ZetaEvaluator) -> np.ndarray:
    """|zeta(1/2 + it)| on an arbitrary positive grid (t >= 50 everywhere)."""
    return np.abs(ze.rs_z_batch(np.ascontiguousarray(ts), ev))


def _simpson_weights(n: int) -> np.ndarray:
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / 3.0


def inner_short_moment(t: float, cfg: MomConfig, ev: ze.ZetaEvaluator = ze.DEFAULT_EVAL,
                       check: bool = True) -> float:
    """int_{|h|<=(log T)^theta} |zeta(1/2+it+ih)|^{2 beta} dh by Simpson."""
    W = cfg.window
    if cfg.beta == 0.0:
        return 2.0 * W
    hs = np.linspace(-W, W, cfg.n_h)
    vals = _abs_zeta_grid(t + hs, ev) ** (2.0 * cfg.beta)
    step = hs[1] - hs[0]
    out = float(step * np.dot(_simpson_weights(cfg.n_h), vals))
    if check:
        n2 = 2 * cfg.n_h - 1
        hs2 = np.linspace(-W, W, n2)
        vals2 = _abs_zeta_grid(t + hs2, ev) ** (2.0 * cfg.beta)
        out2 = float((hs2[1] - hs2[0]) * np.dot(_simpson_weights(n2), vals2))
        if abs(out2 - out) > 0.01 * max(abs(out2), 1e-300):
            raise QuadratureUnstable(f"halving h-step moved the integral by "
                                     f"{abs(out2 - out) / abs(out2):.2%}")
    return out


def _stratified_ts(cfg: MomConfig) -> np.ndarray:
    """One uniform draw per stratum of [T, 2T]; stream keyed on (seed, stratum)
    so the sample set does not depend on scheduling or worker count."""
    w = cfg.T / cfg.n_t
    ts = np.empty(cfg.n_t)
    for i in range(cfg.n_t):
        u = np.random.default_rng(np.random.SeedSequence([cfg.seed, i])).random()
        ts[i] = cfg.T + (i + u) * w
    return ts


def _inner_batch(ts: np.ndarray, cfg: MomConfig, ev: ze.ZetaEvaluator,
                 workers: int = 1) -> np.ndarray:
    """Inner short moments for every t at once, sharing one batched zeta pass."""
    if cfg.beta == 0.0:
        return np.full(ts.size, 2.0 * cfg.window)
    W = cfg.window
    hs = np.linspace(-W, W, cfg.n_h)
    grid = (ts[:, None] + hs[None, :]).ravel()
    az = _rs_batch_workers(grid, ev, workers).reshape(ts.size, cfg.n_h)
    step = hs[1] - hs[0]
    return step * (np.abs(az) ** (2.0 * cfg.beta) @ _simpson_weights(cfg.n_h))


def _rs_batch_workers(grid: np.ndarray, ev: ze.ZetaEvaluator, workers: int) -> np.ndarray:
    grid = np.ascontiguousarray(grid)
    if workers <= 1 or grid.size < 4096:
        return ze.rs_z_batch(grid, ev)
    from concurrent.futures import ThreadPoolExecutor
    out = np.empty(grid.size)
    bounds = np.linspace(0, grid.size, workers + 1).astype(np.int64)
    with ThreadPoolExecutor(max_workers=workers) as ex:
        futs = [ex.submit(lambda a, b: out.__setitem__(slice(a, b),
                          ze.rs_z_batch(grid[a:b], ev)), a, b)
                for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        for f in futs:
            f.result()
    return out


def mom2_estimate(cfg: MomConfig, ev: ze.ZetaEvaluator = ze.DEFAULT_EVAL,
                  workers: int = 1) -> MomEstimate:
    """Second moment of the inner short moment over stratified t-samples."""
    if cfg.T > 1e8:
        raise ValueError("T capped at 1e8")
    if cfg.beta == 0.0:
        val = (2.0 * cfg.window) ** 2
        return MomEstimate(value=val, stderr=0.0, dominance=1.0 / cfg.n_t, config=cfg)
    ts = _stratified_ts(cfg)
    sq = _inner_batch(ts, cfg, ev, workers) ** 2
    total = math.fsum(sq.tolist())
    dominance = float(np.max(sq) / total) if total > 0 else 0.0
    if cfg.estimator == "plain":
        value = total / cfg.n_t
        stderr = float(np.std(sq, ddof=1) / math.sqrt(cfg.n_t))
    else:
        g = cfg.groups
        means = np.array([math.fsum(sq[i::g].tolist()) / sq[i::g].size for i in range(g)])
        value = float(np.median(means))
        stderr = float(np.std(means, ddof=1) / math.sqrt(g))
    return MomEstimate(value=value, stderr=stderr, dominance=dominance, config=cfg)


def shifted_pair_moment(T: float, beta: float, h1: float, h2: float, n_t: int,
                        ev: ze.ZetaEvaluator = ze.DEFAULT_EVAL, seed: int = 0,
                        workers: int = 1) -> float:
    """Monte-Carlo mean of |zeta(1/2+it+ih1) zeta(1/2+it+ih2)|^{2 beta}."""
    if beta == 0.0:
        return 1.0
    cfg = MomConfig(T=T, beta=beta, n_t=n_t, seed=seed)
    ts = _stratified_ts(cfg)
    a1 = np.abs(_rs_batch_workers(ts + h1, ev, workers))
    a2 = np.abs(_rs_batch_workers(ts + h2, ev, workers))
    return math.fsum(((a1 * a2) ** (2.0 * beta)).tolist()) / n_t


_NEAR_COEFF = 2.0


def correlation_prediction(T: float, beta: float, dh: float,
                           ev: ze.ZetaEvaluator = ze.DEFAULT_EVAL,
                           near_coeff: float = _NEAR_COEFF) -> float:
    """Predicted pair-moment scale: (log T)^{4 beta^2} for shifts within
    near_coeff/log T of each other, else (log T)^{2 beta^2} |zeta(1+i dh)|^{2 beta^2}.

    The near/far boundary is where |zeta(1+i dh)| ~ log T, i.e. dh of order
    1/log T; the default coefficient keeps the far formula from being applied
    where it would exceed the near ceiling.
    """
    if dh < 0:
        raise ValueError("dh must be nonnegative")
    L = math.log(T)
    if dh <= near_coeff / L:
        return L ** (4.0 * beta * beta)
    az = abs(ze.zeta_em(1.0 + 1j * dh, ev))
    return L ** (2.0 * beta * beta) * az ** (2.0 * beta * beta)


@dataclass(frozen=True)
class ExponentPrediction:
    exponent: float
    loglog_factor: bool
    regime: str


def predicted_mom_exponent(beta: float, theta: float) -> ExponentPrediction:
    """log T exponent of MoM(T; beta, theta); the two branches meet at the
    freezing point (1/sqrt2 for theta <= 0, sqrt((1+theta)/2) beyond)."""
    if theta <= -1.0:
        raise ValueError("theta must exceed -1")
    if beta < 0.0:
        raise ValueError("beta must be nonnegative")
    if theta <= 0.0:
        bc = 1.0 / math.sqrt(2.0)
        low = 2.0 * beta * beta * (1.0 + theta)
        high = 4.0 * beta * beta + theta - 1.0
    else:
        bc = math.sqrt((1.0 + theta) / 2.0)
        low = 2.0 * beta * beta + 2.0 * theta
        high = 4.0 * beta * beta - 1.0 + theta
    if abs(beta - bc) < 1e-12:
        return ExponentPrediction(exponent=low, loglog_factor=True, regime="critical")
    if beta < bc:
        return ExponentPrediction(exponent=low, loglog_factor=False, regime="low")
    return ExponentPrediction(exponent=high, loglog_factor=False, regime="frozen")


def envelope_integrals(v: int, beta: float, theta: float, T: float, schedule,
                       ev: ze.ZetaEvaluator = ze.DEFAULT_EVAL,
                       lower_coeff: float = 200.0) -> tuple:
    """(I1, I2) over h in [lower_coeff/log T, 2 (log T)^theta]:
    I1 has integrand |zeta(1+1/log T_v+ih)|^{2b^2-2} |zeta(1+ih)|^2,
    I2 has |zeta(1+1/log T_v+ih)|^{2b^2}."""
    if not (0 <= v <= schedule.ell):
        raise ValueError(f"block index {v} outside 0..{schedule.ell}")
    Tv = schedule.T0 if v == 0 else schedule.boundaries[v - 1]
    eps = 1.0 / math.log(Tv)
    a = lower_coeff / math.log(T)
    b = 2.0 * math.log(T) ** theta
    if a >= b:
        return 0.0, 0.0
    e2 = 2.0 * beta * beta

    def f1(h):
        return (abs(ze.zeta_em(1.0 + eps + 1j * h, ev)) ** (e2 - 2.0)
                * abs(ze.zeta_em(1.0 + 1j * h, ev)) ** 2)

    def f2(h):
        return abs(ze.zeta_em(1.0 + eps + 1j * h, ev)) ** e2

    out = []
    for f in (f1, f2):
        val, err = quad(f, a, b, epsrel=1e-3, limit=400)
        if err > 1e-3 * max(abs(val), 1e-300) * 10:
            raise QuadratureUnstable("envelope quadrature error above target")
        out.append(float(val))
    return tuple(out)


def ladder_fit(values) -> LadderFit:
    """Least-squares slope of log value against log log T over a T-ladder."""
    if len(values) < 3:
        raise ValueError("ladder needs at least 3 rungs")
    Ts = [T for T, _ in values]
    if any(b <= a for a, b in zip(Ts, Ts[1:])):
        raise ValueError("ladder must be strictly increasing")
    x = np.array([math.log(math.log(T)) for T in Ts])
    if np.ptp(x) < 1e-6:
        raise DegenerateFit("log log T values nearly coincide")
    y = np.array([math.log(v.value if isinstance(v, MomEstimate) else v)
                  for _, v in values])
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), res, *_ = np.linalg.lstsq(A, y, rcond=None)
    r = y - A @ np.array([slope, intercept])
    # a loglog T factor shows up as a systematic residual pattern: monotone,
    # or consistently curved (all second differences one sign)
    drift = False
    if np.linalg.norm(r) > 1e-8:
        d1, d2 = np.diff(r), np.diff(r, 2)
        drift = bool(np.all(d1 > 0) or np.all(d1 < 0)
                     or (d2.size >= 2 and (np.all(d2 > 0) or np.all(d2 < 0))))
    return LadderFit(ladder=tuple(Ts), log_values=tuple(y.tolist()),
                     slope=float(slope), intercept=float(intercept),
                     residual_norm=float(np.linalg.norm(r)), drift_flag=drift)


def transition_scan(beta_grid, theta: float, ladder, cfg_template: dict | None = None,
                    ev: ze.ZetaEvaluator = ze.DEFAULT_EVAL, workers: int = 1) -> list:
    """Per-beta fitted vs predicted exponents plus dominance, sharing one
    |zeta| grid per rung across all beta values."""
    tmpl = dict(cfg_template or {})
    tmpl.setdefault("n_t", 512)
    tmpl.setdefault("n_h", 65)
    tmpl.setdefault("seed", 0)
    estimates = {b: [] for b in beta_grid}
    for T in ladder:
        cfg0 = MomConfig(T=T, beta=1.0, theta=theta, **tmpl)
        ts = _stratified_ts(cfg0)
        W = cfg0.window
        hs = np.linspace(-W, W, cfg0.n_h)
        grid = (ts[:, None] + hs[None, :]).ravel()
        az = np.abs(_rs_batch_workers(grid, ev, workers)).reshape(ts.size, cfg0.n_h)
        sw = _simpson_weights(cfg0.n_h)
        step = hs[1] - hs[0]
        for b in beta_grid:
            cfg = MomConfig(T=T, beta=b, theta=theta, **tmpl)
            if b == 0.0:
                estimates[b].append((T, MomEstimate((2.0 * W) ** 2, 0.0,
                                                    1.0 / cfg.n_t, cfg)))
                continue
            sq = (step * ((az ** (2.0 * b)) @ sw)) ** 2
            total = math.fsum(sq.tolist())
            g = cfg.groups
            means = np.array([math.fsum(sq[i::g].tolist()) / sq[i::g].size
                              for i in range(g)])
            est = MomEstimate(value=float(np.median(means)),
                              stderr=float(np.std(means, ddof=1) / math.sqrt(g)),
                              dominance=float(np.max(sq) / total),
                              config=cfg)
            estimates[b].append((T, est))
    rows = []
    for b in beta_grid:
        fit = ladder_fit(estimates[b])
        pred = predicted_mom_exponent(b, theta)
        rows.append({
            "beta": b,
            "theta": theta,
            "fitted_exponent": fit.slope,
            "predicted_exponent": pred.exponent,
            "loglog_factor": pred.loglog_factor,
            "regime": pred.regime,
            "residual_norm": fit.residual_norm,
            "drift_flag": fit.drift_flag,
            "dominance": [e.dominance for _, e in estimates[b]],
            "values": [e.value for _, e in estimates[b]],
            "ladder": list(fit.ladder),
        })
    return rows


def write_estimate_csv(path: str, estimates) -> None:
    with open(path, "w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(["T", "beta", "theta", "value", "stderr", "dominance",
                     "n_t", "n_h", "seed"])
        for e in estimates:
            c = e.config
            wr.writerow([f"{c.T:.17g}", f"{c.beta:.17g}", f"{c.theta:.17g}",
                         f"{e.value:.17g}", f"{e.stderr:.17g}",
                         f"{e.dominance:.17g}", c.n_t, c.n_h, c.seed])


def write_scan_json(path: str, rows) -> None:
    with open(path, "w") as f:
        json.dump(rows, f, indent=1)
