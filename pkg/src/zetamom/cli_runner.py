"""Batch front door: verification suites, moment estimation, transition
scans, main-term comparisons, and correlation curves.

Exit codes: 0 pass, 1 assertion failure, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import __version__
from . import main_terms as mt
from . import moment_lab as ml
from . import prime_tools as pt
from . import proxy_polys as pp
from . import zeta_engine as ze


def _read_config(path: str) -> dict:
    """Flat key=value file; '#' starts a comment."""
    out = {}
    with open(path) as f:
        for ln, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{ln}: expected key=value")
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def _merged(args: argparse.Namespace, keys) -> dict:
    """Config-file values overridden by any explicitly passed flags."""
    cfg = {}
    if getattr(args, "config", None):
        cfg.update(_read_config(args.config))
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    return cfg


def _write_manifest(out_path: str, command: str, cfg: dict, seed, t0: float,
                    outputs) -> None:
    manifest = {
        "command": command,
        "config": {k: (v if isinstance(v, (int, float, str, bool, list))
                       else str(v)) for k, v in cfg.items()},
        "seed": seed,
        "version": __version__,
        "wall_time_s": round(time.time() - t0, 3),
        "outputs": list(outputs),
    }
    with open(out_path, "w") as f:
        json.dump(manifest, f, indent=1)


# ---------------------------------------------------------------------------
# verify suites


def _suite_zeta() -> list:
    checks = []
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(20):
        t = rng.uniform(10, 1e4)
        s = 0.5 + 1j * t
        lhs = ze.zeta_em(s)
        rhs = ze.lambda_chi(s) * ze.zeta_em(1 - s)
        worst = max(worst, abs(lhs - rhs) / abs(lhs))
    checks.append(("functional-equation residual < 1e-8", worst < 1e-8))
    worst = 0.0
    for t in np.linspace(1e3, 1e4, 20):
        worst = max(worst, abs(ze.zeta_rs(t) - ze.zeta_em(0.5 + 1j * t)))
    checks.append(("riemann-siegel vs euler-maclaurin < 1e-5", worst < 1e-5))
    return checks


def _suite_primes() -> list:
    checks = []
    table = pt.sieve(10 ** 6)
    ok = True
    for X in (10 ** 4, 10 ** 6):
        for h in (0.0, 1.0, 50.0):
            s = pt.prime_cos_sum(h, X, table)
            ref = math.log(abs(ze.zeta_em(1 + 1 / math.log(X) + 1j * h)))
            ok = ok and abs(s - ref) <= 2.5
    checks.append(("prime cosine sum tracks log|zeta| within 2.5", ok))
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(50):
        z = tuple(rng.uniform(-0.2, 0.2) + 1j * rng.uniform(-2, 2)
                  for _ in range(4))
        p = int(rng.choice([2, 3, 5, 7]))
        m = int(rng.integers(1, 4))
        closed = pt.b_coeff(z, p ** m, table)
        series = pt.b_coeff_series(z, p, m)
        worst = max(worst, abs(closed - series) / max(abs(series), 1e-30))
    checks.append(("B-coefficient closed form vs series < 1e-9", worst < 1e-9))
    return checks


def _suite_proxies() -> list:
    checks = []
    sch = pt.block_schedule(1e5, 1.0, "UpperBound")
    fam = pp.proxy_family(0.5, sch)
    rng = np.random.default_rng(2)
    ok_i = ok_h = True
    for _ in range(40):
        t = rng.uniform(100, 1e4)
        h1, h2 = rng.uniform(-1, 1, 2)
        for beta in (0.3, 0.7):
            iw = pp.interpolation_witness(t, h1, h2, beta, fam)
            ok_i = ok_i and iw.lhs <= iw.rhs
            hw = pp.holder_witness_lower(t, h1, h2, beta, fam)
            ok_h = ok_h and hw.lhs <= hw.rhs * (1 + 1e-12)
    checks.append(("interpolation witnesses hold", ok_i))
    checks.append(("lower-bound Hoelder witnesses hold", ok_h))
    poly = pp.make_poly([2, 3], [1.0, 1.0])
    gap = pp.mean_value_gap(poly, 1e5)
    checks.append(("Dirichlet mean value gap < 1e-3", gap < 1e-3))
    return checks


def _suite_mainterms() -> list:
    checks = []
    T = 2000.0
    w = mt.SmoothWeight()
    tw = mt.trivial_twist(T)
    smt = mt.second_main_term(0.0, 0.0, tw, w, T, check=False)
    orc = mt.lhs_oracle(T, (0.0, 0.0), tw, w, dt=0.02, check=False)
    ratio = (smt / orc.value).real
    checks.append(("second main term vs oracle in [0.85, 1.15]",
                   0.85 <= ratio <= 1.15))
    osc = mt.oscillatory_integral(0.0, 0.0, 1e4, mt.LOWER_BOUND_WEIGHT)
    checks.append(("oscillatory integral within 5T/log T",
                   abs(osc) <= 5e4 / math.log(1e4)))
    return checks


_SUITES = {
    "zeta": _suite_zeta,
    "primes": _suite_primes,
    "proxies": _suite_proxies,
    "mainterms": _suite_mainterms,
}


def cmd_verify(args) -> int:
    t0 = time.time()
    name = args.suite
    if name not in _SUITES and name != "all":
        print(f"unknown suite {name!r}; choose from "
              f"{sorted(_SUITES)} or 'all'", file=sys.stderr)
        return 2
    names = sorted(_SUITES) if name == "all" else [name]
    failed = 0
    for n in names:
        for label, ok in _SUITES[n]():
            print(f"[{n}] {label}: {'PASS' if ok else 'FAIL'}")
            failed += 0 if ok else 1
    if args.out:
        _write_manifest(args.out, "verify", {"suite": name}, None, t0, [])
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# estimation commands


def cmd_mom(args) -> int:
    t0 = time.time()
    cfg = _merged(args, ("T", "beta", "theta", "n_t", "n_h", "seed",
                         "estimator", "workers"))
    if "T" not in cfg or "beta" not in cfg:
        print("mom requires --T and --beta", file=sys.stderr)
        return 2
    try:
        mc = ml.MomConfig(T=float(cfg["T"]), beta=float(cfg["beta"]),
                          theta=float(cfg.get("theta", 0.0)),
                          n_t=int(cfg.get("n_t", 512)),
                          n_h=int(cfg.get("n_h", 65)),
                          seed=int(cfg.get("seed", 0)),
                          estimator=cfg.get("estimator", "median-of-means"))
    except ValueError as e:
        print(f"invalid parameters: {e}", file=sys.stderr)
        return 2
    est = ml.mom2_estimate(mc, workers=int(cfg.get("workers", 1)))
    out = args.out or "mom.csv"
    ml.write_estimate_csv(out, [est])
    _write_manifest(out + ".manifest.json", "mom", cfg, mc.seed, t0, [out])
    print(f"value={est.value:.17g} stderr={est.stderr:.17g} "
          f"dominance={est.dominance:.17g}")
    return 0


def cmd_scan(args) -> int:
    t0 = time.time()
    cfg = _merged(args, ("betas", "theta", "ladder", "n_t", "n_h", "seed",
                         "workers"))
    try:
        betas = [float(x) for x in str(cfg.get("betas", "0.3,0.5,0.7,0.9,1.0")).split(",")]
        ladder = [float(x) for x in str(cfg.get("ladder", "1e4,1e5,1e6")).split(",")]
        theta = float(cfg.get("theta", 0.0))
        if theta <= -1 or any(b < 0 for b in betas):
            raise ValueError("theta must exceed -1 and betas be nonnegative")
    except ValueError as e:
        print(f"invalid parameters: {e}", file=sys.stderr)
        return 2
    rows = ml.transition_scan(
        betas, theta, ladder,
        {"n_t": int(cfg.get("n_t", 512)), "n_h": int(cfg.get("n_h", 65)),
         "seed": int(cfg.get("seed", 0))},
        workers=int(cfg.get("workers", 1)))
    out = args.out or "scan.json"
    ml.write_scan_json(out, rows)
    _write_manifest(out + ".manifest.json", "scan", cfg,
                    int(cfg.get("seed", 0)), t0, [out])
    for r in rows:
        print(f"beta={r['beta']:.3g} fitted={r['fitted_exponent']:+.3f} "
              f"predicted={r['predicted_exponent']:+.3f} regime={r['regime']}")
    return 0


def cmd_mainterm(args) -> int:
    t0 = time.time()
    cfg = _merged(args, ("order", "T", "shifts", "M", "dt", "twist_file", "eta"))
    try:
        order = int(cfg.get("order", 2))
        T = float(cfg["T"])
        shifts = [1j * float(x) for x in str(cfg.get("shifts", "0,0")).split(",")]
        if order not in (2, 4) or len(shifts) != order:
            raise ValueError(f"order {order} needs {order} shifts")
        eta = float(cfg.get("eta", 0.05))
        if order == 4 and eta >= 1 / 11:
            raise ValueError("fourth-moment twist length exponent must be < 1/11")
    except (KeyError, ValueError) as e:
        print(f"invalid parameters: {e}", file=sys.stderr)
        return 2
    if cfg.get("twist_file"):
        poly = pp.from_csv(str(cfg["twist_file"]))
        twist = mt.TwistSpec(a_poly=poly, b_poly=poly, eta=eta, T=T)
    else:
        twist = mt.trivial_twist(T, eta=eta)
    w = mt.SmoothWeight()
    M = int(cfg.get("M", 16))
    dt = float(cfg.get("dt", 0.02))
    spec = mt.ContourSpec(centers=tuple(shifts), T=T, nodes_per_circle=M)
    if order == 2:
        main = mt.second_main_term(shifts[0], shifts[1], twist, w, T,
                                   spec=spec, check=False)
    else:
        main = mt.fourth_main_term(shifts, twist, w, T, spec=spec, check=False)
    orc = mt.lhs_oracle(T, shifts, twist, w, dt=dt, check=False)
    ratio = (main / orc.value).real
    record = {"T": T, "shifts": [s.imag for s in shifts], "order": order,
              "main_term": [main.real, main.imag],
              "oracle": [orc.value.real, orc.value.imag],
              "ratio": ratio, "M": M, "dt": dt}
    out = args.out or "mainterm.json"
    with open(out, "w") as f:
        json.dump(record, f, indent=1)
    _write_manifest(out + ".manifest.json", "mainterm", cfg, None, t0, [out])
    print(f"main={main:.6g} oracle={orc.value:.6g} ratio={ratio:.4f}")
    return 0


def cmd_correlate(args) -> int:
    t0 = time.time()
    cfg = _merged(args, ("T", "beta", "dhs", "n_t", "seed", "workers"))
    try:
        T = float(cfg["T"])
        beta = float(cfg["beta"])
        dhs = [float(x) for x in str(cfg.get("dhs", "0.1,0.5,1.0")).split(",")]
        if beta < 0:
            raise ValueError("beta must be nonnegative")
    except (KeyError, ValueError) as e:
        print(f"invalid parameters: {e}", file=sys.stderr)
        return 2
    n_t = int(cfg.get("n_t", 512))
    seed = int(cfg.get("seed", 0))
    workers = int(cfg.get("workers", 1))
    out = args.out or "correlate.csv"
    with open(out, "w") as f:
        f.write("T,beta,dh,measured,predicted,ratio,n_t,seed\n")
        for dh in dhs:
            m = ml.shifted_pair_moment(T, beta, 0.0, dh, n_t, seed=seed,
                                       workers=workers)
            p = ml.correlation_prediction(T, beta, dh)
            f.write(f"{T:.17g},{beta:.17g},{dh:.17g},{m:.17g},{p:.17g},"
                    f"{m / p:.17g},{n_t},{seed}\n")
            print(f"dh={dh:.3g} measured={m:.6g} predicted={p:.6g} "
                  f"ratio={m / p:.3f}")
    _write_manifest(out + ".manifest.json", "correlate", cfg, seed, t0, [out])
    return 0


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zetamom")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp):
        sp.add_argument("--workers", type=int, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", type=str, default=None)
        sp.add_argument("--config", type=str, default=None)

    sp = sub.add_parser("verify", help="run an invariant suite")
    sp.add_argument("suite", type=str)
    common(sp)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("mom", help="moment-of-moments estimate")
    for flag, typ in (("--T", float), ("--beta", float), ("--theta", float),
                      ("--n_t", int), ("--n_h", int), ("--estimator", str)):
        sp.add_argument(flag, type=typ, default=None)
    common(sp)
    sp.set_defaults(fn=cmd_mom)

    sp = sub.add_parser("scan", help="freezing-transition scan")
    for flag, typ in (("--betas", str), ("--theta", float), ("--ladder", str),
                      ("--n_t", int), ("--n_h", int)):
        sp.add_argument(flag, type=typ, default=None)
    common(sp)
    sp.set_defaults(fn=cmd_scan)

    sp = sub.add_parser("mainterm", help="main term vs direct oracle")
    for flag, typ in (("--order", int), ("--T", float), ("--shifts", str),
                      ("--M", int), ("--dt", float), ("--twist-file", str),
                      ("--eta", float)):
        sp.add_argument(flag, type=typ, default=None,
                        dest=flag.lstrip("-").replace("-", "_"))
    common(sp)
    sp.set_defaults(fn=cmd_mainterm)

    sp = sub.add_parser("correlate", help="shifted pair-moment curve")
    for flag, typ in (("--T", float), ("--beta", float), ("--dhs", str),
                      ("--n_t", int)):
        sp.add_argument(flag, type=typ, default=None)
    common(sp)
    sp.set_defaults(fn=cmd_correlate)
    return p


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors already; map --version/-h to 0
        return int(e.code or 0)
    try:
        return args.fn(args)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
