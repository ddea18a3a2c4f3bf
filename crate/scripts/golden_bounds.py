"""Arbitrary-precision reference values for the convergence-bound evaluators.

Writes crates/core/tests/data/conv_bound_golden.csv: 50 random parameter points
per scenario (noiseless, awgn, fading, imperfect) with a, b and the full
right-hand side evaluated at 50 significant digits. Inputs are written as short
decimals so the Rust side parses exactly the values used here.

Also prints a few single reference values used in unit tests.
"""
import csv
import random
import sys

from mpmath import mp, mpf, sqrt, log

mp.dps = 50

SCENARIOS = ["noiseless", "awgn", "fading", "imperfect"]


def terms(scn, K, rho, alpha, sd, g_th, dmax, gs):
    K = mpf(K)
    sr = sqrt(rho)
    ak = alpha * K
    none = (1 - alpha) ** int(K)
    if scn == "noiseless":
        return mpf(1), mpf(0)
    if scn == "awgn":
        return 1 - 1 / (K * sr), 2 * gs / (K * sr)
    if scn == "fading":
        return 1 - none - 2 / (ak * sr), 4 * gs / (ak * sr)
    csi = sqrt(6) * sd / (sqrt(ak) * sqrt(sqrt(g_th) - dmax))
    return 1 - none - 2 / (ak * sr) - 2 * csi, (4 / (ak * sr) + 4 * csi) * gs


def bound(scn, p):
    gs = p["gamma"] * p["sigma1"]
    den, b = terms(scn, p["K"], p["rho"], p["alpha"], p["sigma_delta"], p["g_th"], p["delta_max"], gs)
    if den <= 0:
        return None
    a = 1 / den
    core = sqrt(p["L1"]) * (p["F0"] - p["Fstar"] + p["gamma"] / 2) + 2 * gs / sqrt(mpf(p["K"]))
    return a, b, a / sqrt(mpf(p["N"])) * (core + b)


def dec(x, digits=6):
    return f"{float(x):.{digits}g}" if digits < 17 else mp.nstr(x, digits)


def draw(rng, scn):
    raw = {
        "K": rng.randint(2, 2000),
        "rho": dec(10 ** rng.uniform(-0.5, 3)),
        "alpha": "1" if scn in ("noiseless", "awgn") else dec(rng.uniform(0.2, 0.95)),
        "L1": dec(10 ** rng.uniform(-1, 3)),
        "sigma1": dec(10 ** rng.uniform(-1, 2)),
        "F0": dec(rng.uniform(1, 50)),
        "Fstar": dec(rng.uniform(0, 1)),
        "gamma": dec(10 ** rng.uniform(-1, 1)),
        "N": rng.randint(1, 5000),
    }
    if scn == "imperfect":
        g_th = -log(mpf(raw["alpha"]))
        raw["g_th"] = dec(g_th, 17)
        raw["sigma_delta"] = dec(rng.uniform(0, 0.05))
        raw["delta_max"] = dec(mpf(raw["sigma_delta"]) * sqrt(3), 17)
    elif scn == "fading":
        raw["g_th"] = dec(-log(mpf(raw["alpha"])), 17)
        raw["sigma_delta"] = "0"
        raw["delta_max"] = "0"
    else:
        raw["g_th"] = "0"
        raw["sigma_delta"] = "0"
        raw["delta_max"] = "0"
    return raw


def parsed(raw):
    return {k: (v if isinstance(v, int) else mpf(v)) for k, v in raw.items()}


def main(path):
    rng = random.Random(20201)
    cols = ["scenario", "K", "rho", "alpha", "sigma_delta", "g_th", "delta_max",
            "L1", "sigma1", "F0", "Fstar", "gamma", "N", "a", "b", "rhs"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for scn in SCENARIOS:
            made = 0
            while made < 50:
                raw = draw(rng, scn)
                out = bound(scn, parsed(raw))
                if out is None or (scn == "imperfect" and sqrt(mpf(raw["g_th"])) <= mpf(raw["delta_max"])):
                    continue
                a, b, rhs = out
                w.writerow([scn] + [raw[c] for c in cols[1:13]] + [mp.nstr(v, 25) for v in (a, b, rhs)])
                made += 1

    # single reference values
    print("perr_awgn(100,1,10) =", mp.nstr(1 / (10 * mpf(1)) + 1 / (100 * sqrt(10)) + 1 / (200 * sqrt(10)), 25))
    alpha = mpf("0.9")
    g_th = log(1 / alpha)
    sd = mpf("0.01")
    dmax = sd * sqrt(3)
    ak = alpha * 100
    val = (mpf(1) / 2 * (1 - alpha) ** 100 + sqrt(6) / sqrt(ak) * (1 + 3 * sd / sqrt(sqrt(g_th) - dmax))
           + 2 / ak / sqrt(10) * mpf("1.5"))
    print("perr_imperfect(K=100, a=0.9, S=1, rho=10, sd=0.01) =", mp.nstr(val, 25))
    print("a_awgn(100, 10) =", mp.nstr(1 / (1 - 1 / (100 * sqrt(10))), 25))
    print("a_fad(100, 10, 0.9) =", mp.nstr(1 / (1 - (1 - alpha) ** 100 - 2 / (ak * sqrt(10))), 25))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/data/conv_bound_golden.csv")
