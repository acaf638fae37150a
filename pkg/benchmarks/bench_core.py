"""Compiled vs pure-Python kernels.

    python benchmarks/bench_core.py [--rows N] [--repeat R]

Times each kernel on identical inputs for both backends and checks that
the outputs agree bit for bit.
"""
import argparse
import time

import numpy as np

from risambc import _backend, _pycore, model
from risambc.montecarlo import channel_sd, n_columns


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _flat(out):
    if isinstance(out, tuple):
        return np.concatenate([np.ravel(o) for o in out])
    return np.ravel(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, default=1 << 15)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = _backend.available()
    if "compiled" not in backends:
        print("compiled extension not built; only the python backend is available")
    s = model.Scenario()
    dp = model.derive(s)
    sd = channel_sd(dp)
    z = np.random.default_rng(1).standard_normal((args.rows, n_columns(s.M, s.Q)))
    xs = np.linspace(0.05, 60.0, 2000)
    thr = 2.0 ** s.r_u, 2.0 ** s.r_c

    kernels = {
        "outage_block": lambda k: k.outage_block(z, s.M, s.Q, sd, s.kappa, s.varpi, dp.rho, dp.rho_e, *thr),
        "sinr_block": lambda k: k.sinr_block(z, s.M, s.Q, sd, s.kappa, s.varpi, dp.rho, dp.rho_e),
        "reg_lower_gamma_vec": lambda k: k.reg_lower_gamma_vec(dp.alpha + 1.0, xs),
        "ln_bessel_k_scaled_vec": lambda k: k.ln_bessel_k_scaled_vec(6, xs),
        "laguerre_pair(300)": lambda k: k.laguerre_pair(300, xs),
    }
    print(f"{'kernel':<24}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}  identical")
    for name, fn in kernels.items():
        times, outs = {}, {}
        for b, mod in backends.items():
            times[b], outs[b] = timeit(lambda: fn(mod), args.repeat)
        same = ""
        if len(outs) == 2:
            same = str(np.array_equal(_flat(outs["python"]), _flat(outs["compiled"])))
        speed = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        print(f"{name:<24}" + "".join(f"{times[b] * 1e3:>10.2f}ms" for b in backends) + f"{speed:>9.1f}x  {same}")


if __name__ == "__main__":
    main()
