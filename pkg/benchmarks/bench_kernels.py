"""Compare the numba kernels with their numpy counterparts.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints best-of-``repeat`` wall times per call and the speed-up. A second
section times complete prices in fresh interpreters with and without
``COSHLIBOR_DISABLE_NUMBA=1``.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from coshlibor import _kernels
from coshlibor._accel import NUMBA_AVAILABLE
from coshlibor.affine import point_mass
from coshlibor.config import load_preset
from coshlibor.fourier import _floorlet_terms
from coshlibor.unimodal import find_kappa_floorlet
from coshlibor.validation import build_model

PRICE_SNIPPET = """
import time
from coshlibor.config import load_preset
from coshlibor.validation import build_model
from coshlibor.fourier import price_floorlet
m = build_model(load_preset({preset!r}))
price_floorlet(m, 3, 0.035)
t = time.perf_counter()
for k in range(2, 12):
    price_floorlet(m, k, 0.035)
print((time.perf_counter() - t) / 10)
"""


def _best(fn, repeat):
    fn()  # warm-up (and JIT compile)
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_table(repeat: int) -> list[tuple[str, int, float, float]]:
    model = build_model(load_preset("fig2"))
    k, strike = 5, 0.035
    kappa = find_kappa_floorlet(model, k, strike)
    coef, expo = _floorlet_terms(model, k, strike)
    t = model.tenor.date(k - 1)
    params = model.spec.kernel_params()
    atom_p, atom_loc = point_mass(model.spec, t, model.spec.x0)
    rows = []
    for n in (10_000, 1_000_000):
        omega = np.linspace(0.0, 500.0, n)
        args = (omega, -1.0, t, model.spec.x0, params, atom_p, atom_loc, coef, expo, kappa.kappa1, kappa.kappa2)
        a = _best(lambda: _kernels.integrand_numpy(*args), repeat)
        b = _best(lambda: _kernels.integrand_jit(*args), repeat)
        ref = _kernels.integrand_numpy(*args)
        assert np.allclose(ref, _kernels.integrand_jit(*args), rtol=0, atol=1e-12 * np.abs(ref).max())
        rows.append(("inversion integrand", n, a, b))
        x = np.random.default_rng(0).normal(size=n)
        a = _best(lambda: _kernels.positive_part_numpy(x, coef, expo), repeat)
        b = _best(lambda: _kernels.positive_part_jit(x, coef, expo), repeat)
        rows.append(("payoff positive part", n, a, b))
        counts = np.random.default_rng(1).poisson(6.0, size=n)
        vals = np.random.default_rng(2).exponential(size=int(counts.sum()))
        a = _best(lambda: _kernels.sum_by_path_numpy(counts, vals), repeat)
        b = _best(lambda: _kernels.sum_by_path_jit(counts, vals), repeat)
        rows.append(("jump sum by path", n, a, b))
    return rows


def end_to_end(preset: str, disable: bool) -> float:
    env = dict(os.environ)
    if disable:
        env["COSHLIBOR_DISABLE_NUMBA"] = "1"
    else:
        env.pop("COSHLIBOR_DISABLE_NUMBA", None)
    out = subprocess.run([sys.executable, "-c", PRICE_SNIPPET.format(preset=preset)],
                         env=env, check=True, capture_output=True, text=True)
    return float(out.stdout.strip())


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not NUMBA_AVAILABLE:
        sys.exit("numba is not installed; nothing to compare")
    print(f"{'kernel':<22}{'size':>10}{'numpy [ms]':>13}{'numba [ms]':>13}{'speed-up':>10}")
    for name, n, a, b in kernel_table(args.repeat):
        print(f"{name:<22}{n:>10}{1e3 * a:>13.3f}{1e3 * b:>13.3f}{a / b:>10.1f}")
    print()
    print(f"{'floorlet price':<22}{'':>10}{'numpy [ms]':>13}{'numba [ms]':>13}{'speed-up':>10}")
    for preset in ("fig1", "fig2"):
        a = end_to_end(preset, True)
        b = end_to_end(preset, False)
        print(f"{preset:<22}{'':>10}{1e3 * a:>13.3f}{1e3 * b:>13.3f}{a / b:>10.1f}")


if __name__ == "__main__":
    main()
