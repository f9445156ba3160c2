"""Time the numba kernels against their numpy twins on identical inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The first numba call (compilation or cache load) is excluded.
"""

import argparse
import timeit

import numpy as np

from mixqfi import _accel, kernels
from mixqfi.qfi import _haar
from mixqfi.spectra import coeff_matrix


def cases(rng):
    d = 6
    p = np.sort(rng.dirichlet(np.ones(d)))[::-1]
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = z + z.conj().T
    bases = _haar(rng, 2000, d)
    yield "qfi_in_bases (2000 x d=6)", "qfi_in_bases", (coeff_matrix(p), h, bases)

    z = rng.standard_normal((10000, 2, 2)) + 1j * rng.standard_normal((10000, 2, 2))
    hs = z + np.conj(np.swapaxes(z, 1, 2))
    dts = np.full(10000, 1e-3)
    yield "step_propagators (10^4 x d=2)", "step_propagators", (hs, dts)

    us = _haar(rng, 10000, 2)
    yield "ordered_product (10^4 x d=2)", "ordered_product", (us,)

    ps = np.sort(rng.dirichlet(np.ones(4), size=10**6), axis=1)[:, ::-1].copy()
    gaps = np.array([36.0, 4.0, 4.0, 36.0])
    yield "max_qfi_batch (10^6 x d=4)", "max_qfi_batch", (ps, gaps)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        print("numba not installed; nothing to compare")
        return
    rng = np.random.default_rng(0)
    print(f"{'kernel':<32s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s} {'max |diff|':>11s}")
    for label, name, inputs in cases(rng):
        f_np = getattr(kernels, name + "_numpy")
        f_nb = getattr(kernels, name + "_numba")
        a, b = f_np(*inputs), f_nb(*inputs)
        t_np = min(timeit.repeat(lambda: f_np(*inputs), number=1, repeat=args.repeat))
        t_nb = min(timeit.repeat(lambda: f_nb(*inputs), number=1, repeat=args.repeat))
        diff = float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
        print(f"{label:<32s} {1e3 * t_np:11.2f} {1e3 * t_nb:11.2f} {t_np / t_nb:8.2f} {diff:11.1e}")


if __name__ == "__main__":
    main()
