"""Hot inner loops, each with a numba kernel and a pure-numpy twin.

The public functions dispatch on :data:`mixqfi._accel.USE_NUMBA`. Both
implementations are importable directly (``*_numba`` / ``*_numpy``) so tests
and the benchmark can compare them on identical inputs.
"""

import numpy as np

from ._accel import USE_NUMBA, njit

ZERO_TOL = 1e-14


# --------------------------------------------------------------------------
# QFI of a fixed spectrum in many bases: 2 sum_kl c_kl |(B^+ h B)_kl|^2
# --------------------------------------------------------------------------


def qfi_in_bases_numpy(coeff, h, bases):
    hb = np.conj(np.swapaxes(bases, -1, -2)) @ h @ bases
    return 2.0 * np.einsum("kl,nkl->n", coeff, hb.real**2 + hb.imag**2)


@njit
def qfi_in_bases_numba(coeff, h, bases):
    n, d, _ = bases.shape
    out = np.empty(n)
    tmp = np.empty((d, d), dtype=np.complex128)
    for s in range(n):
        b = bases[s]
        for i in range(d):
            for col in range(d):
                acc = 0j
                for j in range(d):
                    acc += h[i, j] * b[j, col]
                tmp[i, col] = acc
        total = 0.0
        for k in range(d):
            for m in range(k + 1, d):
                c = coeff[k, m]
                if c == 0.0:
                    continue
                acc = 0j
                for i in range(d):
                    acc += np.conj(b[i, k]) * tmp[i, m]
                total += c * (acc.real * acc.real + acc.imag * acc.imag)
        # symmetric coefficient matrix, zero diagonal
        out[s] = 4.0 * total
    return out


def qfi_in_bases(coeff, h, bases):
    """QFI of the spectrum behind ``coeff`` placed in each basis of ``bases``.

    Args:
        coeff: (d, d) symmetric coefficient matrix with zero diagonal.
        h: (d, d) Hermitian generator.
        bases: (n, d, d) stack of unitaries; columns are the eigenvectors.

    Returns:
        (n,) array of QFI values.
    """
    bases = np.ascontiguousarray(bases, dtype=np.complex128)
    if bases.ndim == 2:
        bases = bases[None]
    coeff = np.ascontiguousarray(coeff, dtype=np.float64)
    h = np.ascontiguousarray(h, dtype=np.complex128)
    if USE_NUMBA:
        return qfi_in_bases_numba(coeff, h, bases)
    return qfi_in_bases_numpy(coeff, h, bases)


# --------------------------------------------------------------------------
# exp(-i H dt) for a stack of Hermitian matrices
# --------------------------------------------------------------------------


def step_propagators_numpy(hs, dts):
    w, v = np.linalg.eigh(hs)
    phase = np.exp(-1j * w * dts[:, None])
    return (v * phase[:, None, :]) @ np.conj(np.swapaxes(v, -1, -2))


@njit
def step_propagators_numba(hs, dts):
    n, d, _ = hs.shape
    out = np.empty((n, d, d), dtype=np.complex128)
    for s in range(n):
        w, v = np.linalg.eigh(hs[s])
        for i in range(d):
            for j in range(d):
                acc = 0j
                for k in range(d):
                    acc += v[i, k] * np.exp(-1j * w[k] * dts[s]) * np.conj(v[j, k])
                out[s, i, j] = acc
    return out


def step_propagators(hs, dts):
    """Return ``exp(-1j * hs[s] * dts[s])`` for every slice ``s``."""
    hs = np.ascontiguousarray(hs, dtype=np.complex128)
    dts = np.ascontiguousarray(dts, dtype=np.float64)
    if USE_NUMBA:
        return step_propagators_numba(hs, dts)
    return step_propagators_numpy(hs, dts)


# --------------------------------------------------------------------------
# Time-ordered product U[n-1] ... U[1] U[0]
# --------------------------------------------------------------------------


def ordered_product_numpy(us):
    us = np.asarray(us)
    d = us.shape[-1]
    if us.shape[0] == 0:
        return np.eye(d, dtype=np.complex128)
    while us.shape[0] > 1:
        if us.shape[0] % 2:
            us = np.concatenate([us, np.eye(d, dtype=us.dtype)[None]], axis=0)
        # later factor multiplies from the left
        us = us[1::2] @ us[0::2]
    return us[0].copy()


@njit
def ordered_product_numba(us):
    n, d, _ = us.shape
    acc = np.eye(d, dtype=np.complex128)
    nxt = np.empty((d, d), dtype=np.complex128)
    for s in range(n):
        u = us[s]
        for i in range(d):
            for j in range(d):
                val = 0j
                for k in range(d):
                    val += u[i, k] * acc[k, j]
                nxt[i, j] = val
        acc[:, :] = nxt
    return acc


def ordered_product(us):
    """Time-ordered product of a sequence of unitaries, earliest first."""
    us = np.ascontiguousarray(us, dtype=np.complex128)
    if USE_NUMBA:
        return ordered_product_numba(us)
    return ordered_product_numpy(us)


# --------------------------------------------------------------------------
# Maximal-QFI formula for many spectra sharing one generator spectrum
# --------------------------------------------------------------------------


def max_qfi_batch_numpy(ps, gaps_sq):
    lo = ps
    hi = ps[:, ::-1]
    s = lo + hi
    both_zero = (np.abs(lo) < ZERO_TOL) & (np.abs(hi) < ZERO_TOL)
    safe = np.where(both_zero, 1.0, s)
    c = np.where(both_zero, 0.0, (lo - hi) ** 2 / safe)
    return 0.5 * c @ gaps_sq


@njit
def max_qfi_batch_numba(ps, gaps_sq):
    n, d = ps.shape
    out = np.empty(n)
    for s in range(n):
        total = 0.0
        for k in range(d):
            a = ps[s, k]
            b = ps[s, d - 1 - k]
            if abs(a) < ZERO_TOL and abs(b) < ZERO_TOL:
                continue
            total += (a - b) * (a - b) / (a + b) * gaps_sq[k]
        out[s] = 0.5 * total
    return out


def max_qfi_batch(ps, gaps_sq):
    """Evaluate the maximal-QFI formula row-wise.

    ``ps`` rows must be sorted decreasingly; ``gaps_sq[k]`` is
    ``(h[k] - h[d-1-k])**2`` for the decreasing generator spectrum ``h``.
    """
    ps = np.ascontiguousarray(ps, dtype=np.float64)
    gaps_sq = np.ascontiguousarray(gaps_sq, dtype=np.float64)
    if USE_NUMBA:
        return max_qfi_batch_numba(ps, gaps_sq)
    return max_qfi_batch_numpy(ps, gaps_sq)
