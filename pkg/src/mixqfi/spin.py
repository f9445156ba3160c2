"""Spin-j angular momentum matrices in the basis |j, j>, |j, j-1>, ..., |j, -j>."""

from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.linalg import expm


def two_j(j):
    """Return ``2j`` as an int, rejecting spins that are not half-integers > 0."""
    tj = Fraction(j).limit_denominator(2) * 2
    if tj.denominator != 1 or tj <= 0 or abs(float(tj) - 2 * float(j)) > 1e-12:
        raise ValueError(f"spin must be a positive half-integer, got {j!r}")
    return int(tj)


def m_values(j):
    """Magnetic quantum numbers ``j, j-1, ..., -j``."""
    tj = two_j(j)
    return (tj - 2 * np.arange(tj + 1)) / 2.0


@lru_cache(maxsize=None)
def _spin_ops(tj):
    j = tj / 2.0
    m = m_values(j)
    sz = np.diag(m).astype(np.complex128)
    # <m+1|S+|m> = sqrt(j(j+1) - m(m+1)); row index of m+1 is one above m
    sp = np.zeros((tj + 1, tj + 1), dtype=np.complex128)
    for k in range(1, tj + 1):
        mm = m[k]
        sp[k - 1, k] = np.sqrt(j * (j + 1) - mm * (mm + 1))
    sx = 0.5 * (sp + sp.conj().T)
    sy = -0.5j * (sp - sp.conj().T)
    for a in (sx, sy, sz):
        a.flags.writeable = False
    return sx, sy, sz


def spin_operators(j):
    """``(Sx, Sy, Sz)`` for a single spin ``j``."""
    return _spin_ops(two_j(j))


def collective(op, n, position=None):
    """Embed a single-spin operator into ``n`` spins.

    With ``position=None`` the sum over all sites is returned, otherwise the
    operator acting on that site only.
    """
    op = np.asarray(op)
    dim = op.shape[0]
    eye = np.eye(dim)
    sites = range(n) if position is None else [position]
    total = 0
    for s in sites:
        term = np.ones((1, 1))
        for k in range(n):
            term = np.kron(term, op if k == s else eye)
        total = total + term
    return total


def pi_pulse_x(j):
    """Single-spin rotation ``exp(-i pi Sx)``; maps |j,m> to a phase times |j,-m>."""
    sx, _, _ = spin_operators(j)
    return expm(-1j * np.pi * sx)


def local_pi_pulse(n, j):
    """Tensor power of :func:`pi_pulse_x` over ``n`` spins."""
    single = pi_pulse_x(j)
    u = np.ones((1, 1), dtype=np.complex128)
    for _ in range(n):
        u = np.kron(u, single)
    return u
