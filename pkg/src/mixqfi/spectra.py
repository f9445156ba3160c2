"""Spectrum algebra: pair coefficients, their q-coefficient majorant, and
the majorization helpers used by the bounds.

Indices are zero-based throughout. A state spectrum is a 1-d float array that
is weakly decreasing, nonnegative and sums to one.
"""

import numpy as np

from .kernels import ZERO_TOL

SPECTRUM_TOL = 1e-12


class SpectrumError(ValueError):
    """Raised for vectors that violate a spectrum invariant."""


def state_spectrum(p, tol=SPECTRUM_TOL):
    """Validate ``p`` as a state spectrum and return it renormalized.

    Entries within ``tol`` of zero on the negative side are clipped to zero.
    The result is a read-only float array.

    Raises:
        SpectrumError: on empty input, negative entries, a sum away from one,
            or entries that are not weakly decreasing.
    """
    p = np.array(p, dtype=float).ravel()
    if p.size == 0:
        raise SpectrumError("spectrum must have at least one entry")
    if not np.all(np.isfinite(p)):
        raise SpectrumError("spectrum entries must be finite")
    if np.any(p < -tol):
        raise SpectrumError(f"negative spectrum entry {p.min():.3g}")
    if np.any(np.diff(p) > tol):
        raise SpectrumError("spectrum must be weakly decreasing")
    total = p.sum()
    if abs(total - 1.0) > tol * max(1, p.size):
        raise SpectrumError(f"spectrum sums to {total!r}, expected 1")
    p = np.clip(p, 0.0, None)
    p /= p.sum()
    p.flags.writeable = False
    return p


def decreasing(x, tol=SPECTRUM_TOL):
    """Return ``x`` as a float array after checking it is weakly decreasing."""
    x = np.array(x, dtype=float).ravel()
    if np.any(np.diff(x) > tol):
        raise SpectrumError("values must be weakly decreasing")
    return x


def sort_desc(x):
    """Stable decreasing sort; ties keep their input order."""
    x = np.asarray(x, dtype=float)
    return x[np.argsort(-x, kind="stable")]


def pair_coeff(p, i, j):
    """Coefficient ``(p_i - p_j)**2 / (p_i + p_j)``, zero if both vanish."""
    p = np.asarray(p, dtype=float)
    d = p.size
    for idx in (i, j):
        if not 0 <= idx < d:
            raise IndexError(f"index {idx} out of range for dimension {d}")
    a, b = p[i], p[j]
    if abs(a) < ZERO_TOL and abs(b) < ZERO_TOL:
        return 0.0
    return float((a - b) ** 2 / (a + b))


def coeff_matrix(p):
    """All pair coefficients as a symmetric (d, d) matrix with zero diagonal."""
    p = np.asarray(p, dtype=float)
    a = p[:, None]
    b = p[None, :]
    both_zero = (np.abs(a) < ZERO_TOL) & (np.abs(b) < ZERO_TOL)
    s = np.where(both_zero, 1.0, a + b)
    c = np.where(both_zero, 0.0, (a - b) ** 2 / s)
    np.fill_diagonal(c, 0.0)
    return c


def build_q_coefficients(p):
    """Nearest-neighbour coefficients ``q[k] = q_{k,k+1}`` dominating ``p_{i,j}``.

    Partial sums ``q_{i,j} = q[i] + ... + q[j-1]`` reproduce the central
    coefficients ``p_{i,d-1-i}`` exactly and are at least ``p_{i,j}`` for
    every other pair. Built from the innermost block outward: each step fixes
    the outer pair ``(a, b)`` around an already solved block ``(a+1, b-1)``.
    """
    p = np.asarray(p, dtype=float)
    d = p.size
    if d < 2:
        raise ValueError("q-coefficients need dimension d >= 2")
    c = coeff_matrix(p)
    q = np.zeros(d - 1)
    if d % 2 == 0:
        a = d // 2 - 1
        q[a] = c[a, a + 1]
    else:
        a = (d - 1) // 2
        # a one-element block needs no coefficients; the first outward
        # step below reproduces the d=3 base case
    b = d - 1 - a
    while a > 0:
        a, b = a - 1, b + 1
        q[a] = c[a, b] - c[a + 1, b]
        q[b - 1] = c[a + 1, b] - c[a + 1, b - 1]
    return q


def q_matrix(q):
    """Expand nearest-neighbour coefficients into all partial sums ``q_{i,j}``."""
    q = np.asarray(q, dtype=float)
    cs = np.concatenate([[0.0], np.cumsum(q)])
    m = np.abs(cs[None, :] - cs[:, None])
    return m


def gap_vector(x):
    """Mirror gaps ``x[i] - x[d-1-i]`` of the decreasing rearrangement.

    Returns an array of length ``ceil(d/2)``; for odd ``d`` the last entry
    pairs the middle value with itself and is zero.
    """
    x = sort_desc(np.asarray(x, dtype=float).ravel())
    d = x.size
    half = (d + 1) // 2
    return x[:half] - x[::-1][:half]


def weak_majorizes(x, y, tol=0.0):
    """True iff ``x`` is weakly majorized by ``y`` (``x <_w y``).

    Every partial sum of the decreasing rearrangement of ``x`` must not
    exceed the corresponding partial sum of ``y`` by more than ``tol``.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    sx = np.cumsum(sort_desc(x))
    sy = np.cumsum(sort_desc(y))
    return bool(np.all(sx <= sy + tol))


def phi_p(p, x):
    """``sum_i p[i] * x_[i]**2`` with ``x_[i]`` the i-th largest entry of ``x``."""
    p = np.asarray(p, dtype=float).ravel()
    x = np.asarray(x, dtype=float).ravel()
    if x.shape != p.shape:
        raise ValueError(f"length mismatch: {p.size} vs {x.size}")
    if np.any(x < 0):
        raise ValueError("phi_p is defined on nonnegative vectors only")
    return float(np.dot(p, sort_desc(x) ** 2))


def purity(p):
    p = np.asarray(p, dtype=float)
    return float(np.dot(p, p))
