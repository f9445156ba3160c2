"""Thermal spin ensembles: spin-temperature states, dice-sum degeneracies,
the closed-form maximal QFI and its lower bounds.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import logsumexp

from .control import find_sign_changes
from .qfi import DensityOperator
from .spin import m_values, two_j


@dataclass(frozen=True)
class SpinEnsemble:
    """``N`` independent spin-``j`` particles at inverse spin temperature ``beta``."""

    N: int
    j: float
    beta: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N!r}")
        two_j(self.j)
        if not math.isfinite(self.beta):
            raise ValueError("beta must be finite")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "j", two_j(self.j) / 2)
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def dim(self):
        return (two_j(self.j) + 1) ** self.N


def beta_from_polarization(P):
    """Inverse spin temperature ``ln((1+P)/(1-P))`` for polarization ``0 <= P < 1``."""
    if not 0 <= P < 1:
        raise ValueError(f"polarization must lie in [0, 1), got {P!r}")
    return math.log1p(P) - math.log1p(-P)


def log_partition_function(j, beta):
    return float(logsumexp(beta * m_values(j)))


def partition_function(j, beta):
    """``Z = sum_{m=-j}^{j} exp(beta m)``."""
    return math.exp(log_partition_function(j, beta))


def partition_function_closed(j, beta):
    """``cosh(beta j) + sinh(beta j)/tanh(beta/2)`` (``beta > 0``); ``2j+1`` at zero."""
    if beta == 0:
        return 2 * j + 1
    return math.cosh(beta * j) + math.sinh(beta * j) / math.tanh(beta / 2)


def _boltzmann(j, beta):
    m = m_values(j)
    lw = beta * m
    return m, np.exp(lw - logsumexp(lw))


def thermal_state(j, beta):
    """``exp(beta Sz)/Z`` in the ``|j, m>`` basis ordered ``m = j..-j``.

    For ``beta >= 0`` this ordering already sorts the spectrum decreasingly.
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    _, w = _boltzmann(j, beta)
    return DensityOperator(w, np.eye(w.size, dtype=np.complex128))


def sz_expectation(j, beta):
    """``<Sz> = d ln Z / d beta = sum_m m e^{beta m} / Z``."""
    m, w = _boltzmann(j, beta)
    return float(np.dot(w, m))


def sz2_expectation(j, beta):
    """``<Sz^2> = Z''/Z``."""
    m, w = _boltzmann(j, beta)
    return float(np.dot(w, m * m))


def high_temperature_prefactor(j, beta):
    """``Q(beta) = 4 <Sz>^2``, the coefficient of ``N^2`` in the maximal QFI."""
    return 4.0 * sz_expectation(j, beta) ** 2


# --------------------------------------------------------------------------
# Degeneracies of the total Sz
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DegeneracyTable:
    """Exact counts ``q(k)`` for ``k = -Nj, -Nj+1, ..., Nj``."""

    N: int
    j: float
    counts: tuple

    @property
    def k_values(self):
        return np.arange(len(self.counts)) - self.N * self.j

    def __getitem__(self, k):
        idx = k + self.N * self.j
        i = int(round(idx))
        if abs(idx - i) > 1e-9 or not 0 <= i < len(self.counts):
            return 0
        return self.counts[i]

    def items(self):
        return zip(self.k_values.tolist(), self.counts)

    def total(self):
        return sum(self.counts)


def _binom(a, b):
    if a < 0 or b < 0 or b > a:
        return 0
    return math.comb(a, b)


def dice_degeneracy(N, j):
    """Number of ways ``q(k)`` that ``N`` fair ``(2j+1)``-sided dice with faces
    ``-j..j`` sum to ``k``, from the inclusion-exclusion formula."""
    if N < 1:
        raise ValueError("N must be >= 1")
    tj = two_j(j)
    sides = tj + 1
    counts = []
    for s in range(N * tj + 1):
        # s = k + Nj; the upper argument k + N(j+1) - 1 - l(2j+1) = s + N - 1 - l*sides
        q = 0
        for ell in range(N + 1):
            top = s + N - 1 - ell * sides
            if top < 0:
                break
            q += (-1) ** ell * math.comb(N, ell) * _binom(top, N - 1)
        counts.append(q)
    return DegeneracyTable(N=N, j=tj / 2, counts=tuple(counts))


def convolution_degeneracy(N, j):
    """Same counts by repeated convolution of the single-die face count."""
    if N < 1:
        raise ValueError("N must be >= 1")
    tj = two_j(j)
    poly = [1]
    for _ in range(N):
        nxt = [0] * (len(poly) + tj)
        for i, a in enumerate(poly):
            for f in range(tj + 1):
                nxt[i + f] += a
        poly = nxt
    return DegeneracyTable(N=N, j=tj / 2, counts=tuple(poly))


# --------------------------------------------------------------------------
# Maximal QFI and bounds
# --------------------------------------------------------------------------


def _log_sinh2_over_cosh(x):
    # log(sinh(x)^2 / cosh(x)) for x > 0 without overflow
    return x + 2 * np.log(-np.expm1(-2 * x)) - np.log1p(np.exp(-2 * x)) - math.log(2)


def thermal_max_qfi(e, g=1.0):
    """``g^2 sum_k q(k) sinh^2(beta k) / (Z^N cosh(beta k)) (2k)^2``.

    Terms are accumulated in log space, so large ``N``, ``j`` and ``beta``
    do not overflow. ``beta = 0`` gives exactly zero.
    """
    if g < 0:
        raise ValueError("g must be nonnegative")
    beta = abs(e.beta)
    if beta == 0 or g == 0:
        return 0.0
    table = dice_degeneracy(e.N, e.j)
    ks = table.k_values
    pos = np.abs(ks) > 0
    x = beta * np.abs(ks[pos])
    logq = np.array([math.log(c) for c, keep in zip(table.counts, pos) if keep])
    logs = logq + _log_sinh2_over_cosh(x) + np.log(4 * ks[pos] ** 2)
    logs -= e.N * log_partition_function(e.j, beta)
    return g * g * float(np.exp(logsumexp(logs)))


def lower_bound_LB(e):
    """``4/Z^N sum_k q(k) (cosh(beta k) - 1) k^2``."""
    beta = abs(e.beta)
    if beta == 0:
        return 0.0
    table = dice_degeneracy(e.N, e.j)
    ks = table.k_values
    pos = np.abs(ks) > 0
    x = beta * np.abs(ks[pos])
    logq = np.array([math.log(c) for c, keep in zip(table.counts, pos) if keep])
    # cosh(x) - 1 = 2 sinh(x/2)^2
    log_c1 = math.log(2) + 2 * (x / 2 + np.log(-np.expm1(-x)) - math.log(2))
    logs = logq + log_c1 + np.log(4 * ks[pos] ** 2)
    logs -= e.N * log_partition_function(e.j, beta)
    return float(np.exp(logsumexp(logs)))


def lower_bound_MB(e):
    """``4 [N(N-1) <Sz>^2 + N <Sz^2> - N j(j+1)/3]``.

    At ``beta = 0`` the bracket vanishes identically, so the bound is zero.
    """
    n, j, b = e.N, e.j, e.beta
    mean = sz_expectation(j, b)
    second = sz2_expectation(j, b)
    return 4.0 * (n * (n - 1) * mean**2 + n * second - n * j * (j + 1) / 3.0)


def leading_order(e):
    """``4 N^2 <Sz>^2``."""
    return 4.0 * e.N**2 * sz_expectation(e.j, e.beta) ** 2


# --------------------------------------------------------------------------
# Time dependence g(T)
# --------------------------------------------------------------------------


def modulation_g(f, T, breakpoints=None, samples=4096, rtol=1e-11):
    """``int_0^T |f(t)| dt``, split at sign changes so each panel is smooth.

    Args:
        f: real modulation.
        T: evolution time, positive.
        breakpoints: known zeros of ``f``; located numerically when omitted.
    """
    if not T > 0:
        raise ValueError("T must be positive")
    if breakpoints is None:
        breakpoints = find_sign_changes(f, T, samples=samples)
    edges = [0.0] + sorted(t for t in breakpoints if 0 < t < T) + [T]
    total = []
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(lambda t: abs(f(t)), a, b, epsabs=0, epsrel=rtol, limit=200)
        if not math.isfinite(val):
            raise ValueError("modulation returned non-finite values")
        total.append(val)
    return math.fsum(total)


def frequency_g(amplitude, omega, T):
    """``g_w(T) = int_0^T B t |sin(w t)| dt`` with breakpoints at ``k pi / w``."""
    zeros = np.arange(1, int(omega * T / np.pi) + 1) * np.pi / omega
    return modulation_g(lambda t: amplitude * t * math.sin(omega * t), T, breakpoints=zeros)


def scaling_exponent(series):
    """Least-squares slope of ``log(value)`` against ``log(size)``."""
    pts = list(series)
    if len(pts) < 3:
        raise ValueError("need at least three (size, value) points")
    x = np.array([s for s, _ in pts], dtype=float)
    y = np.array([v for _, v in pts], dtype=float)
    if np.any(y <= 0) or np.any(x <= 0):
        raise ValueError("sizes and values must be positive")
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)
