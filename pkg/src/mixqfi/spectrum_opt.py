"""Optimal state spectra at fixed purity.

Maximizes the maximal-QFI formula over spectra ``p`` with ``sum(p) = 1``,
``sum(p**2) = gamma`` and ``p >= 0`` by multi-start projected gradient
ascent.
"""

from dataclasses import dataclass

import numpy as np

from .spectra import decreasing, sort_desc

FEAS_TOL = 1e-10


@dataclass(frozen=True)
class PurityProblem:
    h_eigs: np.ndarray
    gamma: float

    def __post_init__(self):
        h = decreasing(self.h_eigs)
        d = h.size
        if d < 1:
            raise ValueError("generator spectrum is empty")
        if not (1.0 / d - FEAS_TOL <= self.gamma <= 1.0 + FEAS_TOL):
            raise ValueError(f"purity {self.gamma!r} outside [1/{d}, 1]")
        object.__setattr__(self, "h_eigs", h)
        object.__setattr__(self, "gamma", float(min(max(self.gamma, 1.0 / d), 1.0)))

    @property
    def dim(self):
        return self.h_eigs.size


@dataclass(frozen=True)
class PuritySolution:
    p: np.ndarray
    value: float
    kkt_residual: float


@dataclass
class ScanResult:
    """Rows of a parameter scan with named columns."""

    columns: list
    rows: list

    def column(self, name):
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])


def _objective(p, gaps_sq):
    q = p[::-1]
    s = p + q
    zero = s < 1e-14
    c = np.where(zero, 0.0, (p - q) ** 2 / np.where(zero, 1.0, s))
    return 0.5 * float(c @ gaps_sq)


def _gradient(p, gaps_sq):
    # d/da of (a-b)^2/(a+b) is (a-b)(a+3b)/(a+b)^2, summed over both mirror roles
    q = p[::-1]
    s = p + q
    zero = s < 1e-14
    safe = np.where(zero, 1.0, s)
    da = np.where(zero, 1.0, (p - q) * (p + 3 * q) / safe**2)
    # p_k appears as first argument in term k and second argument in term d-1-k;
    # both terms carry the same gap, so the gradient is twice the half-sum
    return da * gaps_sq


def project(v, gamma):
    """Map ``v`` onto ``{x >= 0, sum x = 1, sum x^2 = gamma}``.

    Deviation from the centroid of the current support is rescaled to the
    purity radius; the most negative coordinate is dropped from the support
    until the point is nonnegative.
    """
    v = np.asarray(v, dtype=float)
    d = v.size
    support = np.ones(d, dtype=bool)
    x = np.zeros(d)
    while True:
        n = int(support.sum())
        r2 = gamma - 1.0 / n
        y = v[support] - v[support].mean()
        norm = np.linalg.norm(y)
        if r2 <= 0 or n == 1:
            x[:] = 0.0
            x[support] = 1.0 / n
            return x
        if norm == 0:
            # no preferred direction: push the first support entry up
            y = -np.full(n, 1.0 / n)
            y[0] += 1.0
            norm = np.linalg.norm(y)
        xs = 1.0 / n + y * (np.sqrt(r2) / norm)
        if xs.min() >= 0:
            x[:] = 0.0
            x[support] = xs
            return x
        idx = np.flatnonzero(support)[np.argmin(xs)]
        support[idx] = False


def kkt_residual(p, gaps_sq, tol=1e-12):
    """Stationarity residual of ``p`` on the constraint set.

    On the support the gradient must be a combination of ``1`` and ``2p``;
    off the support it may not exceed the normalization multiplier.
    """
    g = _gradient(p, gaps_sq)
    s = p > tol
    a = np.stack([np.ones(s.sum()), 2 * p[s]], axis=1)
    coef, *_ = np.linalg.lstsq(a, g[s], rcond=None)
    res = g[s] - a @ coef
    off = np.maximum(g[~s] - coef[0], 0.0)
    scale = max(1.0, float(np.max(np.abs(g))))
    return float(np.sqrt(np.sum(res**2) + np.sum(off**2)) / scale)


def _ascend(p, gaps_sq, gamma, max_iter=4000, tol=1e-15):
    f = _objective(p, gaps_sq)
    eta = 0.1 / max(1.0, float(np.max(gaps_sq)))
    stall = 0
    for _ in range(max_iter):
        trial = sort_desc(project(p + eta * _gradient(p, gaps_sq), gamma))
        ft = _objective(trial, gaps_sq)
        if ft > f:
            gain = ft - f
            p, f = trial, ft
            eta *= 1.5
            stall = stall + 1 if gain <= tol * max(1.0, abs(f)) else 0
        else:
            eta *= 0.5
            stall += 1
        if stall > 60 or eta < 1e-18:
            break
    return p, f


def optimize_spectrum(problem, restarts=50, seed=0):
    """Best spectrum of purity ``problem.gamma`` for the generator ``problem.h_eigs``.

    Among candidates within ``1e-12`` (relative) of the best value the
    lexicographically largest spectrum is reported.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    h = problem.h_eigs
    d = h.size
    gamma = problem.gamma
    gaps_sq = (h - h[::-1]) ** 2
    rng = np.random.default_rng(seed)
    cands = []
    for r in range(restarts):
        start = rng.dirichlet(np.full(d, 0.5 if r % 2 else 1.0))
        p0 = sort_desc(project(start, gamma))
        cands.append(_ascend(p0, gaps_sq, gamma))
    best = max(f for _, f in cands)
    near = [(p, f) for p, f in cands if f >= best - 1e-12 * max(1.0, abs(best))]
    p, f = max(near, key=lambda c: tuple(np.round(c[0], 9)))
    return PuritySolution(p=p, value=f, kkt_residual=kkt_residual(p, gaps_sq))


def purity_scan(h_eigs, gammas, restarts=50, seed=0):
    """Optimal spectra and values along a grid of purities."""
    h = decreasing(h_eigs)
    d = h.size
    cols = ["gamma"] + [f"p{k + 1}" for k in range(d)] + ["value"]
    rows = []
    for g in gammas:
        sol = optimize_spectrum(PurityProblem(h, g), restarts=restarts, seed=seed)
        rows.append([float(g), *map(float, sol.p), sol.value])
    return ScanResult(columns=cols, rows=rows)


def thermal_like_spectrum(d, gamma):
    """Geometric spectrum ``p_k ~ x^k`` with purity ``gamma`` (bisection on ``x``)."""
    if not 1.0 / d - FEAS_TOL <= gamma <= 1.0 + FEAS_TOL:
        raise ValueError(f"purity {gamma!r} outside [1/{d}, 1]")
    k = np.arange(d)

    def pur(x):
        w = x**k
        w = w / w.sum()
        return float(w @ w)

    if gamma >= 1.0 - 1e-15:
        p = np.zeros(d)
        p[0] = 1.0
        return p
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if pur(mid) > gamma:
            lo = mid
        else:
            hi = mid
    w = (0.5 * (lo + hi)) ** k
    return w / w.sum()
