"""Randomized property suites for the spectral inequalities and the
saturation results.

Every suite draws its own generator from ``(seed, suite index)`` so results
do not depend on which other suites run. A trial passes when no inequality
is violated by more than ``SLACK`` (scaled by the size of the quantities
compared where those are not O(1)).
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .qfi import (
    _haar,
    block_norm_bound,
    max_qfi,
    offdiag_block_sqnorm,
    optimal_basis,
    optimal_state,
    qfi,
    HermitianOperator,
)
from .spectra import (
    build_q_coefficients,
    coeff_matrix,
    gap_vector,
    phi_p,
    q_matrix,
    weak_majorizes,
)
from .thermal import convolution_degeneracy, dice_degeneracy

SLACK = 1e-12


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: int
    failed: int
    worst: float

    @property
    def ok(self):
        return self.failed == 0

    def line(self):
        status = "PASS" if self.ok else "FAIL"
        return f"{self.name:<22s} {status} passed={self.passed} failed={self.failed} worst={self.worst:.3e}"


def random_spectrum(rng, d):
    """Decreasing probability vector; some draws get exact zeros and ties."""
    p = rng.dirichlet(np.full(d, rng.choice([0.3, 1.0, 3.0])))
    r = rng.random()
    if r < 0.15:
        p[rng.integers(1, d + 1):] = 0.0
    elif r < 0.3 and d > 2:
        i = rng.integers(0, d - 1)
        p[i + 1] = p[i]
    p = np.sort(p)[::-1]
    s = p.sum()
    if s == 0:
        p[0] = 1.0
        s = 1.0
    return p / s


def _random_hermitian(rng, d):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (z + z.conj().T)


def _tally(name, violations):
    v = np.asarray(violations, dtype=float)
    bad = int(np.sum(v > 0))
    return SuiteResult(name, int(v.size - bad), bad, float(np.max(v, initial=0.0)))


def _index_triples(d):
    i, j, l = np.array([(i, j, l) for i in range(d) for j in range(i + 1, d)
                        for l in range(j + 1, d)]).T
    return i, j, l


def suite_pair_inequalities(rng, samples):
    """Three-index inequalities of the pair coefficients."""
    viol = []
    cache = {}
    for t in range(samples):
        d = 3 + t % 6
        if d not in cache:
            cache[d] = _index_triples(d)
        i, j, l = cache[d]
        c = coeff_matrix(random_spectrum(rng, d))
        worst = np.max(c[i, j] + c[j, l] - c[i, l])
        # (ii): c[i,l] - c[i+1,l] >= c[i,k] - c[i+1,k] for i+1 < k < l
        m = j > i + 1
        if np.any(m):
            ii, kk, ll = i[m], j[m], l[m]
            worst = max(worst, np.max(c[ii, kk] - c[ii + 1, kk] - c[ii, ll] + c[ii + 1, ll]))
        # (iii): c[i,l] - c[i,l-1] >= c[j,l] - c[j,l-1] for i < j < l-1
        m = l - 1 > j
        if np.any(m):
            ii, jj, ll = i[m], j[m], l[m]
            worst = max(worst, np.max(c[jj, ll] - c[jj, ll - 1] - c[ii, ll] + c[ii, ll - 1]))
        viol.append(max(0.0, worst - SLACK))
    return _tally("pair-inequalities", viol)


def suite_q_coefficients(rng, samples):
    """Nearest-neighbour coefficients: nonnegative, dominating, tight at the centre."""
    viol = []
    for t in range(samples):
        d = 2 + t % 7
        p = random_spectrum(rng, d)
        c = coeff_matrix(p)
        q = build_q_coefficients(p)
        qm = q_matrix(q)
        iu = np.triu_indices(d, 1)
        centre = np.arange(d // 2)
        worst = max(
            float(np.max(-q)),
            float(np.max(c[iu] - qm[iu])),
            float(np.max(np.abs(qm[centre, d - 1 - centre] - c[centre, d - 1 - centre]))),
        )
        viol.append(max(0.0, worst - SLACK))
    return _tally("q-coefficients", viol)


def suite_block_norm(rng, samples):
    """Off-diagonal block norm never exceeds its bound; the paired basis attains it."""
    viol = []
    for t in range(samples):
        d = 2 + t % 7
        h = HermitianOperator(_random_hermitian(rng, d))
        k = int(rng.integers(1, d))
        bound = block_norm_bound(h.eigvals, k)
        scale = max(1.0, bound)
        u = _haar(rng, 1, d)[0]
        excess = offdiag_block_sqnorm(h, u, k) - bound
        tight = abs(offdiag_block_sqnorm(h, optimal_basis(h), d // 2) - block_norm_bound(h.eigvals, d // 2))
        viol.append(max(0.0, excess - SLACK * scale, tight - 1e-10 * scale))
    return _tally("block-norm", viol)


def suite_gap_majorization(rng, samples):
    """``d(A+B)`` is weakly majorized by ``d(A) + d(B)``."""
    viol = []
    for t in range(samples):
        d = 2 + t % 7
        a = _random_hermitian(rng, d)
        b = _random_hermitian(rng, d)
        ga = gap_vector(np.linalg.eigvalsh(a))
        gb = gap_vector(np.linalg.eigvalsh(b))
        gab = gap_vector(np.linalg.eigvalsh(a + b))
        scale = max(1.0, float(np.sum(ga + gb)))
        ok = weak_majorizes(gab, ga + gb, tol=SLACK * scale)
        sx = np.cumsum(np.sort(gab)[::-1])
        sy = np.cumsum(np.sort(ga + gb)[::-1])
        viol.append(0.0 if ok else float(np.max(sx - sy)))
    return _tally("gap-majorization", viol)


def suite_schur(rng, samples):
    """``phi_p`` is increasing and respects weak majorization."""
    viol = []
    for t in range(samples):
        d = 1 + t % 8
        p = random_spectrum(rng, d) if d > 1 else np.ones(1)
        y = rng.exponential(size=d)
        # doubly stochastic mixing then shrinking gives x <_w y
        w = rng.dirichlet(np.ones(3))
        mix = sum(wi * y[rng.permutation(d)] for wi in w)
        x = mix * rng.uniform(0.5, 1.0, size=d)
        z = x * rng.uniform(0.0, 1.0, size=d)
        scale = max(1.0, phi_p(p, y))
        worst = max(phi_p(p, x) - phi_p(p, y), phi_p(p, z) - phi_p(p, x))
        if not weak_majorizes(x, y, tol=SLACK * float(np.sum(y))):
            worst = max(worst, 1.0)
        viol.append(max(0.0, worst - SLACK * scale))
    return _tally("schur-convexity", viol)


def suite_degeneracy(rng, samples):
    """Inclusion-exclusion dice counts equal repeated convolution exactly."""
    del rng
    viol = []
    cases = [(n, j) for n in range(1, 9) for j in (0.5, 1.0, 1.5, 2.0)]
    for t in range(min(samples, len(cases))):
        n, j = cases[t]
        viol.append(0.0 if dice_degeneracy(n, j).counts == convolution_degeneracy(n, j).counts else 1.0)
    return _tally("dice-degeneracy", viol)


def suite_saturation(rng, samples):
    """The paired state reaches the maximal QFI."""
    viol = []
    for t in range(samples):
        d = 2 + t % 5
        p = random_spectrum(rng, d)
        h = HermitianOperator(_random_hermitian(rng, d))
        phases = rng.uniform(0, 2 * np.pi, size=d // 2)
        bound = max_qfi(p, h.eigvals)
        val = qfi(optimal_state(p, h, phases), h)
        viol.append(max(0.0, abs(val - bound) - 1e-10 * max(1.0, bound)))
    return _tally("saturation", viol)


def suite_haar_bound(rng, samples):
    """Random preparations never beat the maximal QFI."""
    viol = []
    for t in range(samples):
        d = 2 + t % 5
        p = random_spectrum(rng, d)
        h = HermitianOperator(_random_hermitian(rng, d))
        bound = max_qfi(p, h.eigvals)
        vals = kernels.qfi_in_bases(coeff_matrix(p), h.matrix, _haar(rng, 20, d))
        viol.append(max(0.0, float(np.max(vals)) - bound - 1e-9 * max(1.0, bound)))
    return _tally("haar-bound", viol)


SUITES = (
    suite_pair_inequalities,
    suite_q_coefficients,
    suite_block_norm,
    suite_gap_majorization,
    suite_schur,
    suite_degeneracy,
    suite_saturation,
    suite_haar_bound,
)


def run_suites(seed=0, samples=1000, suites=SUITES):
    """Run each suite with ``samples`` trials; returns a list of results."""
    if int(samples) != samples or samples < 1:
        raise ValueError(f"samples must be a positive integer, got {samples!r}")
    seq = np.random.SeedSequence(seed)
    children = seq.spawn(len(SUITES))
    out = []
    for suite in suites:
        rng = np.random.default_rng(children[SUITES.index(suite)])
        out.append(suite(rng, int(samples)))
    return out


def summary(results):
    lines = [r.line() for r in results]
    total_fail = sum(r.failed for r in results)
    lines.append(f"suites={len(results)} failed_suites={sum(not r.ok for r in results)} failed_trials={total_fail}")
    return "\n".join(lines) + "\n"
