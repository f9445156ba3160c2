"""QFI of unitarily encoded mixed states and its maximum over state
preparations.

States are stored spectrally (:class:`DensityOperator`), so evaluating the
QFI never re-diagonalizes a density matrix.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import optimize

from . import kernels
from .spectra import coeff_matrix, decreasing, state_spectrum

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10


class HermitianOperator:
    """Dense Hermitian matrix with a decreasing eigendecomposition.

    The matrix is symmetrized on construction; inputs further than
    ``HERMITIAN_TOL`` (relative to the matrix scale) from Hermitian are
    rejected.
    """

    def __init__(self, matrix, tol=HERMITIAN_TOL):
        m = np.array(matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
        if np.max(np.abs(m - m.conj().T), initial=0.0) > tol * scale:
            raise ValueError("matrix is not Hermitian")
        self.matrix = 0.5 * (m + m.conj().T)
        self.matrix.flags.writeable = False

    @classmethod
    def diag(cls, values):
        return cls(np.diag(np.asarray(values, dtype=float)))

    @property
    def dim(self):
        return self.matrix.shape[0]

    @cached_property
    def _eig(self):
        w, v = np.linalg.eigh(self.matrix)
        order = np.argsort(-w, kind="stable")
        return w[order], v[:, order]

    @property
    def eigvals(self):
        return self._eig[0]

    @property
    def eigvecs(self):
        return self._eig[1]

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim})"


def as_hermitian(h):
    return h if isinstance(h, HermitianOperator) else HermitianOperator(h)


def _check_unitary(u, tol=UNITARY_TOL):
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if err > tol:
        raise ValueError(f"basis is not unitary (deviation {err:.2e})")
    return u


@dataclass(frozen=True)
class DensityOperator:
    """``rho = sum_k spectrum[k] |basis[:, k]><basis[:, k]|``."""

    spectrum: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        p = state_spectrum(self.spectrum)
        b = _check_unitary(self.basis)
        if b.shape[0] != p.size:
            raise ValueError("spectrum and basis dimensions differ")
        object.__setattr__(self, "spectrum", p)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self):
        return self.spectrum.size

    def matrix(self):
        return (self.basis * self.spectrum) @ self.basis.conj().T

    def rotated(self, u):
        """The prepared state ``U rho U^+``."""
        return DensityOperator(self.spectrum, np.asarray(u) @ self.basis)


@dataclass(frozen=True)
class QFIReport:
    value: float
    bound: float

    @property
    def ratio(self):
        return 1.0 if self.bound == 0 else self.value / self.bound

    def as_dict(self):
        return {"value": self.value, "bound": self.bound, "ratio": self.ratio}


def qfi(rho, h):
    """QFI ``2 sum_kl p_kl |<psi_k|h|psi_l>|^2`` of ``rho`` for generator ``h``."""
    h = as_hermitian(h)
    if h.dim != rho.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim}, generator {h.dim}")
    c = coeff_matrix(rho.spectrum)
    return float(kernels.qfi_in_bases(c, h.matrix, rho.basis)[0])


def max_qfi(p, h_eigs):
    """Maximal QFI over unitary preparations of a state with spectrum ``p``.

    ``1/2 sum_k p_{k,d-1-k} (h_k - h_{d-1-k})**2`` for decreasing ``p`` and
    decreasing generator eigenvalues ``h_eigs``.
    """
    p = state_spectrum(p)
    h = decreasing(h_eigs)
    if h.size != p.size:
        raise ValueError(f"length mismatch: {p.size} vs {h.size}")
    return float(kernels.max_qfi_batch(p[None, :], (h - h[::-1]) ** 2)[0])


def pair_basis(vecs, phases=None):
    """Mirror-pair superpositions of decreasingly ordered eigenvectors.

    Column ``k`` of the result is ``(v_k + e^{i chi_k} v_{d-1-k})/sqrt2`` for
    the upper half and ``(v_k - e^{-i chi_m} v_{d-1-k})/sqrt2`` (``m`` the
    partner index) for the lower half; for odd ``d`` the middle column is
    the middle eigenvector. Default phases are zero.
    """
    v = np.asarray(vecs, dtype=np.complex128)
    d = v.shape[1]
    half = d // 2
    chi = np.zeros(half) if phases is None else np.asarray(phases, dtype=float).ravel()
    if chi.shape != (half,):
        raise ValueError(f"expected {half} phases, got shape {chi.shape}")
    basis = np.empty((v.shape[0], d), dtype=np.complex128)
    for k in range(half):
        m = d - 1 - k
        e = np.exp(1j * chi[k])
        basis[:, k] = (v[:, k] + e * v[:, m]) / np.sqrt(2)
        basis[:, m] = (v[:, m] - np.conj(e) * v[:, k]) / np.sqrt(2)
    if d % 2:
        basis[:, half] = v[:, half]
    return basis


def optimal_basis(h, phases=None):
    return pair_basis(as_hermitian(h).eigvecs, phases)


def optimal_state(p, h, phases=None):
    """State with spectrum ``p`` that attains :func:`max_qfi` for ``h``."""
    h = as_hermitian(h)
    p = state_spectrum(p)
    if p.size != h.dim:
        raise ValueError(f"dimension mismatch: spectrum {p.size}, generator {h.dim}")
    return DensityOperator(p, optimal_basis(h, phases))


def offdiag_block_sqnorm(h, basis, k):
    """Squared Hilbert-Schmidt norm of rows ``[:k]`` x columns ``[k:]`` of
    ``h`` written in ``basis``; ``k`` counts the leading rows (1..d-1)."""
    h = as_hermitian(h)
    d = h.dim
    if not 1 <= k <= d - 1:
        raise IndexError(f"block split {k} outside 1..{d - 1}")
    b = np.asarray(basis, dtype=np.complex128)
    hb = b.conj().T @ h.matrix @ b
    block = hb[:k, k:]
    return float(np.sum(block.real**2 + block.imag**2))


def block_norm_bound(h_eigs, k):
    """``1/4 sum_{i < min(k, d-k)} (h_i - h_{d-1-i})**2``."""
    h = decreasing(h_eigs)
    m = min(k, h.size - k)
    return 0.25 * float(np.sum((h[:m] - h[::-1][:m]) ** 2))


# --------------------------------------------------------------------------
# Random unitaries and the brute-force oracle
# --------------------------------------------------------------------------


def _haar(rng, n, d):
    z = (rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diag / np.abs(diag))[:, None, :]


def haar_random_unitary(d, seed=None, size=None):
    """Haar-distributed unitary from QR of a complex Ginibre matrix.

    The phases of ``diag(R)`` are moved into ``Q`` so the distribution is
    exactly Haar. ``seed`` may be an int or a ``numpy.random.Generator``;
    with ``size`` a stack of ``size`` unitaries is returned.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    rng = np.random.default_rng(seed)
    us = _haar(rng, 1 if size is None else size, d)
    return us[0] if size is None else us


def _hermitian_basis(d):
    """Orthonormal basis of the d*d-dimensional real space of Hermitian matrices."""
    out = []
    for i in range(d):
        e = np.zeros((d, d), dtype=np.complex128)
        e[i, i] = 1.0
        out.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=np.complex128)
            e[i, j] = e[j, i] = 1 / np.sqrt(2)
            out.append(e)
            e = np.zeros((d, d), dtype=np.complex128)
            e[i, j] = -1j / np.sqrt(2)
            e[j, i] = 1j / np.sqrt(2)
            out.append(e)
    return np.stack(out)


def _expi_stack(ks):
    # exp(i K) for a stack of Hermitian K
    w, v = np.linalg.eigh(ks)
    return (v * np.exp(1j * w)[:, None, :]) @ np.conj(np.swapaxes(v, -1, -2))


class _OrbitSearch:
    """QFI as a function of Lie-algebra coordinates around a centre basis."""

    def __init__(self, p, h, budget):
        self.c = coeff_matrix(p)
        self.h = h.matrix
        self.d = p.size
        self.gens = _hermitian_basis(self.d)
        self.budget = budget
        self.used = 0
        self.best_f = -np.inf
        self.best_b = None

    def evaluate(self, bases):
        bases = np.asarray(bases)
        n = bases.shape[0]
        if self.used + n > self.budget:
            n = self.budget - self.used
            bases = bases[:n]
        if n <= 0:
            return np.empty(0)
        vals = kernels.qfi_in_bases(self.c, self.h, bases)
        self.used += n
        k = int(np.argmax(vals))
        if vals[k] > self.best_f:
            self.best_f, self.best_b = float(vals[k]), bases[k].copy()
        return vals

    @property
    def left(self):
        return self.budget - self.used

    def pattern_search(self, rng, n_directions, steps):
        d = self.d
        for step in steps:
            if self.left < 2 * n_directions:
                break
            coords = rng.standard_normal((n_directions, d * d))
            coords /= np.linalg.norm(coords, axis=1)[:, None]
            ks = np.einsum("nj,jab->nab", np.concatenate([coords, -coords]) * step, self.gens)
            self.evaluate(self.best_b[None] @ _expi_stack(ks))

    def quasi_newton(self, eps=1e-6, max_rounds=20):
        d = self.d
        n = d * d
        shifts = np.concatenate([np.eye(n), -np.eye(n)]) * eps

        def fun_grad(x):
            centre = self.centre
            ks = np.einsum("j,jab->ab", x, self.gens)
            pts = np.einsum("nj,jab->nab", x + shifts, self.gens)
            bs = centre[None] @ _expi_stack(np.concatenate([ks[None], pts]))
            if self.left < bs.shape[0]:
                raise _BudgetExhausted
            vals = self.evaluate(bs)
            grad = (vals[1:n + 1] - vals[n + 1:]) / (2 * eps)
            return -vals[0], -grad

        for _ in range(max_rounds):
            if self.left < 2 * n + 1:
                break
            self.centre = self.best_b
            f_start = self.best_f
            try:
                optimize.minimize(fun_grad, np.zeros(n), jac=True, method="BFGS",
                                  options={"gtol": 1e-12, "maxiter": 400})
            except _BudgetExhausted:
                break
            if self.best_f <= f_start * (1 + 1e-15) + 1e-300:
                break


class _BudgetExhausted(Exception):
    pass


def brute_force_max(p, h, budget=1000, seed=0, n_directions=20,
                    step_max=0.3, step_min=1e-5, n_steps=30):
    """Search the unitary orbit of ``p`` for the largest QFI.

    This is an oracle for :func:`max_qfi` and never uses the closed form.
    A third of the evaluation budget goes to Haar-random bases. The best one
    is refined by random search in the Lie algebra: ``n_steps`` rounds with
    step size decaying geometrically from ``step_max`` to ``step_min``, each
    probing ``n_directions`` random Hermitian directions with both signs.
    What budget remains goes to BFGS on exponential coordinates with
    central-difference gradients, re-centred on the incumbent each round.

    Returns:
        QFIReport with the best value found and the closed-form bound.
    """
    h = as_hermitian(h)
    p = state_spectrum(p)
    d = p.size
    if d != h.dim:
        raise ValueError(f"dimension mismatch: spectrum {d}, generator {h.dim}")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    bound = max_qfi(p, h.eigvals)
    rng = np.random.default_rng(seed)
    search = _OrbitSearch(p, h, budget)
    search.evaluate(_haar(rng, max(1, budget // 3), d))
    if d > 1:
        steps = np.geomspace(step_max, step_min, n_steps)
        search.pattern_search(rng, n_directions, steps)
        search.quasi_newton()
    return QFIReport(value=search.best_f, bound=bound)
