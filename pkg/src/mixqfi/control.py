"""Control-assisted bound for time-dependent Hamiltonians, Trotterized
propagation with instantaneous pulses, and a finite-difference generator.
"""

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import brentq

from . import kernels
from .qfi import HermitianOperator, QFIReport, DensityOperator, max_qfi, pair_basis, qfi
from .spectra import state_spectrum
from .spin import collective, local_pi_pulse, spin_operators

PULSE_TOL = 1e-10
DEGENERATE_TOL = 1e-9


@dataclass(frozen=True)
class TimeDependentHamiltonian:
    """``H_alpha(t)`` on ``[0, horizon]``.

    ``evaluator(t, alpha)`` returns a Hermitian matrix. ``derivative(t,
    alpha)``, when given, returns ``dH/dalpha``; otherwise a central finite
    difference of the evaluator is used.
    """

    evaluator: Callable[[float, float], np.ndarray]
    horizon: float
    derivative: Optional[Callable[[float, float], np.ndarray]] = None

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")

    def __call__(self, t, alpha):
        return np.asarray(self.evaluator(t, alpha), dtype=np.complex128)

    def d_alpha(self, t, alpha, delta=None):
        if self.derivative is not None:
            return np.asarray(self.derivative(t, alpha), dtype=np.complex128)
        delta = 1e-6 * max(1.0, abs(alpha)) if delta is None else delta
        return (self(t, alpha + delta) - self(t, alpha - delta)) / (2 * delta)

    def dim(self, alpha=0.0):
        return self(0.0, alpha).shape[0]


@dataclass(frozen=True)
class PulseSchedule:
    """Instantaneous unitaries applied at increasing times."""

    pulse_times: tuple = ()
    pulse_unitaries: tuple = field(default=(), repr=False)

    def __post_init__(self):
        times = tuple(float(t) for t in self.pulse_times)
        us = tuple(np.asarray(u, dtype=np.complex128) for u in self.pulse_unitaries)
        if len(times) != len(us):
            raise ValueError("need exactly one unitary per pulse time")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("pulse times must be strictly increasing")
        for u in us:
            err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
            if err > PULSE_TOL:
                raise ValueError(f"pulse is not unitary (deviation {err:.2e})")
        object.__setattr__(self, "pulse_times", times)
        object.__setattr__(self, "pulse_unitaries", us)

    def __len__(self):
        return len(self.pulse_times)


NO_PULSES = PulseSchedule()


@dataclass(frozen=True)
class EigTrajectory:
    """Pointwise decreasing eigenvalues ``mu[s]`` and matching eigenvectors
    ``vecs[s]`` (columns) of ``dH/dalpha`` at ``times[s]``."""

    times: np.ndarray
    mu: np.ndarray
    vecs: np.ndarray

    def integrated(self):
        """Trapezoidal ``int_0^T mu_k(t) dt`` for every k."""
        if self.times.size < 2:
            raise ValueError("trajectory needs at least two samples")
        return trapezoid(self.mu, self.times, axis=0)

    def continuity(self):
        """Smallest overlap ``|<v_k(t_s)|v_k(t_{s+1})>|`` per step, shape (n-1,)."""
        ov = np.abs(np.einsum("sik,sik->sk", self.vecs[:-1].conj(), self.vecs[1:]))
        return ov.min(axis=1)


# --------------------------------------------------------------------------
# Trajectory of dH/dalpha
# --------------------------------------------------------------------------


def _clusters(w, tol):
    groups, start = [], 0
    for k in range(1, w.size + 1):
        if k == w.size or w[k - 1] - w[k] > tol:
            groups.append(np.arange(start, k))
            start = k
    return groups


def _align(prev, cur, w, tol):
    # rotate each degenerate block of cur onto prev (orthogonal Procrustes);
    # for simple eigenvalues this only fixes the phase
    out = cur.copy()
    for g in _clusters(w, tol):
        m = prev[:, g].conj().T @ cur[:, g]
        a, _, bh = np.linalg.svd(m)
        out[:, g] = cur[:, g] @ (a @ bh).conj().T
    return out


def eig_trajectory(H, alpha, samples=1001, extra_times=()):
    """Sample ``dH/dalpha`` on a uniform grid (plus ``extra_times``).

    Eigenvalues are ordered pointwise; eigenvectors are phase-aligned (and
    rotated within degenerate blocks) to the previous sample so the frame
    varies smoothly wherever the ordering does not swap.
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    times = np.linspace(0.0, H.horizon, samples)
    extra = [t for t in extra_times if 0 < t < H.horizon]
    if extra:
        times = np.unique(np.concatenate([times, extra]))
    mats = np.stack([H.d_alpha(t, alpha) for t in times])
    w, v = np.linalg.eigh(mats)
    w, v = w[:, ::-1], v[:, :, ::-1]
    scale = max(1.0, float(np.max(np.abs(w))))
    vecs = np.empty_like(v)
    vecs[0] = v[0]
    for s in range(1, times.size):
        vecs[s] = _align(vecs[s - 1], v[s], w[s], DEGENERATE_TOL * scale)
    return EigTrajectory(times=times, mu=w, vecs=vecs)


def k_alpha_bound(p, traj):
    """Control-assisted upper bound ``1/2 sum_k p_{k,d-1-k} (int mu_k - mu_{d-1-k})^2``."""
    p = state_spectrum(p)
    if traj.mu.shape[1] != p.size:
        raise ValueError("trajectory and spectrum dimensions differ")
    if traj.times.size == 0:
        raise ValueError("empty trajectory")
    return max_qfi(p, traj.integrated())


# --------------------------------------------------------------------------
# Propagation
# --------------------------------------------------------------------------


def _segments(horizon, steps, pulse_times):
    grid = np.linspace(0.0, horizon, steps + 1)
    snap = PULSE_TOL * horizon
    cuts = []
    for t in pulse_times:
        if not 0 < t < horizon:
            raise ValueError(f"pulse time {t} outside (0, {horizon})")
        near = np.abs(grid - t) <= snap
        cuts.append(float(grid[near][0]) if near.any() else float(t))
    edges = np.unique(np.concatenate([grid, cuts]))
    return edges, cuts


def propagate(H, controls=NO_PULSES, alpha=0.0, steps=1000):
    """Time-ordered ``U_alpha(T)`` as a product of midpoint step exponentials.

    The uniform grid is split at every pulse time, so pulses act exactly
    when scheduled.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    edges, cuts = _segments(H.horizon, steps, controls.pulse_times)
    mids = 0.5 * (edges[:-1] + edges[1:])
    dts = np.diff(edges)
    hs = np.stack([H(t, alpha) for t in mids])
    us = kernels.step_propagators(hs, dts)
    if controls.pulse_times:
        seq = []
        pulse_at = dict(zip(cuts, controls.pulse_unitaries))
        for k, u in enumerate(us):
            seq.append(u)
            pu = pulse_at.get(float(edges[k + 1]))
            if pu is not None:
                seq.append(pu)
        us = np.stack(seq)
    return kernels.ordered_product(us)


def fd_generator(H, controls=NO_PULSES, alpha=0.0, delta=None, steps=1000):
    """Generator ``i U^+ dU/dalpha`` by central differences with one
    Richardson step (``delta`` and ``delta/2``)."""
    if delta is None:
        delta = 1e-5 * max(1.0, abs(alpha))
    if delta <= 0:
        raise ValueError("delta must be positive")
    u0 = propagate(H, controls, alpha, steps)

    def central(dl):
        up = propagate(H, controls, alpha + dl, steps)
        um = propagate(H, controls, alpha - dl, steps)
        return 1j * u0.conj().T @ (up - um) / (2 * dl)

    g1 = central(delta)
    g2 = central(delta / 2)
    g = (4 * g2 - g1) / 3
    scale = max(1.0, float(np.max(np.abs(g))))
    if np.max(np.abs(g1 - g2)) > 1e-4 * scale:
        warnings.warn("finite-difference generator is not converged in delta",
                      RuntimeWarning, stacklevel=2)
    return HermitianOperator(0.5 * (g + g.conj().T), tol=np.inf)


# --------------------------------------------------------------------------
# Pulse schedules
# --------------------------------------------------------------------------


def find_sign_changes(f, horizon, samples=4096):
    """Interior times in ``(0, horizon)`` where ``f`` changes sign."""
    t = np.linspace(0.0, horizon, samples + 1)
    y = np.array([f(x) for x in t], dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("modulation returned non-finite values")
    s = np.sign(y)
    out = []
    last = None  # (index, sign) of the previous nonzero sample
    for k in range(t.size):
        if s[k] == 0:
            continue
        if last is not None and s[k] != last[1]:
            i = last[0]
            if k == i + 1:
                out.append(brentq(f, t[i], t[k], xtol=1e-14, rtol=1e-15))
            else:
                # zero hit exactly on grid samples between i and k
                out.append(float(t[(i + k) // 2]))
        last = (k, s[k])
    return [x for x in out if 0 < x < horizon]


def pi_pulse_schedule(sign_change_times, d, spin_structure):
    """Local x pi-pulses on every spin at each sign change of the modulation.

    Args:
        sign_change_times: increasing times inside the evolution window.
        d: Hilbert-space dimension, must equal ``(2j+1)**N``.
        spin_structure: ``(N, j)``.
    """
    n, j = spin_structure
    u = local_pi_pulse(n, j)
    if u.shape[0] != d:
        raise ValueError(f"(N, j) = {spin_structure} gives dimension {u.shape[0]}, not {d}")
    times = sorted(float(t) for t in sign_change_times)
    return PulseSchedule(tuple(times), tuple(u for _ in times))


# --------------------------------------------------------------------------
# Spin-ensemble sensing Hamiltonians
# --------------------------------------------------------------------------


def amplitude_hamiltonian(f, horizon, n=1, j=0.5):
    """``H_B(t) = B f(t) S_z^tot``; the parameter is the amplitude ``B``."""
    sz = collective(spin_operators(j)[2], n)
    return TimeDependentHamiltonian(
        evaluator=lambda t, b: b * f(t) * sz,
        horizon=horizon,
        derivative=lambda t, b: f(t) * sz,
    )


def frequency_hamiltonian(amplitude, horizon, n=1, j=0.5):
    """``H_w(t) = B cos(w t) S_z^tot``; the parameter is the frequency ``w``."""
    sz = collective(spin_operators(j)[2], n)
    return TimeDependentHamiltonian(
        evaluator=lambda t, w: amplitude * np.cos(w * t) * sz,
        horizon=horizon,
        derivative=lambda t, w: -amplitude * t * np.sin(w * t) * sz,
    )


# --------------------------------------------------------------------------
# Saturation
# --------------------------------------------------------------------------


def initial_eigvecs(traj):
    """Eigenvectors of ``dH/dalpha`` at the start of the evolution.

    If ``dH/dalpha`` vanishes at ``t = 0`` (e.g. a frequency derivative
    ``-t sin(w t)``), the first sample with a nonzero spread is used.
    """
    spread = traj.mu[:, 0] - traj.mu[:, -1]
    ref = float(np.max(spread))
    if ref == 0.0:
        return traj.vecs[0]
    idx = int(np.argmax(spread > 1e-8 * ref))
    return traj.vecs[idx]


def saturation_check(p, H, controls=NO_PULSES, alpha=0.0, steps=1000, phases=None):
    """Prepare the control-optimal state and compare its QFI with the bound.

    The state pairs the eigenvectors of ``dH/dalpha`` at ``t = 0``; the QFI
    is evaluated with the finite-difference generator of the pulsed
    evolution, the bound from the eigenvalue trajectory on the same grid.
    """
    p = state_spectrum(p)
    traj = eig_trajectory(H, alpha, samples=steps + 1, extra_times=controls.pulse_times)
    if traj.mu.shape[1] != p.size:
        raise ValueError("Hamiltonian and spectrum dimensions differ")
    rho = DensityOperator(p, pair_basis(initial_eigvecs(traj), phases))
    gen = fd_generator(H, controls, alpha, steps=steps)
    return QFIReport(value=qfi(rho, gen), bound=k_alpha_bound(p, traj))
