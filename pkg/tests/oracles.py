"""Independent reference computations used by the tests.

Nothing here calls the closed forms under test: the thermal oracle builds
explicit tensor-product spectra, the purity oracle scans the feasible set on
a grid, and the dice oracle lives in the library itself as the convolution
count.
"""

import numpy as np

from mixqfi import kernels


def tensor_thermal_spectra(n, j, beta):
    """Spectrum of ``rho_th^{(x)N}`` and eigenvalues of the collective ``Sz``,
    both in the product basis (unsorted, aligned entry by entry)."""
    m = np.arange(j, -j - 1, -1.0)
    w = np.exp(beta * m)
    w /= w.sum()
    p = np.ones(1)
    sz = np.zeros(1)
    for _ in range(n):
        p = np.kron(p, w)
        sz = np.add.outer(sz, m).ravel()
    return p, sz


def explicit_max_qfi(p, h):
    """Pair the sorted spectra directly: ``1/2 sum c(p_k, p_{d-1-k}) (h_k - h_{d-1-k})^2``."""
    p = np.sort(np.asarray(p, float))[::-1]
    h = np.sort(np.asarray(h, float))[::-1]
    total = 0.0
    d = p.size
    for k in range(d):
        a, b = p[k], p[d - 1 - k]
        if a + b > 0:
            total += (a - b) ** 2 / (a + b) * (h[k] - h[d - 1 - k]) ** 2
    return 0.5 * total


def _plane_basis(d):
    # orthonormal basis of {x : sum x = 0}
    a = np.eye(d) - 1.0 / d
    q, _ = np.linalg.qr(a[:, : d - 1])
    return q


def _eval(points, gaps_sq):
    ok = np.all(points >= -1e-15, axis=1)
    pts = np.clip(points[ok], 0.0, None)
    if pts.size == 0:
        return -np.inf, None
    pts = np.sort(pts, axis=1)[:, ::-1]
    vals = kernels.max_qfi_batch_numpy(pts, gaps_sq)
    i = int(np.argmax(vals))
    return float(vals[i]), pts[i]


def purity_grid_oracle(h, gamma, n=1000, zoom_rounds=4, zoom_n=200):
    """Best value of the maximal-QFI formula over ``d = 4`` spectra of purity ``gamma``.

    The full-support part of the feasible set is a 2-sphere of radius
    ``sqrt(gamma - 1/4)`` about the uniform point; it is sampled on an
    ``n x n`` (cos theta, phi) grid (``n**2`` points), then the best cell is
    re-gridded ``zoom_rounds`` times. Faces with three or two nonzero entries
    (circles and point pairs) are scanned separately.
    """
    h = np.sort(np.asarray(h, float))[::-1]
    d = h.size
    if d != 4:
        raise ValueError("grid oracle is for d = 4")
    gaps_sq = (h - h[::-1]) ** 2
    best, best_p = -np.inf, None

    def take(val, p):
        nonlocal best, best_p
        if val > best:
            best, best_p = val, p

    r = np.sqrt(max(gamma - 1.0 / d, 0.0))
    basis = _plane_basis(d)
    centre = np.full(d, 1.0 / d)

    def sphere(ct, ph):
        st = np.sqrt(np.clip(1 - ct**2, 0, None))
        dirs = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=-1).reshape(-1, 3)
        return centre + r * dirs @ basis.T

    ct = np.linspace(-1, 1, n)
    ph = np.linspace(0, 2 * np.pi, n, endpoint=False)
    CT, PH = np.meshgrid(ct, ph, indexing="ij")
    val, p = _eval(sphere(CT, PH), gaps_sq)
    take(val, p)
    # zoom on the best full-support cell
    dct, dph = ct[1] - ct[0], ph[1] - ph[0]
    if best_p is not None and r > 0:
        # recover angles of the incumbent by scanning all orderings
        for perm in _perms(d):
            cand = best_p[list(perm)]
            y = (cand - centre) @ basis / r
            c0, p0 = float(np.clip(y[2], -1, 1)), float(np.arctan2(y[1], y[0]))
            wct, wph = 2 * dct, 2 * dph
            for _ in range(zoom_rounds):
                cts = np.clip(np.linspace(c0 - wct, c0 + wct, zoom_n), -1, 1)
                phs = np.linspace(p0 - wph, p0 + wph, zoom_n)
                CT, PH = np.meshgrid(cts, phs, indexing="ij")
                pts = sphere(CT, PH)
                ok = np.all(pts >= -1e-15, axis=1)
                if not ok.any():
                    break
                vals = np.full(pts.shape[0], -np.inf)
                srt = np.sort(np.clip(pts[ok], 0, None), axis=1)[:, ::-1]
                vals[ok] = kernels.max_qfi_batch_numpy(srt, gaps_sq)
                i = int(np.argmax(vals))
                take(float(vals[i]), np.sort(pts[i])[::-1])
                c0, p0 = float(CT.ravel()[i]), float(PH.ravel()[i])
                wct, wph = 4 * wct / zoom_n, 4 * wph / zoom_n
    # three nonzero entries: circle of radius sqrt(gamma - 1/3)
    if gamma >= 1.0 / 3:
        r3 = np.sqrt(gamma - 1.0 / 3)
        b3 = _plane_basis(3)
        t = np.linspace(0, 2 * np.pi, 200000, endpoint=False)
        pts3 = 1.0 / 3 + r3 * np.stack([np.cos(t), np.sin(t)], axis=1) @ b3.T
        pts = np.concatenate([pts3, np.zeros((t.size, 1))], axis=1)
        take(*_eval(pts, gaps_sq))
    # two nonzero entries: a + b = 1, a^2 + b^2 = gamma
    if gamma >= 0.5:
        a = 0.5 * (1 + np.sqrt(2 * gamma - 1))
        take(*_eval(np.array([[a, 1 - a, 0.0, 0.0]]), gaps_sq))
    if gamma >= 1.0 - 1e-15:
        take(*_eval(np.array([[1.0, 0, 0, 0]]), gaps_sq))
    return best, best_p


def _perms(d):
    from itertools import permutations

    return permutations(range(d))
