"""Small dense linear algebra for two-qubit operators.

Everything here works on 4x4 (and occasionally 2x2 or 3x3) complex
matrices stored as plain numpy arrays.  The Hermitian eigensolver is a
cyclic Jacobi iteration so that results are deterministic and do not
depend on the LAPACK build.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, NonHermitianInput, NotPhysical, NotPositiveSemidefinite
from .tolerances import TOL

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

#: single-qubit basis {1, sx, sy, sz}
PAULIS = np.stack([I2, SX, SY, SZ])
#: PAULI_PAIRS[a, b] = PAULIS[a] (x) PAULIS[b]
PAULI_PAIRS = np.einsum("aij,bkl->abikjl", PAULIS, PAULIS).reshape(4, 4, 4, 4)
#: local observables sigma_i (x) 1 for i = x, y, z
LOCAL_A = PAULI_PAIRS[1:, 0]


class HermitianEig(NamedTuple):
    """Eigenvalues in ascending order and matching eigenvectors as columns."""

    values: np.ndarray
    vectors: np.ndarray


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().swapaxes(-1, -2)


def check_hermitian(m: np.ndarray, tol: float = TOL.hermitian) -> np.ndarray:
    """Return the Hermitian part of `m`, raising if `m` is too far from Hermitian."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonHermitianInput(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonHermitianInput("matrix has non-finite entries")
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > tol:
        raise NonHermitianInput(f"||M - M^H||_max = {dev:.3e} exceeds {tol:.1e}")
    return 0.5 * (m + m.conj().T)


def _offdiag_norm(a: np.ndarray, mask: np.ndarray) -> float:
    return math.sqrt(float(np.sum(np.abs(a[mask]) ** 2)))


def _jacobi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Cyclic complex Jacobi.  Each rotation first removes the phase of a[p, q]
    # with a diagonal unitary, then applies the real symmetric rotation.
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n, dtype=complex)
    fro = math.sqrt(float(np.sum(np.abs(a) ** 2)))
    if fro == 0.0:
        return np.zeros(n), v
    target = TOL.jacobi_offdiag * fro
    mask = ~np.eye(n, dtype=bool)
    for _ in range(TOL.jacobi_max_sweeps):
        off = _offdiag_norm(a, mask)
        if off < target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                ph = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                phc = ph.conjugate()
                # J = [[c, s], [-s * conj(ph), c * conj(ph)]] on columns p, q
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * phc * col_q
                a[:, q] = s * col_p + c * phc * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * ph * row_q
                a[q, :] = s * row_p + c * ph * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - t * mag
                a[q, q] = aqq + t * mag
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * phc * vq
                v[:, q] = s * vp + c * phc * vq
    else:
        off = _offdiag_norm(a, mask)
        if off >= 1e3 * target:
            raise ConvergenceError(f"Jacobi did not converge (off-diagonal mass {off:.3e})")
    return np.diag(a).real.copy(), v


def _orthonormalize_clusters(values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(values))))
    tol = TOL.degenerate_cluster * scale
    out = vectors.copy()
    start = 0
    n = len(values)
    while start < n:
        stop = start + 1
        while stop < n and values[stop] - values[stop - 1] < tol:
            stop += 1
        if stop - start > 1:
            for j in range(start, stop):
                w = out[:, j]
                for k in range(start, j):
                    w = w - np.vdot(out[:, k], w) * out[:, k]
                out[:, j] = w / np.linalg.norm(w)
        start = stop
    return out


def hermitian_eig(m: np.ndarray) -> HermitianEig:
    """Eigendecomposition of a small Hermitian matrix.

    Parameters
    ----------
    m : (n, n) complex array
        Hermitian within ``TOL.hermitian`` (max-entry norm of ``m - m^H``).

    Returns
    -------
    HermitianEig
        ``values`` ascending (ties keep their original order) and
        ``vectors`` whose columns are orthonormal eigenvectors.

    Raises
    ------
    NonHermitianInput
    """
    h = check_hermitian(m)
    vals, vecs = _jacobi(h)
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = _orthonormalize_clusters(vals, vecs[:, order])
    return HermitianEig(vals, vecs)


def sqrt_psd(m: np.ndarray) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix."""
    vals, vecs = hermitian_eig(m)
    if vals[0] < -TOL.psd_clamp:
        raise NotPositiveSemidefinite(f"smallest eigenvalue {vals[0]:.3e} is negative")
    root = np.sqrt(np.clip(vals, 0.0, None))
    return (vecs * root) @ vecs.conj().T


def trace_norm(m: np.ndarray) -> float:
    """Schatten 1-norm (sum of singular values)."""
    m = np.asarray(m, dtype=complex)
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def fano_bloch(m: np.ndarray) -> np.ndarray:
    """Coefficients ``R[a, b] = Tr(M sigma_a (x) sigma_b)`` as a real 4x4 table."""
    h = check_hermitian(m)
    coeffs = np.einsum("ij,abji->ab", h, PAULI_PAIRS)
    return coeffs.real.copy()


def from_fano_bloch(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`fano_bloch`: ``1/4 sum R[a, b] sigma_a (x) sigma_b``."""
    return 0.25 * np.einsum("ab,abij->ij", np.asarray(coeffs, dtype=complex), PAULI_PAIRS)


def partial_trace_b(m: np.ndarray) -> np.ndarray:
    """Trace out the second qubit: ``(rho_a)_ij = sum_k M_(ik),(jk)``."""
    m = np.asarray(m, dtype=complex)
    return np.einsum("ikjk->ij", m.reshape(2, 2, 2, 2))


def bloch_vector(rho_a: np.ndarray) -> np.ndarray:
    """Bloch vector ``(Tr rho sx, Tr rho sy, Tr rho sz)`` of a qubit operator."""
    return np.einsum("ij,kji->k", np.asarray(rho_a, dtype=complex), PAULIS[1:]).real


def symmetric_eigvals3(w: np.ndarray) -> np.ndarray:
    """Eigenvalues of a real symmetric 3x3 matrix, descending.

    Uses the trigonometric form of Cardano's solution.  Close to a repeated
    root the arccos is ill-conditioned, so that case is handed to Jacobi.
    """
    w = np.asarray(w, dtype=float)
    p1 = w[0, 1] ** 2 + w[0, 2] ** 2 + w[1, 2] ** 2
    q = np.trace(w) / 3.0
    p2 = (w[0, 0] - q) ** 2 + (w[1, 1] - q) ** 2 + (w[2, 2] - q) ** 2 + 2.0 * p1
    p = math.sqrt(p2 / 6.0)
    if p < 1e-14 * max(1.0, abs(q)):
        return np.array([q, q, q])
    b = (w - q * np.eye(3)) / p
    r = float(np.linalg.det(b)) / 2.0
    if 1.0 - r * r < 1e-10:
        vals, _ = _jacobi(w.astype(complex))
        return np.sort(vals)[::-1]
    phi = math.acos(r) / 3.0
    e1 = q + 2.0 * p * math.cos(phi)
    e3 = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    e2 = 3.0 * q - e1 - e3
    return np.array([e1, e2, e3])


def check_density(rho: np.ndarray, name: str = "rho") -> np.ndarray:
    """Validate a two-qubit density matrix and return its Hermitian part.

    Raises
    ------
    NotPhysical
        If the trace differs from 1 by more than ``TOL.density_trace`` or an
        eigenvalue is below ``-TOL.density_positivity``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise NotPhysical(f"{name}: expected shape (4, 4), got {rho.shape}")
    try:
        h = check_hermitian(rho)
    except NonHermitianInput as exc:
        raise NotPhysical(f"{name}: {exc}") from None
    tr = np.trace(h).real
    if abs(tr - 1.0) > TOL.density_trace:
        raise NotPhysical(f"{name}: trace {tr!r} differs from 1")
    low = hermitian_eig(h).values[0]
    if low < -TOL.density_positivity:
        raise NotPhysical(f"{name}: eigenvalue {low:.3e} is negative")
    return h
