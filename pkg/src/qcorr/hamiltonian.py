"""Two-spin squeezing Hamiltonian and its eigensystem.

Basis ordering is ``|00>, |01>, |10>, |11>`` with ``sz|0> = +|0>``, so the
field term ``B S_z`` is ``diag(B, 0, 0, -B)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateAnalyticForm
from .linalg import I2, SX, SY, SZ, hermitian_eig


@dataclass(frozen=True)
class ModelParams:
    """Couplings of ``mu Sx^2 + zeta Sy^2 + gamma_xy (SxSy + SySx) + field_b Sz``."""

    mu: float
    field_b: float
    zeta: float = 0.0
    gamma_xy: float = 0.0

    def __post_init__(self):
        for name in ("mu", "field_b", "zeta", "gamma_xy"):
            val = getattr(self, name)
            if not math.isfinite(val) or val < 0:
                raise ConfigError(f"{name} must be finite and >= 0, got {val!r}")

    @property
    def is_one_axis_twisting(self) -> bool:
        return self.zeta == 0.0 and self.gamma_xy == 0.0


@dataclass(frozen=True)
class Eigensystem:
    """Energies and eigenvectors (columns of ``states``) of a Hamiltonian.

    ``kappa`` is ``sqrt(mu^2 + 4 B^2)`` for the one-axis-twisting model and
    ``None`` for eigensystems obtained numerically.  ``degenerate`` marks the
    ``mu = B = 0`` case where the analytic vectors are undefined and the
    computational basis is used instead.
    """

    energies: np.ndarray
    states: np.ndarray
    kappa: float | None = None
    degenerate: bool = False

    def projector(self, m: int) -> np.ndarray:
        v = self.states[:, m]
        return np.outer(v, v.conj())


def _collective(op: np.ndarray) -> np.ndarray:
    return 0.5 * (np.kron(op, I2) + np.kron(I2, op))


S_X = _collective(SX)
S_Y = _collective(SY)
S_Z = _collective(SZ)


def build_hamiltonian(p: ModelParams) -> np.ndarray:
    sxy = S_X @ S_Y + S_Y @ S_X
    return (
        p.mu * (S_X @ S_X)
        + p.zeta * (S_Y @ S_Y)
        + p.gamma_xy * sxy
        + p.field_b * S_Z
    )


def analytic_eigensystem(mu: float, field_b: float, strict: bool = False) -> Eigensystem:
    """Closed-form eigensystem of ``mu Sx^2 + B Sz``.

    Energies are ``((mu - kappa)/2, (mu + kappa)/2, 0, mu)``.  The first two
    states live in span{|00>, |11>}; the last two are the singlet and the
    ``m = 0`` triplet.  For ``mu = B = 0`` every energy is zero: the
    computational basis is returned with ``degenerate=True``, or
    :class:`DegenerateAnalyticForm` is raised when ``strict`` is set.
    """
    ModelParams(mu, field_b)
    kappa = math.sqrt(mu * mu + 4.0 * field_b * field_b)
    if kappa == 0.0:
        if strict:
            raise DegenerateAnalyticForm("mu = B = 0 has no analytic eigenbasis")
        return Eigensystem(np.zeros(4), np.eye(4, dtype=complex), kappa=0.0, degenerate=True)

    # 2B - kappa = -mu^2 / (2B + kappa); dividing the lower state through by
    # mu / (2B + kappa) keeps it well defined as mu -> 0.
    s = 2.0 * field_b + kappa
    lower = np.array([-mu, 0, 0, s], dtype=complex)
    upper = np.array([s, 0, 0, mu], dtype=complex)
    lower /= np.linalg.norm(lower)
    upper /= np.linalg.norm(upper)
    r2 = 1.0 / math.sqrt(2.0)
    singlet = np.array([0, -r2, r2, 0], dtype=complex)
    triplet = np.array([0, r2, r2, 0], dtype=complex)

    energies = np.array([(mu - kappa) / 2.0, (mu + kappa) / 2.0, 0.0, mu])
    states = np.column_stack([lower, upper, singlet, triplet])
    return Eigensystem(energies, states, kappa=kappa)


def numerical_eigensystem(h: np.ndarray) -> Eigensystem:
    vals, vecs = hermitian_eig(h)
    return Eigensystem(vals, vecs)


def eigensystem(p: ModelParams) -> Eigensystem:
    """Analytic eigensystem when it applies, otherwise the Jacobi one."""
    if p.is_one_axis_twisting:
        return analytic_eigensystem(p.mu, p.field_b)
    return numerical_eigensystem(build_hamiltonian(p))


def bohr_frequencies(es: Eigensystem) -> np.ndarray:
    """Table of energy differences, entry ``(m, n) = E_m - E_n``."""
    e = np.asarray(es.energies, dtype=float)
    return e[:, None] - e[None, :]
