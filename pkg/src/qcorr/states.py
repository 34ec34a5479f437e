"""Initial states and closed-form X-state dynamics.

Bell-diagonal and Werner states stay X-shaped under the one-axis-twisting
Hamiltonian: ``|00>, |11>`` evolve as a driven two-level system while the
``|01>, |10>`` block commutes with ``H`` and is frozen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotPhysical, NotXStructured
from .linalg import PAULI_PAIRS
from .tolerances import TOL

# (row, col) positions allowed to be nonzero in an X state
_X_MASK = np.eye(4, dtype=bool) | np.eye(4, dtype=bool)[::-1]


@dataclass(frozen=True)
class BellDiagonalSpec:
    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        cs = (self.c1, self.c2, self.c3)
        if not all(math.isfinite(c) and -1.0 <= c <= 1.0 for c in cs):
            raise NotPhysical(f"correlation coefficients must lie in [-1, 1], got {cs}")
        low = min(self.eigenvalues())
        if low < -TOL.physical_eig:
            raise NotPhysical(f"c = {cs} lies outside the physical tetrahedron (eigenvalue {low:.3g})")

    def eigenvalues(self) -> tuple[float, float, float, float]:
        c1, c2, c3 = self.c1, self.c2, self.c3
        return (
            (1 - c1 - c2 - c3) / 4,
            (1 - c1 + c2 + c3) / 4,
            (1 + c1 - c2 + c3) / 4,
            (1 + c1 + c2 - c3) / 4,
        )


@dataclass(frozen=True)
class WernerSpec:
    r: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and 0.0 <= self.r <= 1.0):
            raise NotPhysical(f"Werner weight r must lie in [0, 1], got {self.r!r}")

    def as_bell_diagonal(self) -> BellDiagonalSpec:
        return BellDiagonalSpec(self.r, -self.r, self.r)


@dataclass(frozen=True)
class XStateElements:
    """Independent entries of an X-shaped two-qubit density matrix."""

    rho11: float
    rho22: float
    rho33: float
    rho44: float
    rho14: complex = 0.0
    rho23: complex = 0.0

    def __post_init__(self):
        diag = (self.rho11, self.rho22, self.rho33, self.rho44)
        if min(diag) < -TOL.density_positivity:
            raise NotPhysical(f"negative population in {diag}")
        if abs(sum(diag) - 1.0) > TOL.density_trace:
            raise NotPhysical(f"populations sum to {sum(diag)!r}")
        outer = math.sqrt(max(self.rho11, 0.0) * max(self.rho44, 0.0))
        inner = math.sqrt(max(self.rho22, 0.0) * max(self.rho33, 0.0))
        if abs(self.rho14) > outer + TOL.density_positivity:
            raise NotPhysical(f"|rho14| = {abs(self.rho14):.6g} exceeds sqrt(rho11 rho44) = {outer:.6g}")
        if abs(self.rho23) > inner + TOL.density_positivity:
            raise NotPhysical(f"|rho23| = {abs(self.rho23):.6g} exceeds sqrt(rho22 rho33) = {inner:.6g}")


def bell_diagonal(spec: BellDiagonalSpec) -> np.ndarray:
    """``(1 + sum_j c_j sigma_j (x) sigma_j) / 4``."""
    rho = PAULI_PAIRS[0, 0].copy()
    for j, c in enumerate((spec.c1, spec.c2, spec.c3), start=1):
        rho = rho + c * PAULI_PAIRS[j, j]
    return 0.25 * rho


def werner(spec: WernerSpec) -> np.ndarray:
    """White noise mixed with ``(|00> + |11>)/sqrt(2)`` at weight ``r``."""
    phi = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2.0)
    return 0.25 * (1.0 - spec.r) * np.eye(4, dtype=complex) + spec.r * np.outer(phi, phi.conj())


def is_x_structured(rho: np.ndarray, tol: float = TOL.x_structure) -> bool:
    return bool(np.max(np.abs(np.asarray(rho)[~_X_MASK])) <= tol)


def elements_from_density(rho: np.ndarray) -> XStateElements:
    rho = np.asarray(rho, dtype=complex)
    off = np.max(np.abs(rho[~_X_MASK]))
    if off > TOL.x_structure:
        raise NotXStructured(f"largest off-X entry is {off:.3e}")
    return XStateElements(
        rho11=rho[0, 0].real,
        rho22=rho[1, 1].real,
        rho33=rho[2, 2].real,
        rho44=rho[3, 3].real,
        rho14=complex(rho[0, 3]),
        rho23=complex(rho[1, 2]),
    )


def x_state_from_elements(x: XStateElements) -> np.ndarray:
    rho = np.diag([x.rho11, x.rho22, x.rho33, x.rho44]).astype(complex)
    rho[0, 3] = x.rho14
    rho[3, 0] = np.conj(x.rho14)
    rho[1, 2] = x.rho23
    rho[2, 1] = np.conj(x.rho23)
    return rho


def _evolved_x(pop, coh, inner_pop, inner_coh, mu, field_b, gamma, t) -> XStateElements:
    # pop, coh: initial rho11 = rho44 and real rho14; inner_*: frozen 01/10 block.
    kappa2 = mu * mu + 4.0 * field_b * field_b
    if kappa2 == 0.0:
        return XStateElements(pop, inner_pop, inner_pop, pop, coh, inner_coh)
    kappa = math.sqrt(kappa2)
    damp = math.exp(-0.5 * gamma * t * kappa2)
    cos_kt = math.cos(kappa * t)
    sin_kt = math.sin(kappa * t)
    shift = 2.0 * mu * field_b * coh / kappa2 * (1.0 - cos_kt * damp)
    rho14 = mu * mu * coh / kappa2 + 2.0 * field_b * coh / kappa2 * damp * complex(
        2.0 * field_b * cos_kt, -kappa * sin_kt
    )
    return XStateElements(
        rho11=pop + shift,
        rho22=inner_pop,
        rho33=inner_pop,
        rho44=pop - shift,
        rho14=rho14,
        rho23=inner_coh,
    )


def evolved_bell_diagonal_elements(
    spec: BellDiagonalSpec, mu: float, field_b: float, gamma: float, t: float
) -> XStateElements:
    """Closed-form X elements of an evolved Bell-diagonal state.

    With ``A = (1 + c3)/4``, ``C = (c1 - c2)/4``, ``D = (1 - c3)/4``,
    ``E = (c1 + c2)/4`` and ``f(t) = 1 - cos(kt) exp(-gamma t k^2 / 2)``::

        rho11 = A + 2 mu B C / k^2 f(t),   rho44 = A - 2 mu B C / k^2 f(t)
        rho14 = mu^2 C / k^2 + 2 B C / k^2 exp(-gamma t k^2 / 2) (2B cos kt - i k sin kt)
        rho22 = rho33 = D,  rho23 = E
    """
    a = (1.0 + spec.c3) / 4.0
    c = (spec.c1 - spec.c2) / 4.0
    d = (1.0 - spec.c3) / 4.0
    e = (spec.c1 + spec.c2) / 4.0
    return _evolved_x(a, c, d, e, mu, field_b, gamma, t)


def evolved_werner_elements(
    spec: WernerSpec, mu: float, field_b: float, gamma: float, t: float
) -> XStateElements:
    """Same dynamics as above with ``A -> (1 + r)/4``, ``C -> r/2``, ``D -> (1 - r)/4``, ``E -> 0``."""
    return _evolved_x((1.0 + spec.r) / 4.0, spec.r / 2.0, (1.0 - spec.r) / 4.0, 0.0, mu, field_b, gamma, t)
