"""Numerical tolerances shared across the package.

Every threshold used by a validation or convergence check lives here so
that tests and the CLI agree on one set of numbers.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-10          # ||M - M^H||_max accepted as Hermitian
    jacobi_offdiag: float = 1e-14     # Frobenius mass left off the diagonal
    jacobi_max_sweeps: int = 60
    degenerate_cluster: float = 1e-12  # eigenvalues closer than this share a cluster
    psd_clamp: float = 1e-10          # eigenvalues in [-psd_clamp, 0) are clamped
    density_trace: float = 1e-10
    density_positivity: float = 1e-9
    physical_eig: float = 1e-12       # Bell-diagonal tetrahedron check
    x_structure: float = 1e-10        # largest off-X entry accepted
    energy_degeneracy: float = 1e-12
    kraus_completeness: float = 1e-10
    kraus_default_lmax: int = 40
    kraus_cap_lmax: int = 640
    rk4_trace_drift: float = 1e-6
    bloch_zero: float = 1e-9          # |r'| below this counts as the zero vector
    tdd_denominator: float = 1e-12
    measure_noise_floor: float = 1e-13  # |value| below this is reported as 0


TOL = Tolerances()
