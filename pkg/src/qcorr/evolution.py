"""Time evolution under intrinsic (Milburn) decoherence.

Three routes to ``rho(t)``:

* :func:`propagate_spectral` works in the energy eigenbasis, where each
  coherence ``rho_mn`` picks up ``exp(-gamma t (E_m - E_n)^2 / 2 - i (E_m - E_n) t)``.
  This is the production path.
* :func:`kraus_operators` / :func:`propagate_kraus` use the operator-sum
  form with ``M_l = (gamma t)^(l/2) / sqrt(l!) H^l exp(-iHt) exp(-gamma t H^2 / 2)``.
* :func:`integrate_master` runs classical RK4 on
  ``d rho/dt = -i[H, rho] - gamma/2 [H, [H, rho]]`` and only needs ``H``.

The last two exist to cross-check the first.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

from .errors import ConfigError, StepTooLarge, TruncationOverflow
from .hamiltonian import Eigensystem, ModelParams, bohr_frequencies, build_hamiltonian, eigensystem
from .linalg import check_density
from .tolerances import TOL

BACKENDS = ("spectral", "kraus", "rk4")


def _check_rate_time(gamma: float, t: float) -> None:
    if not (math.isfinite(gamma) and gamma >= 0):
        raise ConfigError(f"gamma must be finite and >= 0, got {gamma!r}")
    if not (math.isfinite(t) and t >= 0):
        raise ConfigError(f"t must be finite and >= 0, got {t!r}")


def to_energy_basis(es: Eigensystem, rho: np.ndarray) -> np.ndarray:
    v = es.states
    return v.conj().T @ rho @ v


def from_energy_basis(es: Eigensystem, rho_e: np.ndarray) -> np.ndarray:
    v = es.states
    return v @ rho_e @ v.conj().T


def decoherence_kernel(es: Eigensystem, gamma: float, t: float) -> np.ndarray:
    w = bohr_frequencies(es)
    return np.exp(-0.5 * gamma * t * w**2 - 1j * w * t)


def propagate_spectral(es: Eigensystem, rho0: np.ndarray, gamma: float, t: float) -> np.ndarray:
    """Evolve ``rho0`` to time ``t`` using the energy-basis dephasing formula.

    Parameters
    ----------
    es : Eigensystem
        Eigensystem of the Hamiltonian generating the dynamics.
    rho0 : (4, 4) complex array
        Initial density matrix.
    gamma : float
        Intrinsic decoherence rate, ``>= 0``.
    t : float
        Evolution time, ``>= 0``.
    """
    _check_rate_time(gamma, t)
    rho0 = check_density(rho0, "rho0")
    if t == 0.0:
        return rho0
    return _spectral(es, to_energy_basis(es, rho0), gamma, t)


def _spectral(es: Eigensystem, rho_e: np.ndarray, gamma: float, t: float) -> np.ndarray:
    out = from_energy_basis(es, rho_e * decoherence_kernel(es, gamma, t))
    return 0.5 * (out + out.conj().T)


def _kraus_amplitudes(energies: np.ndarray, gamma: float, t: float, l_max: int) -> np.ndarray:
    # a[l, m]: eigenvalue of M_l on the m-th energy eigenstate, built in log
    # space so that (gamma t E^2)^l / l! never has to be formed directly.
    gt = gamma * t
    amp = np.zeros((l_max + 1, len(energies)), dtype=complex)
    for m, e in enumerate(energies):
        phase = complex(math.cos(e * t), -math.sin(e * t))
        amp[0, m] = math.exp(-0.5 * gt * e * e) * phase
        if gt == 0.0 or e == 0.0:
            continue
        log_x = math.log(gt * e * e)
        sign = 1.0 if e > 0 else -1.0
        for l in range(1, l_max + 1):
            log_raw = l * log_x - math.lgamma(l + 1)
            if log_raw > 709.0:
                raise TruncationOverflow(
                    f"(gamma t)^l E^2l / l! overflows at l={l} (gamma t E^2 = {gt * e * e:.3g})"
                )
            amp[l, m] = sign**l * math.exp(0.5 * log_raw - 0.5 * gt * e * e) * phase
    return amp


def kraus_operators(
    es: Eigensystem,
    gamma: float,
    t: float,
    l_max: int = TOL.kraus_default_lmax,
    auto_extend: bool = True,
) -> list[np.ndarray]:
    """Kraus operators ``M_0 .. M_lmax`` of the decoherence channel at time ``t``.

    With ``auto_extend`` the truncation order is doubled (up to
    ``TOL.kraus_cap_lmax``) until ``||sum M^H M - 1||_max`` drops below
    ``TOL.kraus_completeness``.
    """
    _check_rate_time(gamma, t)
    if l_max < 0:
        raise ConfigError(f"l_max must be >= 0, got {l_max}")
    energies = np.asarray(es.energies, dtype=float)
    v = es.states
    while True:
        amp = _kraus_amplitudes(energies, gamma, t, l_max)
        weight = np.sum(np.abs(amp) ** 2, axis=0)
        completeness = (v * weight) @ v.conj().T
        residual = np.max(np.abs(completeness - np.eye(4)))
        if not auto_extend or residual < TOL.kraus_completeness:
            break
        if l_max >= TOL.kraus_cap_lmax:
            raise TruncationOverflow(
                f"Kraus sum incomplete at l_max={l_max} (residual {residual:.3e})"
            )
        l_max = min(2 * max(l_max, 1), TOL.kraus_cap_lmax)
    return [(v * amp[l]) @ v.conj().T for l in range(l_max + 1)]


def kraus_completeness(ops: Sequence[np.ndarray]) -> float:
    total = sum(m.conj().T @ m for m in ops)
    return float(np.max(np.abs(total - np.eye(total.shape[0]))))


def propagate_kraus(rho0: np.ndarray, ops: Sequence[np.ndarray]) -> np.ndarray:
    rho0 = check_density(rho0, "rho0")
    stack = np.asarray(ops, dtype=complex)
    out = np.einsum("lij,jk,lmk->im", stack, rho0, stack.conj())
    return 0.5 * (out + out.conj().T)


def liouvillian(h: np.ndarray, gamma: float) -> np.ndarray:
    """Matrix of the master-equation generator acting on row-major ``vec(rho)``."""
    h = np.asarray(h, dtype=complex)
    eye = np.eye(h.shape[0])
    ht = h.T
    h2 = h @ h
    comm = np.kron(h, eye) - np.kron(eye, ht)
    double = np.kron(h2, eye) - 2.0 * np.kron(h, ht) + np.kron(eye, h2.T)
    return -1j * comm - 0.5 * gamma * double


def _rk4_step_matrix(gen: np.ndarray, step: float) -> np.ndarray:
    # One classical RK4 step of y' = L y, applied to every basis vector at once.
    y = np.eye(gen.shape[0], dtype=complex)
    k1 = gen @ y
    k2 = gen @ (y + 0.5 * step * k1)
    k3 = gen @ (y + 0.5 * step * k2)
    k4 = gen @ (y + step * k3)
    return y + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _rk4_advance(gen: np.ndarray, y: np.ndarray, duration: float, dt: float) -> np.ndarray:
    if duration <= 0.0:
        return y
    n = max(1, math.ceil(duration / dt - 1e-9))
    prop = _rk4_step_matrix(gen, duration / n)
    # RK4 conserves the trace exactly, so an unstable step shows up as growth of
    # ||rho||_F instead; the exact dynamics never increases it.
    diag = np.arange(4) * 5
    start_trace = y[diag].sum()
    start_norm = np.linalg.norm(y)
    for i in range(n):
        y = prop @ y
        if (i + 1) % 100 == 0 or i == n - 1:
            drift = abs(y[diag].sum() - start_trace)
            growth = np.linalg.norm(y) - start_norm
            if not np.all(np.isfinite(y)) or drift > TOL.rk4_trace_drift or growth > TOL.rk4_trace_drift:
                raise StepTooLarge(
                    f"unstable RK4 step dt={duration / n:.3e} (trace drift {drift:.3e}, norm growth {growth:.3e})"
                )
    return y


def integrate_master(
    h: np.ndarray, rho0: np.ndarray, gamma: float, t: float, dt: float = 1e-3
) -> np.ndarray:
    """RK4 solution of the intrinsic-decoherence master equation at time ``t``.

    The step actually used is ``t / ceil(t / dt)`` so that the last step lands
    exactly on ``t``.

    Raises
    ------
    StepTooLarge
        If the trace drifts, or ``||rho||_F`` grows, by more than
        ``TOL.rk4_trace_drift``.
    """
    _check_rate_time(gamma, t)
    if not dt > 0:
        raise ConfigError(f"dt must be > 0, got {dt!r}")
    rho0 = check_density(rho0, "rho0")
    gen = liouvillian(h, gamma)
    y = _rk4_advance(gen, rho0.reshape(-1), t, dt)
    out = y.reshape(4, 4)
    return 0.5 * (out + out.conj().T)


def steady_state(es: Eigensystem, rho0: np.ndarray) -> np.ndarray:
    """Long-time limit for ``gamma > 0``: only coherences between equal energies survive."""
    rho0 = check_density(rho0, "rho0")
    keep = np.abs(bohr_frequencies(es)) < TOL.energy_degeneracy
    out = from_energy_basis(es, to_energy_basis(es, rho0) * keep)
    return 0.5 * (out + out.conj().T)


def relaxation_time(es: Eigensystem, gamma: float, decades: float = 50.0) -> float:
    """Time at which ``gamma t dE_min^2`` reaches ``decades`` (dE_min: smallest nonzero gap)."""
    w2 = bohr_frequencies(es) ** 2
    nonzero = w2[w2 >= TOL.energy_degeneracy**2]
    if gamma <= 0 or nonzero.size == 0:
        return math.inf
    return decades / (gamma * float(nonzero.min()))


def evolve_series(
    params: ModelParams,
    rho0: np.ndarray,
    gamma: float,
    times: Sequence[float],
    backend: str = "spectral",
    dt: float = 1e-3,
) -> np.ndarray:
    """``rho(t)`` at each of the (non-decreasing) ``times`` with the chosen backend."""
    if backend not in BACKENDS:
        raise ConfigError(f"unknown backend {backend!r}; expected one of {', '.join(BACKENDS)}")
    rho0 = check_density(rho0, "rho0")
    times = [float(t) for t in times]
    for t in times:
        _check_rate_time(gamma, t)
    if any(b < a for a, b in zip(times, times[1:])):
        raise ConfigError("times must be non-decreasing")
    out = np.empty((len(times), 4, 4), dtype=complex)
    if backend == "rk4":
        gen = liouvillian(build_hamiltonian(params), gamma)
        y = rho0.reshape(-1)
        now = 0.0
        for k, t in enumerate(times):
            y = _rk4_advance(gen, y, t - now, dt)
            now = t
            m = y.reshape(4, 4)
            out[k] = 0.5 * (m + m.conj().T)
        return out
    es = eigensystem(params)
    if backend == "spectral":
        rho_e = to_energy_basis(es, rho0)
        for k, t in enumerate(times):
            out[k] = rho0 if t == 0.0 else _spectral(es, rho_e, gamma, t)
        return out
    for k, t in enumerate(times):
        out[k] = propagate_kraus(rho0, kraus_operators(es, gamma, t))
    return out
