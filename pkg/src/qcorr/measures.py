"""Correlation quantifiers for two-qubit states.

Closed forms
    :func:`concurrence` (Wootters), :func:`concurrence_x`, :func:`lqu`,
    :func:`uin`, :func:`tdd_x`.

Brute-force oracles
    :func:`lqu_bruteforce`, :func:`uin_bruteforce`, :func:`tdd_bruteforce`
    optimize the defining expressions directly over local Bloch directions:
    a deterministic Fibonacci-sphere scan followed by Nelder-Mead polishing
    of the best few grid points.

All measures act on subsystem ``a`` (the first qubit) and are normalized so
that a Bell state scores 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import minimize

from .linalg import (
    LOCAL_A,
    SY,
    bloch_vector,
    check_density,
    partial_trace_b,
    sqrt_psd,
    symmetric_eigvals3,
    trace_norm,
)
from .states import XStateElements
from .tolerances import TOL

CLOSED_FORM = "closed-form"
BRUTE_FORCE = "brute-force"

_YY = np.kron(SY, SY)


@dataclass(frozen=True)
class MeasureResult:
    value: float
    method: str = CLOSED_FORM
    direction: np.ndarray | None = None  # optimal Bloch direction (brute force only)

    def __float__(self) -> float:
        return self.value


class TddAux(NamedTuple):
    g1: float
    g2: float
    g3: float
    x_a: float


def _clean(value: float) -> float:
    # Squash rounding noise around the exact endpoints 0 and 1.
    floor = TOL.measure_noise_floor
    if abs(value) < floor:
        return 0.0
    if 1.0 < value < 1.0 + floor:
        return 1.0
    return float(value)


# -- concurrence --------------------------------------------------------------

def spin_flip(rho: np.ndarray) -> np.ndarray:
    return _YY @ np.conj(rho) @ _YY


def concurrence(rho: np.ndarray) -> MeasureResult:
    """``max(0, l1 - l2 - l3 - l4)`` with ``l_i`` the eigenvalues of
    ``sqrt(sqrt(rho) rho~ sqrt(rho))`` in decreasing order."""
    rho = check_density(rho)
    s = sqrt_psd(rho)
    # sqrt(rho) rho~ sqrt(rho) = A A^H with A = sqrt(rho) (YY) sqrt(rho)^* (YY), so the
    # l_i are singular values of A; taking them directly avoids the square root
    # that would magnify rounding noise in near-zero eigenvalues.
    lam = np.linalg.svd(s @ _YY @ np.conj(s), compute_uv=False)
    return MeasureResult(_clean(max(0.0, lam[0] - lam[1] - lam[2] - lam[3])))


def concurrence_x(x: XStateElements) -> MeasureResult:
    inner = abs(x.rho14) - math.sqrt(x.rho22 * x.rho33)
    outer = abs(x.rho23) - math.sqrt(x.rho11 * x.rho44)
    return MeasureResult(_clean(2.0 * max(0.0, inner, outer)))


# -- skew-information measures -----------------------------------------------

def w_matrix(rho: np.ndarray) -> np.ndarray:
    """``w_ij = Tr(sqrt(rho) (s_i x 1) sqrt(rho) (s_j x 1))`` for i, j in {x, y, z}."""
    rho = check_density(rho)
    s = sqrt_psd(rho)
    a = s @ LOCAL_A
    w = np.einsum("iab,jba->ij", a, a).real
    return 0.5 * (w + w.T)


def lqu(rho: np.ndarray) -> MeasureResult:
    """Local quantum uncertainty ``1 - max eig W``."""
    lam = symmetric_eigvals3(w_matrix(rho))
    return MeasureResult(_clean(1.0 - lam[0]))


def uin(rho: np.ndarray) -> MeasureResult:
    """Uncertainty-induced nonlocality.

    ``1 - min eig W`` when the reduced state of ``a`` is maximally mixed,
    otherwise ``1 - r W r^T / |r|^2`` with ``r`` its Bloch vector.
    """
    rho = check_density(rho)
    w = w_matrix(rho)
    r = bloch_vector(partial_trace_b(rho))
    norm2 = float(r @ r)
    if math.sqrt(norm2) < TOL.bloch_zero:
        return MeasureResult(_clean(1.0 - symmetric_eigvals3(w)[-1]))
    return MeasureResult(_clean(1.0 - float(r @ w @ r) / norm2))


# -- trace distance discord ---------------------------------------------------

def tdd_aux(x: XStateElements) -> TddAux:
    # A local phase rotation makes rho14 and rho23 real and non-negative
    # without changing the discord, so only their moduli enter.
    c14 = abs(x.rho14)
    c23 = abs(x.rho23)
    return TddAux(
        g1=2.0 * (c23 + c14),
        g2=2.0 * (c23 - c14),
        g3=1.0 - 2.0 * (x.rho22 + x.rho33),
        x_a=2.0 * (x.rho11 + x.rho22) - 1.0,
    )


def tdd_x(x: XStateElements) -> MeasureResult:
    """Trace distance discord of an X state.

    ``T^2 = (g1^2 M - g2^2 m) / (M - m + g1^2 - g2^2)`` with
    ``M = max(g3^2, g2^2 + xA^2)`` and ``m = min(g3^2, g1^2)``.
    """
    g1, g2, g3, x_a = tdd_aux(x)
    a1, a2, a3 = g1 * g1, g2 * g2, g3 * g3
    big = max(a3, a2 + x_a * x_a)
    small = min(a3, a1)
    # Same ratio written as a weighted mean of g1^2 and m; both weights are
    # >= 0 because g1^2 >= g2^2 and big >= g3^2 >= small.
    w_big = big - small
    w_coh = a1 - a2
    if w_big + w_coh < TOL.tdd_denominator:
        ratio = a1
    else:
        ratio = (a1 * w_big + small * w_coh) / (w_big + w_coh)
    return MeasureResult(_clean(math.sqrt(max(ratio, 0.0))))


# -- brute-force oracles ------------------------------------------------------

def fibonacci_sphere(n: int) -> np.ndarray:
    """``n`` nearly uniform unit vectors, deterministic."""
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    rho = np.sqrt(1.0 - z * z)
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def _direction(angles: np.ndarray) -> np.ndarray:
    th, ph = angles
    return np.array([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)])


def _angles(n: np.ndarray) -> np.ndarray:
    return np.array([math.acos(max(-1.0, min(1.0, n[2]))), math.atan2(n[1], n[0])])


def _optimize_on_sphere(
    scan: Callable[[np.ndarray], np.ndarray],
    point: Callable[[np.ndarray], float],
    n_grid: int,
    maximize: bool = False,
    n_starts: int = 3,
) -> tuple[float, np.ndarray]:
    if n_grid < 64:
        raise ValueError(f"n_grid must be >= 64, got {n_grid}")
    sign = -1.0 if maximize else 1.0
    dirs = fibonacci_sphere(n_grid)
    vals = sign * scan(dirs)
    order = np.argsort(vals, kind="stable")
    best_val = float(vals[order[0]])
    best_dir = dirs[order[0]]
    step = math.sqrt(4.0 * math.pi / n_grid)
    obj = lambda ang: sign * point(_direction(ang))  # noqa: E731
    for idx in order[:n_starts]:
        x0 = _angles(dirs[idx])
        simplex = np.array([x0, x0 + [step, 0.0], x0 + [0.0, step]])
        res = minimize(
            obj,
            x0,
            method="Nelder-Mead",
            options={"maxiter": 200, "xatol": 1e-10, "fatol": 1e-10, "initial_simplex": simplex},
        )
        if res.fun < best_val:
            best_val = float(res.fun)
            best_dir = _direction(res.x)
    return sign * best_val, best_dir


def _reference_sqrt(rho: np.ndarray) -> np.ndarray:
    # LAPACK route, kept separate from the Jacobi solver used by the closed forms
    vals, vecs = np.linalg.eigh(rho)
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T


def _local(dirs: np.ndarray) -> np.ndarray:
    return np.einsum("nk,kij->nij", np.atleast_2d(dirs), LOCAL_A)


def skew_information(sqrt_rho: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    """``-1/2 Tr([sqrt(rho), K]^2)`` for ``K = n.sigma (x) 1``, one value per row of ``dirs``."""
    k = _local(dirs)
    c = sqrt_rho @ k - k @ sqrt_rho
    return -0.5 * np.einsum("nij,nji->n", c, c).real


def lqu_bruteforce(rho: np.ndarray, n_grid: int = 2048) -> MeasureResult:
    rho = check_density(rho)
    s = _reference_sqrt(rho)
    val, n = _optimize_on_sphere(
        lambda d: skew_information(s, d),
        lambda v: float(skew_information(s, v)[0]),
        n_grid,
    )
    return MeasureResult(_clean(val), BRUTE_FORCE, n)


def uin_bruteforce(rho: np.ndarray, n_grid: int = 2048) -> MeasureResult:
    """Largest skew information over local observables commuting with ``rho_a``."""
    rho = check_density(rho)
    s = _reference_sqrt(rho)
    r = bloch_vector(partial_trace_b(rho))
    norm = float(np.linalg.norm(r))
    if norm >= TOL.bloch_zero:
        # only +-r/|r| commute with a non-degenerate rho_a
        n = r / norm
        return MeasureResult(_clean(float(skew_information(s, n)[0])), BRUTE_FORCE, n)
    val, n = _optimize_on_sphere(
        lambda d: skew_information(s, d),
        lambda v: float(skew_information(s, v)[0]),
        n_grid,
        maximize=True,
    )
    return MeasureResult(_clean(val), BRUTE_FORCE, n)


def _dephasing_residual(rho: np.ndarray, k: np.ndarray) -> np.ndarray:
    # rho - sum_+- P rho P with P = (1 +- K)/2 equals (rho - K rho K) / 2
    return 0.5 * (rho - k @ rho @ k)


def tdd_bruteforce(rho: np.ndarray, n_grid: int = 2048) -> MeasureResult:
    """``min_n || rho - Pi_n(rho) ||_1`` over projective measurements on ``a``."""
    rho = check_density(rho)

    def scan(dirs):
        ev = np.linalg.eigvalsh(_dephasing_residual(rho, _local(dirs)))
        return np.abs(ev).sum(axis=-1)

    def point(n):
        return trace_norm(_dephasing_residual(rho, _local(n)[0]))

    val, n = _optimize_on_sphere(scan, point, n_grid)
    return MeasureResult(_clean(val), BRUTE_FORCE, n)


MEASURES = ("concurrence", "lqu", "tdd", "uin")
