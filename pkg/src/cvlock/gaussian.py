"""Gaussian-state algebra in the quadrature picture.

Conventions: ``hbar = 1``, ``q = (a + a^dagger)/sqrt(2)``, vacuum variance 1/2,
quadratures ordered ``(q1, p1, q2, p2, ...)``. A coherent state ``|beta>`` has
quadrature mean ``sqrt(2) * (Re beta, Im beta)`` so that ``<n> = |beta|^2``.

All functions are pure; a :class:`GaussianState` is never mutated in place.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .rates import g

SYMMETRY_TOL = 1e-12
PHYSICAL_TOL = 1e-10


@dataclass(frozen=True)
class GaussianState:
    """Mean vector and covariance matrix of an ``nmodes``-mode Gaussian state."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise ValueError(f"covariance must be 2n x 2n, got shape {cov.shape}")
        if mean.shape[0] != cov.shape[0]:
            raise ValueError("mean length does not match covariance dimension")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise ValueError("mean and covariance must be finite")
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(cov))):
            raise ValueError("covariance matrix is not symmetric")
        nu = symplectic_eigenvalues(cov)
        # eigenvalue error grows with ||cov||; keep the slack relative
        if nu[0] < 0.5 - PHYSICAL_TOL * max(1.0, np.max(np.abs(cov))):
            raise ValueError(f"unphysical covariance: smallest symplectic eigenvalue {nu[0]:.3g} < 1/2")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def nmodes(self) -> int:
        return self.cov.shape[0] // 2

    def block(self, i: int, j: int | None = None) -> np.ndarray:
        """2x2 covariance block between modes ``i`` and ``j`` (``j`` defaults to ``i``)."""
        j = i if j is None else j
        return self.cov[2 * i:2 * i + 2, 2 * j:2 * j + 2]


@dataclass(frozen=True)
class ChannelParams:
    eta: float
    N: float
    N_T: float = 0.0

    def __post_init__(self):
        _check_eta(self.eta)
        _check_nonneg("N", self.N)
        _check_nonneg("N_T", self.N_T)


def _check_eta(eta):
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")


def _check_nonneg(name, value):
    if not value >= 0:
        raise ValueError(f"{name} must be non-negative, got {value}")


def _quad_indices(modes: Sequence[int]) -> list[int]:
    return [k for m in modes for k in (2 * m, 2 * m + 1)]


def _omega(nmodes: int) -> np.ndarray:
    return np.kron(np.eye(nmodes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def vacuum(nmodes: int = 1) -> GaussianState:
    return GaussianState(np.zeros(2 * nmodes), 0.5 * np.eye(2 * nmodes))


def thermal_state(N: float) -> GaussianState:
    _check_nonneg("N", N)
    return GaussianState(np.zeros(2), (N + 0.5) * np.eye(2))


def coherent_state(beta: complex) -> GaussianState:
    return GaussianState(coherent_mean(beta), 0.5 * np.eye(2))


def coherent_mean(beta) -> np.ndarray:
    """Quadrature mean(s) of coherent amplitude(s) ``beta``, flattened per mode."""
    beta = np.atleast_1d(np.asarray(beta, dtype=complex))
    return np.sqrt(2.0) * np.column_stack([beta.real, beta.imag]).reshape(-1)


def tensor(*states: GaussianState) -> GaussianState:
    """Direct sum of uncorrelated states, modes in argument order."""
    mean = np.concatenate([s.mean for s in states])
    cov = np.zeros((mean.size, mean.size))
    k = 0
    for s in states:
        d = s.cov.shape[0]
        cov[k:k + d, k:k + d] = s.cov
        k += d
    return GaussianState(mean, cov)


def tmsv(N: float) -> GaussianState:
    """Two-mode squeezed vacuum with ``N`` mean photons per mode."""
    _check_nonneg("N", N)
    C = 2 * N + 1
    S = 2 * np.sqrt(N * (N + 1))
    I2 = np.eye(2)
    Z = np.diag([1.0, -1.0])
    cov = 0.5 * np.block([[C * I2, S * Z], [S * Z, C * I2]])
    return GaussianState(np.zeros(4), cov)


def beamsplitter_matrix(nmodes: int, mode_a: int, mode_b: int, eta: float) -> np.ndarray:
    """Symplectic matrix of ``a -> sqrt(eta) a + sqrt(1-eta) b``, ``b -> -sqrt(1-eta) a + sqrt(eta) b``."""
    _check_eta(eta)
    for m in (mode_a, mode_b):
        if not 0 <= m < nmodes:
            raise ValueError(f"mode index {m} out of range for {nmodes} modes")
    if mode_a == mode_b:
        raise ValueError("beamsplitter needs two distinct modes")
    t, r = np.sqrt(eta), np.sqrt(1.0 - eta)
    S = np.eye(2 * nmodes)
    a = slice(2 * mode_a, 2 * mode_a + 2)
    b = slice(2 * mode_b, 2 * mode_b + 2)
    S[a, a] = t * np.eye(2)
    S[a, b] = r * np.eye(2)
    S[b, a] = -r * np.eye(2)
    S[b, b] = t * np.eye(2)
    return S


def beamsplitter(state: GaussianState, mode_a: int, mode_b: int, eta: float) -> GaussianState:
    """Mix two modes on a beamsplitter; ``mode_a`` keeps amplitude ``sqrt(eta)``.

    A lossy channel on signal mode ``s`` with environment mode ``e`` is
    ``beamsplitter(state, e, s, eta)``: the signal leaves as
    ``sqrt(eta) s - sqrt(1-eta) e`` and the environment as
    ``sqrt(eta) e + sqrt(1-eta) s``.
    """
    S = beamsplitter_matrix(state.nmodes, mode_a, mode_b, eta)
    return GaussianState(S @ state.mean, S @ state.cov @ S.T)


def attach_thermal(state: GaussianState, N_T: float) -> GaussianState:
    return tensor(state, thermal_state(N_T))


def attach_vacuum(state: GaussianState) -> GaussianState:
    return tensor(state, vacuum(1))


def partial_trace(state: GaussianState, keep: Sequence[int]) -> GaussianState:
    """Restrict to the modes in ``keep`` (in the given order)."""
    keep = list(keep)
    if not keep:
        raise ValueError("keep must name at least one mode")
    for m in keep:
        if not 0 <= m < state.nmodes:
            raise ValueError(f"mode index {m} out of range")
    idx = _quad_indices(keep)
    return GaussianState(state.mean[idx], state.cov[np.ix_(idx, idx)])


def condition_on_coherent(state: GaussianState, measured: Sequence[int], beta):
    """Project ``measured`` modes onto the coherent state(s) ``beta``.

    Returns the normalized conditional state of the remaining modes and the
    outcome weight ``<beta|rho_B|beta>``, i.e. the Husimi Q density with respect
    to ``d^2 beta / pi`` per measured mode.
    """
    measured = list(measured)
    if not measured:
        raise ValueError("measured must name at least one mode")
    rest = [m for m in range(state.nmodes) if m not in measured]
    beta = np.atleast_1d(np.asarray(beta, dtype=complex))
    if beta.size != len(measured):
        raise ValueError("need one amplitude per measured mode")
    ib, ik = _quad_indices(measured), _quad_indices(rest)
    V = state.cov
    VB = V[np.ix_(ib, ib)] + 0.5 * np.eye(len(ib))
    try:
        VB_inv = np.linalg.inv(VB)
    except np.linalg.LinAlgError as exc:  # cannot happen for physical states
        raise RuntimeError("singular heterodyne covariance") from exc
    d = coherent_mean(beta) - state.mean[ib]
    weight = float(np.exp(-0.5 * d @ VB_inv @ d) / np.sqrt(np.linalg.det(VB)))
    if not rest:
        return None, weight
    VKB = V[np.ix_(ik, ib)]
    cov = V[np.ix_(ik, ik)] - VKB @ VB_inv @ VKB.T
    mean = state.mean[ik] + VKB @ VB_inv @ d
    return GaussianState(mean, 0.5 * (cov + cov.T)), weight


def conditional_gain(state: GaussianState, measured: Sequence[int]) -> np.ndarray:
    """Linear map from heterodyne outcome quadratures to the conditional mean shift."""
    measured = list(measured)
    rest = [m for m in range(state.nmodes) if m not in measured]
    ib, ik = _quad_indices(measured), _quad_indices(rest)
    VB = state.cov[np.ix_(ib, ib)] + 0.5 * np.eye(len(ib))
    return state.cov[np.ix_(ik, ib)] @ np.linalg.inv(VB)


def symplectic_eigenvalues(cov) -> np.ndarray:
    """Ascending symplectic spectrum of ``cov`` (one value per mode)."""
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
        raise ValueError("covariance must be a square matrix of even dimension")
    if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(cov))):
        raise ValueError("covariance matrix is not symmetric")
    n = cov.shape[0] // 2
    # i*Omega*V is Hermitian up to similarity; its eigenvalues come in +/- pairs.
    ev = np.linalg.eigvals(1j * _omega(n) @ cov)
    return np.sort(np.abs(ev.real))[::2]


def entropy(state: GaussianState) -> float:
    """Von Neumann entropy in bits."""
    nu = symplectic_eigenvalues(state.cov)
    return float(sum(g(max(v - 0.5, 0.0)) for v in nu))


def build_abe(eta: float, N: float) -> GaussianState:
    """Alice, Bob, Eve after TMSV(N) mode 2 crosses a pure-loss channel."""
    _check_eta(eta)
    _check_nonneg("N", N)
    state = attach_vacuum(tmsv(N))
    return beamsplitter(state, 2, 1, eta)


def build_active(eta: float, N: float, N_T: float) -> GaussianState:
    """Modes (A, B, E, E'): Eve injects one arm of TMSV(N_T) into the channel."""
    _check_eta(eta)
    _check_nonneg("N", N)
    _check_nonneg("N_T", N_T)
    state = tensor(tmsv(N), tmsv(N_T))
    return beamsplitter(state, 2, 1, eta)


def printed_v_abe(eta: float, N: float) -> np.ndarray:
    """The 6x6 matrix exactly as displayed for the passive attack."""
    C = 2 * N + 1
    S = 2 * np.sqrt(N * (N + 1))
    t, r = np.sqrt(eta), np.sqrt(1 - eta)
    c = (C - 1) * t * r
    V = np.array([
        [C, 0, S * t, 0, S * r, 0],
        [0, C, 0, -S * t, 0, -S * r],
        [S * t, 0, C * eta + 1 - eta, 0, c, 0],
        [0, -S * t, 0, C * eta + 1 - eta, 0, c],
        [S * r, 0, c, 0, C * (1 - eta) + eta, 0],
        [0, -S * r, 0, c, 0, C * (1 - eta) + eta],
    ])
    return 0.5 * V


def printed_v_abee(eta: float, N: float, N_T: float, literal: bool = False) -> np.ndarray:
    """The 8x8 active-attack matrix as displayed.

    The display is not symmetric: the E-E' couplings read ``S_T*eta`` in three
    places and ``-S_T*sqrt(eta)`` in the fourth. ``literal=True`` reproduces
    that; the default uses ``sqrt(eta)`` throughout, which is what the
    beamsplitter construction gives.
    """
    C, S = 2 * N + 1, 2 * np.sqrt(N * (N + 1))
    CT, ST = 2 * N_T + 1, 2 * np.sqrt(N_T * (N_T + 1))
    t, r = np.sqrt(eta), np.sqrt(1 - eta)
    ee = eta if literal else t
    x = (C - CT) * t * r
    V = np.array([
        [C, 0, S * t, 0, S * r, 0, 0, 0],
        [0, C, 0, -S * t, 0, -S * r, 0, 0],
        [S * t, 0, CT * (1 - eta) + C * eta, 0, x, 0, -ST * r, 0],
        [0, -S * t, 0, CT * (1 - eta) + C * eta, 0, x, 0, ST * r],
        [S * r, 0, x, 0, C * (1 - eta) + CT * eta, 0, ST * ee, 0],
        [0, -S * r, 0, x, 0, C * (1 - eta) + CT * eta, 0, -ST * ee],
        [0, 0, -ST * r, 0, ST * ee, 0, CT, 0],
        [0, 0, 0, ST * r, 0, -ST * t, 0, CT],
    ])
    return 0.5 * V


def printed_v_2e(eta: float, N: float) -> np.ndarray:
    """Covariance of the two-copy average of Eve's conditional states (reverse protocol)."""
    Np = N / (1 + eta * N)
    a = (1 - eta) * N + 0.5
    b = eta * (1 - eta) * N * Np
    I2 = np.eye(2)
    return np.block([[a * I2, b * I2], [b * I2, a * I2]])


def two_copy_average(state: GaussianState, measured: Sequence[int]) -> GaussianState:
    """Gaussian state of ``E_beta[rho(beta) (x) rho(beta)]`` for the unmeasured modes.

    ``beta`` is drawn from the heterodyne outcome distribution of the
    ``measured`` modes, so the mean shift has covariance ``L (V_B + I/2) L^T``.
    """
    if np.any(state.mean != 0):
        raise ValueError("two_copy_average expects a zero-mean state")
    measured = list(measured)
    rest = [m for m in range(state.nmodes) if m not in measured]
    ib = _quad_indices(measured)
    L = conditional_gain(state, measured)
    cond, _ = condition_on_coherent(state, measured, np.zeros(len(measured)))
    spread = L @ (state.cov[np.ix_(ib, ib)] + 0.5 * np.eye(len(ib))) @ L.T
    cov = np.block([[cond.cov + spread, spread], [spread, cond.cov + spread]])
    return GaussianState(np.zeros(4 * len(rest)), 0.5 * (cov + cov.T))
