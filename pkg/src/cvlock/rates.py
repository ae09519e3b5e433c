"""Closed-form locked-key rates and reference bounds for lossy bosonic channels.

Every rate is in bits per mode; ``log`` is base 2 throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

LOG2E = 1.0 / math.log(2.0)
_SMALL = 1e-12


def g(N):
    """Entropy in bits of a thermal state with mean photon number ``N``.

    Accepts scalars or arrays. Below ``1e-12`` the first-order series
    ``N (log e - log N)`` replaces the exact form to avoid ``0 log 0``.

    >>> float(g(1.0))
    2.0
    """
    x = np.asarray(N, dtype=float)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise ValueError("g is defined for N >= 0 only")
    big = x >= _SMALL
    safe = np.where(big, x, 1.0)
    exact = (safe + 1) * np.log2(safe + 1) - safe * np.log2(safe)
    tiny = np.where(x > 0, x * (LOG2E - np.log2(np.where(x > 0, x, 1.0))), 0.0)
    out = np.where(big, exact, tiny)
    return float(out) if out.ndim == 0 else out


def g_inverse(value: float, tol: float = 1e-12) -> float:
    """Mean photon number whose thermal entropy equals ``value`` bits."""
    if value < 0:
        raise ValueError("entropy must be non-negative")
    if value == 0:
        return 0.0
    return bisect(lambda x: g(x) - value, 0.0, 2.0 ** value, tol=tol)


def bisect(f, lo: float, hi: float, tol: float = 1e-10, maxiter: int = 400) -> float:
    """Root of ``f`` on ``[lo, hi]`` by bisection; ``f(lo)`` and ``f(hi)`` must differ in sign."""
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise ValueError("bisection bracket does not change sign")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0 or hi - lo < tol:
            return mid
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class RateBreakdown:
    chi: float
    k: float
    aux: dict = field(default_factory=dict)

    @property
    def r(self) -> float:
        return self.chi - self.k


@dataclass(frozen=True)
class BoundSet:
    tgw: float
    dr_capacity: float
    rci: float


def _open_eta(eta: float):
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie strictly inside (0, 1), got {eta}")


def _positive(name, value):
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")


def dr_rates(eta: float, N: float) -> RateBreakdown:
    """Direct reconciliation with Gaussian-modulated coherent states."""
    _open_eta(eta)
    _positive("N", N)
    chi = g(eta * N)
    k = 2 * g((1 - eta) * N) - g(2 * (1 - eta) * N)
    return RateBreakdown(chi, k)


def rr_rates(eta: float, N: float) -> RateBreakdown:
    """Reverse reconciliation with a two-mode squeezed vacuum source."""
    _open_eta(eta)
    _positive("N", N)
    N1 = N / (1 + eta * N)
    N2 = N * (1 + 2 * eta * N) / (1 + eta * N)
    chi = g(N) - g((1 - eta) * N1)
    k = 2 * g((1 - eta) * N) - g((1 - eta) * N1) - g((1 - eta) * N2)
    return RateBreakdown(chi, k, {"N_prime": N1, "N_second": N2})


def active_photon_numbers(eta: float, N: float, N_T: float) -> tuple[float, float]:
    """``(N_tilde, N_hat)`` for the active (entangling-cloner) attack.

    ``N_tilde`` is fixed by Alice's conditional covariance,
    ``(1-eta) N_tilde + 1/2`` with denominator ``1 + N_T + (N - N_T) eta``.
    ``N_hat`` is the large-N expression.
    """
    Nt = N * (1 + N_T) / (1 + N_T + (N - N_T) * eta)
    Nh = 2 * (1 - eta) * N + ((1 - eta) + N_T * (2 * eta ** 2 - 1)) / eta
    return Nt, Nh


def active_rates(eta: float, N: float, N_T: float) -> RateBreakdown:
    """Reverse reconciliation under an active Gaussian attack (valid for ``N >> 1, N_T``)."""
    _open_eta(eta)
    _positive("N", N)
    if not N_T >= 0:
        raise ValueError(f"N_T must be non-negative, got {N_T}")
    Nt, Nh = active_photon_numbers(eta, N, N_T)
    if Nh < 0:
        raise ValueError(f"large-N approximation invalid here: N_hat = {Nh:.4g} < 0")
    chi = g(N) - g((1 - eta) * Nt)
    k = g(N_T) + 2 * g((1 - eta) * N + eta * N_T) - g((1 - eta) * Nt) - g(Nh)
    return RateBreakdown(chi, k, {"N_tilde": Nt, "N_hat": Nh})


def active_rates_exact(eta: float, N: float, N_T: float) -> RateBreakdown:
    """Finite-N active-attack rates straight from the 4-mode covariance matrix.

    ``k`` is the first branch ``2 S(E E') - S(2E)`` of the locking bound,
    with Eve holding both injected modes.
    """
    from . import gaussian as gs

    _open_eta(eta)
    _positive("N", N)
    state = gs.build_active(eta, N, N_T)  # modes A, B, E, E'
    cond_a, _ = gs.condition_on_coherent(gs.partial_trace(state, [0, 1]), [1], 0)
    chi = gs.entropy(gs.partial_trace(state, [0])) - gs.entropy(cond_a)
    bob_eve = gs.partial_trace(state, [1, 2, 3])
    s_e = gs.entropy(gs.partial_trace(bob_eve, [1, 2]))
    s_2e = gs.entropy(gs.two_copy_average(bob_eve, [0]))
    return RateBreakdown(chi, 2 * s_e - s_2e, {"S_E": s_e, "S_2E": s_2e})


def asymptotic_rates(eta: float, N_T: float = 0.0) -> tuple[float, float, float]:
    """``N -> infinity`` limits ``(r_dr, r_rr, r_rr_thermal)``."""
    _open_eta(eta)
    if not N_T >= 0:
        raise ValueError(f"N_T must be non-negative, got {N_T}")
    r_dr = 1 + math.log2(eta / (1 - eta))
    r_rr = 1 + math.log2(1 / (1 - eta))
    return r_dr, r_rr, r_rr - g(N_T)


def bounds(eta: float) -> BoundSet:
    """TGW bound, direct-reconciliation capacity and reverse coherent information."""
    _open_eta(eta)
    return BoundSet(
        tgw=math.log2((1 + eta) / (1 - eta)),
        dr_capacity=max(0.0, math.log2(eta / (1 - eta))),
        rci=math.log2(1 / (1 - eta)),
    )


def noise_threshold(eta: float, tol: float = 1e-10) -> float:
    """Largest thermal noise ``N_T`` with a non-negative asymptotic reverse rate."""
    _open_eta(eta)
    target = 1 + math.log2(1 / (1 - eta))
    # g(x) > log(x + 1), so g(2^target) > target
    return bisect(lambda x: g(x) - target, 0.0, 2.0 ** target, tol=tol)


def locking_k_branches(S_E: float, S_2E: float, chi: float) -> tuple[float, float]:
    """The two candidates ``(2 S_E - S_2E, S_E - chi)`` for the key consumption rate."""
    if S_E < 0 or S_2E < 0:
        raise ValueError("entropies must be non-negative")
    return 2 * S_E - S_2E, S_E - chi


def locking_k_from_entropies(S_E: float, S_2E: float, chi: float, *, return_branch: bool = False):
    """Key consumption rate from Eve's one- and two-copy entropies.

    With ``return_branch=True`` also returns ``"collision"`` or ``"holevo"``
    naming the active branch.
    """
    first, second = locking_k_branches(S_E, S_2E, chi)
    k = max(first, second)
    if return_branch:
        return k, ("collision" if first >= second else "holevo")
    return k
