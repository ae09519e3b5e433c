"""Operator Chernoff bound and Bob's sliced coherent-state POVM.

Bob's received state is thermal with ``eta N`` photons per mode. A random
codebook of ``M`` coherent states is projected onto a window of that state
(a probability-mass window for one mode, the strongly typical subspace for
two modes) and compared with its expectation in operator order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import locking
from .fock import sample_codebook
from .rates import g

LN2 = math.log(2.0)
PSD_TOL = 1e-10


@dataclass(frozen=True)
class ChernoffParams:
    D: int
    T: float
    epsilon: float
    a: float

    def __post_init__(self):
        if self.D < 1:
            raise ValueError("D must be at least 1")
        if self.T < 0:
            raise ValueError("T must be non-negative")
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must lie in (0, 1]")
        if not 0 < self.a <= 1:
            raise ValueError("a must lie in (0, 1]")


def chernoff_tail(params: ChernoffParams) -> float:
    """One-sided tail ``D exp(-T eps^2 a / (4 ln 2))``, clamped to ``[0, 1]``."""
    p = params
    return min(1.0, p.D * math.exp(-p.T * p.epsilon ** 2 * p.a / (4 * LN2)))


# ---------------------------------------------------------------------------
# windows

@dataclass(frozen=True)
class Window:
    """Photon-number basis states kept by Bob's slicing projector."""

    levels: np.ndarray  # (D, n) photon numbers per mode
    probs: np.ndarray  # diagonal of rho_B^{(x) n} on the window
    kind: str

    @property
    def dim(self) -> int:
        return self.levels.shape[0]

    @property
    def mass(self) -> float:
        return float(self.probs.sum())


def _thermal_probs(Nbar, L):
    x = Nbar / (Nbar + 1)
    return x ** np.arange(L) / (Nbar + 1)


def mass_window(Nbar: float, delta: float) -> Window:
    """Smallest set of levels of ``thermal(Nbar)`` with mass at least ``1 - delta``."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    x = Nbar / (Nbar + 1)
    L = 1 if x == 0 else max(1, math.ceil(math.log(delta) / math.log(x) - 1e-12))
    p = _thermal_probs(Nbar, L)
    return Window(np.arange(L)[:, None], p, "mass")


def typical_window(Nbar: float, n: int, delta: float, support_cut: float = 1e-6) -> Window:
    """All length-``n`` photon-number sequences with a strongly delta-typical type."""
    spec = locking.Spectrum.thermal(Nbar, support_cut)
    ts = locking.typical_types(spec, n, delta)
    allowed = {c.counts for c in ts.classes}
    L = spec.p.size
    grids = np.array(np.meshgrid(*[np.arange(L)] * n, indexing="ij")).reshape(n, -1).T
    keep = [row for row in grids if tuple(np.bincount(row, minlength=L)) in allowed]
    levels = np.array(keep, dtype=int)
    probs = np.prod(spec.p[levels], axis=1)
    return Window(levels, probs, "typical")


def _raw_amplitudes(beta, levels):
    """``<l_1..l_n|beta_1..beta_n>`` without renormalization; ``beta`` has shape ``(M, n)``."""
    out = np.ones((beta.shape[0], levels.shape[0]), dtype=complex)
    for j in range(levels.shape[1]):
        b = beta[:, j]
        l = levels[:, j]
        with np.errstate(divide="ignore"):
            logr = np.log(np.abs(b))
        logmag = -0.5 * np.abs(b)[:, None] ** 2 + l[None, :] * logr[:, None] - 0.5 * gammaln(l + 1)[None, :]
        logmag = np.where(l[None, :] == 0, -0.5 * np.abs(b)[:, None] ** 2, logmag)
        out *= np.exp(logmag + 1j * np.angle(b)[:, None] * l[None, :])
    return out


# ---------------------------------------------------------------------------
# POVM

@dataclass(frozen=True)
class PovmReport:
    """Spectral summary of one sampled codebook.

    ``lam_min``/``lam_max`` are the eigenvalues of ``mu^{-1/2} (Sigma/M) mu^{-1/2}``
    with ``mu`` the window block of Bob's average state; the sandwich holds
    when both lie in ``[1 - eps, 1 + eps]``. The ``*_flat`` values normalize
    ``Sigma`` by ``M 2^{-n g(eta N)}`` instead.
    """

    n: int
    M: int
    epsilon: float
    window: Window
    lam_min: float
    lam_max: float
    lam_min_flat: float
    lam_max_flat: float
    gamma0_weight: float
    a: float  # smallest eigenvalue of the window-restricted mean
    a_flat: float  # 2^{-n g(eta N)}
    vectors: np.ndarray  # rows g_x with Gamma_x = g_x g_x^dag
    undersampled: bool

    @property
    def upper_ok(self) -> bool:
        return self.lam_max <= 1 + self.epsilon

    @property
    def lower_ok(self) -> bool:
        return self.lam_min >= 1 - self.epsilon

    @property
    def sandwich_ok(self) -> bool:
        return self.upper_ok and self.lower_ok

    def chernoff(self) -> float:
        """Two-sided union bound on the probability of a sandwich violation."""
        return min(1.0, 2 * chernoff_tail(ChernoffParams(self.window.dim, self.M, self.epsilon, self.a)))


def build_bob_povm(n: int, N: float, eta: float, M: int, epsilon: float, delta: float = 0.01,
                   seed: int = 0, *, window: Window | None = None) -> PovmReport:
    """Sample ``M`` coherent codewords and build the sliced, whitened POVM.

    Args:
        n: modes per codeword, 1 or 2.
        N, eta: source photons and channel transmissivity; codeword amplitudes
            have variance ``eta N`` per mode.
        M: codebook size, at most ``10^5`` and at least the window dimension.
        epsilon: sandwich tolerance.
        delta: slicing parameter (mass deficit for ``n = 1``, typicality for ``n = 2``).
        seed: RNG seed of the codebook.
        window: reuse a precomputed window.
    """
    if n not in (1, 2):
        raise ValueError("n must be 1 or 2")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if not 1 <= M <= 100_000:
        raise ValueError("M must lie in [1, 1e5]")
    Nb = eta * N
    if window is None:
        window = mass_window(Nb, delta) if n == 1 else typical_window(Nb, n, delta)
    if window.dim == 0:
        raise ValueError("window is empty")
    D = window.dim
    if M < D:
        raise ValueError(f"M = {M} is below the window dimension {D}; the sandwich is vacuous")
    beta = sample_codebook(Nb, (M, n), seed)
    V = _raw_amplitudes(beta, window.levels)  # rows P|beta_x>
    mu = window.probs
    W = V / np.sqrt(mu)[None, :]
    R = W.T @ W.conj() / M
    R = 0.5 * (R + R.conj().T)
    lam = np.linalg.eigvalsh(R)
    S = V.T @ V.conj() / M
    flat = np.linalg.eigvalsh(0.5 * (S + S.conj().T)) / 2.0 ** (-n * g(Nb))
    vectors = W / math.sqrt((1 + epsilon) * M)
    gamma0 = float(mu.sum() - np.sum(mu * np.diag(R).real) / (1 + epsilon))
    return PovmReport(
        n=n, M=M, epsilon=epsilon, window=window,
        lam_min=float(lam[0]), lam_max=float(lam[-1]),
        lam_min_flat=float(flat[0]), lam_max_flat=float(flat[-1]),
        gamma0_weight=gamma0, a=float(mu.min()), a_flat=2.0 ** (-n * g(Nb)),
        vectors=vectors, undersampled=M < 2 * D,
    )


@dataclass(frozen=True)
class DecodeStats:
    p: np.ndarray  # Tr(Gamma_x rho_B)
    gamma0_mass: float
    outside_mass: float  # probability outside the window

    @property
    def error_probability(self) -> float:
        return self.gamma0_mass + self.outside_mass

    @property
    def total(self) -> float:
        return float(self.p.sum() + self.gamma0_mass + self.outside_mass)


def decode_statistics(povm: PovmReport, rho_B=None) -> DecodeStats:
    """Outcome probabilities of Bob's measurement on ``rho_B``.

    Args:
        povm: report from :func:`build_bob_povm`.
        rho_B: window block of Bob's state (``D x D``). Defaults to the
            diagonal of the average thermal state; its trace deficit is the
            outside-window mass.
    """
    D = povm.window.dim
    rho = np.diag(povm.window.probs).astype(complex) if rho_B is None else np.asarray(rho_B)
    if rho.shape != (D, D):
        raise ValueError(f"rho_B must be {D}x{D}")
    G = povm.vectors
    p = np.einsum("xi,ij,xj->x", G.conj(), rho, G).real
    gamma0 = np.eye(D) - G.T @ G.conj()
    gamma0 = 0.5 * (gamma0 + gamma0.conj().T)
    if np.linalg.eigvalsh(gamma0)[0] < -PSD_TOL:
        raise ValueError("Gamma_0 is not positive: the codebook overshoots (1 + eps)")
    g0 = float(np.trace(gamma0 @ rho).real)
    outside = float(1.0 - np.trace(rho).real)
    return DecodeStats(p, g0, outside)


@dataclass(frozen=True)
class TrialSummary:
    seeds: list[int]
    lam_min: list[float]
    lam_max: list[float]
    gamma0: list[float]
    violations: int
    bound: float
    p_value: float  # one-sided binomial test of the violation count against the bound

    @property
    def frequency(self) -> float:
        return self.violations / len(self.seeds)


def run_trials(seeds, n: int = 1, N: float = 1.0, eta: float = 0.5, M: int = 10_000,
               epsilon: float = 0.3, delta: float = 0.01) -> TrialSummary:
    """Independent codebooks, one per seed, with the violation count tested against the tail bound."""
    from scipy.stats import binomtest

    Nb = eta * N
    window = mass_window(Nb, delta) if n == 1 else typical_window(Nb, n, delta)
    reps = [build_bob_povm(n, N, eta, M, epsilon, delta, s, window=window) for s in seeds]
    viol = sum(not r.sandwich_ok for r in reps)
    bound = reps[0].chernoff()
    pval = 1.0 if bound >= 1 else binomtest(viol, len(reps), bound, alternative="greater").pvalue
    return TrialSummary(list(seeds), [r.lam_min for r in reps], [r.lam_max for r in reps],
                        [r.gamma0_weight for r in reps], viol, bound, float(pval))


def m_threshold(Ms, seeds, n: int = 1, N: float = 1.0, eta: float = 0.5, epsilon: float = 0.3,
                delta: float = 0.01, max_rate: float = 0.05) -> int | None:
    """Smallest ``M`` in ``Ms`` whose empirical violation rate is at most ``max_rate``."""
    for M in sorted(Ms):
        if run_trials(seeds, n, N, eta, M, epsilon, delta).frequency <= max_rate:
            return M
    return None
