"""Brute-force truncated Fock-space oracle.

Independent numerical route to the spectra, entropies and conditional
moments that the Gaussian formulas predict. ``cutoff`` is the number of
levels kept per mode (photon numbers ``0 .. cutoff-1``); two-mode operators
use the Kronecker ordering ``|i>|j> -> i*cutoff + j``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .rates import g

HERMITIAN_TOL = 1e-12
TWO_MODE_MAX_CUTOFF = 40


class TruncationError(ValueError):
    """The requested cutoff discards more probability than allowed."""


@dataclass(frozen=True)
class FockVector:
    cutoff: int
    modes: int
    amplitudes: np.ndarray
    tail_mass: float = 0.0

    def expectation(self, op: np.ndarray) -> complex:
        return complex(np.vdot(self.amplitudes, op @ self.amplitudes))


@dataclass(frozen=True)
class FockOperator:
    cutoff: int
    modes: int
    matrix: np.ndarray
    hermitian: bool = True
    tail_mass: float = 0.0

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.shape != (self.cutoff ** self.modes,) * 2:
            raise ValueError(f"matrix shape {m.shape} does not match cutoff {self.cutoff}, modes {self.modes}")
        if self.hermitian and np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise ValueError("operator flagged hermitian is not")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigvals(self) -> np.ndarray:
        return np.linalg.eigvalsh(_herm(self.matrix))


def _herm(m):
    return 0.5 * (m + m.conj().T)


def _check_dims(A, B):
    A, B = _as_matrix(A), _as_matrix(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A, B


def _as_matrix(op) -> np.ndarray:
    return op.matrix if isinstance(op, FockOperator) else np.asarray(op)


def _two_mode_feasible(cutoff):
    if cutoff > TWO_MODE_MAX_CUTOFF:
        raise ValueError(f"two-mode cutoff {cutoff} exceeds the dense limit {TWO_MODE_MAX_CUTOFF}")


# ---------------------------------------------------------------------------
# states

def coherent_amplitudes(alpha, cutoff: int):
    """Truncated, renormalized coherent amplitudes for each ``alpha``.

    Returns ``(amps, tail)`` with ``amps`` of shape ``(len(alpha), cutoff)``
    and ``tail`` the discarded Poisson mass of each row.
    """
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    ell = np.arange(cutoff)
    r2 = np.abs(alpha) ** 2
    with np.errstate(divide="ignore"):
        log_r = np.log(np.abs(alpha))
    log_mag = -0.5 * r2[:, None] + ell[None, :] * log_r[:, None] - 0.5 * gammaln(ell + 1)[None, :]
    log_mag[:, 0] = -0.5 * r2  # 0 * log 0 := 0
    amps = np.exp(log_mag) * np.exp(1j * np.angle(alpha)[:, None] * ell[None, :])
    kept = np.sum(np.abs(amps) ** 2, axis=1)
    amps /= np.sqrt(kept)[:, None]
    return amps, np.clip(1.0 - kept, 0.0, None)


def coherent(alpha: complex, cutoff: int, tail_bound: float = 1e-10) -> FockVector:
    amps, tail = coherent_amplitudes(alpha, cutoff)
    if tail[0] > tail_bound:
        raise TruncationError(
            f"cutoff {cutoff} leaves tail mass {tail[0]:.2e} > {tail_bound:.0e} for |alpha|^2 = {abs(alpha) ** 2:.3g}")
    return FockVector(cutoff, 1, amps[0], float(tail[0]))


def thermal_weights(Nbar: float, cutoff: int):
    """Renormalized geometric photon-number weights and the discarded tail."""
    if Nbar < 0:
        raise ValueError("Nbar must be non-negative")
    if Nbar == 0:
        w = np.zeros(cutoff)
        w[0] = 1.0
        return w, 0.0
    x = Nbar / (Nbar + 1)
    w = x ** np.arange(cutoff) / (Nbar + 1)
    tail = x ** cutoff
    return w / w.sum(), float(tail)


def thermal(Nbar: float, cutoff: int, tail_bound: float = 1e-8) -> FockOperator:
    w, tail = thermal_weights(Nbar, cutoff)
    if tail > tail_bound:
        raise TruncationError(f"cutoff {cutoff} leaves thermal tail {tail:.2e} > {tail_bound:.0e}")
    return FockOperator(cutoff, 1, np.diag(w).astype(complex), tail_mass=tail)


def tensor(*ops: FockOperator) -> FockOperator:
    cutoff = ops[0].cutoff
    m = ops[0].matrix
    for op in ops[1:]:
        if op.cutoff != cutoff:
            raise ValueError("tensor factors must share the cutoff")
        m = np.kron(m, op.matrix)
    return FockOperator(cutoff, sum(o.modes for o in ops), m,
                        tail_mass=1 - np.prod([1 - o.tail_mass for o in ops]))


# ---------------------------------------------------------------------------
# operator utilities

def trace_distance(A, B) -> float:
    """``1/2 ||A - B||_1`` from the eigenvalues of the Hermitian difference."""
    A, B = _check_dims(A, B)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(_herm(A - B)))))


def commutator_norm(A, B) -> float:
    """Operator (spectral) norm of ``AB - BA``."""
    A, B = _check_dims(A, B)
    C = A @ B - B @ A
    if np.allclose(A, A.conj().T, atol=HERMITIAN_TOL) and np.allclose(B, B.conj().T, atol=HERMITIAN_TOL):
        # the commutator of Hermitian operators is anti-Hermitian
        return float(np.max(np.abs(np.linalg.eigvalsh(1j * C))))
    return float(np.linalg.norm(C, 2))


def entropy_fock(op, cut: float = 1e-15) -> float:
    lam = np.linalg.eigvalsh(_herm(_as_matrix(op)))
    lam = lam[lam > cut]
    return float(-np.sum(lam * np.log2(lam)))


def degeneracies(op, rtol: float = 1e-6, floor: float = 1e-14):
    """Distinct eigenvalues (descending) with their multiplicities."""
    lam = np.sort(np.linalg.eigvalsh(_herm(_as_matrix(op))))[::-1]
    lam = lam[lam > floor]
    out = []
    for v in lam:
        if out and abs(out[-1][0] - v) <= rtol * out[-1][0]:
            out[-1][1] += 1
        else:
            out.append([v, 1])
    return [(float(v), k) for v, k in out]


def annihilation(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff)), 1).astype(complex)


def quadrature_moments(op: FockOperator):
    """Quadrature mean vector and symmetrized covariance of a 1- or 2-mode operator."""
    rho = _as_matrix(op)
    rho = rho / np.trace(rho).real
    a = annihilation(op.cutoff)
    eye = np.eye(op.cutoff)
    quads = []
    for k in range(op.modes):
        ak = a
        for j in range(op.modes):
            if j < k:
                ak = np.kron(eye, ak)
            elif j > k:
                ak = np.kron(ak, eye)
        quads += [(ak + ak.conj().T) / np.sqrt(2), (ak - ak.conj().T) / (1j * np.sqrt(2))]
    mean = np.array([np.trace(rho @ R).real for R in quads])
    n = len(quads)
    cov = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            anti = quads[i] @ quads[j] + quads[j] @ quads[i]
            cov[i, j] = 0.5 * np.trace(rho @ anti).real - mean[i] * mean[j]
    return mean, cov


# ---------------------------------------------------------------------------
# Monte Carlo codebooks

def sample_codebook(mean_photons: float, size, seed: int) -> np.ndarray:
    """I.i.d. circular complex Gaussian amplitudes with ``E|alpha|^2 = mean_photons``."""
    rng = np.random.default_rng(np.uint64(seed))
    scale = np.sqrt(mean_photons / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def mc_single_mode(amplitudes, cutoff: int) -> FockOperator:
    """Average of ``|gamma><gamma|`` over the sampled amplitudes."""
    amps, tail = coherent_amplitudes(amplitudes, cutoff)
    rho = amps.T @ amps.conj() / amps.shape[0]
    return FockOperator(cutoff, 1, _herm(rho), tail_mass=float(tail.max(initial=0.0)))


def mc_two_copy(amplitudes, cutoff: int) -> FockOperator:
    """Average of ``|gamma><gamma| (x) |gamma><gamma|`` over the sampled amplitudes.

    Uses ``<i,j|gamma,gamma> = e^{-|gamma|^2} gamma^(i+j) / sqrt(i! j!)``: the
    full ``cutoff^2``-dimensional average follows from the moment matrix
    ``mean(e^{-2|gamma|^2} gamma^p conj(gamma)^q)`` with ``p, q < 2 cutoff - 1``.
    """
    _two_mode_feasible(cutoff)
    gam = np.atleast_1d(np.asarray(amplitudes, dtype=complex))
    _, tail = coherent_amplitudes(gam, cutoff)
    norm2 = (1.0 - tail) ** 2  # squared norm of the truncated product vector
    P = 2 * cutoff - 1
    p = np.arange(P)
    with np.errstate(divide="ignore"):
        log_r = np.log(np.abs(gam))
    log_u = -np.abs(gam)[:, None] ** 2 + p[None, :] * log_r[:, None]
    log_u[:, 0] = -np.abs(gam) ** 2
    u = np.exp(log_u) * np.exp(1j * np.angle(gam)[:, None] * p[None, :])
    u /= np.sqrt(norm2)[:, None]
    moments = u.T @ u.conj() / gam.size
    i = np.arange(cutoff)
    tot = (i[:, None] + i[None, :]).reshape(-1)
    lf = 0.5 * (gammaln(i[:, None] + 1) + gammaln(i[None, :] + 1)).reshape(-1)
    scale = np.exp(-lf)
    rho = scale[:, None] * moments[np.ix_(tot, tot)] * scale[None, :]
    return FockOperator(cutoff, 2, _herm(rho), tail_mass=float(1 - norm2.min(initial=1.0)))


def mc_thermal(N: float, eta: float, samples: int, cutoff: int, seed: int) -> FockOperator:
    """Monte Carlo estimate of Eve's average state ``E[|sqrt(1-eta) alpha><...|]``."""
    alpha = sample_codebook(N, samples, seed)
    return mc_single_mode(np.sqrt(1 - eta) * alpha, cutoff)


# ---------------------------------------------------------------------------
# direct reconciliation: rho_2E

def psi_plus(ell: int, cutoff: int) -> np.ndarray:
    """``2^{-l/2} sum_i sqrt(C(l, i)) |i>|l-i>`` embedded in the two-mode space."""
    if ell >= cutoff:
        raise ValueError("psi_plus needs ell < cutoff")
    v = np.zeros(cutoff * cutoff)
    for i in range(ell + 1):
        v[i * cutoff + ell - i] = np.sqrt(comb(ell, i))
    return v * 2.0 ** (-ell / 2)


def rho2E_dr_analytic(N: float, eta: float, cutoff: int) -> FockOperator:
    _two_mode_feasible(cutoff)
    m2 = 2 * (1 - eta) * N
    w, tail = thermal_weights(m2, cutoff)
    V = np.array([psi_plus(ell, cutoff) for ell in range(cutoff)])
    rho = (V.T * w) @ V
    return FockOperator(cutoff, 2, rho.astype(complex), tail_mass=tail)


def rho2E_dr(N: float, eta: float, cutoff: int, samples: int = 100_000, seed: int = 0):
    """``(analytic, mc)`` two-copy averages of Eve's coherent states."""
    analytic = rho2E_dr_analytic(N, eta, cutoff)
    alpha = sample_codebook(N, samples, seed)
    mc = mc_two_copy(np.sqrt(1 - eta) * alpha, cutoff)
    return analytic, mc


# ---------------------------------------------------------------------------
# reverse reconciliation: rho_2E

def psi_tm_printed(t: int, m: int, cutoff: int) -> np.ndarray:
    """``|psi_{t,m}>`` exactly as displayed (no normalization added)."""
    if t + m >= cutoff:
        raise ValueError("psi_tm needs t + m < cutoff")
    v = np.zeros(cutoff * cutoff)
    for j in range(t + 1):
        for k in range(m + 1):
            a, b = t + m - j - k, j + k
            v[a * cutoff + b] += (comb(t, j) * comb(m, k) * (-1) ** k
                                  * np.sqrt(float(factorial(a))) * np.sqrt(float(factorial(b))))
    return v * 2.0 ** (-(t + m) / 2)


def psi_tm_gram(lmax: int) -> tuple[list[tuple[int, int]], np.ndarray]:
    """Gram matrix of the printed ``psi_{t,m}`` over ``t + m <= lmax``."""
    labels = [(t, ell - t) for ell in range(lmax + 1) for t in range(ell + 1)]
    cutoff = lmax + 1
    vecs = np.array([psi_tm_printed(t, m, cutoff) for t, m in labels])
    return labels, vecs @ vecs.T


def rr_mode_photons(N: float, eta: float) -> tuple[float, float]:
    """Thermal photons ``((1-eta) N', (1-eta) N'')`` of the two normal modes of ``rho_2E``."""
    Np = N / (1 + eta * N)
    Npp = N * (1 + 2 * eta * N) / (1 + eta * N)
    return (1 - eta) * Np, (1 - eta) * Npp


def rho2E_rr_analytic(N: float, eta: float, cutoff: int, *, symmetric_mode: str = "N_second") -> FockOperator:
    """Spectral form of ``rho_2E`` built from normalized ``psi_{t,m}``.

    ``psi_{t,m}`` puts ``t`` quanta in ``(a+b)/sqrt 2`` and ``m`` in
    ``(a-b)/sqrt 2``; it is rescaled by ``1/sqrt(t! m!)`` and the weights are
    the product of two normalized geometric distributions. The symmetric mode
    carries ``(1-eta) N''`` photons by default; ``symmetric_mode="N_prime"``
    uses the displayed assignment instead.
    """
    _two_mode_feasible(cutoff)
    n1, n2 = rr_mode_photons(N, eta)
    if symmetric_mode == "N_second":
        n_sym, n_anti = n2, n1
    elif symmetric_mode == "N_prime":
        n_sym, n_anti = n1, n2
    else:
        raise ValueError("symmetric_mode must be 'N_second' or 'N_prime'")
    xs, xa = n_sym / (n_sym + 1), n_anti / (n_anti + 1)
    vecs, weights = [], []
    for ell in range(cutoff):
        for t in range(ell + 1):
            m = ell - t
            w = xs ** t * xa ** m / ((n_sym + 1) * (n_anti + 1))
            if w < 1e-300:
                continue
            vecs.append(psi_tm_printed(t, m, cutoff) / np.sqrt(float(factorial(t) * factorial(m))))
            weights.append(w)
    V, w = np.array(vecs), np.array(weights)
    total = w.sum()
    rho = (V.T * (w / total)) @ V
    return FockOperator(cutoff, 2, rho.astype(complex), tail_mass=1 - total)


def beamsplitter_unitary(cutoff: int, theta: float) -> np.ndarray:
    """``exp(theta (a^dag b - a b^dag))`` on the two-mode space, exact within each photon-number block."""
    d = cutoff * cutoff
    U = np.zeros((d, d))
    for ell in range(2 * cutoff - 1):
        idx = [(i, ell - i) for i in range(ell + 1) if i < cutoff and ell - i < cutoff]
        if ell >= cutoff:
            # incomplete block: keep it diagonal rather than mixing with truncated states
            for i, j in idx:
                U[i * cutoff + j, i * cutoff + j] = 1.0
            continue
        G = np.zeros((ell + 1, ell + 1))
        for i in range(ell):
            # a^dag b |i, l-i> = sqrt((i+1)(l-i)) |i+1, l-i-1>
            G[i + 1, i] = np.sqrt((i + 1) * (ell - i))
        G = G - G.T
        B = expm(theta * G)
        flat = [i * cutoff + (ell - i) for i in range(ell + 1)]
        U[np.ix_(flat, flat)] = B
    return U


def rho2E_rr_gaussian(N: float, eta: float, cutoff: int, exchange: bool = False) -> FockOperator:
    """``rho_2E`` as a balanced-beamsplitter image of a product of two thermal states.

    ``exchange=True`` swaps the two thermal inputs, which puts ``(1-eta) N'``
    on the symmetric mode; it reproduces the displayed weight assignment.
    """
    _two_mode_feasible(cutoff)
    n1, n2 = rr_mode_photons(N, eta)
    if exchange:
        n1, n2 = n2, n1
    w1, t1 = thermal_weights(n1, cutoff)
    w2, t2 = thermal_weights(n2, cutoff)
    # input mode a: (1-eta) N', mode b: (1-eta) N''; theta = pi/4 sends b to (a+b)/sqrt2
    prod = np.kron(w1, w2)
    i = np.arange(cutoff)
    prod = np.where((i[:, None] + i[None, :]).reshape(-1) < cutoff, prod, 0.0)
    kept = prod.sum()
    U = beamsplitter_unitary(cutoff, np.pi / 4)
    rho = (U * (prod / kept)) @ U.T
    return FockOperator(cutoff, 2, _herm(rho).astype(complex), tail_mass=1 - kept * (1 - t1) * (1 - t2))


def rho2E_rr(N: float, eta: float, cutoff: int):
    """``(analytic, gaussian_route)`` for the reverse-reconciliation two-copy state."""
    return rho2E_rr_analytic(N, eta, cutoff), rho2E_rr_gaussian(N, eta, cutoff)


def rho2E_rr_printed_trace(N: float, eta: float, lmax: int) -> float:
    """Partial trace sum of the displayed spectral decomposition over ``t + m <= lmax``.

    Uses the displayed prefactor ``1/((1-eta)^2 N' N'')`` and the displayed
    (unnormalized) vectors, whose squared norms are ``t! m!``.
    """
    n1, n2 = rr_mode_photons(N, eta)
    x1, x2 = n1 / (n1 + 1), n2 / (n2 + 1)
    pref = 1.0 / (n1 * n2)
    return float(sum(pref * x1 ** t * x2 ** (ell - t) * factorial(t) * factorial(ell - t)
                     for ell in range(lmax + 1) for t in range(ell + 1)))


# ---------------------------------------------------------------------------
# reverse reconciliation: conditional states

def conditional_rr(N: float, eta: float, beta: complex, cutoff: int, tail_bound: float = 1e-8):
    """Moments of Alice's and Eve's states after Bob projects onto ``|beta>``.

    The pure ABE state is built photon by photon: TMSV amplitudes on (A, A'),
    then ``|l>_{A'} -> sum_k sqrt(C(l,k)) eta^{k/2} (1-eta)^{(l-k)/2} |k>_B |l-k>_E``.
    """
    if N < 0 or not 0 <= eta <= 1:
        raise ValueError("need N >= 0 and eta in [0, 1]")
    x = N / (N + 1)
    tail = x ** cutoff
    if tail > tail_bound:
        raise TruncationError(f"TMSV tail {tail:.2e} exceeds {tail_bound:.0e} at cutoff {cutoff}")
    ell = np.arange(cutoff)
    c = np.sqrt((1 - x) * x ** ell)
    bra_beta = coherent_amplitudes(beta, cutoff)[0][0].conj()  # <beta|k>
    psi = np.zeros((cutoff, cutoff), dtype=complex)  # [A photons, E photons]
    for l in range(cutoff):
        for k in range(l + 1):
            amp = np.sqrt(comb(l, k)) * np.sqrt(eta) ** k * np.sqrt(1 - eta) ** (l - k)
            psi[l, l - k] += c[l] * amp * bra_beta[k]
    weight = float(np.sum(np.abs(psi) ** 2))
    psi /= np.sqrt(weight)
    rho_a = FockOperator(cutoff, 1, _herm(psi @ psi.conj().T))
    rho_e = FockOperator(cutoff, 1, _herm(psi.T @ psi.conj()))
    ma, va = quadrature_moments(rho_a)
    me, ve = quadrature_moments(rho_e)
    return {
        "alice_mean": ma, "alice_cov": va,
        "eve_mean": me, "eve_cov": ve,
        "weight": weight, "tail_mass": tail,
    }


def eve_mean_convention(N: float, eta: float, beta: complex, cutoff: int) -> dict:
    """Ratio of Eve's numerical conditional ``q`` mean to ``N sqrt(eta(1-eta))/(1+eta N) Re(beta)``.

    The quadrature convention here predicts ``sqrt(2)``; the displayed mean
    formula carries ``1/sqrt(2)``.
    """
    out = conditional_rr(N, eta, beta, cutoff)
    gain = N * np.sqrt(eta * (1 - eta)) / (1 + eta * N)
    z = complex(beta)
    comps = [(out["eve_mean"][0], z.real), (out["eve_mean"][1], z.imag)]
    ratios = [m / (gain * b) for m, b in comps if abs(b) > 1e-12]
    return {
        "factor": float(np.mean(ratios)),
        "adopted": float(np.sqrt(2)),
        "printed": float(1 / np.sqrt(2)),
    }


def thermal_pair_degeneracy(Nbar: float, cutoff: int, lmax: int) -> list[int]:
    """Multiplicities of the top ``lmax + 1`` eigenvalues of ``thermal (x) thermal``."""
    th = thermal(Nbar, cutoff, tail_bound=1.0)
    pair = np.kron(np.diag(th.matrix).real, np.diag(th.matrix).real)
    groups = degeneracies(np.diag(pair))
    return [k for _, k in groups[:lmax + 1]]


def thermal_entropy_check(Nbar: float, cutoff: int) -> tuple[float, float]:
    return entropy_fock(thermal(Nbar, cutoff)), float(g(Nbar))
