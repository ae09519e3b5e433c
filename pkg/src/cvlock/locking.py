"""Security calculus for quantum data locking.

Degenerate-spectrum typicality, type-class equipartition bounds, the first
and second moments of an ensemble along a test vector, the finite-key
requirement on the number of keys, a heuristic evaluation of the
accessible-information bound and a few classical distance utilities.

Logs are base 2 except where ``ln`` is written explicitly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import gammaln, logsumexp

LN2 = math.log(2.0)


class EmptyTypicalSetError(ValueError):
    """No type satisfies the typicality constraints."""


# ---------------------------------------------------------------------------
# spectra and typicality

@dataclass(frozen=True)
class Spectrum:
    """Distinct eigenvalues ``p`` (strictly decreasing) with degeneracies ``d``."""

    p: np.ndarray
    d: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        d = np.asarray(self.d, dtype=int)
        if p.ndim != 1 or p.shape != d.shape or p.size == 0:
            raise ValueError("p and d must be equal-length non-empty vectors")
        if np.any(p <= 0) or np.any(d < 1):
            raise ValueError("eigenvalues must be positive and degeneracies >= 1")
        if np.any(np.diff(p) >= 0):
            raise ValueError("eigenvalues must be strictly decreasing")
        total = float(np.sum(p * d))
        if total > 1 + 1e-9:
            raise ValueError(f"event probabilities sum to {total} > 1")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "d", d)

    @property
    def pi(self) -> np.ndarray:
        """Event probabilities ``p_l * d_l``."""
        return self.p * self.d

    @property
    def entropy(self) -> float:
        """Von Neumann entropy of the (truncated) operator."""
        return float(-np.sum(self.pi * np.log2(self.p)))

    @property
    def mean_label(self) -> float:
        return float(np.sum(self.pi * np.arange(self.p.size)))

    @classmethod
    def uniform(cls, dim: int) -> "Spectrum":
        return cls(np.array([1.0 / dim]), np.array([dim]))

    @classmethod
    def thermal(cls, Nbar: float, support_cut: float = 1e-6) -> "Spectrum":
        """Geometric spectrum of a thermal state, truncated once the tail drops below ``support_cut``."""
        if Nbar <= 0:
            return cls(np.array([1.0]), np.array([1]))
        x = Nbar / (Nbar + 1)
        L = max(1, math.ceil(math.log(support_cut) / math.log(x)))
        ell = np.arange(L)
        return cls(x ** ell / (Nbar + 1), np.ones(L, dtype=int), tail_mass=x ** L)

    @classmethod
    def thermal_pair(cls, Nbar: float, support_cut: float = 1e-6) -> "Spectrum":
        """Spectrum of ``thermal (x) thermal``: ``x^l/(N+1)^2`` with degeneracy ``l + 1``."""
        if Nbar <= 0:
            return cls(np.array([1.0]), np.array([1]))
        x = Nbar / (Nbar + 1)
        ell = np.arange(4096)
        tail = (ell + 2) * x ** (ell + 1) - (ell + 1) * x ** (ell + 2)  # P(label > l)
        L = int(np.argmax(tail < support_cut)) + 1
        ell = ell[:L]
        return cls(x ** ell / (Nbar + 1) ** 2, ell + 1, tail_mass=float(tail[L - 1]))


def typicality_constant(spectrum: Spectrum, kind: str = "sum") -> float:
    """The constant ``c`` of the equipartition windows.

    ``"max"`` is ``max_l |log pi_l|`` over the support; ``"sum"`` is
    ``sum_l |log p_l|``, which provably bounds the per-letter deviation
    ``|sum_l (f_l - pi_l) log p_l| <= delta * c`` for any strongly typical ``f``.
    """
    if kind == "max":
        return float(np.max(np.abs(np.log2(spectrum.pi))))
    if kind == "sum":
        return float(np.sum(np.abs(np.log2(spectrum.p))))
    raise ValueError("kind must be 'max' or 'sum'")


@dataclass(frozen=True)
class TypeClass:
    counts: tuple[int, ...]
    log_weight: float  # log2 of the per-sequence eigenvalue
    log_multiplicity: float  # log2 of multinomial * prod d^count

    @property
    def n(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class TypicalSet:
    n: int
    delta: float
    classes: list[TypeClass]
    log_dim: float
    probability: float  # total mass of the typical projector

    def __len__(self):
        return len(self.classes)


def _count_ranges(pi, n, delta):
    lo = np.maximum(0, np.ceil(n * (pi - delta) - 1e-9)).astype(int)
    hi = np.minimum(n, np.floor(n * (pi + delta) + 1e-9)).astype(int)
    hi = np.where(pi == 0, 0, hi)
    return lo, hi


def typical_types(spectrum: Spectrum, n: int, delta: float, max_n: int = 14) -> TypicalSet:
    """Enumerate all strongly delta-typical types of length ``n``.

    A type (count vector) is typical when ``|count_l / n - pi_l| <= delta``
    for every label. Labels beyond the truncated support are excluded.
    """
    if n < 1 or n > max_n:
        raise ValueError(f"n must lie in [1, {max_n}] for exhaustive enumeration, got {n}")
    if delta < 0:
        raise ValueError("delta must be non-negative")
    pi = spectrum.pi
    lo, hi = _count_ranges(pi, n, delta)
    L = pi.size
    # suffix sums bound what the remaining labels can absorb
    lo_suf = np.concatenate([np.cumsum(lo[::-1])[::-1], [0]])
    hi_suf = np.concatenate([np.cumsum(hi[::-1])[::-1], [0]])
    logp = np.log2(spectrum.p)
    logd = np.log2(spectrum.d)
    lgam = gammaln(np.arange(n + 1) + 1) / LN2

    classes: list[TypeClass] = []
    counts = [0] * L

    def rec(i, remaining):
        if i == L:
            if remaining == 0:
                c = np.array(counts)
                lw = float(np.dot(c, logp))
                lm = float(lgam[n] - lgam[c].sum() + np.dot(c, logd))
                classes.append(TypeClass(tuple(counts), lw, lm))
            return
        a = max(lo[i], remaining - hi_suf[i + 1])
        b = min(hi[i], remaining - lo_suf[i + 1])
        for k in range(a, b + 1):
            counts[i] = k
            rec(i + 1, remaining - k)
        counts[i] = 0

    rec(0, n)
    if not classes:
        raise EmptyTypicalSetError(f"no strongly {delta}-typical type of length {n}")
    lm = np.array([c.log_multiplicity for c in classes])
    lw = np.array([c.log_weight for c in classes])
    log_dim = float(logsumexp(lm * LN2) / LN2)
    prob = float(np.exp2(lm + lw).sum())
    return TypicalSet(n, delta, classes, log_dim, prob)


def equipartition_bounds(spectrum: Spectrum, typical: TypicalSet) -> tuple[float, float]:
    """Smallest and largest per-sequence eigenvalue over the typical classes."""
    if not typical.classes:
        raise EmptyTypicalSetError("empty typical set")
    lw = np.array([c.log_weight for c in typical.classes])
    return float(np.exp2(lw.min())), float(np.exp2(lw.max()))


@dataclass(frozen=True)
class WindowReport:
    c: float
    entropy: float
    log_dim: float
    dim_window: tuple[float, float]
    weight_window: tuple[float, float]  # bounds on -log2(w)/n
    weight_range: tuple[float, float]  # observed -log2(w)/n
    dim_ok: bool
    weights_ok: bool


def check_windows(spectrum: Spectrum, n: int, delta: float, kind: str = "sum") -> WindowReport:
    """Check ``log_dim`` and every per-sequence weight against ``n(S +- c delta)``."""
    ts = typical_types(spectrum, n, delta)
    c = typicality_constant(spectrum, kind)
    S = spectrum.entropy
    lw = np.array([t.log_weight for t in ts.classes]) / -n
    lo, hi = S - c * delta, S + c * delta
    tol = 1e-12
    return WindowReport(
        c=c, entropy=S, log_dim=ts.log_dim,
        dim_window=(n * lo, n * hi),
        weight_window=(lo, hi),
        weight_range=(float(lw.min()), float(lw.max())),
        dim_ok=bool(n * lo - tol <= ts.log_dim <= n * hi + tol),
        weights_ok=bool(lw.min() >= lo - tol and lw.max() <= hi + tol),
    )


# ---------------------------------------------------------------------------
# moments and the finite-key condition

@dataclass(frozen=True)
class LockingMoments:
    mu: float
    Sigma: float

    @property
    def gamma(self) -> float:
        return self.Sigma / self.mu ** 2


@dataclass(frozen=True)
class LockingBudget:
    M: float
    K: float
    epsilon: float
    n: int

    def __post_init__(self):
        if self.M < 1 or self.K < 1:
            raise ValueError("M and K must be at least 1")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")


def moments_from_ensemble(states, phi) -> LockingMoments:
    """Empirical ``mu = E<phi|rho|phi>`` and ``Sigma = E<phi|rho|phi>^2``.

    Args:
        states: array of shape ``(T, d, d)`` of codeword density matrices,
            already sliced to a common ``d``-dimensional subspace.
        phi: unit vector of length ``d``.
    """
    states = np.asarray(states)
    phi = np.asarray(phi, dtype=complex)
    if states.ndim != 3 or states.shape[1:] != (phi.size, phi.size):
        raise ValueError("states must have shape (T, d, d) matching phi")
    if not math.isclose(np.vdot(phi, phi).real, 1.0, rel_tol=1e-9):
        raise ValueError("phi must be normalized")
    vals = np.einsum("i,tij,j->t", phi.conj(), states, phi).real
    mu = float(vals.mean())
    if mu <= 0:
        raise ValueError("phi has zero overlap with the ensemble")
    return LockingMoments(mu, float(np.mean(vals ** 2)))


@dataclass(frozen=True)
class FiniteKey:
    log2_K: float  # log2 of the larger branch; K_min is the next integer above 2^log2_K
    log2_branch_moments: float
    log2_branch_dimension: float
    K_min: int | None  # exact only while representable

    @property
    def branch(self) -> str:
        return "moments" if self.log2_branch_moments >= self.log2_branch_dimension else "dimension"


def finite_K(log2_M: float, epsilon: float, log2_gamma_n: float, log2_d_n: float) -> FiniteKey:
    """Smallest key count meeting the finite-size locking condition.

    Works with base-2 logs of ``M``, ``gamma^n`` and ``d^n`` so that values like
    ``2^(10^4)`` stay finite. The two branches are
    ``2 gamma^n (ln M / eps^2 + 2 ln(5/eps) / eps^3)`` and
    ``(d^n / M) 4 ln2 ln(d^n) / eps^2``.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if log2_M < 0 or log2_d_n <= 0:
        raise ValueError("need M >= 1 and d^n > 1")
    ln_M = log2_M * LN2
    inner = np.logaddexp(math.log(ln_M) - 2 * math.log(epsilon) if ln_M > 0 else -np.inf,
                         math.log(2 * math.log(5 / epsilon)) - 3 * math.log(epsilon))
    b1 = 1 + log2_gamma_n + inner / LN2
    b2 = log2_d_n - log2_M + math.log2(4 * LN2 * log2_d_n * LN2) - 2 * math.log2(epsilon)
    top = max(b1, b2)
    K_min = math.floor(2.0 ** top) + 1 if top < 1000 else None
    return FiniteKey(float(top), float(b1), float(b2), K_min)


# ---------------------------------------------------------------------------
# accessible-information bound

def eta_fn(t):
    """``-t log2 t`` with ``0 log 0 = 0``."""
    t = np.asarray(t, dtype=float)
    safe = np.where(t > 0, t, 1.0)
    return np.where(t > 0, -t * np.log2(safe), 0.0)


def _objective(A, phi):
    Q = np.einsum("i,xij,j->x", phi.conj(), A, phi).real
    Q = np.clip(Q, 0.0, None)
    return float(eta_fn(Q).sum() - eta_fn(Q.sum())), Q


@dataclass(frozen=True)
class AccessibleBound:
    """Heuristic evaluation of the accessible-information upper bound.

    The minimum over test vectors is approached from above, so ``bound_bits``
    can understate the true right-hand side. It is never a certified bound.
    """

    bound_bits: float
    phi_star: np.ndarray
    min_objective: float
    restarts: list[float] = field(default_factory=list)
    heuristic: bool = True


def accessible_bound(ensemble, M: int, K: int, d_n: int, optimizer_budget=(8, 200), seed: int = 0) -> AccessibleBound:
    """``log M - (d/M) min_phi {H[Q(phi)] - eta_fn(sum_x Q_x(phi))}`` by multi-start search.

    Args:
        ensemble: array ``(M, K, d, d)`` of sliced codeword states.
        M, K, d_n: declared sizes, checked against ``ensemble``.
        optimizer_budget: ``(restarts, iterations)`` for L-BFGS from random
            starts. Eigenvectors of the key-averaged codewords are always
            tried as extra starting points.
        seed: RNG seed for the random starts.
    """
    restarts, iters = optimizer_budget
    if restarts < 0 or iters <= 0 or (restarts == 0 and iters == 0):
        raise ValueError("optimizer budget must be positive")
    E = np.asarray(ensemble)
    if E.shape != (M, K, d_n, d_n):
        raise ValueError(f"ensemble shape {E.shape} does not match (M, K, d, d) = {(M, K, d_n, d_n)}")
    A = E.mean(axis=1)  # Q_x(phi) = <phi|A_x|phi>
    d = d_n

    def fun(v):
        u = v[:d] + 1j * v[d:]
        nrm = np.vdot(u, u).real
        phi = u / np.sqrt(nrm)
        F, Q = _objective(A, phi)
        s = Q.sum()
        w = np.log2(np.maximum(s, 1e-300) / np.maximum(Q, 1e-300))
        g = np.einsum("x,xij,j->i", w, A, phi) - F * phi  # d F / d conj(phi), projected
        g /= np.sqrt(nrm)
        return F, 2 * np.concatenate([g.real, g.imag])

    starts = []
    for x in range(M):
        _, vecs = np.linalg.eigh(0.5 * (A[x] + A[x].conj().T))
        starts.append(vecs[:, -1])
    rng = np.random.default_rng(np.uint64(seed))
    for _ in range(restarts):
        starts.append(rng.standard_normal(d) + 1j * rng.standard_normal(d))

    best_F, best_phi, values = np.inf, None, []
    for u in starts:
        v0 = np.concatenate([np.real(u), np.imag(u)])
        F0 = fun(v0)[0]
        res = minimize(fun, v0, jac=True, method="L-BFGS-B", options={"maxiter": iters})
        F, v = (res.fun, res.x) if res.fun <= F0 else (F0, v0)
        values.append(float(F))
        if F < best_F:
            best_F = F
            u = v[:d] + 1j * v[d:]
            best_phi = u / np.linalg.norm(u)
    bound = math.log2(M) - d / M * best_F
    return AccessibleBound(float(bound), best_phi, float(best_F), values)


# ---------------------------------------------------------------------------
# classical distances

def classical_trace_distance(p_joint) -> float:
    """``sum_{x,y} |p(x,y) - p(x) p(y)|``, without a factor 1/2."""
    P = np.asarray(p_joint, dtype=float)
    if P.ndim != 2 or np.any(P < 0):
        raise ValueError("p_joint must be a non-negative matrix")
    if abs(P.sum() - 1) > 1e-9:
        raise ValueError(f"p_joint sums to {P.sum()}, not 1")
    return float(np.abs(P - np.outer(P.sum(1), P.sum(0))).sum())


def pinsker_bound(I_acc_bits: float) -> float:
    """``sqrt(2 ln2 I_acc)`` bound on the distance from Pinsker's inequality."""
    if I_acc_bits < 0:
        raise ValueError("accessible information must be non-negative")
    return math.sqrt(2 * LN2 * I_acc_bits)


# ---------------------------------------------------------------------------
# photon-number fluctuations of typical types

@dataclass(frozen=True)
class FluctuationReport:
    c: float
    beta: float
    bound: float  # 2 c delta ((1-eta) N + 1)
    max_beta_dl: float
    max_prop_err: float  # max |beta dl - ((1-eta)N + 1) dS|
    n_types: int
    ok: bool


def fluctuation_check(N: float, eta: float, n: int, delta: float, kind: str = "sum",
                      support_cut: float = 1e-6) -> FluctuationReport:
    """Photon-number fluctuations of every typical type of ``(rho_E (x) rho_E)^n``.

    ``beta`` is the inverse temperature ``log2(1 + 1/(2m))`` of the two-copy
    state with ``2m = 2(1-eta)N`` photons. For each type the entropy shift
    ``dS`` and mean-label shift ``dl`` are computed exactly.
    """
    m = (1 - eta) * N
    spec = Spectrum.thermal_pair(m, support_cut)
    ts = typical_types(spec, n, delta)
    c = typicality_constant(spec, kind)
    beta = math.log2(1 + 1 / (2 * m))
    logpi = np.log2(spec.pi)
    ell = np.arange(spec.p.size)
    S0 = -np.dot(spec.pi, logpi) / spec.pi.sum()
    l0 = np.dot(spec.pi, ell) / spec.pi.sum()
    worst, prop = 0.0, 0.0
    for t in ts.classes:
        f = np.array(t.counts) / n
        dS = -np.dot(f, logpi) - S0
        dl = np.dot(f, ell) - l0
        worst = max(worst, abs(beta * dl))
        prop = max(prop, abs(beta * dl - (m + 1) * dS))
    bound = 2 * c * delta * (m + 1)
    return FluctuationReport(c, beta, bound, float(worst), float(prop), len(ts.classes), bool(worst <= bound))
