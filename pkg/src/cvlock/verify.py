"""Verification suites that compare closed forms against independent numerics.

Each check yields a record ``{check_id, params, analytic, numeric, abs_err, pass}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import chernoff, fock, gaussian as gs, locking, rates

SUITES = ("gaussian", "fock", "typicality", "chernoff")


@dataclass(frozen=True)
class Check:
    check_id: str
    params: dict
    analytic: float | None
    numeric: float | None
    abs_err: float | None
    passed: bool

    def record(self) -> dict:
        return {
            "check_id": self.check_id,
            "params": self.params,
            "analytic": self.analytic,
            "numeric": self.numeric,
            "abs_err": self.abs_err,
            "pass": self.passed,
        }


def _cmp(check_id, params, analytic, numeric, tol) -> Check:
    err = abs(float(analytic) - float(numeric))
    return Check(check_id, params, float(analytic), float(numeric), err, err <= tol)


def _mat(check_id, params, A, B, tol) -> Check:
    err = float(np.max(np.abs(np.asarray(A) - np.asarray(B))))
    return Check(check_id, params, None, None, err, err <= tol)


def _bound(check_id, params, limit, value, ok) -> Check:
    return Check(check_id, params, float(limit), float(value), None, bool(ok))


# ---------------------------------------------------------------------------

def gaussian_suite() -> list[Check]:
    out = []
    eta, N, NT = 0.6, 2.0, 0.2
    p = {"eta": eta, "N": N, "N_T": NT}
    out.append(_mat("gaussian.v_abe", p, gs.build_abe(eta, N).cov, gs.printed_v_abe(eta, N), 1e-12))
    out.append(_mat("gaussian.v_abee", p, gs.build_active(eta, N, NT).cov, gs.printed_v_abee(eta, N, NT), 1e-12))
    be = gs.partial_trace(gs.build_abe(eta, N), [1, 2])
    out.append(_mat("gaussian.v_2e", p, gs.two_copy_average(be, [0]).cov, gs.printed_v_2e(eta, N), 1e-12))
    for e in (0.2, 0.5, 0.8):
        for n_ in (0.5, 2.0, 10.0):
            ab = gs.partial_trace(gs.build_abe(e, n_), [0, 1])
            cond, _ = gs.condition_on_coherent(ab, [1], 0.3 - 0.2j)
            target = ((1 - e) * n_ / (1 + e * n_) + 0.5) * np.eye(2)
            out.append(_mat("gaussian.conditional_cov", {"eta": e, "N": n_}, cond.cov, target, 1e-12))
    Np, Npp = rates.rr_rates(0.5, 1.0).aux.values()
    nu = gs.symplectic_eigenvalues(gs.printed_v_2e(0.5, 1.0))
    out.append(_mat("gaussian.v_2e_symplectic", {"eta": 0.5, "N": 1.0}, nu,
                    sorted([0.5 * Np + 0.5, 0.5 * Npp + 0.5]), 1e-12))
    for (e, n_, nt) in [(0.5, 1e4, 0.1), (0.3, 1e5, 0.2)]:
        exact = rates.active_rates_exact(e, n_, nt)
        approx = rates.active_rates(e, n_, nt)
        out.append(_cmp("gaussian.active_chi", {"eta": e, "N": n_, "N_T": nt}, approx.chi, exact.chi, 1e-6))
    return out


def fock_suite(seed: int = 0, samples: int = 100_000) -> list[Check]:
    out = []
    out.append(_cmp("fock.thermal_entropy", {"Nbar": 0.5, "cutoff": 60}, rates.g(0.5),
                    fock.entropy_fock(fock.thermal(0.5, 60)), 1e-8))
    for N, eta in [(0.5, 0.4), (1.0, 0.5)]:
        p = {"N": N, "eta": eta, "cutoff": 40, "seed": seed, "samples": samples}
        m = (1 - eta) * N
        an, mc = fock.rho2E_dr(N, eta, 40, samples, seed)
        out.append(_cmp("fock.dr_entropy", p, rates.g(2 * m), fock.entropy_fock(an), 1e-5))
        td = fock.trace_distance(an, mc)
        out.append(_bound("fock.dr_mc_trace_distance", p, 1e-3, td, td <= 1e-3))
        rho_ee = fock.tensor(fock.thermal(m, 40), fock.thermal(m, 40))
        c = fock.commutator_norm(an, rho_ee)
        out.append(_bound("fock.dr_commutator", p, 1e-10, c, c <= 1e-10))
        a_rr, g_rr = fock.rho2E_rr(N, eta, 40)
        td = fock.trace_distance(a_rr, g_rr)
        out.append(_bound("fock.rr_gaussian_route", p, 1e-6, td, td <= 1e-6))
        n1, n2 = fock.rr_mode_photons(N, eta)
        out.append(_cmp("fock.rr_entropy", p, rates.g(n1) + rates.g(n2), fock.entropy_fock(g_rr), 1e-5))
        c = max(fock.commutator_norm(a_rr, rho_ee), fock.commutator_norm(g_rr, rho_ee))
        out.append(_bound("fock.rr_commutator", p, 1e-10, c, c <= 1e-10))
        # the displayed weights put N' on the symmetric mode; that is the
        # Gaussian route with the two thermal inputs exchanged
        printed = fock.rho2E_rr_analytic(N, eta, 40, symmetric_mode="N_prime")
        td_printed = fock.trace_distance(printed, g_rr)
        td_fix = fock.trace_distance(printed, fock.rho2E_rr_gaussian(N, eta, 40, exchange=True))
        out.append(Check("fock.rr_printed_assignment", {**p, "trace_distance_as_printed": td_printed},
                         None, td_fix, td_fix, td_fix <= 1e-6))
    degs = fock.thermal_pair_degeneracy(0.5, 40, 20)
    bad = max(abs(k - (ell + 1)) for ell, k in enumerate(degs))
    out.append(Check("fock.degeneracy", {"Nbar": 0.5, "lmax": 20}, None, None, float(bad), bad == 0))
    labels, G = fock.psi_tm_gram(6)
    norms = np.array([math.factorial(t) * math.factorial(m) for t, m in labels], dtype=float)
    off = float(np.max(np.abs(G - np.diag(np.diag(G)))))
    out.append(Check("fock.psi_tm_gram", {"lmax": 6, "max_offdiag": off,
                                          "max_dev_from_identity": float(np.max(np.abs(G - np.eye(len(G)))))},
                     None, None, float(np.max(np.abs(G - np.diag(norms)))),
                     bool(np.allclose(G, np.diag(norms), atol=1e-9))))
    Gn = G / np.sqrt(np.outer(norms, norms))
    out.append(_mat("fock.psi_tm_gram_normalized", {"lmax": 6}, Gn, np.eye(len(G)), 1e-9))
    for N, eta, beta in [(1.0, 0.5, 1.0), (0.5, 0.4, 0.5 + 0.3j), (1.5, 0.3, -0.4 + 0.8j)]:
        p = {"N": N, "eta": eta, "beta": [beta.real, beta.imag] if isinstance(beta, complex) else [beta, 0.0]}
        num = fock.conditional_rr(N, eta, beta, 40)
        abe = gs.build_abe(eta, N)
        ca, _ = gs.condition_on_coherent(gs.partial_trace(abe, [0, 1]), [1], beta)
        ce, _ = gs.condition_on_coherent(gs.partial_trace(abe, [1, 2]), [0], beta)
        out.append(_mat("fock.conditional_alice_cov", p, num["alice_cov"], ca.cov, 1e-5))
        out.append(_mat("fock.conditional_alice_mean", p, num["alice_mean"], ca.mean, 1e-5))
        out.append(_mat("fock.conditional_eve_cov", p, num["eve_cov"], ce.cov, 1e-5))
        out.append(_mat("fock.conditional_eve_mean", p, num["eve_mean"], ce.mean, 1e-5))
    conv = fock.eve_mean_convention(1.0, 0.5, 0.7 + 0.3j, 40)
    out.append(_cmp("fock.eve_mean_factor", {"N": 1.0, "eta": 0.5, "printed": conv["printed"]},
                    conv["adopted"], conv["factor"], 1e-6))
    return out


def typicality_suite(delta: float = 0.1, n: int = 10) -> list[Check]:
    out = []
    spec = locking.Spectrum.thermal(0.5)
    p = {"Nbar": 0.5, "n": n, "delta": delta}
    try:
        rep = locking.check_windows(spec, n, delta)
    except locking.EmptyTypicalSetError as exc:
        return [Check("typicality.empty", {**p, "reason": str(exc)}, None, None, None, False)]
    out.append(Check("typicality.log_dim_window", {**p, "c": rep.c, "window": list(rep.dim_window)},
                     None, rep.log_dim, None, rep.dim_ok))
    out.append(Check("typicality.weight_window", {**p, "c": rep.c, "window": list(rep.weight_window)},
                     None, None, None, rep.weights_ok))
    try:
        fl = locking.fluctuation_check(2.0, 0.5, 8, 0.15)
    except locking.EmptyTypicalSetError as exc:
        return out + [Check("typicality.empty", {"N": 2.0, "eta": 0.5, "n": 8, "delta": 0.15, "reason": str(exc)},
                            None, None, None, False)]
    out.append(_bound("typicality.fluctuation", {"N": 2.0, "eta": 0.5, "n": 8, "delta": 0.15, "c": fl.c},
                      fl.bound, fl.max_beta_dl, fl.ok))
    return out


def chernoff_suite(seeds, n: int = 1, N: float = 1.0, eta: float = 0.5, M: int = 10_000,
                   epsilon: float = 0.3) -> list[Check]:
    seeds = list(seeds)
    s = chernoff.run_trials(seeds, n, N, eta, M, epsilon)
    p = {"n": n, "N": N, "eta": eta, "M": M, "epsilon": epsilon, "seeds": [seeds[0], seeds[-1]]}
    out = [_bound("chernoff.violation_frequency", {**p, "p_value": s.p_value}, s.bound, s.frequency,
                  s.p_value >= 0.01)]
    frac = float(np.mean(np.array(s.gamma0) <= 2 * epsilon ** 2))
    out.append(_bound("chernoff.gamma0_mass", {**p, "limit": 2 * epsilon ** 2, "max_gamma0": max(s.gamma0)},
                      0.95, frac, frac >= 0.95))
    lo = (1 - epsilon) / (1 + epsilon)
    worst = 1 - max(s.gamma0)
    out.append(_bound("chernoff.completeness", p, lo, worst, worst >= lo - 0.01))
    return out


def run_suite(name: str, seeds=(0,), **kw) -> list[dict]:
    if name == "gaussian":
        checks = gaussian_suite()
    elif name == "fock":
        checks = fock_suite(seed=list(seeds)[0], **kw)
    elif name == "typicality":
        checks = typicality_suite(**kw)
    elif name == "chernoff":
        checks = chernoff_suite(seeds, **kw)
    else:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return [c.record() for c in checks]


def round_sig(obj, digits: int = 12):
    """Recursively round floats to ``digits`` significant digits for stable serialization."""
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, (np.floating,)):
        return round_sig(float(obj), digits)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {k: round_sig(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_sig(v, digits) for v in obj]
    return obj
