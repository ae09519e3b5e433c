import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cvlock import locking as L
from cvlock.rates import g


def test_spectrum_validation():
    with pytest.raises(ValueError):
        L.Spectrum(np.array([0.3, 0.5]), np.array([1, 1]))
    with pytest.raises(ValueError):
        L.Spectrum(np.array([0.6, 0.5]), np.array([1, 1]))
    with pytest.raises(ValueError):
        L.Spectrum(np.array([0.5]), np.array([0]))


def test_thermal_spectra_entropy():
    s = L.Spectrum.thermal(0.5, support_cut=1e-12)
    assert np.isclose(s.entropy, g(0.5), atol=1e-9)
    pair = L.Spectrum.thermal_pair(0.5, support_cut=1e-12)
    assert np.isclose(pair.entropy, 2 * g(0.5), atol=1e-9)
    assert list(pair.d[:4]) == [1, 2, 3, 4]


def test_uniform_typical_set_is_whole_space():
    ts = L.typical_types(L.Spectrum.uniform(4), 6, 1.0)
    assert np.isclose(ts.log_dim, 12.0)
    assert np.isclose(ts.probability, 1.0)


def test_typical_set_limits():
    with pytest.raises(ValueError):
        L.typical_types(L.Spectrum.uniform(2), 15, 0.1)
    with pytest.raises(L.EmptyTypicalSetError):
        L.typical_types(L.Spectrum.thermal(2.0), 8, 0.01)


def test_windows_hold_with_sum_constant():
    rep = L.check_windows(L.Spectrum.thermal(0.5), 10, 0.1)
    assert rep.dim_ok and rep.weights_ok
    assert np.isclose(rep.entropy, g(0.5), atol=1e-4)


def test_max_constant_misses_weight_window():
    rep = L.check_windows(L.Spectrum.thermal(0.5), 10, 0.1, kind="max")
    assert rep.dim_ok
    assert not rep.weights_ok
    assert rep.weight_range[1] > rep.weight_window[1]


def test_equipartition_bounds_ordered():
    spec = L.Spectrum.thermal(0.5)
    ts = L.typical_types(spec, 8, 0.15)
    lo, hi = L.equipartition_bounds(spec, ts)
    assert 0 < lo <= hi <= 1


def test_moments_from_ensemble():
    d = 3
    states = np.broadcast_to(np.eye(d) / d, (5, d, d))
    m = L.moments_from_ensemble(states, np.array([1.0, 0, 0]))
    assert np.isclose(m.mu, 1 / 3)
    assert np.isclose(m.gamma, 1.0)
    with pytest.raises(ValueError):
        L.moments_from_ensemble(states, np.array([1.0, 1.0, 0]))


def test_locking_budget_validation():
    L.LockingBudget(M=4, K=2, epsilon=0.1, n=1)
    with pytest.raises(ValueError):
        L.LockingBudget(M=0, K=2, epsilon=0.1, n=1)
    with pytest.raises(ValueError):
        L.LockingBudget(M=4, K=2, epsilon=1.0, n=1)


def test_finite_K_frozen():
    fk = L.finite_K(20, 0.1, 10, 30)
    assert np.isclose(fk.log2_K, 24.169038757361808, rtol=1e-12)
    assert np.isclose(fk.log2_branch_dimension, 22.49321403949345, rtol=1e-12)
    assert fk.K_min == 18862778
    assert fk.branch == "moments"


def test_finite_K_direct_formula_small_values():
    M, eps, gam, dn = 2 ** 6, 0.2, 2.0 ** 3, 2.0 ** 12
    b1 = 2 * gam * (math.log(M) / eps ** 2 + 2 * math.log(5 / eps) / eps ** 3)
    b2 = dn / M * 4 * math.log(2) * math.log(dn) / eps ** 2
    fk = L.finite_K(6, eps, 3, 12)
    assert np.isclose(2 ** fk.log2_K, max(b1, b2), rtol=1e-12)


def test_finite_K_stays_finite_for_huge_exponents():
    fk = L.finite_K(5e4, 0.1, 1e4, 6e4)
    assert math.isfinite(fk.log2_K)
    assert fk.K_min is None
    with pytest.raises(ValueError):
        L.finite_K(1, 0.0, 1, 1)


def test_accessible_bound_limits():
    M, K, d = 4, 2, 4
    E = np.zeros((M, K, d, d))
    for x in range(M):
        E[x, :, x, x] = 1
    assert np.isclose(L.accessible_bound(E, M, K, d).bound_bits, 2.0, atol=1e-9)
    mixed = np.broadcast_to(np.eye(d) / d, (M, K, d, d)).copy()
    assert abs(L.accessible_bound(mixed, M, K, d).bound_bits) < 1e-9
    with pytest.raises(ValueError):
        L.accessible_bound(mixed, M, K, d + 1)


def test_accessible_bound_is_seeded():
    rng = np.random.default_rng(5)
    X = rng.standard_normal((3, 2, 3, 3)) + 1j * rng.standard_normal((3, 2, 3, 3))
    E = np.einsum("xkij,xklj->xkil", X, X.conj())
    E /= np.trace(E, axis1=2, axis2=3)[..., None, None]
    a = L.accessible_bound(E, 3, 2, 3, seed=1)
    b = L.accessible_bound(E, 3, 2, 3, seed=1)
    assert a.bound_bits == b.bound_bits
    assert a.heuristic


def test_classical_distance_and_pinsker():
    p = np.outer([0.3, 0.7], [0.5, 0.5])
    assert L.classical_trace_distance(p) == pytest.approx(0.0, abs=1e-15)
    corr = np.array([[0.5, 0.0], [0.0, 0.5]])
    assert L.classical_trace_distance(corr) == pytest.approx(1.0)
    assert L.pinsker_bound(1.0) == pytest.approx(math.sqrt(2 * math.log(2)))
    with pytest.raises(ValueError):
        L.classical_trace_distance(np.array([[0.5, 0.6]]))


def test_fluctuation_check_holds():
    for delta in (0.1, 0.15, 0.2):
        rep = L.fluctuation_check(2.0, 0.5, 8, delta)
        assert rep.ok
        assert np.isclose(rep.beta, math.log2(1 + 1 / (2 * 1.0)))


@settings(max_examples=25, deadline=None)
@given(N=st.floats(0.1, 1.0), n=st.integers(2, 6), delta=st.floats(0.1, 0.3))
def test_typical_set_properties(N, n, delta):
    spec = L.Spectrum.thermal(N)
    try:
        ts = L.typical_types(spec, n, delta)
    except L.EmptyTypicalSetError:
        return
    assert 0 < ts.probability <= 1 + 1e-12
    assert ts.log_dim <= n * math.log2(spec.d.sum()) + 1e-9
    lo, hi = L.equipartition_bounds(spec, ts)
    assert lo <= hi


@settings(max_examples=30, deadline=None)
@given(a=st.floats(0.0, 60.0), b=st.floats(0.0, 60.0), eps=st.floats(0.01, 0.9))
def test_finite_K_monotone_in_gamma(a, b, eps):
    lo, hi = sorted([a, b])
    assert L.finite_K(10, eps, lo, 20).log2_K <= L.finite_K(10, eps, hi, 20).log2_K
