import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cvlock import gaussian as gs
from cvlock.rates import g, rr_rates


def test_vacuum_and_thermal_covariances():
    assert np.allclose(gs.vacuum(2).cov, 0.5 * np.eye(4))
    assert np.allclose(gs.thermal_state(3.0).cov, 3.5 * np.eye(2))
    assert gs.entropy(gs.vacuum(1)) == 0.0


def test_coherent_state_mean_convention():
    st_ = gs.coherent_state(1.0 + 2.0j)
    assert np.allclose(st_.mean, np.sqrt(2) * np.array([1.0, 2.0]))
    assert np.allclose(st_.cov, 0.5 * np.eye(2))
    # <n> = (Vq + Vp - 1)/2 + |mean|^2/2 = |beta|^2
    n = 0.5 * (np.trace(st_.cov) - 1) + 0.5 * st_.mean @ st_.mean
    assert np.isclose(n, 5.0)


def test_thermal_entropy_matches_g():
    assert np.isclose(gs.entropy(gs.thermal_state(3.0)), 4 * 2 - 3 * np.log2(3))


def test_tmsv_is_pure_with_thermal_marginals():
    s = gs.tmsv(2.0)
    assert np.isclose(gs.entropy(s), 0.0, atol=1e-9)
    assert np.allclose(gs.partial_trace(s, [0]).cov, 2.5 * np.eye(2))


def test_rejects_unphysical_and_asymmetric():
    with pytest.raises(ValueError):
        gs.GaussianState(np.zeros(2), 0.3 * np.eye(2))
    with pytest.raises(ValueError):
        gs.GaussianState(np.zeros(2), np.array([[1.0, 0.2], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        gs.GaussianState(np.zeros(3), np.eye(2))


def test_states_are_immutable():
    s = gs.thermal_state(1.0)
    with pytest.raises(ValueError):
        s.cov[0, 0] = 7.0


def test_large_photon_number_tmsv_constructs():
    s = gs.tmsv(1e4)
    nu = gs.symplectic_eigenvalues(s.cov)
    assert np.allclose(nu, 0.5, atol=1e-6)


def test_build_abe_matches_printed():
    for eta, N in [(0.6, 2.0), (0.1, 50.0), (0.9, 0.3)]:
        assert np.allclose(gs.build_abe(eta, N).cov, gs.printed_v_abe(eta, N), atol=1e-12, rtol=0)


def test_build_active_matches_printed_with_sqrt_eta():
    eta, N, NT = 0.6, 2.0, 0.2
    built = gs.build_active(eta, N, NT).cov
    assert np.allclose(built, gs.printed_v_abee(eta, N, NT), atol=1e-12, rtol=0)
    literal = gs.printed_v_abee(eta, N, NT, literal=True)
    assert not np.allclose(literal, literal.T)


def test_active_reduces_to_passive_without_noise():
    full = gs.build_active(0.4, 1.5, 0.0)
    assert np.allclose(gs.partial_trace(full, [0, 1, 2]).cov, gs.build_abe(0.4, 1.5).cov)


def test_beamsplitter_is_symplectic_and_limits():
    S = gs.beamsplitter_matrix(3, 0, 2, 0.3)
    Om = gs._omega(3)
    assert np.allclose(S @ Om @ S.T, Om)
    s = gs.tensor(gs.thermal_state(2.0), gs.vacuum(1))
    assert np.allclose(gs.beamsplitter(s, 0, 1, 1.0).cov, s.cov)
    swapped = gs.beamsplitter(s, 0, 1, 0.0)
    assert np.allclose(swapped.block(1), 2.5 * np.eye(2))


def test_two_copy_average_matches_printed_v2e():
    for eta, N in [(0.5, 1.0), (0.6, 2.0), (0.2, 10.0)]:
        be = gs.partial_trace(gs.build_abe(eta, N), [1, 2])
        avg = gs.two_copy_average(be, [0])
        assert np.allclose(avg.cov, gs.printed_v_2e(eta, N), atol=1e-12)


def test_v2e_symplectic_spectrum():
    aux = rr_rates(0.5, 1.0).aux
    nu = gs.symplectic_eigenvalues(gs.printed_v_2e(0.5, 1.0))
    assert np.allclose(nu, [0.5 * aux["N_prime"] + 0.5, 0.5 * aux["N_second"] + 0.5])
    assert np.allclose(nu, [5 / 6, 7 / 6])


def test_conditional_covariance_grid():
    for eta in (0.2, 0.5, 0.8):
        for N in (0.5, 2.0, 10.0):
            ab = gs.partial_trace(gs.build_abe(eta, N), [0, 1])
            cond, w = gs.condition_on_coherent(ab, [1], 0.4 + 0.1j)
            target = (1 - eta) * N / (1 + eta * N) + 0.5
            assert np.allclose(cond.cov, target * np.eye(2), atol=1e-12, rtol=0)
            assert w > 0


def test_alice_and_eve_share_conditional_covariance():
    abe = gs.build_abe(0.5, 1.0)
    ca, _ = gs.condition_on_coherent(gs.partial_trace(abe, [0, 1]), [1], 1.0)
    ce, _ = gs.condition_on_coherent(gs.partial_trace(abe, [1, 2]), [0], 1.0)
    assert np.allclose(ca.cov, ce.cov)
    assert np.allclose(ca.cov, (1 / 3 + 0.5) * np.eye(2))


def test_eve_conditional_mean_factor():
    eta, N, beta = 0.5, 1.0, 0.7 - 0.2j
    ce, _ = gs.condition_on_coherent(gs.partial_trace(gs.build_abe(eta, N), [1, 2]), [0], beta)
    gain = N * np.sqrt(eta * (1 - eta)) / (1 + eta * N)
    assert np.allclose(ce.mean, np.sqrt(2) * gain * np.array([beta.real, beta.imag]))


def test_heterodyne_weight_is_q_function():
    # thermal: Q(beta) = exp(-|beta|^2/(N+1))/(N+1) with respect to d^2 beta/pi
    N, beta = 1.5, 0.3 + 0.8j
    _, w = gs.condition_on_coherent(gs.thermal_state(N), [0], beta)
    assert np.isclose(w, np.exp(-abs(beta) ** 2 / (N + 1)) / (N + 1))


def test_two_copy_rejects_nonzero_mean():
    s = gs.tensor(gs.coherent_state(1.0), gs.vacuum(1))
    with pytest.raises(ValueError):
        gs.two_copy_average(s, [0])


@settings(max_examples=40, deadline=None)
@given(eta=st.floats(0.01, 0.99), N=st.floats(0.01, 50.0))
def test_abe_is_pure_and_eve_thermal(eta, N):
    abe = gs.build_abe(eta, N)
    assert abs(gs.entropy(abe)) < 1e-6
    assert np.isclose(gs.entropy(gs.partial_trace(abe, [2])), g((1 - eta) * N), rtol=1e-8, atol=1e-9)
    assert np.isclose(gs.entropy(gs.partial_trace(abe, [1])), g(eta * N), rtol=1e-8, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(N=st.floats(0.0, 100.0))
def test_symplectic_eigenvalues_of_thermal(N):
    assert np.allclose(gs.symplectic_eigenvalues(gs.thermal_state(N).cov), N + 0.5)
