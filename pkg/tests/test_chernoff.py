import math

import numpy as np
import pytest

from cvlock import chernoff as C


def test_chernoff_tail_formula_and_clamp():
    p = C.ChernoffParams(D=4, T=1000, epsilon=0.3, a=0.1)
    assert np.isclose(C.chernoff_tail(p), 4 * math.exp(-1000 * 0.09 * 0.1 / (4 * math.log(2))))
    assert C.chernoff_tail(C.ChernoffParams(D=10, T=0, epsilon=0.5, a=0.5)) == 1.0


def test_chernoff_params_validation():
    for bad in [dict(D=0, T=1, epsilon=0.1, a=0.1), dict(D=1, T=-1, epsilon=0.1, a=0.1),
                dict(D=1, T=1, epsilon=0.0, a=0.1), dict(D=1, T=1, epsilon=0.1, a=1.5)]:
        with pytest.raises(ValueError):
            C.ChernoffParams(**bad)


def test_mass_window():
    w = C.mass_window(0.5, 0.01)
    assert w.mass >= 0.99
    assert w.dim == 5
    assert C.mass_window(0.5, 0.01).dim == w.dim


def test_typical_window_two_modes():
    w = C.typical_window(0.5, 2, 0.3)
    assert w.levels.shape[1] == 2
    assert w.dim >= 1
    assert np.all(w.probs > 0)


def test_povm_rejects_bad_inputs():
    with pytest.raises(ValueError):
        C.build_bob_povm(3, 1.0, 0.5, 100, 0.3)
    with pytest.raises(ValueError):
        C.build_bob_povm(1, 1.0, 0.5, 2, 0.3)  # M below the window dimension
    with pytest.raises(ValueError):
        C.build_bob_povm(1, 1.0, 0.5, 200_000, 0.3)


def test_povm_sandwich_and_completeness():
    rep = C.build_bob_povm(1, 1.0, 0.5, 10_000, 0.3, seed=4)
    assert rep.sandwich_ok
    assert not rep.undersampled
    assert np.isclose(rep.a, rep.window.probs.min())
    stats = C.decode_statistics(rep)
    assert np.isclose(stats.total, 1.0, atol=1e-9)
    assert stats.error_probability < 1 - (1 - 0.3) / (1 + 0.3) + 0.01
    assert np.isclose(stats.gamma0_mass, rep.gamma0_weight, atol=1e-9)


def test_povm_is_seed_deterministic():
    a = C.build_bob_povm(1, 1.0, 0.5, 500, 0.3, seed=9)
    b = C.build_bob_povm(1, 1.0, 0.5, 500, 0.3, seed=9)
    assert a.lam_min == b.lam_min and a.lam_max == b.lam_max


def test_small_codebook_violates_sandwich():
    rep = C.build_bob_povm(1, 1.0, 0.5, 20, 0.1, seed=0)
    assert not rep.sandwich_ok
    assert rep.chernoff() == 1.0


def test_two_mode_povm_runs():
    rep = C.build_bob_povm(2, 1.0, 0.5, 2000, 0.3, delta=0.3, seed=1)
    assert rep.window.levels.shape[1] == 2
    assert rep.lam_min <= 1 <= rep.lam_max + 1e-9 or rep.lam_min > 0


def test_trial_summary_counts():
    s = C.run_trials(range(5), M=10_000)
    assert len(s.lam_min) == 5
    assert s.violations == 0
    assert 0 <= s.frequency <= 1
    assert s.p_value == 1.0 or s.p_value > 0.01


def test_m_threshold_found():
    M = C.m_threshold([50, 5000], range(5))
    assert M == 5000
