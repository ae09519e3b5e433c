# %% [markdown]
# # Checking the Gaussian formulas in a truncated Fock space
#
# Eve's two-copy state is built three ways: from its closed-form spectral
# decomposition, by Monte Carlo over a random coherent-state codebook, and by
# pushing two thermal modes through a 50:50 beamsplitter.

# %%
import numpy as np

from cvlock import fock, gaussian as gs
from cvlock.rates import g

cutoff = 30
N, eta = 1.0, 0.5
m = (1 - eta) * N

# %% [markdown]
# Direct reconciliation: the analytic state has entropy g(2m) and commutes with
# thermal(m) x thermal(m). Monte Carlo error falls roughly as T^{-1/2}.

# %%
an = fock.rho2E_dr_analytic(N, eta, cutoff)
print("entropy", fock.entropy_fock(an), "vs g(2m)", g(2 * m))
pair = fock.tensor(fock.thermal(m, cutoff), fock.thermal(m, cutoff))
print("commutator norm", fock.commutator_norm(an, pair))
for T in (1_000, 10_000, 100_000):
    mc = fock.mc_two_copy(np.sqrt(1 - eta) * fock.sample_codebook(N, T, seed=0), cutoff)
    print(f"T={T:>6}  trace distance {fock.trace_distance(an, mc):.5f}")

# %% [markdown]
# Reverse reconciliation: the symmetric beamsplitter output mode must carry
# (1-eta)N'' photons. Putting (1-eta)N' there instead gives a different state,
# the one obtained by exchanging the two thermal inputs.

# %%
n1, n2 = fock.rr_mode_photons(N, eta)
good = fock.rho2E_rr_analytic(N, eta, cutoff)
swapped = fock.rho2E_rr_analytic(N, eta, cutoff, symmetric_mode="N_prime")
route = fock.rho2E_rr_gaussian(N, eta, cutoff)
print("corrected vs beamsplitter route", fock.trace_distance(good, route))
print("swapped   vs beamsplitter route", fock.trace_distance(swapped, route))
print("entropy", fock.entropy_fock(route), "vs", g(n1) + g(n2))

# %% [markdown]
# The two-mode basis vectors psi_{t,m} written without normalization have
# squared norm t! m!.

# %%
labels, G = fock.psi_tm_gram(3)
for (t, mm), v in zip(labels, np.diag(G)):
    print((t, mm), round(v, 9))

# %% [markdown]
# After Bob's heterodyne outcome beta, Eve's conditional mean in this
# quadrature convention carries sqrt(2) times the gain times Re beta.

# %%
conv = fock.eve_mean_convention(N, eta, 0.7 + 0.3j, 40)
print(conv)
ce, _ = gs.condition_on_coherent(gs.partial_trace(gs.build_abe(eta, N), [1, 2]), [0], 0.7 + 0.3j)
print("Gaussian conditional mean", ce.mean)
