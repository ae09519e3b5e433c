# %% [markdown]
# # Locked-key rates on a pure-loss channel
#
# Direct and reverse reconciliation rates per mode, their large-photon limits,
# and how they compare with the reference capacity bounds.

# %%
import numpy as np

from cvlock import rates, sweeps

# %% [markdown]
# At finite mean photon number the rate is the Holevo term minus the key spent
# on locking. Both terms grow like log N, their difference converges.

# %%
for N in (1.0, 10.0, 100.0, 1e4, 1e8):
    dr, rr = rates.dr_rates(0.5, N), rates.rr_rates(0.5, N)
    print(f"N={N:>8g}  dr: chi={dr.chi:8.4f} k={dr.k:8.4f} r={dr.r:7.4f}   rr: r={rr.r:7.4f}")
print("limits at eta=0.5:", rates.asymptotic_rates(0.5))

# %% [markdown]
# Direct reconciliation stops producing key at eta = 1/3; reverse
# reconciliation stays positive for every eta.

# %%
grid = sweeps.eta_grid(0.05, 0.95, 10)
for eta in grid:
    r_dr, r_rr, _ = rates.asymptotic_rates(eta)
    b = rates.bounds(eta)
    print(f"eta={eta:.2f}  r_dr={r_dr:7.3f}  r_rr={r_rr:6.3f}  tgw={b.tgw:6.3f}  rci={b.rci:6.3f}")

# %% [markdown]
# Under an active attack with thermal noise N_T the asymptotic rate is
# 1 + log(1/(1-eta)) - g(N_T). The tolerable noise at which it vanishes
# approaches g^{-1}(1) ~ 0.2938 as eta -> 0.

# %%
for eta in (0.5, 0.1, 0.01, 1e-6):
    print(f"eta={eta:g}  N_T threshold={rates.noise_threshold(eta):.6f}")
print("g^-1(1) =", rates.g_inverse(1.0))

# %% [markdown]
# The finite-N active rate uses a large-N expression; the exact covariance
# route agrees once N is large.

# %%
for N in (1e2, 1e3, 1e4):
    a, e = rates.active_rates(0.5, N, 0.1), rates.active_rates_exact(0.5, N, 0.1)
    print(f"N={N:g}  approx r={a.r:.6f}  exact-covariance r={e.r:.6f}")
