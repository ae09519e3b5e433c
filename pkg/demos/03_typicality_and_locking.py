# %% [markdown]
# # Typical subspaces and the locking key budget

# %%
import math

import numpy as np

from cvlock import locking, rates
from cvlock.rates import g

# %% [markdown]
# Exhaustive type-class enumeration for ten copies of a thermal state. The
# window constant c = sum |log p| keeps every per-sequence weight inside
# 2^{-n(S +- c delta)}; the smaller max |log pi| does not.

# %%
spec = locking.Spectrum.thermal(0.5)
for kind in ("sum", "max"):
    rep = locking.check_windows(spec, 10, 0.1, kind=kind)
    print(kind, f"c={rep.c:.2f}", "weights", np.round(rep.weight_range, 3),
          "window", np.round(rep.weight_window, 3), "ok" if rep.weights_ok else "outside")

# %% [markdown]
# Photon-number fluctuations of the typical types stay within the bound.

# %%
fl = locking.fluctuation_check(2.0, 0.5, 8, 0.15)
print(f"max |beta dl| = {fl.max_beta_dl:.3f}  bound = {fl.bound:.1f}  types = {fl.n_types}")

# %% [markdown]
# The finite-size key count, kept in log2 so that n = 10^4 is representable.
# Its per-mode rate tends to max{log gamma, log d - chi}.

# %%
eta, N = 0.6, 100.0
SE, S2, chi = g((1 - eta) * N), g(2 * (1 - eta) * N), g(eta * N)
target = max(2 * SE - S2, SE - chi)
for n in (100, 1_000, 10_000):
    fk = locking.finite_K(n * chi, math.exp(-math.sqrt(n)), n * (2 * SE - S2), n * SE)
    print(f"n={n:>6}  log2(K)/n = {fk.log2_K / n:.4f}  target {target:.4f}  branch {fk.branch}")

# %% [markdown]
# The accessible-information bound is a heuristic minimum over test vectors.
# It is exact on the two extreme ensembles.

# %%
M = d = 4
mixed = np.broadcast_to(np.eye(d) / d, (M, 1, d, d)).copy()
orth = np.zeros((M, 1, d, d))
for x in range(M):
    orth[x, 0, x, x] = 1
print("maximally mixed:", locking.accessible_bound(mixed, M, 1, d).bound_bits)
print("orthogonal:     ", locking.accessible_bound(orth, M, 1, d).bound_bits)
