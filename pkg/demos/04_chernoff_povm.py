# %% [markdown]
# # Bob's decoding measurement from a random codebook
#
# A sampled coherent-state codebook, whitened by Bob's average state on a
# slicing window, should sit within (1 +- eps) of the identity.

# %%
import numpy as np

from cvlock import chernoff

# %%
rep = chernoff.build_bob_povm(1, 1.0, 0.5, 10_000, 0.3, seed=1)
print("window dimension", rep.window.dim, "mass", round(rep.window.mass, 4))
print("whitened spectrum", round(rep.lam_min, 4), round(rep.lam_max, 4), "sandwich", rep.sandwich_ok)
print("two-sided Chernoff bound", round(rep.chernoff(), 4))

# %% [markdown]
# Decoding statistics: the mass of the "no codeword" outcome Gamma_0 is close
# to eps/(1+eps) times the window mass, larger than 2 eps^2 at eps = 0.3.

# %%
stats = chernoff.decode_statistics(rep)
print("Gamma_0 mass", round(stats.gamma0_mass, 4), "outside window", round(stats.outside_mass, 4))
print("eps/(1+eps) * window mass", round(0.3 / 1.3 * rep.window.mass, 4))

# %% [markdown]
# Violation frequency across seeds shrinks quickly with the codebook size.

# %%
for M in (50, 200, 1_000, 10_000):
    s = chernoff.run_trials(range(20), M=M)
    print(f"M={M:>6}  violations {s.violations}/20  bound {s.bound:.3f}")
