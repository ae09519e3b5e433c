# %% [markdown]
# # Recycling locked key across interleaved tracks

# %%
from cvlock import bootstrap as B, rates

# %% [markdown]
# Without quantum memory on Eve's side the key can be reused at once and one
# track achieves (chi - k) nu exactly.

# %%
p = B.ScheduleParams(tau_E=0, tau_B=1, nu=1000, n=10)
led = B.simulate(p, 2.0, 0.5, 10.0, 5.0)
print(led.rounds, "rounds,", float(led.output_bits), "bits,", led.throughput(), "bits/s")

# %% [markdown]
# With a one-second memory every key must age before reuse. A single track
# stalls; enough interleaved tracks keep the channel busy.

# %%
rr = rates.rr_rates(0.5, 10.0)
base = B.ScheduleParams(tau_E=1, tau_B=2, nu=1e6, n=100_000)
need = B.required_tracks(base)
for tracks in (1, need // 2, need):
    q = B.ScheduleParams(1, 2, 1e6, 100_000, tracks)
    led = B.simulate(q, rr.chi, rr.k, 200.0, tracks * q.n * B.exact(rr.k))
    print(f"tracks={tracks:>2}  throughput / target = {led.throughput() / ((rr.chi - rr.k) * 1e6):.4f}")

# %% [markdown]
# Starting with seed for one track only, the other tracks are funded from
# output, which costs a fixed amount of key up front.

# %%
q = B.ScheduleParams(1, 2, 1e6, 100_000, need)
for duration in (50.0, 200.0, 1000.0):
    led = B.simulate(q, rr.chi, rr.k, duration, q.n * B.exact(rr.k))
    print(f"{duration:>6g} s  throughput / target = {led.throughput() / ((rr.chi - rr.k) * 1e6):.4f}"
          f"  diverted {float(led.diverted_bits):.3g} bits")
