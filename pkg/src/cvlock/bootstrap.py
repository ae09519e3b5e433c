"""Key-recycling scheduler for bootstrapped data locking.

Each round sends ``n`` modes, consumes ``n k`` seed bits and yields ``n chi``
bits. The ``n k`` bits go back to the round's track as its next seed, which
may be reused only after Eve's memory time has passed. Time advances in
whole channel uses (ticks of ``1/nu`` seconds) and every bit count is an
exact :class:`fractions.Fraction`.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction


class SchedulerError(ValueError):
    """Base class for infeasible schedules."""


class UnderfundedError(SchedulerError):
    """The initial seed cannot pay for the first round."""


class InfeasibleScheduleError(SchedulerError):
    """The parameters violate a timing constraint."""


class NonPositiveRateError(SchedulerError):
    """``chi <= k``: locking consumes at least as much key as it produces."""


@dataclass(frozen=True)
class ScheduleParams:
    tau_E: float  # seconds
    tau_B: float  # seconds
    nu: float  # channel uses per second
    n: int  # modes per round
    tracks: int = 1

    def __post_init__(self):
        if self.tau_E < 0 or self.tau_B <= 0 or self.nu <= 0 or self.n < 1 or self.tracks < 1:
            raise InfeasibleScheduleError("tau_E >= 0, tau_B > 0, nu > 0, n >= 1 and tracks >= 1 are required")
        if self.n > self.tau_B * self.nu:
            raise InfeasibleScheduleError(
                f"a round of n = {self.n} modes takes {self.n / self.nu:.6g} s, longer than tau_B = {self.tau_B:.6g} s")

    @property
    def wait_ticks(self) -> int:
        """Ticks a recycled key must age: zero without memory, otherwise strictly more than ``tau_E``."""
        if self.tau_E == 0:
            return 0
        return math.floor(exact(self.tau_E) * exact(self.nu)) + 1


def exact(x) -> Fraction:
    """Decimal value of ``x`` as written, so ``0.013`` means ``13/1000`` rather than its binary neighbour."""
    return Fraction(repr(float(x))) if not isinstance(x, (int, Fraction)) else Fraction(x)


def net_rate(chi: float, k: float) -> float:
    """Locked-key rate ``chi - k`` per mode; raises when it is not positive."""
    if chi < 0 or k < 0:
        raise ValueError("chi and k must be non-negative")
    if chi <= k:
        raise NonPositiveRateError(f"chi = {chi} does not exceed k = {k}")
    return chi - k


def required_tracks(params: ScheduleParams) -> int:
    """Fewest interleaved tracks that keep the channel busy while keys age."""
    round_time = Fraction(params.n) / exact(params.nu)
    return math.ceil((exact(params.tau_E) + round_time) / round_time)


@dataclass
class KeyLedger:
    """Running key balance.

    ``seed_bits`` is all key held for seeding (reserved, ageing or idle);
    ``diverted_bits`` is the part of the net output spent on funding new
    tracks. ``output_bits + seed_bits == initial_seed_bits + rounds n (chi - k)``
    after every event.
    """

    initial_seed_bits: Fraction
    per_round_net: Fraction
    time: Fraction = Fraction(0)
    seed_bits: Fraction = Fraction(0)
    output_bits: Fraction = Fraction(0)
    diverted_bits: Fraction = Fraction(0)
    rounds: int = 0
    events: list = field(default_factory=list)

    def conserved(self) -> bool:
        return self.output_bits + self.seed_bits == self.initial_seed_bits + self.rounds * self.per_round_net

    def record(self, event: str, track: int):
        if not self.conserved():
            raise AssertionError("key ledger out of balance")
        self.events.append((self.time, event, track, self.seed_bits, self.output_bits))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time_s", "event", "track", "seed_bits", "output_bits"])
        for t, ev, tr, s, o in self.events:
            w.writerow([f"{float(t):.12g}", ev, tr, f"{float(s):.12g}", f"{float(o):.12g}"])
        return buf.getvalue()

    def throughput(self) -> float:
        """Net output per second over the simulated time."""
        return float(self.output_bits / self.time) if self.time else 0.0


def simulate(params: ScheduleParams, chi: float, k: float, duration: float,
             initial_seed_bits: float) -> KeyLedger:
    """Run the recycling loop for ``duration`` seconds of channel time.

    Tracks are funded in index order from the initial seed; while a track is
    unfunded, net output is diverted to it. A track's next round starts once
    its own recycled seed has aged and the channel is free; ties go to the
    lower track index. Only rounds that finish within ``duration`` count.
    """
    net_rate(chi, k)
    chi_f, k_f = exact(chi), exact(k)
    n = params.n
    cost = n * k_f
    init = exact(initial_seed_bits)
    if init < cost:
        raise UnderfundedError(f"initial seed {float(init):.12g} bits < n k = {float(cost):.12g} bits")
    nu = exact(params.nu)
    horizon = math.floor(exact(duration) * nu)
    wait = params.wait_ticks

    led = KeyLedger(init, n * (chi_f - k_f), seed_bits=init)
    free = init  # seed not attached to any track
    ready: list[int | None] = [None] * params.tracks  # tick at which a track's seed is usable
    for j in range(params.tracks):
        if free >= cost:
            free -= cost
            ready[j] = 0
            led.record("fund", j)
    channel = 0
    while True:
        cands = [(max(channel, r), j) for j, r in enumerate(ready) if r is not None]
        start, j = min(cands)
        end = start + n
        if end > horizon:
            break
        led.time = Fraction(start) / nu
        led.record("start", j)
        channel = end
        led.time = Fraction(end) / nu
        led.rounds += 1
        # the round's n chi bits: n k re-seed track j, the rest is net output
        surplus = n * (chi_f - k_f)
        ready[j] = end + wait
        funded = None
        if None in ready:
            take = min(cost - free, surplus)
            free += take
            surplus -= take
            led.seed_bits += take
            led.diverted_bits += take
            if free >= cost:
                free -= cost
                funded = ready.index(None)
                ready[funded] = end + wait
        led.output_bits += surplus
        led.record("complete", j)
        if funded is not None:
            led.record("fund", funded)
    led.time = Fraction(horizon) / nu
    return led
