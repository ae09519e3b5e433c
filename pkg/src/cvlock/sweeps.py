"""Figure data: asymptotic rates, reference bounds and the noise threshold against transmissivity."""
from __future__ import annotations

import csv
import io

import numpy as np

from . import rates

HEADERS = {
    1: ["eta", "r_dr_inf", "dr_capacity"],
    2: ["eta", "r_rr_inf", "tgw", "rci"],
    3: ["eta", "NT_threshold"],
}


def eta_grid(lo: float = 0.01, hi: float = 0.99, points: int = 99) -> np.ndarray:
    """Evenly spaced transmissivities strictly inside ``(0, 1)``."""
    if not 0 < lo < hi < 1:
        raise ValueError("grid bounds must satisfy 0 < lo < hi < 1")
    if points < 2:
        raise ValueError("a grid needs at least two points")
    return np.linspace(lo, hi, points)


def parse_grid(spec: str) -> np.ndarray:
    """``"lo:hi:points"``, e.g. ``"0.01:0.99:99"``."""
    try:
        lo, hi, pts = spec.split(":")
        return eta_grid(float(lo), float(hi), int(pts))
    except (TypeError, ValueError) as exc:
        raise ValueError(f"bad grid {spec!r}: {exc}") from None


def figure_rows(fig: int, grid) -> list[list[float]]:
    rows = []
    for eta in grid:
        eta = float(eta)
        if fig == 1:
            rows.append([eta, rates.asymptotic_rates(eta)[0], rates.bounds(eta).dr_capacity])
        elif fig == 2:
            b = rates.bounds(eta)
            rows.append([eta, rates.asymptotic_rates(eta)[1], b.tgw, b.rci])
        elif fig == 3:
            rows.append([eta, rates.noise_threshold(eta)])
        else:
            raise ValueError(f"unknown figure {fig}; choose 1, 2 or 3")
    return rows


def fmt(x: float) -> str:
    """Twelve significant digits, the serialization used for every number."""
    return f"{x:.12g}"


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def figure_csv(fig: int, grid=None) -> str:
    grid = eta_grid() if grid is None else grid
    return to_csv(HEADERS[fig], figure_rows(fig, grid))
