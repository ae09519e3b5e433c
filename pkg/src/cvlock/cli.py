"""Command-line front end.

Subcommands: ``rates``, ``sweep``, ``verify`` and ``schedule``. Exit codes:
0 success, 1 failed verification, 2 bad parameters, 3 I/O error,
4 infeasible schedule. Every run writes one JSON manifest.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import os
import sys
from importlib import metadata
from pathlib import Path

from . import bootstrap, rates, sweeps, verify

EXIT_OK, EXIT_VERIFY, EXIT_PARAM, EXIT_IO, EXIT_SCHEDULE = 0, 1, 2, 3, 4
OUTPUT_ENV = "CVLOCK_OUTPUT_DIR"


class ParamError(ValueError):
    pass


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def _float(s: str) -> float:
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None


def parse_seeds(spec) -> list[int]:
    """``"7"`` or an inclusive range ``"1..200"``."""
    if isinstance(spec, int):
        return [spec]
    s = str(spec)
    if ".." in s:
        a, b = s.split("..", 1)
        lo, hi = int(a), int(b)
        if hi < lo:
            raise ParamError(f"empty seed range {s!r}")
        return list(range(lo, hi + 1))
    return [int(s)]


def _dumps(obj) -> str:
    return json.dumps(verify.round_sig(obj), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# commands; each returns (exit code, data outputs {path: text}, stdout text)

def cmd_rates(a):
    eta, N, NT = a.eta, a.N, a.NT
    if not 0 < eta < 1:
        raise ParamError(f"--eta must lie strictly inside (0, 1), got {eta}")
    if not (N > 0):
        raise ParamError(f"--N must be positive or 'inf', got {N}")
    if NT < 0:
        raise ParamError(f"--NT must be non-negative, got {NT}")
    rec = {"protocol": a.protocol, "eta": eta, "N": N, "N_T": NT}
    try:
        if math.isinf(N):
            r_dr, r_rr, r_th = rates.asymptotic_rates(eta, NT)
            r = {"dr": r_dr, "rr": r_rr, "rr-active": r_th}[a.protocol]
            rec.update(chi=math.inf, k=math.inf, r=r)  # both diverge; only r is finite
        else:
            if a.protocol == "dr":
                br = rates.dr_rates(eta, N)
            elif a.protocol == "rr":
                br = rates.rr_rates(eta, N)
            else:
                br = rates.active_rates(eta, N, NT)
            rec.update(chi=br.chi, k=br.k, r=br.r, **{k: v for k, v in br.aux.items()})
    except ValueError as exc:
        raise ParamError(str(exc)) from None
    b = rates.bounds(eta)
    rec.update(tgw=b.tgw, dr_capacity=b.dr_capacity, rci=b.rci)
    outputs = {}
    if a.out:
        cols = ["protocol", "eta", "N", "N_T", "chi", "k", "r", "tgw", "dr_capacity", "rci"]
        vals = [rec[c] if rec[c] is not None else "" for c in cols]
        vals = [("inf" if isinstance(v, float) and math.isinf(v) else v) for v in vals]
        outputs[a.out] = sweeps.to_csv(cols, [vals])
    line = " ".join(f"{k}={_fmt(v)}" for k, v in rec.items())
    return EXIT_OK, outputs, line + "\n"


def _fmt(v):
    if v is None:
        return "nan"
    if isinstance(v, float):
        return "inf" if math.isinf(v) else sweeps.fmt(v)
    return str(v)


def cmd_sweep(a):
    try:
        grid = sweeps.parse_grid(a.grid)
        text = sweeps.figure_csv(a.fig, grid)
    except ValueError as exc:
        raise ParamError(str(exc)) from None
    out = a.out or f"fig{a.fig}.csv"
    return EXIT_OK, {out: text}, f"wrote {len(grid)} rows to {out}\n"


def cmd_verify(a):
    seeds = parse_seeds(a.seed)
    kw = {}
    if a.suite == "typicality" and a.delta is not None:
        kw["delta"] = a.delta
    try:
        records = verify.run_suite(a.suite, seeds=seeds, **kw)
    except ValueError as exc:
        raise ParamError(str(exc)) from None
    ok = all(r["pass"] for r in records)
    report = {"suite": a.suite, "seeds": [seeds[0], seeds[-1]], "all_pass": ok, "checks": records}
    out = a.out or f"verify-{a.suite}.json"
    lines = [f"{'PASS' if r['pass'] else 'FAIL'} {r['check_id']}" for r in records]
    return (EXIT_OK if ok else EXIT_VERIFY), {out: _dumps(report)}, "\n".join(lines) + "\n"


def cmd_schedule(a):
    try:
        if a.chi is not None and a.k is not None:
            chi, k = a.chi, a.k
        elif a.eta is not None and a.N is not None and math.isinf(a.N):
            # chi and k both diverge; only their difference is finite, so k must be given
            if a.k is None:
                raise ParamError("--N inf needs --k (seed cost per mode); chi is set to k + r_rr(eta)")
            k = a.k
            chi = k + rates.asymptotic_rates(a.eta)[1]
        elif a.eta is not None and a.N is not None:
            br = rates.rr_rates(a.eta, a.N)
            chi, k = br.chi, br.k
        else:
            raise ParamError("give --chi and --k, or --eta with --N")
    except ValueError as exc:
        raise ParamError(str(exc)) from None
    try:
        p = bootstrap.ScheduleParams(a.tau_E, a.tau_B, a.nu, a.n, 1)
        tracks = bootstrap.required_tracks(p) if a.tracks in (None, "auto") else int(a.tracks)
        p = bootstrap.ScheduleParams(a.tau_E, a.tau_B, a.nu, a.n, tracks)
        seed_bits = a.seed_bits if a.seed_bits is not None else tracks * a.n * bootstrap.exact(k)
        led = bootstrap.simulate(p, chi, k, a.duration, seed_bits)
    except bootstrap.SchedulerError as exc:
        return EXIT_SCHEDULE, {}, f"scheduler infeasible: {exc}\n"
    out = a.out or "schedule.csv"
    summary = {
        "tracks": tracks, "rounds": led.rounds, "chi": chi, "k": k,
        "output_bits": float(led.output_bits), "seed_bits": float(led.seed_bits),
        "throughput_bits_per_s": led.throughput(), "target_bits_per_s": (chi - k) * a.nu,
    }
    text = " ".join(f"{k_}={_fmt(v) if not isinstance(v, int) else v}" for k_, v in summary.items())
    return EXIT_OK, {out: led.to_csv()}, text + "\n"


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cvlock", description="Locked-key rates, verification suites and scheduling.")
    ap.add_argument("--config", help="JSON file of default flag values (flags on the command line win)")
    ap.add_argument("--output-dir", help=f"directory for outputs and manifests (default ${OUTPUT_ENV} or cwd)")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("rates", help="rates and bounds at one operating point")
    r.add_argument("--eta", type=_float, required=True)
    r.add_argument("--N", type=_float, required=True, help="mean photons per mode, or 'inf'")
    r.add_argument("--NT", type=_float, default=0.0)
    r.add_argument("--protocol", choices=["dr", "rr", "rr-active"], default="rr")
    r.add_argument("--out")
    r.set_defaults(func=cmd_rates)

    s = sub.add_parser("sweep", help="figure data on an eta grid")
    s.add_argument("--fig", type=int, choices=[1, 2, 3], required=True)
    s.add_argument("--grid", default="0.01:0.99:99", help="lo:hi:points")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=list(verify.SUITES))
    v.add_argument("--seed", default="0", help="seed or inclusive range a..b")
    v.add_argument("--delta", type=_float)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("schedule", help="simulate key recycling")
    c.add_argument("--tau-E", dest="tau_E", type=_float, required=True)
    c.add_argument("--tau-B", dest="tau_B", type=_float, required=True)
    c.add_argument("--nu", type=_float, required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--tracks", default="auto")
    c.add_argument("--chi", type=_float)
    c.add_argument("--k", type=_float)
    c.add_argument("--eta", type=_float)
    c.add_argument("--N", type=_float)
    c.add_argument("--duration", type=_float, required=True, help="seconds of channel time")
    c.add_argument("--seed-bits", dest="seed_bits", type=_float)
    c.add_argument("--out")
    c.set_defaults(func=cmd_schedule)
    return ap


def _apply_config(ap, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    with open(known.config, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ParamError("config file must hold a JSON object")
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    sub = next(a for a in ap._actions if isinstance(a, argparse._SubParsersAction))
    for p in sub.choices.values():
        names = {a.dest for a in p._actions}
        p.set_defaults(**{k: v for k, v in cfg.items() if k in names})
        for a in p._actions:
            if a.dest in cfg and a.required:
                a.required = False


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        _apply_config(ap, argv)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    try:
        a = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARAM if exc.code else EXIT_OK
    outdir = Path(a.output_dir or os.environ.get(OUTPUT_ENV) or ".")
    try:
        code, outputs, text = a.func(a)
    except ParamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    params = {k: v for k, v in sorted(vars(a).items()) if k not in ("func", "config", "output_dir")}
    paths = []
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        for rel, body in outputs.items():
            path = outdir / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(body)
            paths.append(str(path))
        manifest = {
            "command": a.command,
            "parameters": {k: (str(v) if isinstance(v, float) and math.isinf(v) else v) for k, v in params.items()},
            "seed": params.get("seed"),
            "tool_version": _version(),
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
            "outputs": paths,
            "exit_code": code,
        }
        mpath = (outdir / next(iter(outputs))).with_suffix(".manifest.json") if outputs \
            else outdir / f"cvlock-{a.command}.manifest.json"
        with open(mpath, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
