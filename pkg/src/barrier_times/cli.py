"""``barrier-times`` command line.

Exit codes: 0 success, 1 failed check or simulation error, 2 bad
configuration.  Point queries and sweeps use natural units ``w = m = 1``.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict
from pathlib import Path

from . import checks, sweep, tdse
from . import delay_times as dt
from . import scattering as sc
from .errors import BarrierTimesError, ConfigurationError, DomainError
from .kinematics import BarrierSpec, make_barrier
from .snapshots import write_snapshots

log = logging.getLogger("barrier_times")

CONFIG_SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def parse_wl(text: str) -> float:
    """Float, optionally with a trailing ``pi``: ``4pi``, ``0.5*pi``, ``pi``."""
    t = text.strip().lower().replace(" ", "")
    try:
        if t.endswith("pi"):
            head = t[:-2].rstrip("*")
            return (float(head) if head else 1.0) * math.pi
        return float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


# ---------------------------------------------------------------- times

def cmd_times(args) -> int:
    cfg = sweep.SweepConfig(
        wL=args.wl, n_min=args.n_min, n_max=args.n_max,
        n_steps=args.steps, normalize=args.normalize,
    )
    text = sweep.format_csv(sweep.sweep_table(cfg))
    if args.out:
        sweep.write_csv(text, args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ----------------------------------------------------------- amplitudes

def amplitude_record(wL: float, n: float, oracle: bool = False) -> dict:
    if not 0 < n < 1:
        raise DomainError("n", f"must lie in (0, 1), got {n}")
    b = BarrierSpec.from_strength(wL)
    k = math.sqrt(n)
    s = sc.scattering_set(b, k)
    rec = {
        "wL": f"{wL:.15g}",
        "n": f"{n:.15g}",
        "T2": f"{abs(s.T) ** 2:.15g}",
        "R2": f"{abs(s.R) ** 2:.15g}",
        "Theta": f"{s.Theta:.15g}",
        "theta": f"{s.theta:.15g}",
        "phi_plus": f"{s.phi_plus:.15g}",
        "phi_minus": f"{s.phi_minus:.15g}",
        "abs_R_plus_T": f"{abs(s.combined_plus):.12f}",
        "abs_R_minus_T": f"{abs(s.combined_minus):.12f}",
    }
    if oracle:
        R, T = sc.transfer_matrix_oracle(b, k)
        rec["oracle_T2"] = f"{abs(T) ** 2:.15g}"
        rec["oracle_R2"] = f"{abs(R) ** 2:.15g}"
        rec["oracle_max_abs_diff"] = f"{max(abs(R - s.R), abs(T - s.T)):.3e}"
    return rec


def cmd_amplitudes(args) -> int:
    for key, value in amplitude_record(args.wl, args.n, args.oracle).items():
        print(f"{key}={value}")
    return EXIT_OK


# ------------------------------------------------------------- simulate

def _section(cfg: dict, name: str, required: bool = True) -> dict:
    sec = cfg.get(name)
    if sec is None and not required:
        return {}
    if not isinstance(sec, dict):
        raise ConfigurationError(f"{name}: expected an object")
    return sec


def _number(sec: dict, prefix: str, key: str, default=None, integer: bool = False):
    if key not in sec or sec[key] is None:
        if default is None:
            raise ConfigurationError(f"{prefix}.{key}: required")
        return default
    value = sec[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"{prefix}.{key}: expected a number, got {value!r}")
    if integer and value != int(value):
        raise ConfigurationError(f"{prefix}.{key}: expected an integer, got {value!r}")
    if not math.isfinite(value):
        raise ConfigurationError(f"{prefix}.{key}: must be finite")
    return int(value) if integer else float(value)


def load_run_config(path) -> dict:
    """Parse and validate a run configuration; returns ready-to-use objects."""
    try:
        cfg = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigurationError(f"config: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config: invalid JSON ({exc.msg}, line {exc.lineno})") from None
    if not isinstance(cfg, dict):
        raise ConfigurationError("config: top level must be an object")
    version = cfg.get("schema_version")
    if version != CONFIG_SCHEMA_VERSION:
        raise ConfigurationError(
            f"schema_version: expected {CONFIG_SCHEMA_VERSION}, got {version!r}"
        )

    bsec = _section(cfg, "barrier")
    m = _number(bsec, "barrier", "m", 1.0)
    V0 = _number(bsec, "barrier", "V0")
    L = _number(bsec, "barrier", "L")
    try:
        b = make_barrier(V0, L, m) if V0 != 0 else BarrierSpec(0.0, L, m)
        if b.L <= 0:
            raise DomainError("L", "must be positive")
    except DomainError as exc:
        raise ConfigurationError(f"barrier.{exc}") from None

    psec = _section(cfg, "packet")
    k0 = _number(psec, "packet", "k0")
    dk = _number(psec, "packet", "dk")
    side = psec.get("side", "L")
    if side not in ("L", "R"):
        raise ConfigurationError(f"packet.side: expected 'L' or 'R', got {side!r}")
    if not k0 > 0:
        raise ConfigurationError(f"packet.k0: must be positive, got {k0}")
    if not dk > 0:
        raise ConfigurationError(f"packet.dk: must be positive, got {dk}")
    sigma = 0.5 / dk
    sign = -1.0 if side == "L" else 1.0
    x0 = _number(psec, "packet", "x0", sign * (L / 2.0 + 8.0 * sigma))
    cutoff = psec.get("cutoff_delta")
    if cutoff is not None:
        cutoff = _number(psec, "packet", "cutoff_delta")
    try:
        p = tdse.PacketSpec(k0, dk, x0, side, cutoff)
        p.validate(b)
    except ConfigurationError as exc:
        raise ConfigurationError(f"packet: {exc}") from None

    mode = cfg.get("mode", "single")
    if mode not in ("single", "parity+", "parity-"):
        raise ConfigurationError(f"mode: expected single, parity+ or parity-, got {mode!r}")

    gsec = _section(cfg, "grid", required=False)
    N = _number(gsec, "grid", "N", 8192, integer=True)
    explicit = [k for k in ("x_min", "x_max", "dt", "t_max") if k in gsec]
    try:
        if explicit:
            grid = tdse.SimGrid(
                _number(gsec, "grid", "x_min"),
                _number(gsec, "grid", "x_max"),
                N,
                _number(gsec, "grid", "dt"),
                _number(gsec, "grid", "t_max"),
                _number(gsec, "grid", "sample_every", 1, integer=True),
            )
        else:
            grid = tdse.auto_grid(b, p, N=N)
        grid.validate(b, p)
    except ConfigurationError as exc:
        raise ConfigurationError(f"grid: {exc}") from None

    snap = cfg.get("snapshots")
    if snap is not None and not isinstance(snap, str):
        raise ConfigurationError("snapshots: expected a file path")
    return {"barrier": b, "packet": p, "grid": grid, "mode": mode, "snapshots": snap}


def analytic_reference(b: BarrierSpec, k0: float, mode: str) -> tuple[float, float, str]:
    """Reference (peak time, dwell, label) for a run."""
    if b.V0 == 0:
        tau = dt.classical_traversal(b, k0)
        return tau, tau, "free flight m L / k0"
    if mode == "single":
        return dt.phase_time_standard(b, k0), dt.dwell_time_numeric(b, k0, "L"), "one-way phase time"
    parity = mode[-1]
    return dt.phase_time_parity(b, k0, parity), dt.dwell_time_parity(b, k0, parity), f"parity {parity} phase time"


def simulate(run: dict):
    b, p, grid, mode = run["barrier"], run["packet"], run["grid"], run["mode"]
    if mode == "single":
        return tdse.run_single(b, p, grid)
    return tdse.run_symmetric_collision(b, p, grid, mode[-1])


def cmd_simulate(args) -> int:
    if not args.config:
        raise ConfigurationError("config: --config FILE is required")
    run = load_run_config(args.config)
    report, history = simulate(run)
    for key, value in asdict(report).items():
        print(f"{key}={value if isinstance(value, str) or value is None else f'{value:.10g}'}")
    ref_t, ref_d, label = analytic_reference(run["barrier"], run["packet"].k0, run["mode"])
    dev_t = (report.transmitted_peak_time - ref_t) / ref_t
    dev_d = (report.numeric_dwell - ref_d) / ref_d
    print(f"analytic_time={ref_t:.10g}")
    print(f"analytic_label={label}")
    print(f"time_relative_deviation={dev_t:.4g}")
    print(f"stationary_dwell={ref_d:.10g}")
    print(f"dwell_relative_deviation={dev_d:.4g}")
    if run["snapshots"]:
        write_snapshots(run["snapshots"], history)
        print(f"snapshots={run['snapshots']}")
    return EXIT_OK


# ---------------------------------------------------------------- check

def cmd_check(args) -> int:
    results = checks.run_checks(fast=args.fast)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name:<24s} {r.seconds:8.3f} s  {r.detail}")
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"first failing check: {failed[0].name}")
        return EXIT_FAIL
    print(f"all {len(results)} checks passed")
    return EXIT_OK


# ----------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="barrier-times",
        description="Tunneling delay times for a rectangular barrier.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("times", help="sweep the delay times over n and write CSV")
    p.add_argument("--wl", type=parse_wl, default=4.0 * math.pi, help="opacity w L (accepts e.g. 4pi)")
    p.add_argument("--n-min", type=float, default=0.05)
    p.add_argument("--n-max", type=float, default=0.95)
    p.add_argument("--steps", type=int, default=181)
    p.add_argument("--normalize", action="store_true", help="divide times by tau_k")
    p.add_argument("--out", metavar="FILE", help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_times)

    p = sub.add_parser("amplitudes", help="amplitudes and phases at one point")
    p.add_argument("--wl", type=parse_wl, required=True)
    p.add_argument("--n", type=float, required=True, help="k^2 / w^2")
    p.add_argument("--oracle", action="store_true", help="also print the transfer-matrix values")
    p.set_defaults(func=cmd_amplitudes)

    p = sub.add_parser("simulate", help="wave-packet run from a JSON config")
    p.add_argument("--config", metavar="FILE")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("check", help="run the invariant suite")
    p.add_argument("--fast", action="store_true", help="skip the wave-packet checks")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BarrierTimesError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
