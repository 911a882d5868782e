"""Command-line entry point: ``riccati-pde <scenario> [flags]`` or
``riccati-pde all``.

Exit codes: 0 success, 1 a threshold was missed, 2 bad arguments,
3 numerical failure (near-singular solve, pole, blow-up), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import os
import sys
from typing import Dict, List, Optional

from threadpoolctl import threadpool_limits

from .errors import RiccatiError
from .properties import all_properties
from .scenarios import DEFAULTS, SCENARIOS, ScenarioConfig, passes, run_scenario, threshold_for

log = logging.getLogger("riccati_pde")

EXIT_OK, EXIT_THRESHOLD, EXIT_USAGE, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3, 4

CONFIG_KEYS = {
    "L": float,
    "M": int,
    "T": float,
    "dt": float,
    "sigma": float,
    "output": str,
    "trace_samples": int,
    "nonlinear_step": str,
}


class UsageError(Exception):
    pass


def read_config(path: str) -> Dict[str, object]:
    """``key=value`` lines, ``#`` starts a comment."""
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    out = {}
    for num, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{num}: unknown key {key!r}")
        try:
            out[key] = CONFIG_KEYS[key](val)
        except ValueError as exc:
            raise UsageError(f"{path}:{num}: bad value for {key}: {val!r}") from exc
    return out


def _common_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--output", help="output directory (default ./out)")
    p.add_argument("--trace-samples", type=int, help="det2 trace samples (default 50)")
    p.add_argument(
        "--nonlinear-step",
        choices=("euler", "exp"),
        help="NLS direct-solver nonlinear substep (default exp)",
    )
    p.add_argument("--config", help="key=value file; flags take precedence")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riccati-pde",
        description="Riccati solutions of nonlocal PDEs checked against direct simulation.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_flags()
    for name in SCENARIOS:
        L, M, T, dt = DEFAULTS[name]
        p = sub.add_parser(
            name,
            parents=[common],
            help=f"run the {name} scenario (L={L:g}, M={M}, T={T:g}, dt={dt:g})",
        )
        p.add_argument("--L", type=float)
        p.add_argument("--M", type=int)
        p.add_argument("--T", type=float)
        p.add_argument("--dt", type=float)
        p.add_argument("--sigma", type=float, help="Gaussian width (rd only, default 0.1)")
    p = sub.add_parser("all", parents=[common], help="every scenario plus the property suite")
    p.add_argument("--skip-properties", action="store_true")
    return parser


def _threshold_override() -> Optional[float]:
    raw = os.environ.get("RICCATI_THRESHOLD")
    if raw is None or raw == "":
        return None
    try:
        return float(raw)
    except ValueError as exc:
        raise UsageError(f"RICCATI_THRESHOLD is not a number: {raw!r}") from exc


def _thread_limit():
    raw = os.environ.get("RICCATI_THREADS")
    if not raw:
        return contextlib.nullcontext()
    try:
        n = int(raw)
    except ValueError as exc:
        raise UsageError(f"RICCATI_THREADS is not an integer: {raw!r}") from exc
    if n < 1:
        raise UsageError("RICCATI_THREADS must be at least 1")
    return threadpool_limits(limits=n)


def config_from_args(args, scenario: str) -> ScenarioConfig:
    values: Dict[str, object] = {}
    if args.config:
        values.update(read_config(args.config))
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    output = values.pop("output", "out")
    try:
        return ScenarioConfig.default(scenario, output_dir=output, **values)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _row(report, override) -> List[str]:
    means = " ".join(f"{m:.3e}" for m in report.mean_abs_error)
    return [
        report.name,
        f"{report.sup_error:.4e}",
        f"{threshold_for(report.name, override):.1e}",
        means,
        f"{report.runtimes['riccati']:.2f}",
        f"{report.runtimes['direct']:.2f}",
        "PASS" if passes(report, override) else "FAIL",
    ]


HEADER = ["scenario", "sup_error", "threshold", "mean_abs_error", "t_riccati", "t_direct", "status"]


def print_table(rows: List[List[str]], out=sys.stdout) -> None:
    widths = [max(len(r[i]) for r in [HEADER] + rows) for i in range(len(HEADER))]
    for r in [HEADER] + rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip(), file=out)


def run_one(args, scenario: str, override) -> int:
    cfg = config_from_args(args, scenario)
    report = run_scenario(cfg)
    print_table([_row(report, override)])
    for key in ("det2_abs_T", "det_abs_T", "hs_norm_T"):
        if key in report.extra:
            print(f"{key}={report.extra[key]:.12g}")
    print(f"wrote {cfg.output_dir}/*_{scenario}.*")
    return EXIT_OK if passes(report, override) else EXIT_THRESHOLD


def run_all(args, override) -> int:
    rows, ok = [], True
    for name in SCENARIOS:
        cfg = config_from_args(args, name)
        log.info("running %s", name)
        report = run_scenario(cfg)
        rows.append(_row(report, override))
        ok = ok and passes(report, override)
    print_table(rows)
    if not getattr(args, "skip_properties", False):
        print()
        results = all_properties(print)
        failed = sum(not r.passed for r in results)
        print(f"properties: {len(results) - failed}/{len(results)} passed")
        ok = ok and failed == 0
    return EXIT_OK if ok else EXIT_THRESHOLD


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    try:
        override = _threshold_override()
        with _thread_limit():
            if args.command == "all":
                return run_all(args, override)
            return run_one(args, args.command, override)
    except UsageError as exc:
        print(f"riccati-pde: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RiccatiError as exc:
        print(f"riccati-pde: numerical failure in {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"riccati-pde: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
