"""Command-line entry point for desk-scale Monte-Carlo sweeps."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .channel import SystemConfig
from .conic import SolverSettings
from .driver import ConvergenceCriterion
from .experiments import Scheme, SweepSpec, run_sweep

log = logging.getLogger("ma_multicast")

_RX_MODES = {"seq": "sequential", "par": "parallel", "collective": "collective"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ma-multicast",
        description="Joint movable-antenna placement and multicast beamforming")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a Monte-Carlo sweep")
    run_p.add_argument("--config", required=True, help="JSON system config")
    run_p.add_argument("--sweep", required=True,
                       help="swept parameter (pmax_dbm, region_size, paths, "
                            "tx_antennas, users, groups)")
    run_p.add_argument("--values", required=True,
                       help="comma-separated sweep values")
    run_p.add_argument("--reps", type=int, default=1,
                       help="channel realizations per sweep value")
    run_p.add_argument("--schemes", default="proposed",
                       help="comma-separated scheme names "
                            "(proposed, receive_ma, transmit_ma, fpa, random_position)")
    run_p.add_argument("--seed", type=int, default=0, help="master seed")
    run_p.add_argument("--out", required=True, help="output directory")
    run_p.add_argument("--rx-mode", choices=sorted(_RX_MODES), default=None,
                       help="receive update mode (default: parallel if possible)")
    run_p.add_argument("--random-samples", type=int, default=100,
                       help="placements tried by the random-position scheme")
    run_p.add_argument("--epsilon", type=float, default=1e-4,
                       help="convergence threshold on fractional objective gain")
    run_p.add_argument("--max-iters", type=int, default=200)
    run_p.add_argument("--no-traces", action="store_true",
                       help="skip writing per-run trace files")
    return parser


def _parse_values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise SystemExit(f"bad --values list: {exc}")


def _parse_schemes(text: str) -> list[Scheme]:
    out = []
    for name in text.split(","):
        name = name.strip().lower()
        if not name:
            continue
        try:
            out.append(Scheme(name))
        except ValueError:
            raise SystemExit(f"unknown scheme {name!r}")
    if not out:
        raise SystemExit("no schemes given")
    return out


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO,
                        format="%(asctime)s %(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    if args.command != "run":  # pragma: no cover - argparse enforces this
        return 2
    config = SystemConfig.from_file(args.config)
    spec = SweepSpec(
        base_config=config,
        parameter=args.sweep,
        values=_parse_values(args.values),
        realizations=args.reps,
        schemes=_parse_schemes(args.schemes),
        master_seed=args.seed,
        rx_mode=_RX_MODES[args.rx_mode] if args.rx_mode else None,
        criterion=ConvergenceCriterion(epsilon=args.epsilon,
                                       max_iterations=args.max_iters),
        solver=SolverSettings(),
        random_samples=args.random_samples,
        out_dir=Path(args.out),
        write_traces=not args.no_traces,
    )
    log.info("sweep %s over %s, %d reps, schemes %s", spec.parameter,
             spec.values, spec.realizations,
             ",".join(s.value for s in spec.schemes))
    raw_path, agg_path = run_sweep(spec)
    log.info("wrote %s and %s", raw_path, agg_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
