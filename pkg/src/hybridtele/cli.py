"""Command-line interface for hybridtele."""

import argparse
import sys
from pathlib import Path
from typing import NoReturn

from hybridtele.constants import (
    EXIT_OK,
    EXIT_TOLERANCE,
    EXIT_USAGE,
    SURFACE_A0,
    SURFACE_A1,
)
from hybridtele.errors import ConfigError, HybridTeleError
from hybridtele.log import get_logger, set_verbosity
from hybridtele.services import ConfigManager, Qubit, ReportWriter, SweepConfig, run_acceptance
from hybridtele.services.acceptance import all_passed
from hybridtele.services.config import parse_grid
from hybridtele.services.reports import (
    Table,
    am_probs_table,
    channel_gen_table,
    demod_alpha_grid,
    demod_table,
    direct_probs_table,
    fidelity_surface_table,
    orthogonal_table,
    rho_b_table,
)

logger = get_logger(__name__)


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with EXIT_USAGE (2 is reserved)."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _grid_arg(text: str) -> tuple[float, ...]:
    try:
        return parse_grid(text)
    except ConfigError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _qubit_arg(text: str) -> Qubit:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'a0,a1', got {text!r}")
    try:
        qubit = Qubit(complex(parts[0]), complex(parts[1]))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"not a pair of complex numbers: {text!r}") from e
    if qubit.norm == 0:
        raise argparse.ArgumentTypeError("qubit amplitudes must not both vanish")
    return qubit.normalized()


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=_grid_arg, help="alpha grid, comma-separated")
    common.add_argument("--t", type=_grid_arg, help="transmittance grid, comma-separated")
    common.add_argument("--a1-grid", type=_grid_arg, help="|a1| grid, comma-separated")
    common.add_argument("--beta", type=float, help="channel amplitude (default: 0.3)")
    common.add_argument("--cutoff", type=int, help="Fock cutoff per mode (default: 24)")
    common.add_argument("--out", help="CSV output path (default: stdout)")
    common.add_argument("--precision", type=int, help="significant digits (default: 12)")
    common.add_argument("--n-max", type=int, help="largest photon count listed (default: 12)")
    common.add_argument("--workers", type=int, help="threads for grid points (default: 1)")
    common.add_argument("--config", help="config file (default: ~/.config/hybridtele.conf)")
    common.add_argument("--save-config", metavar="PATH", help="write the resolved config")
    common.add_argument("--seed", type=int, default=0, help="seed for random test qubits")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _Parser(
        prog="hybrid-tele",
        description="Hybrid-entanglement teleportation: figure data and acceptance checks",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Exit codes:
  0 = success
  1 = usage or I/O error
  2 = tolerance breach (flagged rows, failed acceptance checks)

Examples:
  hybrid-tele fidelity-surface --alpha 0.1,0.3,0.5 --t 0.9,0.99,1 --out fid.csv
  hybrid-tele am-probs --mod 1 --alpha 0.2 --a1-grid 0,0.5,1
  hybrid-tele demod --method swap --out swap.csv
  hybrid-tele accept
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("fidelity-surface", parents=[common], help="fidelity over (alpha, t)")
    sub.add_parser("direct-probs", parents=[common], help="P_n without pre-modulation")
    am = sub.add_parser("am-probs", parents=[common], help="P_nk with mod-k pre-modulation")
    am.add_argument("--mod", type=int, choices=[0, 1], default=0, help="pre-modulation index")
    demod = sub.add_parser(
        "demod", parents=[common], help="demodulation success, closed form vs circuit"
    )
    demod.add_argument("--method", choices=["coherent", "swap"], default="coherent")
    demod.add_argument(
        "--mod", type=int, choices=[0, 1], help="only this modulation (default: both)"
    )
    rho = sub.add_parser("rho-b", parents=[common], help="Bob's state before the message")
    rho.add_argument("--qubit", type=_qubit_arg, help="input qubit 'a0,a1' (complex allowed)")
    gen = sub.add_parser("channel-gen", parents=[common], help="heralded channel generation")
    gen.add_argument("--ideal", action="store_true", help="ideal-displacement limit")
    ortho = sub.add_parser("orthogonal", parents=[common], help="orthogonal-pair scenario")
    ortho.add_argument("--qubit", type=_qubit_arg, help="first qubit 'a0,a1'")
    ortho.add_argument(
        "--partner", type=_qubit_arg, help="second qubit 'a0,a1' (default: orthogonal partner)"
    )
    sub.add_parser("accept", parents=[common], help="run the acceptance checks")
    return parser


def resolve_config(args: argparse.Namespace) -> SweepConfig:
    """Merge flags over the config file over defaults."""
    manager = ConfigManager(Path(args.config)) if args.config else ConfigManager()
    alpha_grid = args.alpha
    if alpha_grid is None and args.command == "demod" and not manager.has_setting("alpha_grid"):
        alpha_grid = demod_alpha_grid(args.method)
    return SweepConfig.resolve(
        manager,
        alpha_grid=alpha_grid,
        t_grid=args.t,
        a1_grid=args.a1_grid,
        beta=args.beta,
        cutoff=args.cutoff,
        precision=args.precision,
        output_path=args.out,
        n_max=args.n_max,
        workers=args.workers,
    )


def _table(args: argparse.Namespace, cfg: SweepConfig) -> Table:
    qubit = getattr(args, "qubit", None) or Qubit(SURFACE_A0, SURFACE_A1)
    match args.command:
        case "fidelity-surface":
            return fidelity_surface_table(cfg)
        case "direct-probs":
            return direct_probs_table(cfg)
        case "am-probs":
            return am_probs_table(cfg, args.mod)
        case "demod":
            which = (0, 1) if args.mod is None else (args.mod,)
            return demod_table(cfg, args.method, which)
        case "rho-b":
            return rho_b_table(cfg, qubit)
        case "channel-gen":
            return channel_gen_table(cfg, ideal=args.ideal)
        case "orthogonal":
            partner = args.partner or qubit.orthogonal()
            return orthogonal_table(cfg, (qubit, partner))
    raise ValueError(f"Unknown command: {args.command}")


def _accept(args: argparse.Namespace, cfg: SweepConfig) -> int:
    results = run_acceptance(seed=args.seed, cutoff=cfg.cutoff)
    for result in results:
        print(result.line)  # noqa: T201
    return EXIT_OK if all_passed(results) else EXIT_TOLERANCE


def main(argv: list[str] | None = None) -> int:
    """CLI entry point."""
    args = build_parser().parse_args(argv)
    set_verbosity(args.verbose)

    try:
        cfg = resolve_config(args)
        if args.save_config:
            ConfigManager(Path(args.save_config)).save_sweep(cfg)
            logger.info("Saved resolved configuration to %s", args.save_config)

        if args.command == "accept":
            return _accept(args, cfg)

        table = _table(args, cfg)
        ReportWriter(cfg.output_path, cfg.precision).write(table)
    except (HybridTeleError, ValueError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)  # noqa: T201
        return EXIT_USAGE

    if table.flagged:
        print(  # noqa: T201
            f"Error: {table.flagged} row(s) breached tolerance", file=sys.stderr
        )
        return EXIT_TOLERANCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
