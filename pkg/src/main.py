import argparse
import logging
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from src.errors import RptError
from src.handlers import CommandHandler, RunConfig
from src.models import CertKind, Command, LabTag, OutputFormat, SchedulerKind
from src.settings.config import Settings
from src.settings.constants import EXIT_USAGE, LOG_FORMAT, TOOL_NAME, TOOL_VERSION

logger = logging.getLogger(__name__)


def configure_logging(debug: bool = False) -> None:
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if debug else logging.WARNING)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(item) for item in text.split(",") if item.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a rational number, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=[f.value for f in OutputFormat], default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--workers", type=int, default=None, help="0 uses every available core")
    common.add_argument("--debug", action="store_true")

    parser = argparse.ArgumentParser(prog=TOOL_NAME, description="Termination analysis of probabilistic recursive programs")
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    parse_cmd = sub.add_parser(Command.PARSE.value, parents=[common], help="parse and print a labelled program")
    parse_cmd.add_argument("program", type=Path)

    cfg_cmd = sub.add_parser(Command.CFG.value, parents=[common], help="dump the control-flow graph")
    cfg_cmd.add_argument("program", type=Path)

    sim = sub.add_parser(Command.SIMULATE.value, parents=[common], help="Monte Carlo termination time")
    sim.add_argument("program", type=Path)
    sim.add_argument("--entry", required=True, help="function name, optionally f@label")
    sim.add_argument("--args", default="", help="n=5,m=2")
    sim.add_argument("--dist", type=Path)
    sim.add_argument("--scheduler", choices=[s.value for s in SchedulerKind], default=SchedulerKind.UNIFORM.value)
    sim.add_argument("--cert", type=Path)
    sim.add_argument("--runs", type=int)
    sim.add_argument("--max-steps", type=int)
    sim.add_argument("--tail", type=_int_list, default=())

    check = sub.add_parser(Command.CHECK.value, parents=[common], help="check certificate conditions over a box")
    check.add_argument("program", type=Path)
    check.add_argument("--cert", type=Path, required=True)
    check.add_argument("--dist", type=Path)
    check.add_argument("--kind", choices=[k.value for k in CertKind], default=CertKind.RANKING.value)
    check.add_argument("--box", required=True, help="n=-100..100,c=0..1")
    check.add_argument("--eps", type=_rational)
    check.add_argument("--delta", type=_rational)
    check.add_argument("--zeta", type=_rational)
    check.add_argument("--tight", action="store_true", help="also report the extremal parameters over the box")

    bounds = sub.add_parser(Command.BOUNDS.value, parents=[common], help="termination-time bounds from a certificate")
    bounds.add_argument("program", type=Path)
    bounds.add_argument("--cert", type=Path, required=True)
    bounds.add_argument("--dist", type=Path)
    bounds.add_argument("--kind", choices=[k.value for k in CertKind], default=CertKind.RANKING.value)
    bounds.add_argument("--entry", required=True)
    bounds.add_argument("--args", default="")
    bounds.add_argument("--box", required=True, help="box the certificate is checked over first")
    bounds.add_argument("--eps", type=_rational)
    bounds.add_argument("--delta", type=_rational)
    bounds.add_argument("--zeta", type=_rational)
    bounds.add_argument("--k", dest="tail", type=_int_list, default=())
    bounds.add_argument("--n", dest="ns", type=_int_list, default=())

    lab = sub.add_parser(Command.LAB.value, parents=[common], help="simulate the counterexample processes")
    lab.add_argument("--example", choices=[t.value for t in LabTag], required=True)
    lab.add_argument("--alpha", type=float, default=2.0)
    lab.add_argument("--runs", type=int)
    lab.add_argument("--horizon", type=int, default=1000)
    lab.add_argument("--n", dest="ns", type=_int_list, default=())
    return parser


def config_from_args(args: argparse.Namespace, settings: Settings | None = None) -> RunConfig:
    settings = settings or Settings.from_env()
    overrides = {
        "seed": args.seed,
        "workers": args.workers,
        "output_format": args.format,
        "runs": getattr(args, "runs", None),
        "max_steps": getattr(args, "max_steps", None),
    }
    settings = replace(settings, **{key: value for key, value in overrides.items() if value is not None})
    if args.debug:
        settings = replace(settings, debug=True)
    options = vars(args)
    config = RunConfig(command=Command(args.command), settings=settings)
    for name in ("program", "dist", "cert", "box", "entry", "args", "eps", "delta", "zeta", "tail", "ns", "tight", "alpha", "horizon"):
        if options.get(name) is not None:
            setattr(config, name, options[name])
    if options.get("scheduler"):
        config.scheduler = SchedulerKind(options["scheduler"])
    if options.get("kind"):
        config.kind = CertKind(options["kind"])
    if options.get("example"):
        config.example = LabTag(options["example"])
    return config


def main(argv: list[str] | None = None) -> int:
    """
    Command-line entry point.

    :return: 0 on success, 1 when a certificate check fails, 2 on usage or input errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    try:
        config = config_from_args(args)
        configure_logging(config.settings.debug)
        return CommandHandler(config).run()
    except RptError as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
