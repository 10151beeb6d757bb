import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from src.bounds.report import tail_report
from src.certificates.certificate import Certificate, VerifyBox, parse_certificate
from src.certificates.checker import check_cdb, check_db, check_ranking, check_super, tight_parameters
from src.certificates.report import CheckReport
from src.certificates.theta import compute_theta
from src.cfg.builder import build_cfg, dump_cfg
from src.cfg.graph import Cfg
from src.core.distributions import SamplingFunction
from src.core.valuation import Valuation
from src.errors import ConfigError
from src.handlers.report_writer import ReportWriter
from src.lab.processes import LabProcess
from src.lab.simulation import simulate_lab
from src.language.labeller import label
from src.language.parser import parse, parse_distributions, sampling_function_for
from src.language.printer import pretty_print
from src.models import CertKind, Command, LabTag, OutputFormat, SchedulerKind
from src.settings.config import Settings
from src.settings.constants import EXIT_CHECK_FAILED, EXIT_OK, TOOL_NAME, TOOL_VERSION
from src.simulation.schedulers import make_scheduler
from src.simulation.semantics import StackElement
from src.simulation.simulator import simulate

logger = logging.getLogger(__name__)


@dataclass
class RunConfig:
    command: Command
    settings: Settings = field(default_factory=Settings)
    program: Path | None = None
    dist: Path | None = None
    cert: Path | None = None
    box: str | None = None
    entry: str | None = None
    args: str = ""
    scheduler: SchedulerKind = SchedulerKind.UNIFORM
    kind: CertKind = CertKind.RANKING
    eps: Fraction | None = None
    delta: Fraction | None = None
    zeta: Fraction | None = None
    tail: tuple[int, ...] = ()
    ns: tuple[int, ...] = ()
    tight: bool = False
    example: LabTag | None = None
    alpha: float = 2.0
    horizon: int = 1000

    def validate(self) -> "RunConfig":
        """Check files and flag combinations before any work starts."""
        for name in ("program", "dist", "cert"):
            path = getattr(self, name)
            if path is not None and not Path(path).is_file():
                raise ConfigError(f"--{name}: no such file {path}")
        needs_program = {Command.PARSE, Command.CFG, Command.SIMULATE, Command.CHECK, Command.BOUNDS}
        if self.command in needs_program and self.program is None:
            raise ConfigError(f"{self.command.value} needs a program file")
        if self.command in (Command.CHECK, Command.BOUNDS) and self.cert is None:
            raise ConfigError(f"{self.command.value} needs --cert")
        if self.command in (Command.CHECK, Command.BOUNDS) and self.box is None:
            raise ConfigError(f"{self.command.value} needs --box")
        if self.command in (Command.SIMULATE, Command.BOUNDS) and self.entry is None:
            raise ConfigError(f"{self.command.value} needs --entry")
        if self.command is Command.SIMULATE and self.scheduler.needs_certificate and self.cert is None:
            raise ConfigError(f"scheduler {self.scheduler.value} needs --cert")
        if self.command is Command.LAB and self.example is None:
            raise ConfigError("lab needs --example")
        if self.settings.runs < 1 or self.settings.max_steps < 1 or self.horizon < 1:
            raise ConfigError("runs, max-steps and horizon must be positive")
        self.settings.resolved_workers()
        return self


def parse_entry(cfg: Cfg, entry: str, args: str) -> StackElement:
    """
    ``f`` or ``f@3`` plus ``n=5,m=2``; variables not given start at 0.
    """
    fname, _, label_text = entry.partition("@")
    if fname not in cfg:
        raise ConfigError(f"unknown function {fname!r}")
    fn = cfg[fname]
    label_value = int(label_text) if label_text else fn.entry
    bindings = dict.fromkeys(fn.variables, 0)
    for item in filter(None, (part.strip() for part in args.split(","))):
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or name not in bindings:
            raise ConfigError(f"cannot bind {item!r}: {fname} has variables {', '.join(fn.variables) or 'none'}")
        try:
            bindings[name] = int(value)
        except ValueError:
            raise ConfigError(f"value of {name} must be an integer, got {value!r}") from None
    return StackElement(fname, label_value, Valuation(bindings))


class CommandHandler:
    def __init__(self, config: RunConfig, writer: ReportWriter | None = None):
        self.config = config.validate()
        self.settings = config.settings
        self.writer = writer or ReportWriter(OutputFormat(self.settings.output_format))

    def run(self) -> int:
        """
        Run the configured subcommand and write its report.

        :return: exit status, 1 when a certificate check fails
        """
        command = self.config.command
        if command is Command.PARSE:
            status = self._parse_command()
        elif command is Command.CFG:
            status = self._cfg_command()
        elif command is Command.SIMULATE:
            status = self._simulate_command()
        elif command is Command.CHECK:
            status = self._check_command()
        elif command is Command.BOUNDS:
            status = self._bounds_command()
        else:
            status = self._lab_command()
        self.writer.flush()
        return status

    def _header(self, **extra) -> None:
        self.writer.set_header(tool=f"{TOOL_NAME} {TOOL_VERSION}", command=self.config.command, seed=self.settings.seed, **extra)

    def _load_program(self):
        return parse(Path(self.config.program).read_text(encoding="utf-8"))

    def _load_sampling(self, program) -> SamplingFunction:
        dists = parse_distributions(Path(self.config.dist).read_text(encoding="utf-8")) if self.config.dist else SamplingFunction()
        return sampling_function_for(program, dists)

    def _load_certificate(self) -> Certificate:
        return parse_certificate(Path(self.config.cert).read_text(encoding="utf-8"))

    def _params(self, h: Certificate) -> dict:
        return h.params.merged(eps=self.config.eps, delta=self.config.delta, zeta=self.config.zeta).as_dict()

    def _parse_command(self) -> int:
        self._header(program=self.config.program)
        self.writer.add_text("program", pretty_print(label(self._load_program())))
        return EXIT_OK

    def _cfg_command(self) -> int:
        self._header(program=self.config.program)
        self.writer.add_text("cfg", dump_cfg(build_cfg(self._load_program())))
        return EXIT_OK

    def _simulate_command(self) -> int:
        program = self._load_program()
        cfg = build_cfg(program)
        sf = self._load_sampling(program)
        h = self._load_certificate().bind(cfg) if self.config.cert else None
        entry = parse_entry(cfg, self.config.entry, self.config.args)
        scheduler = make_scheduler(self.config.scheduler, cfg, h)
        stats = simulate(
            cfg,
            sf,
            entry,
            scheduler,
            runs=self.settings.runs,
            max_steps=self.settings.max_steps,
            k_list=self.config.tail,
            seed=self.settings.seed,
            workers=self.settings.resolved_workers(),
            batch_size=self.settings.batch_size,
        )
        self._header(entry=repr(entry), scheduler=scheduler.kind, certificate=h.digest() if h else None)
        self.writer.add_rows(
            "termination time",
            [
                {
                    "runs": stats.runs,
                    "terminated": stats.terminated,
                    "censored": stats.censored,
                    "mean_T": stats.mean,
                    "half_width": stats.mean_half_width(),
                    "max_T": stats.max_observed,
                }
            ],
        )
        if stats.tail_ks:
            self.writer.add_rows("tail P(T >= k)", stats.rows())
        return EXIT_OK

    def _check_command(self) -> int:
        program = self._load_program()
        cfg = build_cfg(program)
        sf = self._load_sampling(program)
        h = self._load_certificate().bind(cfg)
        box = VerifyBox.parse(self.config.box)
        kind = self.config.kind
        self._header(box=str(box), certificate=h.digest(), kind=kind)

        reports = self._run_checks(h, self._params(h), cfg, sf, box)
        self._write_reports(reports)
        if kind is CertKind.SUPER:
            theta = compute_theta(cfg)
            self.writer.add_rows(
                "step bounds",
                [{"function": fname, "K_max": k} for fname, k in theta.k_max_by_function().items()],
            )
        if self.config.tight:
            tight = tight_parameters(h, cfg, sf, box)
            self.writer.add_rows("tight parameters", [{key: getattr(tight, key) for key in tight.__dataclass_fields__}])
        return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK_FAILED

    def _run_checks(self, h: Certificate, params: dict, cfg: Cfg, sf: SamplingFunction, box: VerifyBox) -> list[CheckReport]:
        """
        Run the conditions of the configured certificate kind over ``box``.

        Ranking conditions come first for ranking, cdb and db certificates.

        :return: one report per family of conditions
        """
        kind = self.config.kind
        workers = self.settings.resolved_workers()
        if kind is CertKind.SUPER:
            if params["delta"] is None:
                raise ConfigError("super check needs delta")
            return [check_super(h, params["delta"], params["zeta"], cfg, sf, box, workers)]
        if params["eps"] is None:
            raise ConfigError(f"{kind.value} check needs eps for the ranking conditions")
        reports = [check_ranking(h, params["eps"], cfg, sf, box, workers)]
        if kind is CertKind.CDB:
            if params["delta"] is None or params["zeta"] is None:
                raise ConfigError("cdb check needs delta and zeta")
            reports.append(check_cdb(h, params["delta"], params["zeta"], cfg, sf, box, workers))
        elif kind is CertKind.DB:
            if params["zeta"] is None:
                raise ConfigError("db check needs zeta")
            reports.append(check_db(h, params["zeta"], cfg, sf, box, workers))
        return reports

    def _write_reports(self, reports: list[CheckReport]) -> None:
        self.writer.add_rows(
            "verdict",
            [{"kind": r.kind, "verdict": r.verdict, "points": r.points, **r.params} for r in reports],
        )
        for report in reports:
            rows = [{"condition": name, "checked": checked, "failed": failed} for name, checked, failed in report.conditions()]
            self.writer.add_rows(f"{report.kind.value} conditions", rows)
            if report.counterexample is not None:
                self.writer.add_text(f"{report.kind.value} counterexample", str(report.counterexample))
            for note in report.notes:
                logger.info("%s: %s", report.kind.value, note)

    def _bounds_command(self) -> int:
        program = self._load_program()
        cfg = build_cfg(program)
        sf = self._load_sampling(program)
        h = self._load_certificate().bind(cfg)
        box = VerifyBox.parse(self.config.box)
        entry = parse_entry(cfg, self.config.entry, self.config.args)
        params = self._params(h)
        self._header(entry=repr(entry), box=str(box), certificate=h.digest(), kind=self.config.kind)

        reports = self._run_checks(h, params, cfg, sf, box)
        if not all(r.passed for r in reports):
            self._write_reports(reports)
            logger.error("no bounds: the %s certificate fails its conditions over %s", self.config.kind.value, box)
            return EXIT_CHECK_FAILED
        theta = compute_theta(cfg) if self.config.kind is CertKind.SUPER else None
        report = tail_report(self.config.kind, h, params, entry, self.config.tail, self.config.ns, theta)
        self.writer.add_rows(
            "parameters",
            [{"h_entry": report.h_entry, **report.params}],
        )
        self.writer.add_rows("bounds", [row.as_dict() for row in report.rows])
        if report.notes:
            self.writer.add_text("notes", "\n".join(report.notes))
        return EXIT_OK

    def _lab_command(self) -> int:
        process = LabProcess(self.config.example, self.config.alpha)
        result = simulate_lab(
            process,
            runs=self.settings.runs,
            horizon=self.config.horizon,
            seed=self.settings.seed,
            workers=self.settings.resolved_workers(),
        )
        ns = [n for n in (self.config.ns or (1, 10, 100)) if n <= self.config.horizon]
        self._header(example=process.tag, alpha=process.alpha, runs=result.runs, horizon=result.horizon)
        self.writer.add_rows("analytic vs empirical", result.rows(ns))
        return EXIT_OK
