import pandas as pd

from summing_lab.engine_service import engine_service

from utils.schema import parse_class
from verify.suites import SuiteSpec, aliases_of, get_suite, list_suites

from ._options import EngineCommand


def _int_list(text: str):
    return tuple(int(part) for part in text.split(",") if part.strip())


class Command(EngineCommand):
    help = "Run a property suite on seeded random instances; exit 1 if any trial fails"

    def add_arguments(self, parser):
        parser.add_argument("suite", nargs="?", help="Suite name or alias such as theorem-3.5 (see --list)")
        parser.add_argument("--list", action="store_true", help="List the registered suites and exit")
        parser.add_argument("--trials", type=int, default=None, help="Number of trials (default per suite)")
        parser.add_argument("--dims", type=_int_list, default=(), help="Comma-separated dimensions, e.g. 1,2")
        parser.add_argument("--lengths", type=_int_list, default=(), help="Comma-separated sequence lengths")
        parser.add_argument("--classes", default="", help="Semicolon-separated class descriptors, e.g. 'lp:2;rad'")
        self.add_engine_arguments(parser)

    def list_suites(self, options):
        suites = list_suites()
        frame = pd.DataFrame(
            [{"suite": s.name, "aliases": ", ".join(aliases_of(s.name)), "trials": s.trials,
              "covers": ", ".join(s.covers), "description": s.description}
             for s in suites]
        )
        payload = [{"name": s.name, "aliases": aliases_of(s.name), "trials": s.trials, "covers": list(s.covers),
                    "description": s.description}
                   for s in suites]
        self.emit(options, payload, frame.to_string(index=False))

    def handle(self, *args, **options):
        if options["list"]:
            return self.list_suites(options)
        if not options["suite"]:
            self.usage_error("A suite name is required (or --list)")
        cfg = self.build_config(options)
        suite = self.run_engine(lambda: get_suite(options["suite"]))
        classes = self.run_engine(
            lambda: tuple(parse_class(c.strip()) for c in options["classes"].split(";") if c.strip())
        )
        spec = SuiteSpec(
            name=suite.name,
            trials=options["trials"],
            seed=cfg.seed,
            dims=options["dims"],
            lengths=options["lengths"],
            classes=classes,
            config=cfg,
        )
        report = self.run_engine(lambda: engine_service.verify(spec))
        summary = (
            f"{report.suite}: {len(report.trials) - len(report.failures)}/{len(report.trials)} trials passed, "
            f"max violation {report.max_violation:.3g}"
        )
        frame = report.to_frame()
        text = summary if frame.empty else f"{frame.to_string(index=False)}\n{summary}"
        self.emit(options, report.to_dict(), text)
        if not report.passed:
            self.fail(f"Suite {report.suite} failed in {len(report.failures)} trial(s)")
