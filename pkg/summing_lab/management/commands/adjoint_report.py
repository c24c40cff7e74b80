from summing_lab.engine_service import REPORT_KINDS, engine_service

from utils.schema import parse_class, parse_operator

from ._options import EngineCommand


def format_report(report) -> str:
    lines = [f"{report['kind']} report for X={report['X']}, Y={report['Y']}, k={report['k']}"]
    for name, value in sorted(report["values"].items()):
        lines.append(f"  {name} = {value!r}")
    inconclusive = False
    for check in report["checks"]:
        if check["holds"]:
            mark = "ok"
        elif not check["asserted"]:
            mark = "-"
        elif check["status"] == "inconclusive":
            mark, inconclusive = "??", True
        else:
            mark = "FAIL"
        lines.append(f"  [{mark}] {check['name']}: {check['lhs']!r} <= {check['rhs']!r} "
                     f"(margin {check['margin']:.3g})")
    for statement, hypotheses in sorted(report["hypotheses"].items()):
        for name, ok in hypotheses.items():
            lines.append(f"  {statement} needs {name}: {'yes' if ok else 'no'}")
    for caveat in report["caveats"]:
        lines.append(f"  caveat: {caveat}")
    if inconclusive:
        lines.append("  ??: violated by ascent lower bounds within the inconclusive band")
    lines.append("PASSED" if report["passed"] else "FAILED")
    return "\n".join(lines)


class Command(EngineCommand):
    help = (
        "Compare the summing norms of an operator and its adjoint under the duality statements "
        "(the adjoint-report command; Django spells management commands with an underscore)"
    )

    def add_arguments(self, parser):
        parser.add_argument("X", help="Domain sequence class")
        parser.add_argument("Y", help="Codomain sequence class")
        parser.add_argument("operator", help="Operator as inline JSON or a path to a JSON file")
        parser.add_argument("--kind", choices=sorted(REPORT_KINDS), default="adjoint",
                            help="adjoint: T against T'; reverse: T' against T; second: T against T''")
        parser.add_argument("--k", type=int, default=1, help="Sequence length (default 1)")
        self.add_engine_arguments(parser)

    def handle(self, *args, **options):
        cfg = self.build_config(options)
        X = self.run_engine(lambda: parse_class(options["X"]))
        Y = self.run_engine(lambda: parse_class(options["Y"]))
        T = self.run_engine(lambda: parse_operator(self.load(options["operator"])))
        report = self.run_engine(lambda: engine_service.duality_report(options["kind"], X, Y, T, options["k"], cfg))
        self.emit(options, report, format_report(report))
        if not report["passed"]:
            self.fail(f"{options['kind']} report failed")
