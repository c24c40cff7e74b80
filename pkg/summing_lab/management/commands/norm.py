from summing_lab.engine_service import engine_service

from utils.schema import parse_class, parse_sequence

from ._options import EngineCommand, format_result


class Command(EngineCommand):
    help = "Norm of a finite vector sequence in a sequence class, e.g. lp:2, lpw:2, rad, dual(linf)"

    def add_arguments(self, parser):
        parser.add_argument("seq_class", help="Class descriptor: lp:p, linf, c0, c0w, lpw:p, lpu:p, "
                                              "cohen:p, mid:p, rad, RAD, dual(...)")
        parser.add_argument("input", help="Sequence as inline JSON or a path to a JSON file")
        self.add_engine_arguments(parser)

    def resolve_class(self, text: str):
        return parse_class(text)

    def handle(self, *args, **options):
        cfg = self.build_config(options)
        seq_class = self.run_engine(lambda: self.resolve_class(options["seq_class"]))
        x = self.run_engine(lambda: parse_sequence(self.load(options["input"])))
        result = self.run_engine(lambda: engine_service.norm(seq_class, x, cfg, witness=options["witness"]))
        self.emit(options, result, f"{result['class']}\n{format_result(result)}")
