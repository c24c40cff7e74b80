from summing_lab.engine_service import engine_service

from utils.schema import parse_class, parse_operator

from ._options import EngineCommand, format_result


class Command(EngineCommand):
    help = "(X;Y)-summing norm of an operator on sequences of length k"

    def add_arguments(self, parser):
        parser.add_argument("X", help="Domain sequence class, e.g. lpw:2")
        parser.add_argument("Y", help="Codomain sequence class, e.g. lp:2")
        parser.add_argument("operator", help="Operator as inline JSON or a path to a JSON file")
        parser.add_argument("--k", type=int, default=1, help="Sequence length (default 1)")
        self.add_engine_arguments(parser)

    def handle(self, *args, **options):
        cfg = self.build_config(options)
        X = self.run_engine(lambda: parse_class(options["X"]))
        Y = self.run_engine(lambda: parse_class(options["Y"]))
        T = self.run_engine(lambda: parse_operator(self.load(options["operator"])))
        k = options["k"]
        result = self.run_engine(lambda: engine_service.opnorm(X, Y, T, k, cfg, witness=options["witness"]))
        self.emit(options, result, f"||T||_{{{X};{Y}}} at k={k}\n{format_result(result)}")
