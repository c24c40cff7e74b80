"""Options and error mapping shared by the summing_lab management commands."""
import logging

from django.core.management.base import BaseCommand, CommandError

from summing_lab.engine_service import engine_service

from banach.exceptions import SummingError
from banach.optimize import METHODS, OptConfig
from utils.schema import dumps, load_json

USAGE_ERROR = 2
PROPERTY_FAILURE = 1


class EngineCommand(BaseCommand):
    """Base for commands that run the engine: optimiser flags, --json output, exit codes."""

    def add_engine_arguments(self, parser):
        parser.add_argument("--method", choices=METHODS, default=None, help="Optimisation method (default auto)")
        parser.add_argument("--tol", type=float, default=None, help="Relative stopping tolerance")
        parser.add_argument("--seed", type=int, default=None, help="Seed for starts and random instances")
        parser.add_argument("--restarts", type=int, default=None, help="Random starts per ascent")
        parser.add_argument("--max-iter", type=int, default=None, help="Iterations per ascent")
        parser.add_argument("--grid", type=int, default=None, help="Brute-force grid resolution")
        parser.add_argument("--mid-max-m", type=int, default=None, help="Largest inner length for mid norms")
        parser.add_argument("--rad-mc", type=int, default=None,
                            help="Monte-Carlo sign samples for rad beyond length 12 (0 = exact only)")
        parser.add_argument("--workers", type=int, default=None, help="Threads for restarts and trials")
        parser.add_argument("--json", default=None, metavar="PATH",
                            help="Write the result as JSON to PATH ('-' prints JSON instead of text)")
        parser.add_argument("--witness", action="store_true", help="Include the maximising sequence")

    def build_config(self, options) -> OptConfig:
        try:
            return engine_service.config(
                seed=options.get("seed"),
                restarts=options.get("restarts"),
                max_iter=options.get("max_iter"),
                tol=options.get("tol"),
                grid_resolution=options.get("grid"),
                mid_max_m=options.get("mid_max_m"),
                rad_mc=options.get("rad_mc"),
                method=options.get("method"),
                workers=options.get("workers"),
            )
        except (TypeError, ValueError) as e:
            raise CommandError(f"Invalid option: {e}", returncode=USAGE_ERROR)

    def load(self, source: str):
        return self.run_engine(lambda: load_json(source))

    def run_engine(self, fn):
        """Call into the engine, turning engine and input errors into usage errors (exit 2)."""
        try:
            return fn()
        except (SummingError, ValueError) as e:
            logging.debug(f"{type(e).__name__}: {e}")
            raise CommandError(f"{type(e).__name__}: {e}", returncode=USAGE_ERROR)

    def emit(self, options, payload, text: str) -> bool:
        """Print text, or JSON when --json is '-'; write JSON to the --json path otherwise."""
        target = options.get("json")
        if target == "-":
            self.stdout.write(dumps(payload))
            return True
        self.stdout.write(text)
        if target:
            with open(target, "w", encoding="utf-8") as f:
                f.write(dumps(payload) + "\n")
            self.stdout.write(f"JSON written to {target}")
        return False

    def usage_error(self, message: str):
        raise CommandError(message, returncode=USAGE_ERROR)

    def fail(self, message: str):
        raise CommandError(message, returncode=PROPERTY_FAILURE)


def format_result(result) -> str:
    lines = [f"value: {result['value']!r}", f"method: {result['method']}", f"bound: {result['bound']}"]
    for key in sorted(result.get("details", {})):
        lines.append(f"  {key}: {result['details'][key]}")
    if "witness" in result:
        lines.append("witness:")
        lines.extend(f"  {row}" for row in result["witness"] or [])
    return "\n".join(lines)
