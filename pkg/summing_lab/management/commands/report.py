import pandas as pd

from summing_lab.engine_service import engine_service

from utils.schema import parse_manifest

from ._options import EngineCommand

COLUMNS = ["id", "kind", "value", "method", "bound", "passed"]


def _row(result):
    row = {"id": result["id"], "kind": result["kind"]}
    if "values" in result:
        row["value"] = ", ".join(f"{k}={v:.9g}" for k, v in result["values"].items())
        row["method"] = ", ".join(f"{k}:{v}" for k, v in sorted(result["methods"].items()))
        row["passed"] = result["passed"]
    else:
        row["value"] = f"{result['value']:.9g}"
        row["method"] = result["method"]
        row["bound"] = result["bound"]
    return row


class Command(EngineCommand):
    help = "Run every task of a JSON manifest (norms, summing norms, duality reports) and tabulate the results"

    def add_arguments(self, parser):
        parser.add_argument("manifest", help="Manifest as inline JSON or a path to a JSON file")
        self.add_engine_arguments(parser)

    def handle(self, *args, **options):
        cfg = self.build_config(options)
        manifest = self.run_engine(lambda: parse_manifest(self.load(options["manifest"])))
        rows = self.run_engine(lambda: engine_service.run_manifest(manifest, cfg, witness=options["witness"]))
        frame = pd.DataFrame([_row(r) for r in rows], columns=COLUMNS).fillna("")
        text = frame.to_string(index=False) if rows else "No tasks"
        self.emit(options, {"schema_version": manifest.schema_version, "results": rows}, text)
        failed = [r["id"] for r in rows if r.get("passed") is False]
        if failed:
            self.fail(f"Duality checks failed for task(s): {', '.join(failed)}")
