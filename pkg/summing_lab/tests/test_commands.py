import json
import math
import os
import tempfile
from io import StringIO

from django.core.management import call_command, load_command_class
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from banach.seqnorm import VecSeq
from summing_lab.engine_service import EngineService, engine_service
from summing_lab.management.commands.adjoint_report import format_report
from verify import SUITE_ALIASES

IDENTITY_L2 = json.dumps({
    "domain": {"dim": 2, "norm": {"p": 2}},
    "codomain": {"dim": 2, "norm": {"p": 2}},
    "matrix": [[1, 0], [0, 1]],
})
ZERO_L2 = json.dumps({
    "domain": {"dim": 2, "norm": {"p": 2}},
    "codomain": {"dim": 2, "norm": {"p": 2}},
    "matrix": [[0, 0], [0, 0]],
})
M_L1 = json.dumps({
    "domain": {"dim": 2, "norm": {"p": 1}},
    "codomain": {"dim": 2, "norm": {"p": 1}},
    "matrix": [[1, 2], [3, 4]],
})


class CommandTestCase(SimpleTestCase):
    def setUp(self):
        engine_service.clear_cache()

    def call(self, *args, **options):
        out = StringIO()
        call_command(*args, stdout=out, **options)
        return out.getvalue()

    def call_json(self, *args, **options):
        return json.loads(self.call(*args, json="-", **options))

    def assertExit(self, code, *args, **options):
        with self.assertRaises(CommandError) as ctx:
            self.call(*args, **options)
        self.assertEqual(ctx.exception.returncode, code)
        return ctx.exception


class NormCommandTests(CommandTestCase):
    def test_lp2(self):
        result = self.call_json("norm", "lp:2", "[[3, 4], [0, 0]]")
        self.assertAlmostEqual(result["value"], 5.0)
        self.assertEqual(result["bound"], "exact")

    def test_dual_linf_is_l1(self):
        result = self.call_json("norm", "dual(linf)", "[1, 2, 3]")
        self.assertAlmostEqual(result["value"], 6.0)
        self.assertEqual(result["class"], "dual(linf)")

    def test_dualnorm_alias(self):
        result = self.call_json("dualnorm", "linf", "[1, 2, 3]")
        self.assertAlmostEqual(result["value"], 6.0)
        self.assertEqual(result["class"], "dual(linf)")

    def test_rad(self):
        result = self.call_json("norm", "rad", "[[1, 0], [0, 1]]")
        self.assertAlmostEqual(result["value"], math.sqrt(2.0))

    def test_text_output_and_witness(self):
        output = self.call("norm", "lpw:2", '{"space": {"dim": 2, "norm": {"p": 1}}, "vectors": [[1, 2]]}',
                           witness=True)
        self.assertIn("value: 3.0", output)
        self.assertIn("witness:", output)

    def test_json_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "out.json")
            self.call("norm", "lp:1", "[1, 2, 3]", json=path)
            with open(path, encoding="utf-8") as f:
                self.assertAlmostEqual(json.load(f)["value"], 6.0)

    def test_parse_error_exits_2(self):
        error = self.assertExit(2, "norm", "lp:2", "[[3, 4], ")
        self.assertIn("ManifestError", str(error))

    def test_unknown_class_exits_2(self):
        self.assertExit(2, "norm", "lq:2", "[1]")

    def test_dual_of_non_sign_invariant_class_exits_2(self):
        error = self.assertExit(2, "norm", "dual(rad)", "[1, 2]")
        self.assertIn("spherically complete", str(error))

    def test_long_rad_needs_monte_carlo(self):
        self.assertExit(2, "norm", "rad", json.dumps([1] * 13))
        result = self.call_json("norm", "rad", json.dumps([1] * 13), rad_mc=100)
        self.assertEqual(result["bound"], "estimate")

    def test_cached_result_reused(self):
        self.call("norm", "lp:2", "[[3, 4]]")
        self.call("norm", "lp:2", "[[3, 4]]")
        info = engine_service.get_cache_info()
        self.assertEqual((info["cached_results"], info["cache_hits"]), (1, 1))

    def test_cache_evicts_least_recently_used(self):
        service = EngineService(max_entries=2)
        cfg = service.config()
        first, second, third = (VecSeq.scalars([v]) for v in (1.0, 2.0, 3.0))
        service.norm("lp:2", first, cfg)
        service.norm("lp:2", second, cfg)
        service.norm("lp:2", first, cfg)
        service.norm("lp:2", third, cfg)
        self.assertEqual(service.get_cache_info()["cached_results"], 2)
        service.norm("lp:2", first, cfg)
        self.assertEqual(service.get_cache_info()["cache_hits"], 2)
        service.norm("lp:2", second, cfg)
        self.assertEqual(service.get_cache_info()["cache_hits"], 2)


class OpnormCommandTests(CommandTestCase):
    def test_identity(self):
        result = self.call_json("opnorm", "lp:2", "lp:2", IDENTITY_L2)
        self.assertAlmostEqual(result["value"], 1.0, places=9)

    def test_weak_to_strong_identity(self):
        result = self.call_json("opnorm", "lpw:2", "lp:2", IDENTITY_L2, k=2)
        self.assertLessEqual(result["value"], math.sqrt(2.0) + 1e-9)
        self.assertAlmostEqual(result["value"], math.sqrt(2.0), delta=1e-3)

    def test_zero(self):
        result = self.call_json("opnorm", "lpw:2", "lp:2", ZERO_L2, k=3)
        self.assertEqual(result["value"], 0.0)

    def test_method_flag(self):
        result = self.call_json("opnorm", "lp:1", "lp:1", M_L1, method="exact")
        self.assertAlmostEqual(result["value"], 6.0)

    def test_bad_operator_exits_2(self):
        self.assertExit(2, "opnorm", "lp:2", "lp:2", '{"domain": {"dim": 2, "norm": {"p": 2}}}')


class AdjointReportCommandTests(CommandTestCase):
    def test_adjoint(self):
        report = self.call_json("adjoint_report", "lp:1", "lp:1", M_L1, k=2)
        self.assertTrue(report["passed"])
        self.assertAlmostEqual(report["values"]["a"], report["values"]["b"])

    def test_reverse_and_second(self):
        self.assertTrue(self.call_json("adjoint_report", "lp:1", "lp:1", M_L1, kind="reverse")["passed"])
        self.assertTrue(self.call_json("adjoint_report", "lp:2", "lp:2", IDENTITY_L2, kind="second")["passed"])

    def test_text_report(self):
        output = self.call("adjoint_report", "lp:1", "lp:1", M_L1)
        self.assertIn("[ok] b <= a", output)
        self.assertIn("PASSED", output)

    def test_missing_hypotheses_exit_2(self):
        self.assertExit(2, "adjoint_report", "lp:2", "rad", IDENTITY_L2)

    def test_help_mentions_hyphenated_name(self):
        command = load_command_class("summing_lab", "adjoint_report")
        self.assertIn("adjoint-report", command.help)

    def test_inconclusive_mark(self):
        report = {
            "kind": "adjoint-duality", "X": "lpu:4/3", "Y": "lp:2", "k": 2, "values": {"a": 1.0, "b": 1.05},
            "checks": [{"name": "b <= a", "lhs": 1.05, "rhs": 1.0, "margin": -0.05, "asserted": True,
                        "holds": False, "status": "inconclusive", "passed": True}],
            "hypotheses": {}, "caveats": [], "passed": True,
        }
        output = format_report(report)
        self.assertIn("[??] b <= a", output)
        self.assertIn("PASSED", output)


class VerifyCommandTests(CommandTestCase):
    def test_axioms(self):
        output = self.call("verify", "axioms", trials=10, seed=7)
        self.assertIn("axioms: 10/10 trials passed", output)

    def test_json_report(self):
        report = self.call_json("verify", "spaces", trials=3, seed=7)
        self.assertTrue(report["passed"])
        self.assertEqual(report["trials"], 3)
        self.assertEqual(report["seed"], 7)

    def test_seed_reproducible(self):
        first = self.call("verify", "dual-identities", trials=3, seed=5, json="-")
        second = self.call("verify", "dual-identities", trials=3, seed=5, json="-")
        self.assertEqual(first, second)

    def test_dims_and_classes(self):
        report = self.call_json("verify", "sign-invariance", "--dims=1,2", "--classes=lp:2;linf", trials=3)
        self.assertTrue(report["passed"])
        self.assertEqual(report["config"]["dims"], [1, 2])
        self.assertEqual(report["config"]["classes"], ["lp:2", "linf"])

    def test_list(self):
        output = self.call("verify", list=True)
        self.assertIn("adjoint-duality", output)
        self.assertIn("known-values", output)
        self.assertIn("theorem-3.5", output)

    def test_statement_aliases(self):
        for alias, name in SUITE_ALIASES.items():
            with self.subTest(alias=alias):
                report = self.call_json("verify", alias, "--dims=1", trials=1, seed=0)
                self.assertEqual(report["suite"], name)
                self.assertTrue(report["passed"])

    def test_unknown_suite_exits_2(self):
        self.assertExit(2, "verify", "no-such-suite")

    def test_missing_suite_exits_2(self):
        self.assertExit(2, "verify")


class ReportCommandTests(CommandTestCase):
    MANIFEST = json.dumps({
        "schema_version": 1,
        "spaces": {"e2": {"dim": 2, "norm": {"p": 2}}, "l1": {"dim": 2, "norm": {"p": 1}}},
        "sequences": {"x": {"space": "e2", "vectors": [[3, 4], [0, 0]]}},
        "operators": {"m": {"domain": "l1", "codomain": "l1", "matrix": [[1, 2], [3, 4]]}},
        "tasks": [
            {"kind": "norm", "id": "strong", "class": "lp:2", "sequence": "x"},
            {"kind": "dualnorm", "id": "dual", "class": "linf", "sequence": [1, 2, 3]},
            {"kind": "opnorm", "id": "op", "X": "lp:1", "Y": "lp:1", "operator": "m", "k": 2},
            {"kind": "adjoint-report", "id": "adj", "X": "lp:1", "Y": "lp:1", "operator": "m"},
        ],
    })

    def test_runs_every_task(self):
        data = self.call_json("report", self.MANIFEST)
        results = {r["id"]: r for r in data["results"]}
        self.assertEqual(list(results), ["strong", "dual", "op", "adj"])
        self.assertAlmostEqual(results["strong"]["value"], 5.0)
        self.assertAlmostEqual(results["dual"]["value"], 6.0)
        self.assertAlmostEqual(results["op"]["value"], 6.0)
        self.assertTrue(results["adj"]["passed"])
        self.assertEqual(results["adj"]["kind"], "adjoint-report")

    def test_table(self):
        output = self.call("report", self.MANIFEST)
        self.assertIn("strong", output)
        self.assertIn("adjoint-report", output)

    def test_bad_manifest_exits_2(self):
        self.assertExit(2, "report", '{"schema_version": 1, "tasks": [{"kind": "norm", "sequence": "x"}]}')
