import os
import sys
import logging
import hashlib
from collections import OrderedDict
from typing import Dict, List, Optional

from django.conf import settings

# Make the engine packages under src/ importable
current_dir = os.path.dirname(os.path.abspath(__file__))
project_root = os.path.dirname(current_dir)
src_path = os.path.join(project_root, 'src')

if src_path not in sys.path:
    sys.path.insert(0, src_path)

from banach.dualize import DualNormProblem, dual_norm
from banach.exceptions import SummingError
from banach.opideal import LinOp, adjoint_duality_report, reverse_duality_report, second_adjoint_check, summing_norm
from banach.optimize import NormCert, OptConfig
from banach.seqnorm import ClassId, ClassKind, VecSeq, class_norm
from utils.schema import Manifest, dumps, parse_class
from verify.suites import SuiteSpec, run_suite
from verify.report import SuiteReport

DEFAULT_CACHE_SIZE = 256

REPORT_KINDS = {
    "adjoint": adjoint_duality_report,
    "reverse": reverse_duality_report,
    "second": second_adjoint_check,
}


def _sequence_payload(x: VecSeq) -> Dict:
    return {"space": x.space.describe(), "vectors": x.to_list()}


class EngineService:
    """Service layer between the management commands and the engine, with a bounded LRU result cache"""

    def __init__(self, max_entries: Optional[int] = None):
        self._cache: "OrderedDict[str, Dict]" = OrderedDict()
        self._hits = 0
        self._max_entries = max_entries
        logging.info("EngineService initialized")

    @property
    def max_entries(self) -> int:
        """Cache capacity: the constructor argument, else SUMMING_ENGINE['CACHE_SIZE']"""
        if self._max_entries is not None:
            return self._max_entries
        return int(getattr(settings, "SUMMING_ENGINE", {}).get("CACHE_SIZE", DEFAULT_CACHE_SIZE))

    def config(self, **overrides) -> OptConfig:
        """Engine defaults from settings.SUMMING_ENGINE, overridden by non-None flags"""
        return OptConfig.from_settings(getattr(settings, "SUMMING_ENGINE", {}), **overrides)

    def _cache_key(self, payload: Dict, cfg: OptConfig) -> str:
        """md5 of the canonical JSON of a task and its configuration"""
        canonical = dumps({"task": payload, "config": cfg.as_dict()})
        return hashlib.md5(canonical.encode("utf-8")).hexdigest()

    def _cached(self, payload: Dict, cfg: OptConfig, compute) -> Dict:
        key = self._cache_key(payload, cfg)
        if key in self._cache:
            self._hits += 1
            self._cache.move_to_end(key)
            logging.info(f"Using cached result for {payload['kind']} ({key[:8]})")
            return self._cache[key]
        try:
            result = compute()
        except SummingError as e:
            logging.error(f"{payload['kind']} failed: {type(e).__name__}: {e}")
            raise
        self._cache[key] = result
        while len(self._cache) > max(self.max_entries, 0):
            evicted, _ = self._cache.popitem(last=False)
            logging.debug(f"Evicted cached result {evicted[:8]}")
        return result

    @staticmethod
    def _cert_result(cert: NormCert, witness: bool, **extra) -> Dict:
        result = cert.to_dict(include_witness=witness)
        result.update(extra)
        return result

    def norm(self, seq_class, x: VecSeq, cfg: OptConfig, witness: bool = False) -> Dict:
        """Norm of x in a class; dual(...) classes go through dual_norm"""
        seq_class = ClassId.coerce(seq_class)
        payload = {"kind": "norm", "class": str(seq_class), "sequence": _sequence_payload(x), "witness": witness}

        def compute():
            if seq_class.kind is ClassKind.DUAL:
                cert = dual_norm(DualNormProblem(seq_class.inner, x.space, x), cfg)
            else:
                cert = class_norm(seq_class, x, cfg)
            return self._cert_result(cert, witness, **{"class": str(seq_class)})

        return self._cached(payload, cfg, compute)

    def opnorm(self, X, Y, T: LinOp, k: int, cfg: OptConfig, witness: bool = False) -> Dict:
        """||T||_{X;Y} at length k"""
        X, Y = ClassId.coerce(X), ClassId.coerce(Y)
        payload = {"kind": "opnorm", "X": str(X), "Y": str(Y), "operator": T.describe(), "k": k,
                   "witness": witness}

        def compute():
            cert = summing_norm(X, Y, T, k, cfg)
            return self._cert_result(cert, witness, X=str(X), Y=str(Y), k=k)

        return self._cached(payload, cfg, compute)

    def duality_report(self, kind: str, X, Y, T: LinOp, k: int, cfg: OptConfig) -> Dict:
        """Adjoint, reverse or second-adjoint report as a JSON-ready dict"""
        if kind not in REPORT_KINDS:
            raise ValueError(f"Unknown report kind {kind!r}; expected one of {', '.join(REPORT_KINDS)}")
        X, Y = ClassId.coerce(X), ClassId.coerce(Y)
        payload = {"kind": f"{kind}-report", "X": str(X), "Y": str(Y), "operator": T.describe(), "k": k}
        return self._cached(payload, cfg, lambda: REPORT_KINDS[kind](X, Y, T, k, cfg).to_dict())

    def verify(self, spec: SuiteSpec) -> SuiteReport:
        """Suites are not cached; they are the reproducibility check itself"""
        logging.info(f"Verifying suite {spec.name}")
        return run_suite(spec)

    def run_manifest(self, manifest: Manifest, cfg: OptConfig, witness: bool = False) -> List[Dict]:
        """Run every task of a manifest in order; each row carries the task id and kind"""
        rows = []
        for task in manifest.tasks:
            params = task.params
            k = int(params.get("k", 1))
            if task.kind in ("norm", "dualnorm"):
                seq_class = parse_class(params.get("class", ""))
                if task.kind == "dualnorm":
                    seq_class = ClassId.dual(seq_class)
                result = self.norm(seq_class, manifest.sequence(params.get("sequence")), cfg, witness)
            elif task.kind == "opnorm":
                result = self.opnorm(parse_class(params.get("X", "")), parse_class(params.get("Y", "")),
                                     manifest.operator(params.get("operator")), k, cfg, witness)
            else:
                kind = {"adjoint-report": "adjoint", "reverse-report": "reverse", "second-adjoint": "second"}[task.kind]
                result = self.duality_report(kind, parse_class(params.get("X", "")), parse_class(params.get("Y", "")),
                                             manifest.operator(params.get("operator")), k, cfg)
            rows.append({**result, "id": task.id, "kind": task.kind})
            logging.info(f"Task {task.id} ({task.kind}) done")
        return rows

    def clear_cache(self):
        self._cache.clear()
        self._hits = 0

    def get_cache_info(self) -> Dict:
        """Information about cached results"""
        return {"cached_results": len(self._cache), "cache_hits": self._hits, "max_entries": self.max_entries}


# Global engine service instance
engine_service = EngineService()
