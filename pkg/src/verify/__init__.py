from utils.schema import dumps, to_jsonable

from .report import Check, SuiteReport, TrialResult
from .suites import (
    PUBLIC_OPERATIONS,
    SUITES,
    SUITE_ALIASES,
    SuiteSpec,
    aliases_of,
    covered_operations,
    get_suite,
    list_suites,
    run_suite,
)

__all__ = [
    "PUBLIC_OPERATIONS",
    "SUITES",
    "SUITE_ALIASES",
    "Check",
    "SuiteReport",
    "SuiteSpec",
    "TrialResult",
    "aliases_of",
    "covered_operations",
    "dumps",
    "get_suite",
    "list_suites",
    "run_suite",
    "to_jsonable",
]
