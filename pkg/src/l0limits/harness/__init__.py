"""Document loading, check execution and the command line interface."""

from .checks import (
    CHECK_KINDS,
    CheckResult,
    RunReport,
    render_structured,
    render_text,
    run_check,
    run_checks,
)
from .document import (
    CheckSpec,
    Document,
    DocumentBuilder,
    dump_document,
    load_document,
    parse_document,
    save_document,
    serialize_document,
)

__all__ = [
    "CHECK_KINDS",
    "CheckResult",
    "CheckSpec",
    "Document",
    "DocumentBuilder",
    "RunReport",
    "dump_document",
    "load_document",
    "parse_document",
    "render_structured",
    "render_text",
    "run_check",
    "run_checks",
    "save_document",
    "serialize_document",
]
