"""Check dispatch, verdicts and report rendering.

Each check runs one verification against loaded objects and yields a raw
outcome (pass, fail or error) with a witness.  Counterexample checks
declare ``expect: fail``; their verdict is pass exactly when the raw
property fails as designed, and the witness records how.

Reports are deterministic for a fixed (document, seed, tolerance) triple:
checks are sorted by name and the structured rendering carries no wall
clock (durations appear only in the text format).
"""

from __future__ import annotations

import json
import time
import zlib
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .. import pullback as pb
from ..config import tolerance, tolerance_override
from ..direct import (
    DirectSystem,
    SystemMorphism,
    Target,
    check_surjectivity_preservation,
    dl_functor,
    dl_universal_factorization,
    direct_limit,
    solve_square_component,
    validate_direct_system,
    validate_system_morphism,
)
from ..errors import L0LimitsError
from ..indexsets import FinitePoset, greatest_element
from ..inverse import (
    InverseSystem,
    Source,
    check_injectivity_preservation,
    dual_limit_iso,
    hom_inverse_system,
    il_universal_factorization,
    inverse_limit,
    validate_inverse_system,
)
from ..measure import AtomicMeasureSpace
from ..modules import morphism_deviation
from .document import CheckSpec, Document

#: Documented boundary of the representable corpus, carried in reports.
SCOPE_NOTES = (
    "kernel preservation can fail for direct limits only through "
    "infinite-dimensional completions; no finite-fiber instance exists "
    "in this corpus, so the negative side is documented rather than run",
    "the inverse-limit/pullback comparison collects per-instance evidence "
    "only; the known non-commuting witness needs a non-atomic base space",
)


@dataclass
class CheckResult:
    name: str
    kind: str
    raw_outcome: str  # pass | fail | error
    verdict: str  # pass | fail | error
    expected: str
    witness: Dict = field(default_factory=dict)
    provenance: Tuple[str, ...] = ()
    duration: float = 0.0


@dataclass
class RunReport:
    tolerance: float
    seed: int
    document: str
    results: List[CheckResult]

    @property
    def exit_code(self) -> int:
        if any(r.verdict == "error" for r in self.results):
            return 2
        if any(r.verdict == "fail" for r in self.results):
            return 1
        return 0


def _system(doc: Document, ref, path: str):
    if ref not in doc.systems:
        raise L0LimitsError(f"{path}: unknown system {ref!r}")
    return doc.systems[ref]


def _limit_payload(presentation) -> Dict:
    return {
        "dims": {
            atom: fiber.dim
            for atom, fiber in zip(
                presentation.module.space.atom_ids, presentation.module.fibers
            )
        },
        "provenance": presentation.provenance,
        "canonical_maps": len(presentation.canonical),
    }


def _check_validate(doc, spec, rng):
    system = _system(doc, spec.params.get("system"), spec.name)
    if isinstance(system, DirectSystem):
        report = validate_direct_system(system)
    else:
        report = validate_inverse_system(system)
    witness = {
        "violations": [
            {
                "kind": v.kind,
                "indices": [str(i) for i in v.indices],
                "deviation": v.deviation,
                "detail": v.detail,
            }
            for v in report.violations
        ]
    }
    return ("pass" if report.passed else "fail"), witness, ("system-laws",)


def _check_direct_limit(doc, spec, rng):
    system = _system(doc, spec.params.get("system"), spec.name)
    presentation = direct_limit(system)
    witness = _limit_payload(presentation)
    outcome = "pass"
    if spec.params.get("expect_zero") and any(
        f.dim != 0 for f in presentation.module.fibers
    ):
        outcome = "fail"
        witness["reason"] = "expected a zero limit module"
    expected_dims = spec.params.get("expect_dims")
    if expected_dims is not None:
        actual = witness["dims"]
        if {k: int(v) for k, v in expected_dims.items()} != actual:
            outcome = "fail"
            witness["reason"] = f"expected dims {expected_dims}, got {actual}"
    return outcome, witness, (presentation.provenance,)


def _check_inverse_limit(doc, spec, rng):
    system = _system(doc, spec.params.get("system"), spec.name)
    presentation = inverse_limit(system)
    witness = _limit_payload(presentation)
    outcome = "pass"
    if spec.params.get("expect_zero") and any(
        f.dim != 0 for f in presentation.module.fibers
    ):
        outcome = "fail"
        witness["reason"] = "expected a zero limit module"
    return outcome, witness, (presentation.provenance,)


def _check_greatest(doc, spec, rng):
    ref = spec.params.get("index_set")
    if ref not in doc.index_sets:
        raise L0LimitsError(f"unknown index set {ref!r}")
    index = doc.index_sets[ref]
    if not isinstance(index, FinitePoset):
        raise L0LimitsError("greatest-element applies to finite posets")
    top = greatest_element(index)
    ok = all(index.leq(e, top) for e in index.elements)
    return ("pass" if ok else "fail"), {"top": top}, ("greatest-element",)


def _check_universal_direct(doc, spec, rng):
    system = _system(doc, spec.params.get("system"), spec.name)
    module = doc.modules[spec.params["target_module"]]
    maps = {}
    for key, ref in spec.params.get("target_maps", {}).items():
        idx = int(key) if not isinstance(system.index, FinitePoset) else key
        maps[idx] = doc.morphisms[ref]
    mediating = dl_universal_factorization(system, Target(module, maps))
    presentation = direct_limit(system)
    worst = max(
        morphism_deviation(
            _compose_mediating(mediating, presentation.canonical[i]), maps[i]
        )
        for i in system.index.explicit_indices()
    )
    return "pass", {"max_square_deviation": worst}, ("universal-property",)


def _compose_mediating(mediating, canonical):
    from ..modules import compose

    return compose(mediating, canonical)


def _check_universal_inverse(doc, spec, rng):
    system = _system(doc, spec.params.get("system"), spec.name)
    module = doc.modules[spec.params["source_module"]]
    maps = {}
    for key, ref in spec.params.get("source_maps", {}).items():
        idx = int(key) if not isinstance(system.index, FinitePoset) else key
        maps[idx] = doc.morphisms[ref]
    mediating = il_universal_factorization(system, Source(module, maps))
    presentation = inverse_limit(system)
    from ..modules import compose

    worst = max(
        morphism_deviation(compose(presentation.canonical[i], mediating), maps[i])
        for i in system.index.explicit_indices()
    )
    return "pass", {"max_triangle_deviation": worst}, ("universal-property",)


def _functor_of(theta: SystemMorphism):
    if isinstance(theta.source, DirectSystem):
        return dl_functor(theta)
    from ..inverse import il_functor

    return il_functor(theta)


def _check_functor_square(doc, spec, rng):
    params = spec.params
    if "solve" in params:
        solve = params["solve"]
        source = _system(doc, solve.get("source_system"), spec.name)
        target = _system(doc, solve.get("target_system"), spec.name)
        fixed = {}
        for key, ref in solve.get("given", {}).items():
            idx = int(key) if not isinstance(source.index, FinitePoset) else key
            fixed[idx] = doc.morphisms[ref]
        stage = solve.get("solve_for")
        idx = int(stage) if not isinstance(source.index, FinitePoset) else stage
        solution = solve_square_component(source, target, fixed, idx)
        witness = {"residual": solution.residual, "detail": solution.witness}
        return ("pass" if solution.exists else "fail"), witness, ("square-solvability",)
    first = doc.system_morphisms[params["first"]]
    outcome = "pass"
    witness: Dict = {}
    for name, theta in (("first", first),):
        report = validate_system_morphism(theta)
        if not report.passed:
            outcome = "fail"
            witness[f"{name}_violations"] = len(report.violations)
    image_first = _functor_of(first)
    witness["limit_map_dims"] = [list(m.shape) for m in image_first.matrices]
    if "second" in params:
        second = doc.system_morphisms[params["second"]]
        image_second = _functor_of(second)
        components_differ = any(
            morphism_deviation(first.components[i], second.components[i]) > tolerance()
            for i in first.components
        )
        dev = morphism_deviation(image_first, image_second)
        witness["components_differ"] = components_differ
        witness["limit_image_deviation"] = dev
        witness["images_equal"] = bool(dev <= tolerance())
        if params.get("expect_equal_images", True) and dev > tolerance():
            outcome = "fail"
        if params.get("require_components_differ") and not components_differ:
            outcome = "fail"
    return outcome, witness, ("limit-functor",)


def _check_surjectivity(doc, spec, rng):
    theta = doc.system_morphisms[spec.params["morphism"]]
    report = check_surjectivity_preservation(theta)
    witness = {
        "stages_surjective": report.stages_have_property,
        "limit_surjective": report.limit_has_property,
        "detail": report.witness,
    }
    ok = report.stages_have_property and report.limit_has_property
    return ("pass" if ok else "fail"), witness, ("image-preservation",)


def _check_injectivity(doc, spec, rng):
    theta = doc.system_morphisms[spec.params["morphism"]]
    report = check_injectivity_preservation(theta)
    witness = {
        "stages_injective": report.stages_have_property,
        "limit_injective": report.limit_has_property,
        "detail": report.witness,
    }
    ok = report.stages_have_property and report.limit_has_property
    return ("pass" if ok else "fail"), witness, ("kernel-preservation",)


def _check_pullback_commute(doc, spec, rng):
    system = _system(doc, spec.params.get("system"), spec.name)
    atom_map = doc.atom_maps[spec.params["atom_map"]]
    report = pb.dl_pullback_iso(atom_map, system, rng=rng)
    witness = {
        "bijective": report.certificate.bijective,
        "max_norm_deviation": report.certificate.max_norm_deviation,
        "limit_dims": {
            a: f.dim
            for a, f in zip(
                report.limit_of_pulled.module.space.atom_ids,
                report.limit_of_pulled.module.fibers,
            )
        },
    }
    return ("pass" if report.ok else "fail"), witness, ("pullback-commute",)


def _check_sections_iso(doc, spec, rng):
    z = doc.spaces[spec.params["factor_space"]]
    module = doc.modules[spec.params["module"]]
    report = pb.sections_iso(z, module, rng=rng)
    witness = {
        "norm_identity_exact": report.norm_identity_exact,
        "constant_section_matches": report.constant_section_matches,
        "bijective": report.certificate.bijective,
    }
    return ("pass" if report.ok else "fail"), witness, ("sections-iso",)


def _check_dual_iso(doc, spec, rng):
    system = _system(doc, spec.params.get("system"), spec.name)
    result = dual_limit_iso(system, rng=rng)
    cert = result.certificate
    witness = {
        "bijective": cert.bijective,
        "max_norm_deviation": cert.max_norm_deviation,
    }
    return ("pass" if cert.ok else "fail"), witness, ("dual-of-limit",)


def _check_hom_iso(doc, spec, rng):
    system = _system(doc, spec.params.get("system"), spec.name)
    fixed = doc.modules[spec.params["module"]]
    result = hom_inverse_system(system, fixed, rng=rng)
    cert = result.certificate
    witness = {
        "bijective": cert.bijective,
        "max_norm_deviation": cert.max_norm_deviation,
    }
    return ("pass" if cert.ok else "fail"), witness, ("hom-of-limit",)


def _check_il_pullback(doc, spec, rng):
    system = _system(doc, spec.params.get("system"), spec.name)
    atom_map = doc.atom_maps[spec.params["atom_map"]]
    report = pb.il_pullback_compare(atom_map, system, rng=rng)
    witness = {
        "isomorphic_on_instance": report.ok,
        "max_norm_deviation": report.certificate.max_norm_deviation,
        "note": report.note,
    }
    return ("pass" if report.ok else "fail"), witness, ("il-pullback-compare",)


_DISPATCH = {
    "validate-system": _check_validate,
    "direct-limit": _check_direct_limit,
    "inverse-limit": _check_inverse_limit,
    "universal-direct": _check_universal_direct,
    "universal-inverse": _check_universal_inverse,
    "functor-square": _check_functor_square,
    "pullback-commute": _check_pullback_commute,
    "sections-iso": _check_sections_iso,
    "dual-iso": _check_dual_iso,
    "hom-iso": _check_hom_iso,
    "greatest-element": _check_greatest,
    "surjectivity-preserved": _check_surjectivity,
    "injectivity-preserved": _check_injectivity,
    "il-pullback-compare": _check_il_pullback,
}

CHECK_KINDS = tuple(sorted(_DISPATCH))


def run_check(doc: Document, spec: CheckSpec, global_seed: int = 0) -> CheckResult:
    """Run one check deterministically under its (possibly overridden)
    tolerance and a seed derived from the global seed and the check."""
    if spec.kind not in _DISPATCH:
        return CheckResult(
            spec.name,
            spec.kind,
            "error",
            "error",
            spec.expect,
            {"reason": f"unknown check kind {spec.kind!r}"},
        )
    seed = global_seed if spec.seed is None else spec.seed
    rng = np.random.default_rng(
        np.random.SeedSequence([seed, zlib.crc32(spec.name.encode("utf-8"))])
    )
    start = time.perf_counter()
    tol = spec.tol if spec.tol is not None else tolerance()
    try:
        with tolerance_override(tol):
            raw, witness, provenance = _DISPATCH[spec.kind](doc, spec, rng)
    except L0LimitsError as exc:
        raw, witness, provenance = "error", {"reason": str(exc)}, ("error",)
    except Exception as exc:  # malformed parameters, unresolved ids, ...
        raw = "error"
        witness = {"reason": f"{type(exc).__name__}: {exc}"}
        provenance = ("error",)
    duration = time.perf_counter() - start
    if raw == "error":
        verdict = "error"
    else:
        verdict = "pass" if raw == spec.expect else "fail"
    return CheckResult(
        spec.name, spec.kind, raw, verdict, spec.expect, witness, provenance, duration
    )


def run_checks(
    doc: Document,
    checks: Optional[List[CheckSpec]] = None,
    seed: int = 0,
    document_name: str = "<memory>",
) -> RunReport:
    checks = doc.checks if checks is None else checks
    results = [run_check(doc, spec, seed) for spec in checks]
    results.sort(key=lambda r: r.name)
    return RunReport(tolerance(), seed, document_name, results)


def render_text(report: RunReport) -> str:
    lines = [
        "check report",
        f"tolerance: {report.tolerance:g}   seed: {report.seed}   "
        f"document: {report.document}",
    ]
    for r in report.results:
        flag = {"pass": "PASS", "fail": "FAIL", "error": "ERR "}[r.verdict]
        extra = ""
        if r.raw_outcome != r.verdict and r.verdict == "pass":
            extra = f"  (fails as designed: {_shorten(r.witness)})"
        elif r.verdict != "pass":
            extra = f"  witness: {_shorten(r.witness)}"
        lines.append(f"[{flag}] {r.name}  ({r.kind})  {r.duration:.3f}s{extra}")
    counts = _summary(report)
    lines.append(
        f"summary: {counts['pass']} passed, {counts['fail']} failed, "
        f"{counts['error']} errors"
    )
    for note in SCOPE_NOTES:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def _shorten(witness: Dict, limit: int = 200) -> str:
    text = json.dumps(witness, sort_keys=True, default=str)
    return text if len(text) <= limit else text[: limit - 3] + "..."


def _summary(report: RunReport) -> Dict[str, int]:
    counts = {"pass": 0, "fail": 0, "error": 0}
    for r in report.results:
        counts[r.verdict] += 1
    return counts


def render_structured(report: RunReport) -> str:
    """Machine-diffable rendering; identical inputs give identical bytes,
    so wall-clock durations are deliberately omitted."""
    payload = {
        "format_version": 1,
        "tolerance": report.tolerance,
        "seed": report.seed,
        "document": report.document,
        "checks": [
            {
                "name": r.name,
                "kind": r.kind,
                "raw_outcome": r.raw_outcome,
                "verdict": r.verdict,
                "expected": r.expected,
                "witness": r.witness,
                "provenance": list(r.provenance),
            }
            for r in report.results
        ],
        "summary": _summary(report),
        "notes": list(SCOPE_NOTES),
    }
    return json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"
