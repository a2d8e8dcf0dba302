"""Assembly of analysis reports: curvature samples, Dupin check, reducibility and criterion."""

import json
import time
from contextlib import contextmanager
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Sequence

import numpy as np

from opengov_liesphere import __version__
from opengov_liesphere.config import settings
from opengov_liesphere.core.curvature import curvature_at, lie_curvature_profile
from opengov_liesphere.core.dupin import (
    dupin_verify,
    isoparametric_criterion,
    reducibility_test,
    snake_grid,
    track,
)
from opengov_liesphere.core.errors import InvalidArgumentError, LieSphereError
from opengov_liesphere.core.legendre import LegendreMap
from opengov_liesphere.core.models import (
    AnalysisReport,
    CriterionResult,
    CriterionSection,
    CurvatureAtPoint,
    PointRecord,
    ReducibilitySection,
)
from opengov_liesphere.utils.logger import get_logger

logger = get_logger(__name__)


class Criterion(str, Enum):
    DUPIN = "dupin"
    REDUCE = "reduce"
    ISOPARA = "isopara"
    LIE = "lie"


DEFAULT_CRITERIA = (Criterion.DUPIN, Criterion.REDUCE, Criterion.ISOPARA)


def parse_criteria(text: Optional[str]) -> List[Criterion]:
    """Comma-separated criterion names; empty or None gives the default set."""
    if not text:
        return list(DEFAULT_CRITERIA)
    chosen: List[Criterion] = []
    for item in (s.strip() for s in text.split(",")):
        if not item:
            continue
        try:
            criterion = Criterion(item)
        except ValueError as exc:
            known = ", ".join(c.value for c in Criterion)
            raise InvalidArgumentError(f"unknown criterion {item!r} (known: {known})") from exc
        if criterion not in chosen:
            chosen.append(criterion)
    return chosen


def parse_grid(text: Optional[str], dim: int, default: int) -> List[int]:
    """"20x20x20" style sample counts; a single number is repeated on every axis."""
    if not text:
        return [default] * dim
    try:
        counts = [int(part) for part in text.lower().split("x")]
    except ValueError as exc:
        raise InvalidArgumentError(f"malformed grid {text!r}") from exc
    if len(counts) == 1:
        counts = counts * dim
    if len(counts) != dim or min(counts) < 1:
        raise InvalidArgumentError(f"grid {text!r} does not fit a {dim}-parameter domain")
    return counts


def _finite(value: float) -> Optional[float]:
    return float(value) if np.isfinite(value) else None


def point_record(point: CurvatureAtPoint) -> PointRecord:
    return PointRecord(
        b=list(point.b),
        g=point.g,
        multiplicities=list(point.multiplicities),
        curvatures=[_finite(s.r) for s in point.spheres],
        stable=point.stable,
    )


def criterion_section(result: CriterionResult) -> CriterionSection:
    """Report form of a criterion result; the Gram is rescaled so its diagonal averages -4."""
    if result.witness is None:
        return CriterionSection(
            verdict=result.verdict,
            lower_bound=result.lower_bound,
            bound_kind=result.bound_kind,
            nullspace_dims=list(result.nullspace_dims),
        )
    gram = np.asarray(result.witness.gram)
    normalized = gram * (-4.0 / float(np.mean(np.diag(gram))))
    return CriterionSection(
        verdict=result.verdict,
        gram=gram.tolist(),
        normalized_gram=normalized.tolist(),
        residual=result.witness.residuals,
        nullspace_dims=list(result.nullspace_dims),
    )


class _Stopwatch:
    def __init__(self) -> None:
        self.sections: Dict[str, float] = {}

    @contextmanager
    def section(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.sections[name] = time.perf_counter() - start


def analyze(
    L: LegendreMap,
    counts: Sequence[int],
    criteria: Sequence[Criterion] = DEFAULT_CRITERIA,
    descriptor: Optional[Dict[str, Any]] = None,
    timing: bool = False,
) -> AnalysisReport:
    """Run the selected criteria on a sample grid.

    Failures of one criterion are recorded in ``errors`` as "code: message" and the
    remaining sections are still computed, so a failed run yields a partial report.
    """
    counts = list(counts)
    watch = _Stopwatch()
    errors: List[str] = []
    sections: Dict[str, Any] = {}
    points: List[CurvatureAtPoint] = []

    def record(exc: LieSphereError) -> None:
        logger.error("analysis_step_failed", code=exc.code, error=str(exc))
        errors.append(str(exc))

    if Criterion.DUPIN in criteria:
        with watch.section("dupin"):
            try:
                outcome = dupin_verify(L, counts)
                sections["dupin"] = outcome.section
                points = outcome.points
            except LieSphereError as exc:
                record(exc)

    tracked: Optional[List[CurvatureAtPoint]] = None
    if Criterion.REDUCE in criteria or Criterion.ISOPARA in criteria:
        with watch.section("tracking"):
            try:
                tracked = track(L, snake_grid(L.domain, counts))
            except LieSphereError as exc:
                record(exc)

    if tracked:
        if Criterion.REDUCE in criteria:
            with watch.section("reduce"):
                try:
                    verdict, spans = reducibility_test(L, None, tracked=tracked)
                    sections["reducibility"] = ReducibilitySection(
                        verdict=verdict,
                        span_dims=[s.dim for s in spans],
                        signatures=[list(s.signature) for s in spans],
                        threshold=L.n + 1,
                    )
                except LieSphereError as exc:
                    record(exc)
        if Criterion.ISOPARA in criteria:
            with watch.section("isopara"):
                try:
                    result = isoparametric_criterion(L, None, tracked=tracked)
                    sections["isoparametric"] = criterion_section(result)
                except LieSphereError as exc:
                    record(exc)
        if not points:
            points = tracked

    if Criterion.LIE in criteria:
        with watch.section("lie"):
            try:
                sections["lie_curvature"] = lie_curvature_profile(
                    L, L.domain.grid(counts)
                )
            except LieSphereError as exc:
                record(exc)

    if not points and not errors:
        with watch.section("points"):
            try:
                points = [curvature_at(L, b) for b in L.domain.grid(counts)]
            except LieSphereError as exc:
                record(exc)

    report = AnalysisReport(
        schema_version=settings.report_schema,
        tool_version=__version__,
        input={**(descriptor or {}), "grid": counts, "criteria": [c.value for c in criteria]},
        settings=settings.model_dump(),
        points=sorted((point_record(p) for p in points), key=lambda r: r.b),
        errors=errors,
        timing=dict(watch.sections) if timing else None,
        **sections,
    )
    logger.info("analysis_complete", label=L.label, points=len(points), errors=len(errors))
    return report


def report_json(report: AnalysisReport) -> str:
    """Stable serialization: sorted keys, two-space indent, trailing newline."""
    return json.dumps(report.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def summary_line(report: AnalysisReport) -> str:
    parts = [f"points={len(report.points)}"]
    if report.points:
        parts.append("g=" + ",".join(str(g) for g in sorted({p.g for p in report.points})))
    if report.dupin is not None:
        parts.append(f"dupin={report.dupin.verdict.value}")
    if report.reducibility is not None:
        parts.append(f"reducibility={report.reducibility.verdict.value}")
    if report.isoparametric is not None:
        parts.append(f"isoparametric={report.isoparametric.verdict.value}")
    if report.errors:
        parts.append(f"errors={len(report.errors)}")
    return " ".join(parts)
