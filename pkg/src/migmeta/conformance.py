"""Conformance of instance models to a metamodel, coverage matrices and model diffs."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .canonical import BUILTIN_REFS, BUILTIN_VERSIONS
from .core import Metamodel, MigmetaError, Relationship, RelationshipKind, ancestors, phase_chain, relationship_exists
from .dsl import InstanceModel

VIOLATION_CODES = frozenset({
    "UNMATCHED_CONCEPT",
    "ILLEGAL_EDGE",
    "PHASE_ORDER_BROKEN",
    "UNKNOWN_METAMODEL_VERSION",
})


@dataclass(frozen=True)
class Violation:
    code: str
    subject: str
    detail: str
    concept: str | None = None

    def __str__(self):
        head = f"{self.code}({self.concept})" if self.concept else self.code
        return f"{head} {self.subject}: {self.detail}"


@dataclass(frozen=True)
class ConformanceReport:
    model_name: str
    metamodel_version: str
    violations: tuple[Violation, ...]
    covered_concepts: frozenset[str]

    @property
    def conformant(self) -> bool:
        return not self.violations

    def codes(self) -> list[str]:
        return [v.code for v in self.violations]


class NotApplicable(enum.Enum):
    """Marker for a relationship cell whose endpoint concept was never instantiated."""

    NA = "NA"

    def __repr__(self):
        return "NA"


NA = NotApplicable.NA


@dataclass(frozen=True)
class CoverageMatrix:
    rows: tuple[str, ...]
    columns: tuple[str, ...]
    cells: tuple[tuple[bool | NotApplicable, ...], ...]
    row_header: str = "concept"

    def __post_init__(self):
        if len(self.cells) != len(self.rows) or any(len(r) != len(self.columns) for r in self.cells):
            raise ValueError("cell grid does not match rows x columns")

    def cell(self, row: str, column: str | int) -> bool | NotApplicable:
        col = column if isinstance(column, int) else self.columns.index(column)
        return self.cells[self.rows.index(row)][col]

    def row(self, row: str) -> tuple[bool | NotApplicable, ...]:
        return self.cells[self.rows.index(row)]


@dataclass(frozen=True)
class ModelDiff:
    only_in_a: frozenset[str]
    only_in_b: frozenset[str]
    shared: frozenset[str]
    edges_only_in_a: frozenset[Relationship]
    edges_only_in_b: frozenset[Relationship]

    @property
    def identical_coverage(self) -> bool:
        return not self.only_in_a and not self.only_in_b


class ConformanceError(MigmetaError):
    def __init__(self, report: ConformanceReport):
        detail = "; ".join(str(v) for v in report.violations)
        super().__init__("NONCONFORMANT_MODEL", f"model {report.model_name!r} does not conform: {detail}")
        self.report = report


def version_resolves(reference: str, m: Metamodel) -> bool:
    """A reference resolves if it names a built-in version, ``m`` itself, or a base ``m`` was derived from."""
    if reference in BUILTIN_VERSIONS or reference in BUILTIN_REFS or reference == m.version:
        return True
    return m.version.startswith(reference + "+")


def resolve_activities(m: Metamodel, i: InstanceModel) -> dict[str, str | None]:
    """Activity id -> registered concept id (aliases resolved), or None when unmatched."""
    aliases = m.alias_index()
    out = {}
    for a in i.activities.values():
        out[a.id] = a.instance_of if a.instance_of in m.concepts else aliases.get(a.instance_of)
    return out


def check_conformance(m: Metamodel, i: InstanceModel, strict_edges: bool = False) -> ConformanceReport:
    violations: list[Violation] = []
    if not version_resolves(i.conforms_to, m):
        violations.append(Violation(
            "UNKNOWN_METAMODEL_VERSION", i.name,
            f"conforms to {i.conforms_to!r}, which is neither built in nor an ancestor of {m.version!r}",
        ))

    resolved = resolve_activities(m, i)
    covered: set[str] = set()
    for activity in i.activities.values():
        concept = resolved[activity.id]
        if concept is None:
            violations.append(Violation(
                "UNMATCHED_CONCEPT", activity.id,
                f"instance-of {activity.instance_of} is not a concept of metamodel {m.version}",
                concept=activity.instance_of,
            ))
            continue
        covered.add(concept)
        covered.update(ancestors(m, concept))

    rank = {p: n for n, p in enumerate(phase_chain(m))}
    for edge in i.sorted_edges():
        src, dst = resolved.get(edge.source), resolved.get(edge.target)
        if src is None or dst is None:
            continue
        if edge.kind is RelationshipKind.USES and strict_edges:
            if not relationship_exists(m, RelationshipKind.USES, src, dst, lift_to_ancestors=True):
                violations.append(Violation(
                    "ILLEGAL_EDGE", str(edge),
                    f"metamodel has no uses relationship from {src} (or an ancestor) to {dst} (or an ancestor)",
                ))
        elif edge.kind is RelationshipKind.FOLLOWS:
            src_phase, dst_phase = _phase(m, src), _phase(m, dst)
            if src_phase in rank and dst_phase in rank and rank[src_phase] > rank[dst_phase]:
                violations.append(Violation(
                    "PHASE_ORDER_BROKEN", str(edge),
                    f"{src} ({src_phase}) cannot come before {dst} ({dst_phase})",
                ))

    return ConformanceReport(i.name, m.version, tuple(violations), frozenset(covered))


def _phase(m: Metamodel, concept_id: str) -> str | None:
    c = m.concepts[concept_id]
    return c.id if c.is_phase else c.phase


def _matched_report(m: Metamodel, i: InstanceModel) -> ConformanceReport:
    report = check_conformance(m, i)
    if any(v.code == "UNMATCHED_CONCEPT" for v in report.violations):
        raise ConformanceError(report)
    return report


def _ordered_rows(m: Metamodel, row_filter: Iterable[str] | None) -> tuple[str, ...]:
    if row_filter is None:
        return tuple(m.concepts)
    if isinstance(row_filter, (set, frozenset)):
        rows = [cid for cid in m.concepts if cid in row_filter]
        missing = sorted(set(row_filter) - set(rows))
    else:
        rows = list(dict.fromkeys(row_filter))
        missing = [r for r in rows if r not in m.concepts]
    if missing:
        raise MigmetaError("UNKNOWN_CONCEPT", f"unknown row concept(s): {', '.join(missing)}")
    return tuple(rows)


def coverage_matrix(
    m: Metamodel,
    models: Sequence[InstanceModel],
    row_filter: Iterable[str] | None = None,
) -> CoverageMatrix:
    """Concept-by-model grid: a cell is True when the model instantiates the concept or a descendant.

    Rows follow ``row_filter`` order (metamodel order when it is a set or None).
    """
    rows = _ordered_rows(m, row_filter)
    reports = [_matched_report(m, i) for i in models]
    cells = tuple(tuple(row in rep.covered_concepts for rep in reports) for row in rows)
    return CoverageMatrix(rows, tuple(i.name for i in models), cells)


def lifted(m: Metamodel, concept_id: str) -> set[str]:
    """The concept, its ancestors, and its owning phase."""
    out = {concept_id, *ancestors(m, concept_id)}
    phase = _phase(m, concept_id)
    if phase is not None:
        out.add(phase)
    return out


def relationship_coverage(
    m: Metamodel,
    models: Sequence[InstanceModel],
    rels: Sequence[Relationship],
) -> CoverageMatrix:
    """Relationship-by-model grid.

    A cell is True when the model has an edge of the same kind whose endpoint
    concepts lift (through ancestors or phase membership) onto the relationship
    endpoints, and ``NA`` when either endpoint is not reached by any activity.
    """
    for r in rels:
        if r not in m.relationships:
            raise MigmetaError("UNKNOWN_RELATIONSHIP", f"{r} is not a relationship of metamodel {m.version}")
    columns = []
    for i in models:
        _matched_report(m, i)
        resolved = resolve_activities(m, i)
        lifts = {aid: lifted(m, cid) for aid, cid in resolved.items() if cid is not None}
        reached = set().union(*lifts.values()) if lifts else set()
        column = []
        for r in rels:
            if r.source not in reached or r.target not in reached:
                column.append(NA)
                continue
            column.append(any(
                e.kind is r.kind
                and r.source in lifts.get(e.source, ())
                and r.target in lifts.get(e.target, ())
                for e in i.edges
            ))
        columns.append(column)
    cells = tuple(tuple(col[n] for col in columns) for n in range(len(rels)))
    return CoverageMatrix(tuple(str(r) for r in rels), tuple(i.name for i in models), cells, "relationship")


def _concept_edges(m: Metamodel, i: InstanceModel) -> set[Relationship]:
    resolved = resolve_activities(m, i)
    out = set()
    for e in i.edges:
        src, dst = resolved.get(e.source), resolved.get(e.target)
        if src and dst:
            out.add(Relationship(e.kind, src, dst))
    return out


def diff_models(a: InstanceModel, b: InstanceModel, m: Metamodel) -> ModelDiff:
    """Compare two models by the concepts they cover and the concept-level edges they draw."""
    cov_a = _matched_report(m, a).covered_concepts
    cov_b = _matched_report(m, b).covered_concepts
    edges_a, edges_b = _concept_edges(m, a), _concept_edges(m, b)
    return ModelDiff(
        only_in_a=frozenset(cov_a - cov_b),
        only_in_b=frozenset(cov_b - cov_a),
        shared=frozenset(cov_a & cov_b),
        edges_only_in_a=frozenset(edges_a - edges_b),
        edges_only_in_b=frozenset(edges_b - edges_a),
    )
