"""Text renderings: Graphviz DOT, CSV/markdown coverage tables and markdown checklists."""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from typing import Union

from .conformance import NA, CoverageMatrix
from .core import Metamodel, RelationshipKind, phase_chain
from .dsl import InstanceModel
from .jsonio import export_json


class RenderFormat(enum.Enum):
    DOT = "dot"
    CSV = "csv"
    CHECKLIST = "checklist"
    JSON = "json"


@dataclass(frozen=True)
class RenderOptions:
    format: RenderFormat = RenderFormat.DOT
    include_definitions: bool = False
    phase_clusters: bool = True


def _q(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\r", "").replace("\n", "\\n")
    return f'"{escaped}"'


_EDGE_STYLE = {
    RelationshipKind.USES: 'style=solid, label="uses"',
    RelationshipKind.FOLLOWS: 'style=dashed, label="follows"',
}


def _metamodel_dot(m: Metamodel, opts: RenderOptions) -> str:
    lines = [
        f"digraph {_q('metamodel ' + m.version)} {{",
        "  graph [rankdir=LR, fontname=Helvetica];",
        "  node [shape=box, fontname=Helvetica];",
    ]

    def node(c, indent):
        attrs = [f"label={_q(c.display_name)}"]
        if c.is_phase:
            attrs.append("shape=tab")
        if opts.include_definitions and c.definition:
            attrs.append(f"tooltip={_q(c.definition)}")
        lines.append(f"{indent}{_q(c.id)} [{', '.join(attrs)}];")

    chain = phase_chain(m)
    placed: set[str] = set()
    if opts.phase_clusters:
        for phase in chain:
            members = [c for c in m if c.id == phase or (not c.is_phase and c.phase == phase)]
            lines.append(f"  subgraph {_q('cluster_' + phase)} {{")
            lines.append(f"    label={_q(m.concepts[phase].display_name)};")
            for c in members:
                node(c, "    ")
                placed.add(c.id)
            lines.append("  }")
    else:
        rank = {p: n for n, p in enumerate(chain)}
        ordered = sorted(m, key=lambda c: rank.get(c.id if c.is_phase else c.phase, len(rank)))
        for c in ordered:
            node(c, "  ")
            placed.add(c.id)
    for c in m:
        if c.id not in placed:
            node(c, "  ")

    for r in m.sorted_relationships():
        style = _EDGE_STYLE.get(r.kind, f"label={_q(r.kind.value)}")
        lines.append(f"  {_q(r.source)} -> {_q(r.target)} [{style}];")
    for c in m:
        if c.parent is not None:
            lines.append(f"  {_q(c.id)} -> {_q(c.parent)} [arrowhead=empty];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _model_dot(i: InstanceModel, opts: RenderOptions) -> str:
    lines = [
        f"digraph {_q('model ' + i.name)} {{",
        "  graph [rankdir=LR, fontname=Helvetica];",
        "  node [shape=box, style=rounded, fontname=Helvetica];",
    ]
    for a in i.activities.values():
        attrs = [f"label={_q(a.id + chr(10) + '<<' + a.instance_of + '>>')}"]
        if opts.include_definitions and a.note:
            attrs.append(f"tooltip={_q(a.note)}")
        lines.append(f"  {_q(a.id)} [{', '.join(attrs)}];")
    for e in i.sorted_edges():
        lines.append(f"  {_q(e.source)} -> {_q(e.target)} [{_EDGE_STYLE[e.kind]}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_dot(x: Union[Metamodel, InstanceModel], opts: RenderOptions | None = None) -> str:
    """DOT digraph; uses edges solid, follows dashed, specialization with a hollow arrowhead."""
    opts = opts or RenderOptions()
    if isinstance(x, Metamodel):
        return _metamodel_dot(x, opts)
    if isinstance(x, InstanceModel):
        return _model_dot(x, opts)
    raise TypeError(f"cannot render {type(x).__name__} as DOT")


def to_checklist(m: Metamodel, opts: RenderOptions | None = None) -> str:
    """Markdown checklist: one section per phase in chain order, children indented under parents."""
    opts = opts or RenderOptions(RenderFormat.CHECKLIST, include_definitions=True)
    lines = [f"<!-- migration checklist, metamodel {m.version} -->"]
    for phase in phase_chain(m):
        members = [c for c in m if not c.is_phase and c.phase == phase]
        ids = {c.id for c in members}
        children: dict[str, list] = {}
        roots = []
        for c in members:
            if c.parent in ids:
                children.setdefault(c.parent, []).append(c)
            else:
                roots.append(c)
        lines.append("")
        lines.append(f"## {m.concepts[phase].display_name}")
        lines.append("")

        def emit(c, depth):
            pad = "  " * depth
            lines.append(f"{pad}- [ ] {c.display_name}")
            if opts.include_definitions and c.definition:
                lines.append(f"{pad}  {c.definition}")
            for child in children.get(c.id, ()):
                emit(child, depth + 1)

        for c in roots:
            emit(c, 0)
    return "\n".join(lines) + "\n"


def _cell_text(value) -> str:
    if value is NA:
        return "NA"
    return "1" if value else "0"


def coverage_to_csv(c: CoverageMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([c.row_header, *c.columns])
    for row, values in zip(c.rows, c.cells):
        writer.writerow([row, *(_cell_text(v) for v in values)])
    return buf.getvalue()


_MD_MARK = {True: "√", False: "×"}


def coverage_to_markdown(c: CoverageMatrix) -> str:
    lines = [
        "| " + " | ".join([c.row_header, *c.columns]) + " |",
        "|" + "---|" * (len(c.columns) + 1),
    ]
    for row, values in zip(c.rows, c.cells):
        marks = ["-" if v is NA else _MD_MARK[bool(v)] for v in values]
        lines.append("| " + " | ".join([row, *marks]) + " |")
    return "\n".join(lines) + "\n"


def render(x, opts: RenderOptions) -> str:
    if opts.format is RenderFormat.DOT:
        return to_dot(x, opts)
    if opts.format is RenderFormat.JSON:
        return export_json(x)
    if opts.format is RenderFormat.CHECKLIST:
        if not isinstance(x, Metamodel):
            raise TypeError("checklists are rendered from metamodels")
        return to_checklist(x, opts)
    if opts.format is RenderFormat.CSV:
        if not isinstance(x, CoverageMatrix):
            raise TypeError("CSV output is for coverage matrices")
        return coverage_to_csv(x)
    raise ValueError(opts.format)
