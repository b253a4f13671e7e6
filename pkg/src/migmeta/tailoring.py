"""Derive situation-specific metamodels: additive extension, specialization, subset selection.

Every operation returns a new :class:`Metamodel` and refuses to produce one that
has validation errors.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Iterable

from .core import Concept, Metamodel, MigmetaError, ancestors, errors_only, validate_metamodel
from .dsl import MetamodelExtension


class TailoringOp(enum.Enum):
    EXTEND = "extend"
    SPECIALIZE = "specialize"
    SUBSET = "subset"


@dataclass(frozen=True)
class TailoringLogEntry:
    operation: TailoringOp
    from_version: str
    to_version: str
    summary: str

    def __post_init__(self):
        if self.from_version == self.to_version:
            raise ValueError("a tailoring step must change the version")

    def __str__(self):
        return f"{self.operation.value} {self.from_version} -> {self.to_version}: {self.summary}"


class TailoringLog:
    """Append-only record of tailoring steps."""

    def __init__(self):
        self._entries: list[TailoringLogEntry] = []

    def record(self, entry: TailoringLogEntry) -> None:
        self._entries.append(entry)

    @property
    def entries(self) -> tuple[TailoringLogEntry, ...]:
        return tuple(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def lines(self) -> list[str]:
        return [str(e) for e in self._entries]


def _checked(m: Metamodel) -> Metamodel:
    errors = errors_only(validate_metamodel(m))
    if errors:
        raise MigmetaError(
            "INVALID_RESULT",
            f"derived metamodel {m.version} is not well-formed: " + "; ".join(str(d) for d in errors),
            errors,
        )
    return m


def merge_extension(m: Metamodel, e: MetamodelExtension) -> Metamodel:
    """Union of ``m`` and ``e`` without validating the result.

    Raises ``BASE_MISMATCH`` or ``EXTENSION_CONFLICT`` only.
    """
    if e.base != m.version:
        raise MigmetaError("BASE_MISMATCH", f"extension {e.name!r} extends {e.base!r}, metamodel is {m.version!r}")
    clashes = [c.id for c in e.new_concepts if c.id in m.concepts]
    if clashes:
        raise MigmetaError("EXTENSION_CONFLICT", f"concept id(s) already defined: {', '.join(clashes)}")
    dup_rels = sorted(str(r) for r in e.new_relationships & m.relationships)
    if dup_rels:
        raise MigmetaError("EXTENSION_CONFLICT", f"relationship(s) already defined: {', '.join(dup_rels)}")
    concepts = dict(m.concepts)
    concepts.update((c.id, c) for c in e.new_concepts)
    return Metamodel(e.name, concepts, m.relationships | e.new_relationships)


def apply_extension(m: Metamodel, e: MetamodelExtension, log: TailoringLog | None = None) -> Metamodel:
    result = _checked(merge_extension(m, e))
    if log is not None and result.version != m.version:
        added = [c.id for c in e.new_concepts]
        summary = f"added {len(added)} concept(s)"
        if added:
            summary += f" ({', '.join(added)})"
        summary += f" and {len(e.new_relationships)} relationship(s)"
        log.record(TailoringLogEntry(TailoringOp.EXTEND, m.version, result.version, summary))
    return result


def closure(m: Metamodel, keep: Iterable[str]) -> set[str]:
    """``keep`` plus every ancestor of a kept concept plus every phase concept."""
    out: set[str] = set()
    for cid in keep:
        out.add(cid)
        out.update(ancestors(m, cid))
    out.update(p.id for p in m.phases)
    return out


def select_subset(
    m: Metamodel,
    keep: Iterable[str],
    name: str = "subset",
    log: TailoringLog | None = None,
) -> Metamodel:
    keep = list(keep)
    if not keep:
        raise MigmetaError("EMPTY_SELECTION", "at least one concept must be selected")
    unknown = sorted({k for k in keep if k not in m.concepts})
    if unknown:
        raise MigmetaError("UNKNOWN_CONCEPT", f"not in metamodel {m.version}: {', '.join(unknown)}")
    kept = closure(m, keep)
    result = _checked(Metamodel(
        f"{m.version}+{name}",
        {cid: c for cid, c in m.concepts.items() if cid in kept},
        {r for r in m.relationships if r.source in kept and r.target in kept},
    ))
    if log is not None:
        log.record(TailoringLogEntry(
            TailoringOp.SUBSET, m.version, result.version,
            f"kept {len(result.concepts)} of {len(m.concepts)} concepts",
        ))
    return result


def specialize(m: Metamodel, parent: str, child: Concept, log: TailoringLog | None = None) -> Metamodel:
    base = m.lookup(parent)
    if child.id in m.concepts:
        raise MigmetaError("ID_COLLISION", f"{child.id} already exists in metamodel {m.version}")
    if base.is_phase or child.kind is not base.kind:
        raise MigmetaError(
            "KIND_MISMATCH", f"{child.id} is a {child.kind.value} but {parent} is a {base.kind.value}",
        )
    child = replace(child, parent=parent, phase=child.phase or base.phase)
    concepts = dict(m.concepts)
    concepts[child.id] = child
    result = _checked(Metamodel(f"{m.version}+{child.id}", concepts, m.relationships))
    if log is not None:
        log.record(TailoringLogEntry(
            TailoringOp.SPECIALIZE, m.version, result.version, f"{child.id} specializes {parent}",
        ))
    return result
