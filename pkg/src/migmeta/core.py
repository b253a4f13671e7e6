"""Metamodel data model, well-formedness checks and specialization queries.

A :class:`Metamodel` is an immutable registry of :class:`Concept` records plus a
set of explicit ``Uses``/``Follows`` relationships. Specialization and phase
membership are structural (``Concept.parent`` and ``Concept.phase``), never
stored as relationship records.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Mapping

IDENT_RE = re.compile(r"[A-Z][A-Za-z0-9]*\Z")


class ConceptKind(enum.Enum):
    TASK = "task"
    WORK_PRODUCT = "work-product"
    PRINCIPLE = "principle"
    PHASE = "phase"


class RelationshipKind(enum.Enum):
    USES = "uses"
    FOLLOWS = "follows"
    # Structural kinds: expressed through Concept.parent / Concept.phase only.
    SPECIALIZES = "specializes"
    PART_OF = "part-of"


EXPLICIT_KINDS = frozenset({RelationshipKind.USES, RelationshipKind.FOLLOWS})


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


class MigmetaError(Exception):
    """Operation failure carrying a machine-readable ``code``.

    ``diagnostics`` is filled for ``INVALID_RESULT`` so callers can show why a
    derived metamodel was rejected.
    """

    def __init__(self, code: str, message: str, diagnostics: Iterable["Diagnostic"] = ()):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.diagnostics = tuple(diagnostics)


def is_identifier(text: str) -> bool:
    return bool(IDENT_RE.match(text))


def to_identifier(name: str) -> str:
    """Turn a display name such as ``"Choose cloud provider"`` into ``ChooseCloudProvider``.

    Slashes and hyphens separate words; any other non-alphanumeric character is dropped.
    """
    words = re.split(r"[\s/\-]+", name.strip())
    parts = []
    for word in words:
        word = re.sub(r"[^A-Za-z0-9]", "", word)
        if word:
            parts.append(word[0].upper() + word[1:])
    return "".join(parts)


def humanize(identifier: str) -> str:
    """``"DefineRollBackPlan"`` -> ``"Define roll back plan"``."""
    words = re.findall(r"[A-Z][a-z0-9]*|[a-z0-9]+", identifier)
    if not words:
        return identifier
    out = [words[0]]
    for word in words[1:]:
        # keep acronyms like "DC" intact
        out.append(word if word.isupper() and len(word) > 1 else word.lower())
    return " ".join(out)


@dataclass(frozen=True)
class Concept:
    id: str
    display_name: str
    kind: ConceptKind
    definition: str
    phase: str | None = None
    parent: str | None = None
    aliases: tuple[str, ...] = ()

    @property
    def is_phase(self) -> bool:
        return self.kind is ConceptKind.PHASE


@dataclass(frozen=True)
class Relationship:
    kind: RelationshipKind
    source: str
    target: str

    def sort_key(self) -> tuple[str, str, str]:
        return (self.source, self.kind.value, self.target)

    def __str__(self):
        return f"{self.source} {self.kind.value} {self.target}"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    subject: str

    def __str__(self):
        return f"{self.severity.value}: {self.code} [{self.subject}] {self.message}"


# Closed set of metamodel diagnostic codes.
DIAGNOSTIC_CODES = {
    "BAD_IDENTIFIER": "concept id does not match [A-Z][A-Za-z0-9]*",
    "DANGLING_REFERENCE": "phase, parent or relationship endpoint does not resolve",
    "CYCLE_IN_SPECIALIZATION": "parent links form a cycle",
    "INVALID_PHASE": "phase assignment violates phase rules",
    "KIND_MISMATCH": "parent is a phase or has a different kind",
    "SELF_RELATIONSHIP": "relationship source equals target",
    "STRUCTURAL_RELATIONSHIP": "specializes/part-of stored as an explicit relationship",
    "PHASE_CHAIN_BROKEN": "phase follows edges are not a single linear chain",
    "EMPTY_DEFINITION": "concept definition is empty",
    "DUPLICATE_NAME": "display name reused (case-insensitive)",
}
ERROR_CODES = frozenset(DIAGNOSTIC_CODES) - {"EMPTY_DEFINITION", "DUPLICATE_NAME"}


@dataclass(frozen=True)
class Metamodel:
    version: str
    concepts: Mapping[str, Concept]
    relationships: frozenset[Relationship] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "concepts", dict(self.concepts))
        object.__setattr__(self, "relationships", frozenset(self.relationships))

    __hash__ = None  # type: ignore[assignment]

    def __contains__(self, concept_id: str) -> bool:
        return concept_id in self.concepts

    def __iter__(self) -> Iterator[Concept]:
        return iter(self.concepts.values())

    def __len__(self) -> int:
        return len(self.concepts)

    def get(self, concept_id: str) -> Concept | None:
        return self.concepts.get(concept_id)

    def lookup(self, concept_id: str) -> Concept:
        try:
            return self.concepts[concept_id]
        except KeyError:
            raise MigmetaError("UNKNOWN_CONCEPT", f"{concept_id!r} is not a concept of metamodel {self.version}") from None

    @property
    def phases(self) -> list[Concept]:
        return [c for c in self.concepts.values() if c.is_phase]

    def sorted_relationships(self) -> list[Relationship]:
        return sorted(self.relationships, key=Relationship.sort_key)

    def with_version(self, version: str) -> "Metamodel":
        return replace(self, version=version)

    def same_structure(self, other: "Metamodel") -> bool:
        """Equal concepts and relationships; the version string is ignored."""
        return self.concepts == other.concepts and self.relationships == other.relationships

    def alias_index(self) -> dict[str, str]:
        """Map of identifier-form aliases to concept ids."""
        index = {}
        for concept in self.concepts.values():
            for alias in concept.aliases:
                index.setdefault(to_identifier(alias), concept.id)
        return index

    def resolve(self, reference: str) -> str | None:
        """Resolve a concept id or alias to a registered concept id."""
        if reference in self.concepts:
            return reference
        return self.alias_index().get(reference)


def phase_of(m: Metamodel, concept_id: str) -> str | None:
    """Owning phase id; a phase concept is its own phase."""
    concept = m.lookup(concept_id)
    return concept.id if concept.is_phase else concept.phase


def ancestors(m: Metamodel, concept_id: str) -> list[str]:
    """Parent chain of ``concept_id`` from its immediate parent up to the root."""
    concept = m.lookup(concept_id)
    chain: list[str] = []
    seen = {concept_id}
    parent = concept.parent
    while parent is not None and parent in m.concepts and parent not in seen:
        chain.append(parent)
        seen.add(parent)
        parent = m.concepts[parent].parent
    return chain


def descendants(m: Metamodel, concept_id: str) -> list[str]:
    m.lookup(concept_id)
    return [c.id for c in m if c.id != concept_id and concept_id in ancestors(m, c.id)]


def is_instance_compatible(m: Metamodel, child: str, ancestor: str) -> bool:
    m.lookup(ancestor)
    return child == ancestor or ancestor in ancestors(m, child)


def relationship_exists(
    m: Metamodel,
    kind: RelationshipKind,
    src: str,
    dst: str,
    lift_to_ancestors: bool = False,
) -> bool:
    m.lookup(src)
    m.lookup(dst)
    if not lift_to_ancestors:
        return Relationship(kind, src, dst) in m.relationships
    sources = [src, *ancestors(m, src)]
    targets = [dst, *ancestors(m, dst)]
    return any(Relationship(kind, s, d) in m.relationships for s in sources for d in targets)


def phase_chain(m: Metamodel) -> list[str]:
    """Phase ids in execution order.

    Follows edges between phases are topologically sorted; ties (and phases
    outside any edge) keep declaration order. Cycles are broken by appending the
    leftover phases in declaration order, so this never fails; use
    :func:`validate_metamodel` to learn whether the chain is well-formed.
    """
    phases = [c.id for c in m.phases]
    succ: dict[str, list[str]] = {p: [] for p in phases}
    indeg = {p: 0 for p in phases}
    for rel in m.sorted_relationships():
        if rel.kind is RelationshipKind.FOLLOWS and rel.source in succ and rel.target in succ:
            succ[rel.source].append(rel.target)
            indeg[rel.target] += 1
    order: list[str] = []
    ready = [p for p in phases if indeg[p] == 0]
    while ready:
        node = ready.pop(0)
        order.append(node)
        for nxt in succ[node]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                ready.append(nxt)
        ready.sort(key=phases.index)
    order.extend(p for p in phases if p not in order)
    return order


def _check_phase_chain(m: Metamodel) -> list[Diagnostic]:
    phase_ids = {c.id for c in m.phases}
    out: list[Diagnostic] = []
    edges = []
    for rel in m.sorted_relationships():
        if rel.kind is not RelationshipKind.FOLLOWS:
            continue
        src_phase, dst_phase = rel.source in phase_ids, rel.target in phase_ids
        if src_phase and dst_phase:
            edges.append(rel)
        elif src_phase != dst_phase and rel.source in m and rel.target in m:
            out.append(_err("PHASE_CHAIN_BROKEN", "follows edge mixes a phase and a non-phase concept", str(rel)))
    if not phase_ids:
        return out
    outdeg = {p: 0 for p in phase_ids}
    indeg = {p: 0 for p in phase_ids}
    for rel in edges:
        outdeg[rel.source] += 1
        indeg[rel.target] += 1
    problems = []
    if len(edges) != len(phase_ids) - 1:
        problems.append(f"{len(phase_ids)} phases need {len(phase_ids) - 1} follows edges, found {len(edges)}")
    for p in sorted(phase_ids):
        if outdeg[p] > 1:
            problems.append(f"phase {p} is followed by {outdeg[p]} phases")
        if indeg[p] > 1:
            problems.append(f"phase {p} follows {indeg[p]} phases")
    if not problems:
        # n-1 edges with degrees <= 1: linear iff walking from the unique head reaches every phase
        heads = [p for p in phase_ids if indeg[p] == 0]
        succ = {rel.source: rel.target for rel in edges}
        reached = set()
        node = heads[0] if len(heads) == 1 else None
        while node is not None and node not in reached:
            reached.add(node)
            node = succ.get(node)
        if reached != phase_ids:
            problems.append("phase follows edges do not form one connected chain")
    for problem in problems:
        out.append(_err("PHASE_CHAIN_BROKEN", problem, "phases"))
    return out


def _err(code: str, message: str, subject: str) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message, subject)


def _warn(code: str, message: str, subject: str) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, message, subject)


def validate_metamodel(m: Metamodel) -> list[Diagnostic]:
    """Return every invariant violation of ``m``; an empty list means well-formed.

    Structural problems are errors. Lint findings (empty definitions, duplicate
    display names) are warnings.
    """
    out: list[Diagnostic] = []
    concepts = m.concepts

    for cid, concept in concepts.items():
        if cid != concept.id:
            out.append(_err("BAD_IDENTIFIER", f"registered under {cid!r} but id is {concept.id!r}", cid))
        if not is_identifier(cid):
            out.append(_err("BAD_IDENTIFIER", f"{cid!r} is not an UpperCamel identifier", cid))

        if concept.is_phase:
            if concept.phase is not None:
                out.append(_err("INVALID_PHASE", "a phase cannot belong to a phase", cid))
            if concept.parent is not None:
                out.append(_err("KIND_MISMATCH", "a phase cannot specialize another concept", cid))
        else:
            if concept.phase is None:
                out.append(_err("INVALID_PHASE", "concept has no owning phase", cid))
            elif concept.phase not in concepts:
                out.append(_err("DANGLING_REFERENCE", f"phase {concept.phase} is not registered", cid))
            elif not concepts[concept.phase].is_phase:
                out.append(_err("INVALID_PHASE", f"{concept.phase} is not a phase concept", cid))

            if concept.parent is not None:
                parent = concepts.get(concept.parent)
                if parent is None:
                    out.append(_err("DANGLING_REFERENCE", f"parent {concept.parent} is not registered", cid))
                elif parent.is_phase or parent.kind is not concept.kind:
                    out.append(_err(
                        "KIND_MISMATCH",
                        f"parent {parent.id} is a {parent.kind.value}, child is a {concept.kind.value}",
                        cid,
                    ))

    out.extend(_specialization_cycles(m))

    for rel in m.sorted_relationships():
        subject = str(rel)
        if rel.kind not in EXPLICIT_KINDS:
            out.append(_err("STRUCTURAL_RELATIONSHIP", f"{rel.kind.value} must be stored on the concept", subject))
        for end in (rel.source, rel.target):
            if end not in concepts:
                out.append(_err("DANGLING_REFERENCE", f"endpoint {end} is not registered", subject))
        if rel.source == rel.target:
            out.append(_err("SELF_RELATIONSHIP", "source and target are the same concept", subject))

    out.extend(_check_phase_chain(m))

    seen_names: dict[str, str] = {}
    for cid, concept in concepts.items():
        if not concept.definition.strip():
            out.append(_warn("EMPTY_DEFINITION", "definition is empty", cid))
        key = concept.display_name.casefold()
        if key in seen_names:
            out.append(_warn("DUPLICATE_NAME", f"display name {concept.display_name!r} also used by {seen_names[key]}", cid))
        else:
            seen_names[key] = cid
    return out


def _specialization_cycles(m: Metamodel) -> list[Diagnostic]:
    out = []
    reported: set[str] = set()
    for start in m.concepts:
        path: list[str] = []
        on_path: set[str] = set()
        node: str | None = start
        while node is not None and node in m.concepts and node not in reported:
            if node in on_path:
                cycle = path[path.index(node):]
                out.append(_err(
                    "CYCLE_IN_SPECIALIZATION",
                    "specialization cycle " + " -> ".join(cycle + [node]),
                    min(cycle),
                ))
                reported.update(cycle)
                break
            path.append(node)
            on_path.add(node)
            node = m.concepts[node].parent
        reported.update(path)
    return out


def errors_only(diagnostics: Iterable[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diagnostics if d.severity is Severity.ERROR]
