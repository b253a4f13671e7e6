"""JSON export/import in the ``migmeta-json/1`` format.

The format is described by ``data/migmeta-json-1.schema.json``. Keys are
emitted in a fixed order so repeated exports are byte-identical.
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Any, Union

from .core import Concept, ConceptKind, Metamodel, MigmetaError, Relationship, RelationshipKind, phase_chain
from .dsl import Activity, Edge, InstanceModel

SCHEMA_ID = "migmeta-json/1"


def load_schema() -> dict:
    text = resources.files("migmeta").joinpath("data/migmeta-json-1.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _rel(r: Union[Relationship, Edge]) -> dict:
    return {"kind": r.kind.value, "source": r.source, "target": r.target}


def metamodel_to_dict(m: Metamodel) -> dict[str, Any]:
    concepts = {}
    for c in m:
        concepts[c.id] = {
            "display_name": c.display_name,
            "kind": c.kind.value,
            "phase": c.phase,
            "parent": c.parent,
            "definition": c.definition,
            "aliases": list(c.aliases),
        }
    return {
        "schema": SCHEMA_ID,
        "type": "metamodel",
        "version": m.version,
        "phases": phase_chain(m),
        "concepts": concepts,
        "relationships": [_rel(r) for r in m.sorted_relationships()],
    }


def model_to_dict(i: InstanceModel) -> dict[str, Any]:
    return {
        "schema": SCHEMA_ID,
        "type": "model",
        "name": i.name,
        "conforms_to": i.conforms_to,
        "activities": {a.id: {"instance_of": a.instance_of, "note": a.note} for a in i.activities.values()},
        "edges": [_rel(e) for e in i.sorted_edges()],
    }


def export_json(x: Union[Metamodel, InstanceModel]) -> str:
    if isinstance(x, Metamodel):
        doc = metamodel_to_dict(x)
    elif isinstance(x, InstanceModel):
        doc = model_to_dict(x)
    else:
        raise TypeError(f"cannot export {type(x).__name__}")
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _load(text: str | bytes, expected_type: str) -> dict:
    try:
        doc = json.loads(text)
    except ValueError as exc:
        raise MigmetaError("BAD_JSON", str(exc)) from None
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA_ID:
        raise MigmetaError("BAD_JSON", f"not a {SCHEMA_ID} document")
    if doc.get("type") != expected_type:
        raise MigmetaError("BAD_JSON", f"expected a {expected_type} document, got {doc.get('type')!r}")
    return doc


def import_model_json(text: str | bytes) -> InstanceModel:
    doc = _load(text, "model")
    try:
        activities = {
            aid: Activity(aid, body["instance_of"], body.get("note"))
            for aid, body in doc["activities"].items()
        }
        edges = [Edge(RelationshipKind(e["kind"]), e["source"], e["target"]) for e in doc["edges"]]
        return InstanceModel(doc["name"], doc["conforms_to"], activities, edges)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise MigmetaError("BAD_JSON", f"malformed model document: {exc!r}") from None


def import_metamodel_json(text: str | bytes) -> Metamodel:
    doc = _load(text, "metamodel")
    try:
        concepts = {
            cid: Concept(
                cid,
                body["display_name"],
                ConceptKind(body["kind"]),
                body["definition"],
                phase=body.get("phase"),
                parent=body.get("parent"),
                aliases=tuple(body.get("aliases", ())),
            )
            for cid, body in doc["concepts"].items()
        }
        rels = [Relationship(RelationshipKind(r["kind"]), r["source"], r["target"]) for r in doc["relationships"]]
        return Metamodel(doc["version"], concepts, rels)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise MigmetaError("BAD_JSON", f"malformed metamodel document: {exc!r}") from None
