"""Hypothesis generators shared by the property tests."""

from hypothesis import strategies as st

from migmeta.canonical import build_canonical
from migmeta.core import Concept, ConceptKind, Relationship, RelationshipKind
from migmeta.dsl import Activity, Edge, InstanceModel, MetamodelExtension

CANONICAL = build_canonical()
CONCEPT_IDS = sorted(CANONICAL.concepts)
ALIAS_IDS = sorted(CANONICAL.alias_index())
NON_PHASE_IDS = [c.id for c in CANONICAL if not c.is_phase]

_ALNUM = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789"
idents = st.builds(
    lambda head, tail: head + tail,
    st.sampled_from(_ALNUM[:26]),
    st.text(alphabet=_ALNUM, max_size=11),
)
# printable text plus the characters that need escaping or span lines
texts = st.text(
    alphabet=st.one_of(st.characters(blacklist_categories=("Cs",)), st.sampled_from('"\\\n#{}')),
    max_size=30,
)
kinds = st.sampled_from([RelationshipKind.USES, RelationshipKind.FOLLOWS])


@st.composite
def instance_models(draw, concepts=st.sampled_from(CONCEPT_IDS + ALIAS_IDS), max_activities=12):
    ids = draw(st.lists(idents, unique=True, max_size=max_activities))
    activities = {
        aid: Activity(aid, draw(concepts), draw(st.none() | texts))
        for aid in ids
    }
    edges = set()
    if len(ids) >= 2:
        for _ in range(draw(st.integers(0, 2 * len(ids)))):
            src, dst = draw(st.permutations(ids))[:2]
            edges.add(Edge(draw(kinds), src, dst))
    name = draw(texts)
    conforms = draw(st.sampled_from(["final", "1.0", "1.1"]) | texts)
    return InstanceModel(name, conforms, activities, edges)


@st.composite
def extensions(draw, base=None):
    """Grammar-level extensions; not necessarily well-formed as metamodels."""
    ids = draw(st.lists(idents, unique=True, max_size=6))
    concepts = []
    for cid in ids:
        concepts.append(Concept(
            cid,
            cid,
            draw(st.sampled_from(list(ConceptKind))),
            draw(texts),
            phase=draw(st.none() | idents),
            parent=draw(st.none() | idents),
        ))
    rels = draw(st.lists(st.builds(Relationship, kinds, idents, idents), max_size=6))
    return MetamodelExtension(draw(texts), base if base is not None else draw(texts), concepts, rels)


@st.composite
def valid_extensions(draw, m=CANONICAL, tag="ext"):
    """Additive extensions of ``m`` that keep it well-formed."""
    phases = [p.id for p in m.phases]
    known = {c.id: c for c in m if not c.is_phase}
    new_ids = draw(st.lists(idents.filter(lambda s: s not in m.concepts), unique=True, max_size=4))
    concepts = []
    for cid in new_ids:
        parent = draw(st.none() | st.sampled_from(sorted(known))) if known else None
        if parent is None:
            kind = draw(st.sampled_from([ConceptKind.TASK, ConceptKind.PRINCIPLE, ConceptKind.WORK_PRODUCT]))
            phase = draw(st.sampled_from(phases))
        else:
            kind, phase = known[parent].kind, known[parent].phase
        concept = Concept(cid, cid, kind, draw(texts), phase=phase, parent=parent)
        concepts.append(concept)
        known[cid] = concept
    rels = set()
    for _ in range(draw(st.integers(0, 3)) if len(known) >= 2 else 0):
        src, dst = draw(st.permutations(sorted(known)))[:2]
        rels.add(Relationship(RelationshipKind.USES, src, dst))
    return MetamodelExtension(f"{m.version}+{tag}", m.version, concepts, rels - m.relationships)
