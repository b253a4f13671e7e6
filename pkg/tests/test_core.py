import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from migmeta.canonical import (
    ADDED_IN_1_1,
    ADDED_IN_FINAL,
    BUILTIN_REFS,
    CORE_CONCEPTS,
    build_canonical,
    build_version_1_0,
    build_version_1_1,
    builtin_metamodel,
)
from migmeta.core import (
    Concept,
    ConceptKind,
    Metamodel,
    MigmetaError,
    Relationship,
    RelationshipKind,
    Severity,
    ancestors,
    descendants,
    errors_only,
    humanize,
    is_instance_compatible,
    phase_chain,
    phase_of,
    relationship_exists,
    to_identifier,
    validate_metamodel,
)

USES, FOLLOWS = RelationshipKind.USES, RelationshipKind.FOLLOWS
TASK = ConceptKind.TASK

CORE_IDS = [
    "AnalyseContext", "AnalyseMigrationRequirements", "DefinePlan", "RecoverLegacySystemKnowledge",
    "ChooseCloudPlatform", "DesignCloudSolution", "IdentifyIncompatibilities", "MakeSystemStateless",
    "DecoupleSystemComponents", "ReplicateSystemComponents", "MakeMockMigration", "UseLogging",
    "ResolveLicensingIssues", "HandleTransientFaults", "SynchroniseReplicateComponents",
    "CommunicateAsynchronous", "DevelopIntegrators", "DeploySystemComponent", "EnableElasticity",
    "EncryptDatabase", "IsolateTenant", "EncryptDecryptMessages", "ObfuscateCodes", "ReconfigureNetwork",
    "TestSystem",
]


@pytest.fixture(scope="module")
def canonical():
    return build_canonical()


def tiny(*extra_concepts, rels=()):
    """Two-phase metamodel plus whatever the test adds."""
    concepts = [
        Concept("P", "P", ConceptKind.PHASE, "first"),
        Concept("Q", "Q", ConceptKind.PHASE, "second"),
        Concept("X", "X", TASK, "x", phase="P"),
        *extra_concepts,
    ]
    return Metamodel("t", {c.id: c for c in concepts}, {Relationship(FOLLOWS, "P", "Q"), *rels})


# --- identifiers --------------------------------------------------------------

@pytest.mark.parametrize("name, ident", [
    ("Choose cloud platform/provider", "ChooseCloudPlatformProvider"),
    ("Encrypt/decrypt messages", "EncryptDecryptMessages"),
    ("Re-configure network", "ReConfigureNetwork"),
    ("Recover legacy system knowledge", "RecoverLegacySystemKnowledge"),
])
def test_to_identifier(name, ident):
    assert to_identifier(name) == ident


def test_humanize_round_trips_simple_names():
    assert humanize("DefineRollBackPlan") == "Define roll back plan"
    assert to_identifier(humanize("DesignCloudSolution")) == "DesignCloudSolution"


# --- build_canonical ----------------------------------------------------------

def test_phase_chain_is_plan_design_enable(canonical):
    assert phase_chain(canonical) == ["Plan", "Design", "Enable"]


def test_enable_elasticity(canonical):
    c = canonical.lookup("EnableElasticity")
    assert (c.kind, c.phase) == (TASK, "Enable")
    assert c.definition.startswith("Define scaling rules and provide support")


def test_use_logging_parent(canonical):
    assert canonical.lookup("UseLogging").parent == "ApplyDesignPrinciples"


def test_table_relationship_present(canonical):
    assert Relationship(USES, "DesignCloudSolution", "IdentifyIncompatibilities") in canonical.relationships


def test_core_ids_and_definitions(canonical):
    assert len(CORE_CONCEPTS) == 25
    assert sorted(row[0] for row in CORE_CONCEPTS) == sorted(CORE_IDS)
    for cid in CORE_IDS:
        c = canonical.lookup(cid)
        assert c.definition.strip()
        assert phase_of(canonical, cid) in ("Plan", "Design", "Enable")


def test_every_concept_has_definition(canonical):
    assert all(c.definition.strip() for c in canonical)


def test_lookup_unknown_raises(canonical):
    with pytest.raises(MigmetaError) as err:
        canonical.lookup("Nope")
    assert err.value.code == "UNKNOWN_CONCEPT"


def test_aliases_resolve(canonical):
    assert canonical.resolve("MakePrototype") == "MakeMockMigration"
    assert canonical.resolve("PlanMigration") == "Plan"
    assert canonical.resolve("ChooseCloudProvider") == "ChooseCloudPlatform"
    assert canonical.resolve("Unknown") is None


def test_metamodel_copies_inputs():
    concepts = {"P": Concept("P", "P", ConceptKind.PHASE, "p")}
    m = Metamodel("v", concepts)
    concepts["Z"] = Concept("Z", "Z", TASK, "z", phase="P")
    assert "Z" not in m


# --- older versions -----------------------------------------------------------

def test_version_1_0_lacks_documented_additions():
    m = build_version_1_0()
    assert m.get("UseLogging") is None
    assert m.get("DefinePlan") is not None
    assert m.get("DefineRollBackPlan") is None
    assert errors_only(validate_metamodel(m)) == []


def test_version_1_1_has_logging_only():
    m = build_version_1_1()
    assert "UseLogging" in m
    assert "ResolveLicensingIssues" not in m


def test_version_subset_relation(canonical):
    old = build_version_1_0()
    assert set(old.concepts) < set(canonical.concepts)
    assert set(canonical.concepts) - set(old.concepts) == set(ADDED_IN_1_1 + ADDED_IN_FINAL)


@pytest.mark.parametrize("ref", sorted(BUILTIN_REFS))
def test_builtins_well_formed(ref):
    m = builtin_metamodel(ref)
    assert validate_metamodel(m) == []
    assert phase_chain(m) == ["Plan", "Design", "Enable"]


def test_unknown_builtin():
    with pytest.raises(MigmetaError) as err:
        builtin_metamodel("9.9")
    assert err.value.code == "UNKNOWN_METAMODEL_VERSION"


# --- validate_metamodel -------------------------------------------------------

def _codes(m):
    return [d.code for d in validate_metamodel(m)]


def test_canonical_validates_clean(canonical):
    assert validate_metamodel(canonical) == []


def test_specialization_cycle_reported_once():
    m = tiny(
        Concept("A", "A", TASK, "a", phase="P", parent="B"),
        Concept("B", "B", TASK, "b", phase="P", parent="A"),
    )
    assert _codes(m) == ["CYCLE_IN_SPECIALIZATION"]
    assert validate_metamodel(m)[0].severity is Severity.ERROR


def test_dangling_relationship():
    m = tiny(rels=[Relationship(USES, "X", "Ghost")])
    assert _codes(m) == ["DANGLING_REFERENCE"]


@pytest.mark.parametrize("concept, code", [
    (Concept("bad", "bad", TASK, "d", phase="P"), "BAD_IDENTIFIER"),
    (Concept("Y", "Y", TASK, "d"), "INVALID_PHASE"),
    (Concept("Y", "Y", TASK, "d", phase="X"), "INVALID_PHASE"),
    (Concept("Y", "Y", TASK, "d", phase="Missing"), "DANGLING_REFERENCE"),
    (Concept("Y", "Y", ConceptKind.PRINCIPLE, "d", phase="P", parent="X"), "KIND_MISMATCH"),
    (Concept("Y", "Y", TASK, "d", phase="P", parent="P"), "KIND_MISMATCH"),
    (Concept("Y", "Y", TASK, "", phase="P"), "EMPTY_DEFINITION"),
    (Concept("Y", "x", TASK, "d", phase="P"), "DUPLICATE_NAME"),
])
def test_concept_level_diagnostics(concept, code):
    assert _codes(tiny(concept)) == [code]


def test_warnings_are_not_errors():
    diags = validate_metamodel(tiny(Concept("Y", "Y", TASK, "", phase="P")))
    assert diags and errors_only(diags) == []


def test_self_and_structural_relationships():
    assert _codes(tiny(rels=[Relationship(USES, "X", "X")])) == ["SELF_RELATIONSHIP"]
    assert _codes(tiny(
        Concept("Y", "Y", TASK, "y", phase="P"),
        rels=[Relationship(RelationshipKind.SPECIALIZES, "Y", "X")],
    )) == ["STRUCTURAL_RELATIONSHIP"]


def test_phase_chain_checks():
    extra_phase = Concept("R", "R", ConceptKind.PHASE, "third")
    assert "PHASE_CHAIN_BROKEN" in _codes(tiny(extra_phase))
    looped = tiny(extra_phase, rels=[Relationship(FOLLOWS, "Q", "R"), Relationship(FOLLOWS, "R", "P")])
    assert "PHASE_CHAIN_BROKEN" in _codes(looped)
    mixed = tiny(rels=[Relationship(FOLLOWS, "X", "Q")])
    assert _codes(mixed) == ["PHASE_CHAIN_BROKEN"]


def test_phase_chain_never_fails_on_cycles():
    m = Metamodel("c", {
        "A": Concept("A", "A", ConceptKind.PHASE, "a"),
        "B": Concept("B", "B", ConceptKind.PHASE, "b"),
    }, {Relationship(FOLLOWS, "A", "B"), Relationship(FOLLOWS, "B", "A")})
    assert sorted(phase_chain(m)) == ["A", "B"]


# --- ancestors / compatibility ------------------------------------------------

def test_ancestors_examples(canonical):
    assert ancestors(canonical, "UseLogging") == ["ApplyDesignPrinciples"]
    assert ancestors(canonical, "AnalyseMigrationCost") == ["AnalyseContext"]
    assert ancestors(canonical, "DesignCloudSolution") == []


def test_ancestors_terminates_on_cycle():
    m = tiny(
        Concept("A", "A", TASK, "a", phase="P", parent="B"),
        Concept("B", "B", TASK, "b", phase="P", parent="A"),
    )
    assert ancestors(m, "A") == ["B"]


def test_descendants(canonical):
    assert descendants(canonical, "TestSystem") == ["TestPerformance"]


def test_instance_compatibility_examples(canonical):
    assert is_instance_compatible(canonical, "DefineRollBackPlan", "DefinePlan")
    assert not is_instance_compatible(canonical, "DesignCloudSolution", "TestSystem")


def _reachable(m, child, ancestor):
    """Independent oracle: BFS over the child->parent edge list."""
    parent_edges = [(c.id, c.parent) for c in m if c.parent is not None]
    frontier, seen = [child], {child}
    while frontier:
        node = frontier.pop()
        for a, b in parent_edges:
            if a == node and b not in seen:
                seen.add(b)
                frontier.append(b)
    return ancestor in seen


def test_compatibility_matches_reachability_for_all_pairs(canonical):
    ids = list(canonical.concepts)
    for a, b in itertools.product(ids, ids):
        assert is_instance_compatible(canonical, a, b) == _reachable(canonical, a, b), (a, b)


def test_compatibility_reflexive_and_transitive(canonical):
    ids = list(canonical.concepts)
    for a in ids:
        assert is_instance_compatible(canonical, a, a)
    for a, b, c in itertools.product(ids, repeat=3):
        if is_instance_compatible(canonical, a, b) and is_instance_compatible(canonical, b, c):
            assert is_instance_compatible(canonical, a, c)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_compatibility_matches_reachability_on_random_forests(data):
    n = data.draw(st.integers(1, 12))
    ids = [f"C{k}" for k in range(n)]
    concepts = {"P": Concept("P", "P", ConceptKind.PHASE, "p")}
    for k, cid in enumerate(ids):
        # parents only point backwards, so the result is a forest
        parent = data.draw(st.none() | st.sampled_from(ids[:k])) if k else None
        concepts[cid] = Concept(cid, cid, TASK, "d", phase="P", parent=parent)
    m = Metamodel("r", concepts)
    for a, b in itertools.product(ids, ids):
        assert is_instance_compatible(m, a, b) == _reachable(m, a, b)


# --- relationship_exists ------------------------------------------------------

def test_relationship_exists_examples(canonical):
    assert relationship_exists(canonical, USES, "TestSystem", "DesignCloudSolution")
    assert not relationship_exists(canonical, USES, "TestPerformance", "DesignCloudSolution")
    assert relationship_exists(canonical, USES, "TestPerformance", "DesignCloudSolution", lift_to_ancestors=True)
    assert not relationship_exists(canonical, FOLLOWS, "Enable", "Plan")
    assert relationship_exists(canonical, FOLLOWS, "Plan", "Design")


def test_relationship_exists_unknown_endpoint(canonical):
    with pytest.raises(MigmetaError):
        relationship_exists(canonical, USES, "Ghost", "TestSystem")
