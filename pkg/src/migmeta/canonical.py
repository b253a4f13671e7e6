"""Built-in cloud migration metamodel and its earlier versions."""

from __future__ import annotations

from .core import Concept, ConceptKind, Metamodel, MigmetaError, Relationship, RelationshipKind

TASK = ConceptKind.TASK
PRINCIPLE = ConceptKind.PRINCIPLE
WORK_PRODUCT = ConceptKind.WORK_PRODUCT
USES = RelationshipKind.USES
FOLLOWS = RelationshipKind.FOLLOWS

PHASE_IDS = ("Plan", "Design", "Enable")

# (id, display name, kind, phase, parent, definition, aliases)
_PHASES = [
    ("Plan", "Plan", None, None,
     "Assess whether moving to the cloud is worthwhile, capture what the cloud must provide, "
     "recover knowledge of the legacy system and organise the migration activities.",
     ("Plan migration", "Plan phase")),
    ("Design", "Design", None, None,
     "Produce the target architecture that maps legacy components onto cloud services "
     "and apply the principles that let them run well there.",
     ("Design phase",)),
    ("Enable", "Enable", None, None,
     "Implement the designed architecture: resolve incompatibilities, deploy, configure "
     "and test the migrated system.",
     ("Enable phase",)),
]

# Key process concepts, in reference order.
CORE_CONCEPTS = [
    ("AnalyseContext", "Analyse context", TASK, "Plan", None,
     "Analyse migration suitability with respect to factors such as cost of legacy system modification, "
     "installation, training, administration, license management, required expertise, pricing models of the "
     "service providers, infrastructure procurement imposed by the migration, impact of the cloud on "
     "stakeholders, organisational constraints, responsibilities, and working practices.", ()),
    ("AnalyseMigrationRequirements", "Analyse migration requirements", TASK, "Plan", None,
     "Identify a set of requirements to be satisfied by the cloud such as computational requirements, data "
     "storage, security, response time, and elasticity.", ()),
    ("DefinePlan", "Define plan", TASK, "Plan", None,
     "Define a sequence of tasks that guide the migration process by analysing feedback from stakeholders. "
     "A plan may include (i) notice of temporal unavailability of legacy systems, (ii) roll-back the system to "
     "in-house versions, (iii) migration type such as complete or partial, and (iv) legacy system retirement "
     "procedures.", ()),
    ("RecoverLegacySystemKnowledge", "Recover legacy system knowledge", TASK, "Plan", None,
     "Produce a complete representation of legacy system architecture including its data, components, "
     "dependencies among components and infrastructure, system data usage, and resource utilisation model "
     "(e.g. CPU, Network, and storage).", ()),
    ("ChooseCloudPlatform", "Choose cloud platform/provider", TASK, "Design", None,
     "Define a set of suitability criteria that characterise desirable features of cloud providers including "
     "pricing model, constraints, offered QoS, electricity costs, power and cooling costs, organisation "
     "migration characteristics (migration goals, available budget), and system requirements.",
     ("Choose cloud provider", "Choose cloud platform")),
    ("DesignCloudSolution", "Design cloud solution", TASK, "Design", None,
     "Identify legacy system components with respect to migration requirements and then define their "
     "distribution cloud servers.", ()),
    ("IdentifyIncompatibilities", "Identify incompatibilities", TASK, "Design", None,
     "Identify incompatibilities between legacy system components and cloud services.", ()),
    ("MakeSystemStateless", "Make system stateless", PRINCIPLE, "Design", "ApplyDesignPrinciples",
     "Enable the legacy system to handle safety and traceability of tenant's session when various system "
     "instances hosted in the cloud.", ()),
    ("DecoupleSystemComponents", "Decouple system components", PRINCIPLE, "Design", "ApplyDesignPrinciples",
     "Decouple system components from each other. Use mediator and synchronisation mechanisms to manage "
     "interaction between the loosely coupled components.", ("Decouple software components",)),
    ("ReplicateSystemComponents", "Replicate system components", PRINCIPLE, "Design", "ApplyDesignPrinciples",
     "Partition and deploy legacy system components (e.g. database, business logic) on multiple cloud "
     "servers.", ()),
    ("MakeMockMigration", "Make mock migration", TASK, "Design", None,
     "Build a prototype of new cloud solution to get an understanding of how the functional and "
     "non-functional aspects of the system will work in the cloud.", ("Make prototype",)),
    ("UseLogging", "Use logging", PRINCIPLE, "Design", "ApplyDesignPrinciples",
     "Use logging mechanism to facilitate system debug and resource monitoring when running in the cloud.", ()),
    ("ResolveLicensingIssues", "Resolve licensing issues", TASK, "Design", None,
     "Define and monitor a pay-as-you-go licensing model to handle unintended license agreement violations "
     "due to automatic scaling.", ()),
    ("DevelopIntegrators", "Develop integrators", TASK, "Enable", None,
     "Develop mediators/wrappers to hide incompatibilities occurring at runtime between legacy system "
     "components and selected cloud services that are plugged to these system components.", ()),
    ("DeploySystemComponent", "Deploy system component", TASK, "Enable", None,
     "Install system components and any required third party tools in the cloud.", ()),
    ("EnableElasticity", "Enable elasticity", TASK, "Enable", None,
     "Define scaling rules and provide support for dynamic acquisition and release of cloud resources.", ()),
    ("EncryptDatabase", "Encrypt database", TASK, "Enable", None,
     "Encrypt critical databases prior to hosting in the cloud.", ()),
    ("HandleTransientFaults", "Handle transient faults", PRINCIPLE, "Design", "ApplyDesignPrinciples",
     "Detect and handle transient faults may occur in the cloud.", ()),
    ("IsolateTenant", "Isolate tenant", TASK, "Enable", None,
     "Protect tenants' data, performance, and faults from other tenants, which are running on the same cloud "
     "server.", ()),
    ("EncryptDecryptMessages", "Encrypt/Decrypt messages", TASK, "Enable", None,
     "Secure messages transmission between the local components and those hosted in the cloud or distributed "
     "across multiple clouds using an encryption mechanism.", ()),
    ("ObfuscateCodes", "Obfuscate codes", TASK, "Enable", None,
     "Protect unauthorised access to code blocks of components by other tenants that are running on the same "
     "cloud provider.", ()),
    ("ReconfigureNetwork", "Re-configure network", TASK, "Enable", None,
     "Re-configure the running environment of the system including reachability policies to resources and "
     "network, connection to storages, setting ports and firewalls, and load balancer.", ()),
    ("SynchroniseReplicateComponents", "Synchronise/replicate system components", PRINCIPLE, "Design",
     "ApplyDesignPrinciples",
     "Provide support in the system to synchronise multiple components (e.g. database replica) hosted on "
     "premise network and cloud servers.", ()),
    ("CommunicateAsynchronous", "Communicate a-synchronous", PRINCIPLE, "Design", "ApplyDesignPrinciples",
     "Enable application components to interact in an asynchronous manner.", ()),
    ("TestSystem", "Test system", TASK, "Enable", None,
     "Test system security, interoperability, multi-tenancy, performance, scalability, network connectivity "
     "of the system that migrated to the cloud.", ()),
]

# Concepts used by the case studies and later refinements but missing from the key concept list.
SUPPLEMENTARY_CONCEPTS = [
    ("ApplyDesignPrinciples", "Apply design principles", PRINCIPLE, "Design", None,
     "Re-architect legacy components according to cloud design principles so they scale, tolerate faults "
     "and stay portable.", ()),
    ("AnalyseMigrationFeasibility", "Analyse migration feasibility", TASK, "Plan", "AnalyseContext",
     "Weigh benefits and risks of the move, for example privacy, vendor lock-in and environmental limits.", ()),
    ("AnalyseMigrationCost", "Analyse migration cost", TASK, "Plan", "AnalyseContext",
     "Estimate the running cost of the cloud solution from instances, storage, transfer, transactions, cache "
     "and database usage, and compare it with the legacy cost.", ()),
    ("DefineRollBackPlan", "Define roll back plan", TASK, "Plan", "DefinePlan",
     "Define roll-back, as a plan B, to an in-house version of the legacy system in the case of occurrence of "
     "any significant risk or new application fails during the migration process. This reduces the risk and "
     "exposure to the business.", ()),
    ("RefactorCodes", "Refactor codes", TASK, "Enable", None,
     "Modify legacy source code so that it runs against the chosen cloud services.", ()),
    ("AdaptData", "Adapt data", TASK, "Enable", None,
     "Modify legacy data and its access layer to fit the cloud storage services.", ()),
    ("MigrateDatabase", "Migrate database", TASK, "Enable", None,
     "Move the legacy database onto a cloud database service.", ()),
    ("TestPerformance", "Test performance", TASK, "Enable", "TestSystem",
     "Measure execution and response time of the system in the cloud to expose performance bottlenecks.", ()),
    ("IdentifiedCompatibilityIssues", "Identified compatibility issues", WORK_PRODUCT, "Design", None,
     "Record of incompatibilities found between legacy components and the target cloud platform.", ()),
]

# Additions made after version 1.0, in the order they were introduced.
ADDED_IN_1_1 = ("UseLogging",)
ADDED_IN_FINAL = ("ResolveLicensingIssues", "DefineRollBackPlan")

# Every attested relationship row, with aliases already resolved.
CANONICAL_RELATIONSHIPS = [
    Relationship(USES, "DesignCloudSolution", "AnalyseMigrationRequirements"),
    Relationship(USES, "DesignCloudSolution", "IdentifyIncompatibilities"),
    Relationship(USES, "DesignCloudSolution", "ChooseCloudPlatform"),
    Relationship(USES, "RefactorCodes", "IdentifyIncompatibilities"),
    Relationship(USES, "DesignCloudSolution", "RecoverLegacySystemKnowledge"),
    Relationship(USES, "RefactorCodes", "DesignCloudSolution"),
    Relationship(USES, "MigrateDatabase", "RefactorCodes"),
    Relationship(USES, "TestSystem", "DesignCloudSolution"),
    Relationship(FOLLOWS, "Plan", "Design"),
    Relationship(FOLLOWS, "Design", "Enable"),
    Relationship(FOLLOWS, "ChooseCloudPlatform", "IdentifyIncompatibilities"),
]

# Concept rows of the case-study coverage matrix.
COVERAGE_TABLE_ROWS = (
    "RecoverLegacySystemKnowledge",
    "ChooseCloudPlatform",
    "DesignCloudSolution",
    "IdentifyIncompatibilities",
    "DecoupleSystemComponents",
    "AdaptData",
    "DevelopIntegrators",
    "RefactorCodes",
    "ReconfigureNetwork",
)


def _concept(row) -> Concept:
    cid, name, kind, phase, parent, definition, aliases = row
    return Concept(cid, name, kind, definition, phase=phase, parent=parent, aliases=tuple(aliases))


def _phase_order_key(concept: Concept) -> int:
    return PHASE_IDS.index(concept.phase) if concept.phase else -1


def build_canonical() -> Metamodel:
    """The final metamodel (version ``"final"``)."""
    concepts = [
        Concept(cid, name, ConceptKind.PHASE, definition, aliases=aliases)
        for cid, name, _, _, definition, aliases in _PHASES
    ]
    rest = [_concept(row) for row in CORE_CONCEPTS + SUPPLEMENTARY_CONCEPTS]
    # stable: phase-major, reference order within a phase
    concepts.extend(sorted(rest, key=_phase_order_key))
    return Metamodel("final", {c.id: c for c in concepts}, CANONICAL_RELATIONSHIPS)


def _without(m: Metamodel, removed: tuple[str, ...], version: str) -> Metamodel:
    gone = set(removed)
    return Metamodel(
        version,
        {cid: c for cid, c in m.concepts.items() if cid not in gone},
        {r for r in m.relationships if r.source not in gone and r.target not in gone},
    )


def build_version_1_0() -> Metamodel:
    """The first metamodel version, before any refinement."""
    return _without(build_canonical(), ADDED_IN_1_1 + ADDED_IN_FINAL, "1.0")


def build_version_1_1() -> Metamodel:
    """Version 1.0 plus the concept found missing during the first case study."""
    return _without(build_canonical(), ADDED_IN_FINAL, "1.1")


BUILTIN_VERSIONS = {
    "final": build_canonical,
    "1.1": build_version_1_1,
    "1.0": build_version_1_0,
}

# Names accepted by :func:`builtin_metamodel` in addition to the version strings.
BUILTIN_REFS = {
    "core": "final",
    "core-final": "final",
    "core-1.1": "1.1",
    "core-1.0": "1.0",
}


def builtin_metamodel(ref: str) -> Metamodel:
    """Resolve ``core``, ``core-1.0``, ``core-1.1`` or a bare version string."""
    version = BUILTIN_REFS.get(ref, ref)
    try:
        return BUILTIN_VERSIONS[version]()
    except KeyError:
        raise MigmetaError("UNKNOWN_METAMODEL_VERSION", f"no built-in metamodel named {ref!r}") from None
