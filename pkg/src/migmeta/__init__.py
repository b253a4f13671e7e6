"""Cloud migration process metamodel toolkit.

Encodes a generic Plan/Design/Enable migration metamodel, parses a small DSL
for metamodel extensions and situation-specific instance models, checks
conformance, builds coverage matrices and tailors metamodels.
"""

__version__ = "0.1.0"

from .canonical import build_canonical, build_version_1_0, build_version_1_1, builtin_metamodel
from .conformance import (
    NA,
    ConformanceReport,
    CoverageMatrix,
    ModelDiff,
    Violation,
    check_conformance,
    coverage_matrix,
    diff_models,
    relationship_coverage,
)
from .core import (
    Concept,
    ConceptKind,
    Diagnostic,
    Metamodel,
    MigmetaError,
    Relationship,
    RelationshipKind,
    Severity,
    ancestors,
    is_instance_compatible,
    phase_chain,
    relationship_exists,
    validate_metamodel,
)
from .dsl import (
    Activity,
    Edge,
    InstanceModel,
    MetamodelExtension,
    ParseDiagnostic,
    ParseError,
    SourceSpan,
    parse,
    parse_extension,
    parse_model,
    serialize,
)
from .jsonio import export_json, import_metamodel_json, import_model_json
from .reporting import RenderFormat, RenderOptions, coverage_to_csv, coverage_to_markdown, to_checklist, to_dot
from .tailoring import TailoringLog, TailoringLogEntry, apply_extension, select_subset, specialize

__all__ = [
    "__version__",
    "NA",
    "ConformanceReport",
    "CoverageMatrix",
    "ModelDiff",
    "Violation",
    "check_conformance",
    "coverage_matrix",
    "diff_models",
    "relationship_coverage",
    "Concept",
    "ConceptKind",
    "Diagnostic",
    "Metamodel",
    "MigmetaError",
    "Relationship",
    "RelationshipKind",
    "Severity",
    "ancestors",
    "is_instance_compatible",
    "phase_chain",
    "relationship_exists",
    "validate_metamodel",
    "Activity",
    "Edge",
    "InstanceModel",
    "MetamodelExtension",
    "ParseDiagnostic",
    "ParseError",
    "SourceSpan",
    "parse",
    "parse_extension",
    "parse_model",
    "serialize",
    "build_canonical",
    "build_version_1_0",
    "build_version_1_1",
    "builtin_metamodel",
    "export_json",
    "import_metamodel_json",
    "import_model_json",
    "RenderFormat",
    "RenderOptions",
    "coverage_to_csv",
    "coverage_to_markdown",
    "to_checklist",
    "to_dot",
    "TailoringLog",
    "TailoringLogEntry",
    "apply_extension",
    "select_subset",
    "specialize",
]
