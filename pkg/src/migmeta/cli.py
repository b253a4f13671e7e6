"""``migmeta`` command line front end.

Exit status: 0 success/conformant, 1 domain findings (violations, validation
errors, rejected tailoring), 2 unreadable or unparseable input, 3 internal error.
"""

from __future__ import annotations

import argparse
import enum
import json
import sys
import traceback
from pathlib import Path

from . import __version__
from .canonical import BUILTIN_REFS, BUILTIN_VERSIONS, builtin_metamodel
from .conformance import ConformanceError, check_conformance, coverage_matrix, diff_models, relationship_coverage
from .core import Metamodel, MigmetaError, Severity, validate_metamodel
from .dsl import InstanceModel, MetamodelExtension, ParseError, parse_extension, parse_model, serialize
from .fixtures import embedded_path, extension_text, fixture_text
from .jsonio import export_json, import_metamodel_json, import_model_json
from .reporting import RenderOptions, coverage_to_csv, coverage_to_markdown, to_checklist, to_dot
from .tailoring import TailoringLog, apply_extension, merge_extension, select_subset


class ExitStatus(enum.IntEnum):
    OK = 0
    FINDINGS = 1
    INPUT_ERROR = 2
    INTERNAL_ERROR = 3


class InputError(Exception):
    """Unreadable or unparseable user input (exit status 2)."""


# tailoring failures that count as findings rather than bad input
_FINDING_CODES = {"EXTENSION_CONFLICT", "INVALID_RESULT", "BASE_MISMATCH", "ID_COLLISION", "KIND_MISMATCH"}


def _err(*lines: str) -> None:
    for line in lines:
        print(line, file=sys.stderr)


def read_source(ref: str) -> str | bytes:
    """File contents, or a shipped fixture/extension when no such file exists.

    Undecodable files come back as bytes so the parser can report the position.
    """
    path = Path(ref)
    if path.is_file():
        try:
            data = path.read_bytes()
        except OSError as exc:
            raise InputError(f"{ref}: cannot read: {exc.strerror}") from None
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError:
            return data
    embedded = embedded_path(ref)
    if embedded is not None:
        folder, stem = embedded
        return fixture_text(stem) if folder == "fixtures" else extension_text(stem)
    raise InputError(f"{ref}: no such file")


def _parse(ref: str, parser):
    text = read_source(ref)
    try:
        return parser(text)
    except ParseError as exc:
        raise InputError(*[f"{ref}:{d}" for d in exc.diagnostics]) from None


def load_extension_file(ref: str) -> MetamodelExtension:
    return _parse(ref, parse_extension)


def load_metamodel(ref: str, base: str | None = None, validate: bool = True) -> Metamodel:
    """``core``/``core-1.0``/version name, a ``migmeta-json/1`` file, or a ``.cmx`` over its base."""
    if ref in BUILTIN_REFS or ref in BUILTIN_VERSIONS:
        return builtin_metamodel(ref)
    if ref.endswith(".json"):
        try:
            return import_metamodel_json(read_source(ref))
        except MigmetaError as exc:
            raise InputError(f"{ref}: {exc.message}") from None
    ext = load_extension_file(ref)
    if base:
        # an explicit base may carry a different version label
        base_model = load_metamodel(base).with_version(ext.base)
    else:
        try:
            base_model = builtin_metamodel(ext.base)
        except MigmetaError:
            raise InputError(f"{ref}: base {ext.base!r} is not a built-in metamodel; pass --base") from None
    return apply_extension(base_model, ext) if validate else merge_extension(base_model, ext)


def load_model(ref: str) -> InstanceModel:
    if ref.endswith(".json"):
        try:
            return import_model_json(read_source(ref))
        except MigmetaError as exc:
            raise InputError(f"{ref}: {exc.message}") from None
    return _parse(ref, parse_model)


def _label(ref: str) -> str:
    return Path(ref).stem or ref


# --- commands -----------------------------------------------------------------

def cmd_validate(args) -> int:
    m = load_metamodel(args.metamodel, args.base, validate=False)
    diagnostics = validate_metamodel(m)
    _err(*(str(d) for d in diagnostics))
    errors = sum(d.severity is Severity.ERROR for d in diagnostics)
    warnings = len(diagnostics) - errors
    state = "well-formed" if not errors else "INVALID"
    print(f"metamodel {m.version}: {state} ({len(m.concepts)} concepts, {len(m.relationships)} relationships, "
          f"{errors} error(s), {warnings} warning(s))")
    return ExitStatus.FINDINGS if errors else ExitStatus.OK


def cmd_check(args) -> int:
    m = load_metamodel(args.metamodel)
    models = [(ref, load_model(ref)) for ref in args.models]
    status = ExitStatus.OK
    for ref, model in models:
        report = check_conformance(m, model, strict_edges=args.strict_edges)
        if report.conformant:
            print(f"{ref} ({model.name}): conformant to {m.version}, "
                  f"{len(report.covered_concepts)} concept(s) covered")
        else:
            status = ExitStatus.FINDINGS
            print(f"{ref} ({model.name}): {len(report.violations)} violation(s) against {m.version}")
            for v in report.violations:
                print(f"  {v}")
    return status


def _split_ids(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def cmd_coverage(args) -> int:
    m = load_metamodel(args.metamodel)
    models = [load_model(ref) for ref in args.models]
    bad = False
    for ref, model in zip(args.models, models):
        report = check_conformance(m, model)
        for v in report.violations:
            bad = True
            _err(f"{ref}: {v}")
    if bad:
        return ExitStatus.FINDINGS
    try:
        if args.relationships:
            matrix = relationship_coverage(m, models, m.sorted_relationships())
        else:
            rows = _split_ids(args.rows) if args.rows else None
            matrix = coverage_matrix(m, models, rows)
    except MigmetaError as exc:
        raise InputError(exc.message) from None
    render = coverage_to_markdown if args.format == "md" else coverage_to_csv
    sys.stdout.write(render(matrix))
    return ExitStatus.OK


def _combine(extensions: list[MetamodelExtension]) -> MetamodelExtension:
    concepts, rels = [], set()
    for e in extensions:
        concepts.extend(e.new_concepts)
        rels |= e.new_relationships
    return MetamodelExtension(extensions[-1].name, extensions[0].base, concepts, rels)


def cmd_tailor(args) -> int:
    m = load_metamodel(args.metamodel)
    log = TailoringLog()
    extensions: list[MetamodelExtension] = []
    if args.extend:
        result = m
        for ref in args.extend:
            ext = load_extension_file(ref)
            extensions.append(ext)
            result = apply_extension(result, ext, log)
    else:
        ids = list(m.concepts) if args.select.strip() == "ALL" else _split_ids(args.select)
        result = select_subset(m, ids, name=args.name, log=log)
    _err(*log.lines())

    out = args.out
    if out and out.endswith(".cmx"):
        if not extensions:
            raise InputError("a subset cannot be written as an additive .cmx extension; use a .json output")
        text = serialize(_combine(extensions))
    else:
        text = export_json(result)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return ExitStatus.OK


def _is_model_ref(ref: str) -> bool:
    if ref.endswith(".cmi"):
        return True
    if ref.endswith(".json"):
        try:
            return json.loads(read_source(ref)).get("type") == "model"
        except (ValueError, AttributeError):
            return False
    embedded = embedded_path(ref)
    return embedded is not None and embedded[0] == "fixtures"


def cmd_export(args) -> int:
    opts = RenderOptions(include_definitions=args.definitions, phase_clusters=not args.no_clusters)
    target = load_model(args.source) if _is_model_ref(args.source) else load_metamodel(args.source)
    if args.format == "dot":
        text = to_dot(target, opts)
    elif args.format == "json":
        text = export_json(target)
    else:
        if isinstance(target, InstanceModel):
            raise InputError("checklists are generated from metamodels, not instance models")
        text = to_checklist(target, RenderOptions(include_definitions=True))
    sys.stdout.write(text)
    return ExitStatus.OK


def cmd_diff(args) -> int:
    m = load_metamodel(args.metamodel)
    a, b = load_model(args.a), load_model(args.b)
    diff = diff_models(a, b, m)
    la, lb = _label(args.a), _label(args.b)

    def section(title, items):
        print(f"{title}:")
        for item in sorted(items):
            print(f"  {item}")

    section(f"only in {la}", diff.only_in_a)
    section(f"only in {lb}", diff.only_in_b)
    section("shared", diff.shared)
    section(f"edges only in {la}", [str(e) for e in diff.edges_only_in_a])
    section(f"edges only in {lb}", [str(e) for e in diff.edges_only_in_b])
    return ExitStatus.OK


# --- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="migmeta", description="Cloud migration process metamodel toolkit.")
    parser.add_argument("--version", action="version", version=f"migmeta {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    ref_help = "core (final), core-1.0, core-1.1, a .cmx extension, or a migmeta-json/1 file"

    p = sub.add_parser("validate", help="check a metamodel for well-formedness")
    p.add_argument("metamodel", help=ref_help)
    p.add_argument("--base", help="metamodel the .cmx extension applies to (default: its extends version)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("check", help="check instance models for conformance")
    p.add_argument("metamodel", help=ref_help)
    p.add_argument("models", nargs="+", help=".cmi or JSON instance models")
    p.add_argument("--strict-edges", action="store_true", help="require uses edges to match metamodel relationships")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("coverage", help="print a concept (or relationship) coverage matrix")
    p.add_argument("metamodel", help=ref_help)
    p.add_argument("models", nargs="*", help=".cmi or JSON instance models, one column each")
    p.add_argument("--rows", help="comma-separated concept ids (default: every concept)")
    p.add_argument("--relationships", action="store_true", help="rows are metamodel relationships")
    p.add_argument("--format", choices=("csv", "md"), default="csv")
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("tailor", help="extend or subset a metamodel")
    p.add_argument("metamodel", help=ref_help)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--extend", action="append", metavar="CMX", help="additive extension (repeatable)")
    group.add_argument("--select", metavar="IDS", help="comma-separated concept ids to keep, or ALL")
    p.add_argument("--name", default="subset", help="version suffix for --select (default: subset)")
    p.add_argument("--out", help="output path; .cmx writes the replayable extension, anything else JSON")
    p.set_defaults(func=cmd_tailor)

    p = sub.add_parser("export", help="render a metamodel or instance model")
    p.add_argument("source", help=ref_help + ", or a .cmi model")
    p.add_argument("--format", choices=("dot", "json", "checklist"), required=True)
    p.add_argument("--definitions", action="store_true", help="include definitions (DOT tooltips)")
    p.add_argument("--no-clusters", action="store_true", help="do not group DOT nodes by phase")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("diff", help="compare the coverage of two instance models")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--metamodel", default="core", help=ref_help)
    p.set_defaults(func=cmd_diff)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return int(args.func(args))
    except InputError as exc:
        _err(*exc.args)
        return ExitStatus.INPUT_ERROR
    except ConformanceError as exc:
        _err(*(f"{exc.report.model_name}: {v}" for v in exc.report.violations))
        return ExitStatus.FINDINGS
    except MigmetaError as exc:
        _err(str(exc), *(f"  {d}" for d in exc.diagnostics))
        return ExitStatus.FINDINGS if exc.code in _FINDING_CODES else ExitStatus.INPUT_ERROR
    except BrokenPipeError:
        return ExitStatus.OK
    except Exception:  # noqa: BLE001 - last-resort guard for the exit-status contract
        traceback.print_exc()
        return ExitStatus.INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
