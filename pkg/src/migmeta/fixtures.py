"""Access to the case-study models and evolution extensions shipped with the package."""

from __future__ import annotations

from importlib import resources

from .dsl import InstanceModel, MetamodelExtension, parse_extension, parse_model

# Golden order of the three case studies.
CASE_STUDIES = ("informait", "toas", "springtrader")
FIXTURES = CASE_STUDIES + ("informait-narrative",)
# Applied in this order to version 1.0 they reproduce the final metamodel.
EVOLUTION = ("use-logging", "resolve-licensing-issues", "define-roll-back-plan")


def _data(*parts: str):
    return resources.files("migmeta").joinpath("data", *parts)


def fixture_text(name: str) -> str:
    return _data("fixtures", f"{name}.cmi").read_text(encoding="utf-8")


def extension_text(name: str) -> str:
    return _data("ext", f"{name}.cmx").read_text(encoding="utf-8")


def load_fixture(name: str) -> InstanceModel:
    return parse_model(fixture_text(name))


def load_extension(name: str) -> MetamodelExtension:
    return parse_extension(extension_text(name))


def case_studies() -> list[InstanceModel]:
    return [load_fixture(n) for n in CASE_STUDIES]


def evolution_extensions() -> list[MetamodelExtension]:
    return [load_extension(n) for n in EVOLUTION]


def embedded_path(reference: str) -> tuple[str, str] | None:
    """Map ``fixtures/toas.cmi``, ``toas.cmi`` or ``ext/use-logging.cmx`` to (folder, stem) if shipped."""
    ref = reference.replace("\\", "/")
    stem = ref.rsplit("/", 1)[-1]
    for suffix, folder, names in ((".cmi", "fixtures", FIXTURES), (".cmx", "ext", EVOLUTION)):
        if stem.endswith(suffix) and stem[: -len(suffix)] in names:
            return folder, stem[: -len(suffix)]
        if stem in names and "." not in stem:
            return folder, stem
    return None
