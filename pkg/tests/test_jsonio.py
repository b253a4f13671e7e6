import json

import jsonschema
import pytest
from hypothesis import given, settings

from migmeta.canonical import build_canonical, build_version_1_0
from migmeta.core import MigmetaError
from migmeta.dsl import InstanceModel
from migmeta.fixtures import FIXTURES, load_fixture
from migmeta.jsonio import SCHEMA_ID, export_json, import_metamodel_json, import_model_json, load_schema

from strategies import instance_models

SCHEMA = load_schema()


def test_canonical_export_shape():
    text = export_json(build_canonical())
    doc = json.loads(text)
    assert '"version": "final"' in text
    assert doc["schema"] == SCHEMA_ID
    assert doc["phases"] == ["Plan", "Design", "Enable"]
    assert sum(c["kind"] == "phase" for c in doc["concepts"].values()) == 3
    jsonschema.validate(doc, SCHEMA)


def test_empty_model_export():
    doc = json.loads(export_json(InstanceModel("empty", "final")))
    assert doc["activities"] == {}
    assert doc["edges"] == []
    jsonschema.validate(doc, SCHEMA)


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_json_round_trip(name):
    model = load_fixture(name)
    doc = json.loads(export_json(model))
    jsonschema.validate(doc, SCHEMA)
    assert import_model_json(export_json(model)) == model


@pytest.mark.parametrize("build", [build_canonical, build_version_1_0])
def test_metamodel_json_round_trip(build):
    m = build()
    back = import_metamodel_json(export_json(m))
    assert back == m
    assert list(back.concepts) == list(m.concepts)


def test_export_is_stable():
    assert export_json(build_canonical()) == export_json(build_canonical())


@pytest.mark.parametrize("text", [
    "not json",
    "[]",
    '{"schema": "other"}',
    '{"schema": "migmeta-json/1", "type": "metamodel"}',
    '{"schema": "migmeta-json/1", "type": "model", "name": "x"}',
    b"\xff\xfe",
])
def test_bad_model_documents(text):
    with pytest.raises(MigmetaError) as err:
        import_model_json(text)
    assert err.value.code == "BAD_JSON"


def test_wrong_document_type():
    with pytest.raises(MigmetaError):
        import_metamodel_json(export_json(InstanceModel("m", "final")))


def test_export_rejects_other_types():
    with pytest.raises(TypeError):
        export_json({"a": 1})


@settings(max_examples=100, deadline=None)
@given(instance_models())
def test_generated_models_round_trip_and_validate(model):
    text = export_json(model)
    jsonschema.validate(json.loads(text), SCHEMA)
    assert import_model_json(text) == model
