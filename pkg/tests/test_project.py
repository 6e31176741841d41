import copy
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import random_project_doc
from simcontracts import load_example_project, load_project, read_project, save_project
from simcontracts.errors import ContractError, DanglingReference, DslSyntaxError, DuplicateId, SchemaError
from simcontracts.projectfile import example_project_path, project_to_dict, write_project


def example_doc():
    return json.loads(example_project_path().read_text(encoding="utf-8"))


def test_example_loads():
    p = load_example_project()
    assert p.variables.names == ("ego_speed", "pos_err", "road_type")
    assert sorted(p.contracts) == ["C1", "C2a", "C2b", "Ctc"]
    assert [m.id for m in p.models] == ["M1", "M2a", "M2b"]
    assert p.contract("C1").alphabet.names == ("ego_speed", "road_type")
    assert p.test_case("tc_highway").bindings == {"road_type": "hw"}


def test_example_round_trip():
    p = load_example_project()
    text = save_project(p)
    q = load_project(text)
    assert q == p
    assert save_project(q) == text
    assert text.endswith("\n")


def test_bundled_file_is_canonical():
    assert example_project_path().read_text(encoding="utf-8") == save_project(load_example_project())


def test_write_and_read(tmp_path):
    path = tmp_path / "p.json"
    write_project(load_example_project(), path)
    assert read_project(path) == load_example_project()


def test_dangling_contract_names_id_and_location():
    doc = example_doc()
    doc["models"][0]["contract"] = "C9"
    with pytest.raises(DanglingReference) as info:
        load_project(doc)
    assert "models[0].contract" in str(info.value) and "'C9'" in str(info.value)


@pytest.mark.parametrize(
    "mutate,cls,needle",
    [
        (lambda d: d.pop("format_version"), SchemaError, "format_version"),
        (lambda d: d.update(format_version="2"), SchemaError, "format_version"),
        (lambda d: d["variables"][0].pop("kind"), SchemaError, "variables[0]"),
        (lambda d: d["variables"][0].update(domain=[5, 1]), SchemaError, "variables[0]"),
        (lambda d: d["contracts"][0].pop("guarantee"), SchemaError, "contracts[0]"),
        (lambda d: d["contracts"].append(dict(d["contracts"][0])), DuplicateId, "contract"),
        (lambda d: d["models"][0].update(component="I9"), DanglingReference, "models[0].component"),
        (lambda d: d["components"][0]["ports"][0].update(variable="speed"), DanglingReference, "components[0].ports[0]"),
        (lambda d: d["test_cases"][0]["bindings"].update(wind=3), DanglingReference, "test_cases[0].bindings"),
        (lambda d: d["contracts"][0].update(variables=["nope"]), DanglingReference, "contracts[0].variables"),
        (lambda d: d["models"][0].update(cost=-1), ContractError, "models[0]"),
    ],
)
def test_schema_errors(mutate, cls, needle):
    doc = example_doc()
    mutate(doc)
    with pytest.raises(cls) as info:
        load_project(doc)
    assert needle in str(info.value)


def test_expression_errors_are_located():
    doc = example_doc()
    doc["contracts"][1]["assume"] = "road_type in {hw,\n ru"
    with pytest.raises(DslSyntaxError) as info:
        load_project(doc)
    assert "contracts[1].assume" in str(info.value)
    assert (info.value.line, info.value.column) == (2, 4)


def test_invalid_json_reports_position():
    with pytest.raises(SchemaError) as info:
        load_project('{"format_version": "1",\n  "variables": [}')
    assert info.value.line == 2


def test_contract_variables_default_to_referenced():
    doc = example_doc()
    del doc["contracts"][0]["variables"]
    c = load_project(doc).contract(doc["contracts"][0]["id"])
    assert c.alphabet.names == ("ego_speed", "road_type")


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_random_projects_round_trip(rng):
    doc, _ = random_project_doc(rng)
    p = load_project(copy.deepcopy(doc))
    text = save_project(p)
    q = load_project(text)
    assert q == p
    assert save_project(q) == text
    assert project_to_dict(q) == json.loads(text)
