"""Project files: variables, contracts, components, models and test cases.

A project is a UTF-8 JSON document::

    {
      "format_version": "1",
      "variables":  [{"name": "ego_speed", "kind": "real", "unit": "m/s", "domain": [0, 70]}, ...],
      "contracts":  [{"id": "C1", "variables": [...], "assume": "<expr>", "guarantee": "<expr>"}, ...],
      "components": [{"id": "I1", "ports": [{"variable": "ego_speed", "direction": "controlled"}, ...]}, ...],
      "models":     [{"id": "M1", "component": "I1", "contract": "C1", "cost": 2, "metadata": {}}, ...],
      "test_cases": [{"id": "tc", "bindings": {"road_type": "hw"}, "operating_conditions": null,
                      "validity_requirement": "<expr>", "evaluation_variables": [...]}, ...]
    }

``variables`` of a contract is optional and defaults to the variables its
expressions mention.  :func:`save_project` writes a canonical, byte-stable
document.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .architecture import Architecture, ComponentDecl, PortDecl, SimulationModelDecl
from .assertions import BOOLEAN, Alphabet, VariableDecl
from .configurator import TestCaseSpec, build_test_case_contract, cost_to_json
from .contracts import Contract
from .errors import ContractError, DanglingReference, DuplicateId, SchemaError
from .language import elaborate, parse_expression, referenced_variables, render_assertion

FORMAT_VERSION = "1"
EXAMPLE_PROJECT = "two_component_example.json"


@dataclass(eq=False)
class Project:
    variables: Alphabet
    contracts: dict = field(default_factory=dict)  # id -> Contract
    components: tuple = ()
    models: tuple = ()
    test_cases: dict = field(default_factory=dict)  # id -> TestCaseSpec

    @property
    def architecture(self) -> Architecture:
        return Architecture(self.components, self.models)

    def contract(self, id: str) -> Contract:
        try:
            return self.contracts[id]
        except KeyError:
            raise DanglingReference(f"unknown contract {id!r}") from None

    def test_case(self, id: str) -> TestCaseSpec:
        try:
            return self.test_cases[id]
        except KeyError:
            raise DanglingReference(f"unknown test case {id!r}") from None

    def test_case_contract(self, id: str) -> Contract:
        return build_test_case_contract(self.test_case(id), self.architecture)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Project):
            return NotImplemented
        return (
            self.variables == other.variables
            and self.contracts.keys() == other.contracts.keys()
            and all(self.contracts[k] == other.contracts[k] for k in self.contracts)
            and self.components == other.components
            and [_model_key(m) for m in self.models] == [_model_key(m) for m in other.models]
            and self.test_cases == other.test_cases
        )


def _model_key(m: SimulationModelDecl) -> tuple:
    return (m.id, m.component, m.contract.id, m.cost, json.dumps(m.metadata, sort_keys=True))


# -- loading -------------------------------------------------------------------


def _require(obj: Any, key: str, where: str, types=None):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    if key not in obj:
        raise SchemaError(f"{where}: missing field {key!r}")
    value = obj[key]
    if types is not None and not isinstance(value, types):
        raise SchemaError(f"{where}.{key}: expected {_type_name(types)}")
    return value


def _type_name(types) -> str:
    types = types if isinstance(types, tuple) else (types,)
    return " or ".join({"str": "string", "list": "array", "dict": "object"}.get(t.__name__, t.__name__) for t in types)


def _list(doc: dict, key: str) -> list:
    value = doc.get(key, [])
    if not isinstance(value, list):
        raise SchemaError(f"{key}: expected an array")
    return value


def _located(exc: ContractError, where: str) -> ContractError:
    exc.message = f"{where}: {exc.message}"
    exc.args = (str(exc),)
    return exc


def _unique(items, kind: str) -> None:
    seen = set()
    for where, id in items:
        if id in seen:
            raise DuplicateId(f"{where}: duplicate {kind} id {id!r}")
        seen.add(id)


def _resolve_names(alpha: Alphabet, names, where: str) -> list:
    if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
        raise SchemaError(f"{where}: expected an array of variable names")
    for n in names:
        if n not in alpha:
            raise DanglingReference(f"{where}: unknown variable {n!r}")
    return names


def load_project(document: str | bytes | dict) -> Project:
    """Parse and resolve a project document (JSON text or decoded object)."""
    if isinstance(document, (str, bytes, bytearray)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from None
        except UnicodeDecodeError:
            raise SchemaError("project file is not valid UTF-8") from None
    else:
        doc = document
    if not isinstance(doc, dict):
        raise SchemaError("project document must be an object")
    version = _require(doc, "format_version", "project")
    if str(version) != FORMAT_VERSION:
        raise SchemaError(f"unsupported format_version {version!r} (supported: {FORMAT_VERSION!r})")

    decls = []
    for i, v in enumerate(_list(doc, "variables")):
        where = f"variables[{i}]"
        name = _require(v, "name", where, str)
        kind = _require(v, "kind", where, str)
        unit = v.get("unit", "")
        if not isinstance(unit, str):
            raise SchemaError(f"{where}.unit: expected string")
        domain = v.get("domain", []) if kind == BOOLEAN else _require(v, "domain", where, list)
        try:
            decls.append(VariableDecl(name, kind, unit, tuple(domain)))
        except ValueError as exc:
            raise SchemaError(f"{where}: {exc}") from None
    _unique(((f"variables[{i}]", d.name) for i, d in enumerate(decls)), "variable")
    alpha = Alphabet(decls)

    contracts = {}
    raw_contracts = _list(doc, "contracts")
    _unique(((f"contracts[{i}]", _require(c, "id", f"contracts[{i}]", str)) for i, c in enumerate(raw_contracts)), "contract")
    for i, c in enumerate(raw_contracts):
        where = f"contracts[{i}]"
        cid = c["id"]
        trees = {}
        for part in ("assume", "guarantee"):
            text = _require(c, part, where, str)
            try:
                trees[part] = parse_expression(text)
            except ContractError as exc:
                raise _located(exc, f"{where}.{part}")
        if "variables" in c:
            names = _resolve_names(alpha, c["variables"], f"{where}.variables")
        else:
            names = [n for n in referenced_variables(trees["assume"]) | referenced_variables(trees["guarantee"]) if n in alpha]
        sub = alpha.restrict(names)
        sets = {}
        for part, tree in trees.items():
            try:
                sets[part] = elaborate(tree, sub)
            except ContractError as exc:
                raise _located(exc, f"{where}.{part}")
        a, g = sets["assume"], sets["guarantee"]
        contracts[cid] = Contract(cid, sub, a, g)

    components = []
    raw_components = _list(doc, "components")
    _unique(((f"components[{i}]", _require(c, "id", f"components[{i}]", str)) for i, c in enumerate(raw_components)), "component")
    for i, c in enumerate(raw_components):
        where = f"components[{i}]"
        ports = []
        for j, p in enumerate(_require(c, "ports", where, list)):
            pw = f"{where}.ports[{j}]"
            var = _require(p, "variable", pw, str)
            if var not in alpha:
                raise DanglingReference(f"{pw}.variable: unknown variable {var!r}")
            direction = _require(p, "direction", pw, str)
            try:
                ports.append(PortDecl(alpha[var], direction))
            except ContractError as exc:
                raise _located(exc, pw)
        try:
            components.append(ComponentDecl(c["id"], tuple(ports)))
        except ContractError as exc:
            raise _located(exc, where)
    comp_ids = {c.id for c in components}

    models = []
    raw_models = _list(doc, "models")
    _unique(((f"models[{i}]", _require(m, "id", f"models[{i}]", str)) for i, m in enumerate(raw_models)), "model")
    for i, m in enumerate(raw_models):
        where = f"models[{i}]"
        comp = _require(m, "component", where, str)
        if comp not in comp_ids:
            raise DanglingReference(f"{where}.component: unknown component {comp!r}")
        cref = _require(m, "contract", where, str)
        if cref not in contracts:
            raise DanglingReference(f"{where}.contract: unknown contract {cref!r}")
        metadata = m.get("metadata", {})
        if not isinstance(metadata, dict):
            raise SchemaError(f"{where}.metadata: expected an object")
        try:
            models.append(SimulationModelDecl(m["id"], comp, contracts[cref], m.get("cost", 0), metadata))
        except ContractError as exc:
            raise _located(exc, where)

    test_cases = {}
    raw_tcs = _list(doc, "test_cases")
    _unique(((f"test_cases[{i}]", _require(t, "id", f"test_cases[{i}]", str)) for i, t in enumerate(raw_tcs)), "test case")
    for i, t in enumerate(raw_tcs):
        where = f"test_cases[{i}]"
        bindings = t.get("bindings", {})
        if not isinstance(bindings, dict):
            raise SchemaError(f"{where}.bindings: expected an object")
        for n in bindings:
            if n not in alpha:
                raise DanglingReference(f"{where}.bindings: unknown variable {n!r}")
        oc = t.get("operating_conditions")
        if oc is not None and not isinstance(oc, str):
            raise SchemaError(f"{where}.operating_conditions: expected string or null")
        req = _require(t, "validity_requirement", where, str)
        evs = _resolve_names(alpha, t.get("evaluation_variables", []), f"{where}.evaluation_variables")
        try:
            test_cases[t["id"]] = TestCaseSpec(t["id"], bindings, req, oc, tuple(evs))
        except ContractError as exc:
            raise _located(exc, f"{where}.validity_requirement")

    project = Project(alpha, contracts, tuple(sorted(components, key=lambda c: c.id)), tuple(sorted(models, key=lambda m: m.id)), test_cases)
    try:
        project.architecture
    except ContractError as exc:
        raise _located(exc, "models")
    return project


def read_project(path) -> Project:
    return load_project(Path(path).read_bytes())


# -- saving --------------------------------------------------------------------


def _sorted_json(value):
    if isinstance(value, dict):
        return {k: _sorted_json(value[k]) for k in sorted(value)}
    if isinstance(value, list):
        return [_sorted_json(v) for v in value]
    return value


def project_to_dict(project: Project) -> dict:
    variables = []
    for v in project.variables:
        entry = {"name": v.name, "kind": v.kind, "unit": v.unit}
        if v.kind != BOOLEAN:
            entry["domain"] = list(v.domain)
        variables.append(entry)
    return {
        "format_version": FORMAT_VERSION,
        "variables": variables,
        "contracts": [
            {
                "id": c.id,
                "variables": list(c.alphabet.names),
                "assume": render_assertion(c.assumption),
                "guarantee": render_assertion(c.guarantee),
            }
            for c in sorted(project.contracts.values(), key=lambda c: c.id)
        ],
        "components": [
            {"id": c.id, "ports": [{"variable": p.variable.name, "direction": p.direction} for p in c.ports]}
            for c in sorted(project.components, key=lambda c: c.id)
        ],
        "models": [
            {
                "id": m.id,
                "component": m.component,
                "contract": m.contract.id,
                "cost": cost_to_json(m.cost),
                "metadata": _sorted_json(m.metadata),
            }
            for m in sorted(project.models, key=lambda m: m.id)
        ],
        "test_cases": [
            {
                "id": t.id,
                "bindings": dict(sorted(t.bindings.items())),
                "operating_conditions": t.operating_conditions,
                "validity_requirement": t.validity_requirement,
                "evaluation_variables": list(t.evaluation_variables),
            }
            for t in sorted(project.test_cases.values(), key=lambda t: t.id)
        ],
    }


def save_project(project: Project) -> str:
    """Canonical JSON text for ``project``."""
    return json.dumps(project_to_dict(project), indent=2, ensure_ascii=False) + "\n"


def write_project(project: Project, path) -> None:
    Path(path).write_text(save_project(project), encoding="utf-8")


def example_project_path():
    """Path to the bundled two-component example project."""
    return resources.files("simcontracts") / "data" / EXAMPLE_PROJECT


def load_example_project() -> Project:
    return load_project(example_project_path().read_bytes())
