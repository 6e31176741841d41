"""Test-case contracts, setup enumeration and cheapest-valid-setup selection."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

from .architecture import Architecture, SetupAssignment, check_composability, check_setup
from .assertions import AssertionSet
from .contracts import (
    Contract,
    compose_all,
    quotient,
    refinement_witness,
    refines,
    refines_literal,
    saturate,
)
from .errors import (
    CandidateLimitExceeded,
    EvaluationVariableUncontrolled,
    NoModelsForComponent,
    StructuralError,
    TargetComponentAssigned,
)
from .language import parse_assertion, parse_expression, referenced_variables, render_assertion

DEFAULT_LIMIT = 10_000


@dataclass(frozen=True)
class TestCaseSpec:
    """Concrete scenario bindings plus the validity requirement of a test case."""

    __test__ = False  # not a pytest class

    id: str
    bindings: Mapping[str, Any] = field(default_factory=dict)
    validity_requirement: str = "true"
    operating_conditions: str | None = None
    evaluation_variables: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "bindings", dict(sorted(self.bindings.items())))
        evs = self.evaluation_variables
        if not evs:
            evs = referenced_variables(parse_expression(self.validity_requirement))
        object.__setattr__(self, "evaluation_variables", tuple(sorted(evs)))


def build_test_case_contract(tc: TestCaseSpec, arch: Architecture) -> Contract:
    """Operating conditions and bindings become the assumption, the validity
    requirement the guarantee; both over the architecture's alphabet."""
    alpha = arch.alphabet
    controlled = arch.controlled_variables
    for name in tc.evaluation_variables:
        alpha[name]
        if name not in controlled:
            raise EvaluationVariableUncontrolled(
                f"test case {tc.id}: evaluation variable {name} is not controlled by any component"
            )
    assume = AssertionSet.universe(alpha)
    for name, value in tc.bindings.items():
        var = alpha[name]
        var.check_value(value)
        if name in controlled:
            raise StructuralError(f"test case {tc.id}: scenario parameter {name} is controlled by a component")
        assume = assume & AssertionSet.from_box(alpha, {name: value})
    if tc.operating_conditions is not None:
        assume = assume & parse_assertion(tc.operating_conditions, alpha)
    req = parse_expression(tc.validity_requirement)
    stray = sorted(referenced_variables(req) - set(tc.evaluation_variables))
    if stray:
        raise StructuralError(f"test case {tc.id}: requirement mentions non-evaluation variables {stray}")
    guarantee = parse_assertion(tc.validity_requirement, alpha)
    return Contract(tc.id, alpha, assume, guarantee)


@dataclass(frozen=True, eq=False)
class SetupCandidate:
    assignment: dict
    total_cost: Fraction
    valid: bool
    composed_contract: Contract | None = None
    diagnostics: tuple = ()
    witness: dict | None = None

    @property
    def model_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.assignment.values()))

    @property
    def reason(self) -> str | None:
        if self.valid:
            return None
        return "composability" if self.diagnostics else "refinement"

    def to_dict(self) -> dict:
        out = {
            "assignment": dict(self.assignment),
            "models": list(self.model_ids),
            "cost": cost_to_json(self.total_cost),
            "valid": self.valid,
        }
        if self.composed_contract is not None:
            out["composed_contract"] = contract_to_dict(self.composed_contract)
        if not self.valid:
            out["reason"] = self.reason
            out["diagnostics"] = [d.to_dict() for d in self.diagnostics]
            out["witness"] = self.witness
        return out


def cost_to_json(cost: Fraction):
    return cost.numerator if cost.denominator == 1 else str(cost)


def contract_to_dict(c: Contract) -> dict:
    return {
        "id": c.id,
        "variables": list(c.alphabet.names),
        "assume": render_assertion(c.assumption),
        "guarantee": render_assertion(c.guarantee),
    }


@dataclass(frozen=True, eq=False)
class ConfigurationReport:
    test_case: str
    valid: tuple
    rejected: tuple
    strict: bool = False

    @property
    def best(self) -> SetupCandidate | None:
        return self.valid[0] if self.valid else None

    def to_dict(self) -> dict:
        return {
            "test_case": self.test_case,
            "refinement": "literal" if self.strict else "saturated",
            "valid": [c.to_dict() for c in self.valid],
            "rejected": [c.to_dict() for c in self.rejected],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def summary(self) -> str:
        lines = [f"test case {self.test_case}: {len(self.valid)} valid, {len(self.rejected)} rejected"]
        for i, c in enumerate(self.valid, 1):
            lines.append(f"  {i}. {{{', '.join(c.model_ids)}}}  cost {c.total_cost}")
        for c in self.rejected:
            lines.append(f"  x  {{{', '.join(c.model_ids)}}}  cost {c.total_cost}  ({c.reason})")
            for d in c.diagnostics:
                lines.append(f"       {d.message}")
            if c.witness is not None:
                w = ", ".join(f"{k}={_fmt(v)}" for k, v in c.witness.items())
                lines.append(f"       witness: {w}")
        return "\n".join(lines)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def evaluate_setup(
    arch: Architecture, tc_contract: Contract, setup: SetupAssignment, *, strict: bool = False
) -> SetupCandidate:
    """Composability, composition and refinement check of one assignment.

    Model contracts are equalized to the architecture alphabet, saturated
    (unless ``strict``) and composed in model-id order.
    """
    plan = check_composability(arch, setup)
    models = [arch.model(mid) for mid in sorted(plan.assignment.values())]
    cost = sum((m.cost for m in models), Fraction(0))
    if not plan.ok:
        return SetupCandidate(plan.assignment, cost, False, diagnostics=plan.diagnostics)
    alpha = arch.alphabet
    # the composition formula is only meaningful on saturated operands (an
    # unsaturated (false, false) would compose to the strongest contract of
    # all); strict mode reads every contract exactly as written
    operands = [m.contract.extend_alphabet(alpha) for m in models]
    if not strict:
        operands = [saturate(c) for c in operands]
    composed = compose_all(operands, id="*".join(m.id for m in models))
    target = tc_contract.extend_alphabet(alpha)
    ok = refines_literal(composed, target) if strict else refines(composed, saturate(target))
    witness = None if ok else refinement_witness(composed, target, strict=strict)
    return SetupCandidate(plan.assignment, cost, ok, composed, witness=witness)


def enumerate_setups(arch: Architecture, limit: int = DEFAULT_LIMIT) -> list[dict]:
    """Every total assignment, components and models in id order."""
    options = []
    for comp in arch.components:
        models = arch.models_for(comp.id)
        if not models:
            raise NoModelsForComponent(f"component {comp.id} has no simulation models")
        options.append([m.id for m in models])
    count = 1
    for o in options:
        count *= len(o)
    if count > limit:
        raise CandidateLimitExceeded(f"{count} candidate setups exceed the limit of {limit}")
    ids = [c.id for c in arch.components]
    return [dict(zip(ids, combo)) for combo in itertools.product(*options)]


def configure(
    arch: Architecture, tc: TestCaseSpec | Contract, *, strict: bool = False, limit: int = DEFAULT_LIMIT
) -> ConfigurationReport:
    """Evaluate every candidate setup against the test case.

    Valid setups are ordered by total cost, ties broken by the sorted tuple of
    model ids.
    """
    tc_contract = tc if isinstance(tc, Contract) else build_test_case_contract(tc, arch)
    candidates = [evaluate_setup(arch, tc_contract, s, strict=strict) for s in enumerate_setups(arch, limit)]
    valid = sorted((c for c in candidates if c.valid), key=lambda c: (c.total_cost, c.model_ids))
    rejected = [c for c in candidates if not c.valid]
    return ConfigurationReport(tc_contract.id, tuple(valid), tuple(rejected), strict)


def derive_missing_requirement(
    arch: Architecture,
    tc: TestCaseSpec | Contract,
    partial: SetupAssignment,
    target_component: str,
    id: str | None = None,
) -> Contract:
    """Requirement contract for a model still missing in ``target_component``.

    Any model whose saturated contract refines the result completes
    ``partial`` into a sufficiently valid setup.
    """
    arch.component(target_component)
    if target_component in partial:
        raise TargetComponentAssigned(f"component {target_component} is already assigned to {partial[target_component]}")
    missing = [c.id for c in arch.components if c.id != target_component and c.id not in partial]
    if missing:
        raise StructuralError(f"partial setup does not assign a model to {missing}")
    partial = check_setup(arch, partial, partial=True)
    plan = check_composability(arch, partial, partial=True)
    if not plan.ok:
        raise StructuralError("partial setup is not composable: " + "; ".join(d.message for d in plan.diagnostics))
    alpha = arch.alphabet
    tc_contract = (tc if isinstance(tc, Contract) else build_test_case_contract(tc, arch)).extend_alphabet(alpha)
    models = [arch.model(mid) for mid in sorted(partial.values())]
    if models:
        c_partial = compose_all([saturate(m.contract.extend_alphabet(alpha)) for m in models])
    else:
        c_partial = Contract.true(alpha)
    return quotient(saturate(tc_contract), saturate(c_partial), id=id or f"{tc_contract.id}/{target_component}")

