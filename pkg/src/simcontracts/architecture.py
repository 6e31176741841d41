"""Components, ports, candidate simulation models and composability checks."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping

from .assertions import Alphabet, VariableDecl
from .contracts import Contract, PortPartition
from .errors import DuplicateId, StructuralError

CONTROLLED = "controlled"
UNCONTROLLED = "uncontrolled"

SetupAssignment = Mapping[str, str]  # component id -> model id


def as_cost(value) -> Fraction:
    if isinstance(value, bool):
        raise StructuralError(f"invalid cost {value!r}")
    try:
        cost = Fraction(str(value)) if isinstance(value, float) else Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise StructuralError(f"invalid cost {value!r}") from None
    if cost < 0:
        raise StructuralError(f"cost must be non-negative, got {value!r}")
    return cost


@dataclass(frozen=True)
class PortDecl:
    variable: VariableDecl
    direction: str

    def __post_init__(self):
        if self.direction not in (CONTROLLED, UNCONTROLLED):
            raise StructuralError(f"port {self.variable.name}: unknown direction {self.direction!r}")


@dataclass(frozen=True)
class ComponentDecl:
    id: str
    ports: tuple

    def __post_init__(self):
        ports = tuple(sorted(self.ports, key=lambda p: p.variable.name))
        names = [p.variable.name for p in ports]
        dup = sorted({n for n in names if names.count(n) > 1})
        if dup:
            raise StructuralError(f"component {self.id}: duplicate ports {dup}")
        object.__setattr__(self, "ports", ports)

    @property
    def partition(self) -> PortPartition:
        return PortPartition(
            frozenset(p.variable.name for p in self.ports if p.direction == CONTROLLED),
            frozenset(p.variable.name for p in self.ports if p.direction == UNCONTROLLED),
        )

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(p.variable for p in self.ports)


@dataclass(frozen=True, eq=False)
class SimulationModelDecl:
    """A simulation model implementing a component, with its validity-domain
    contract and an abstract compute cost."""

    id: str
    component: str
    contract: Contract
    cost: Fraction = Fraction(0)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "cost", as_cost(self.cost))


class Architecture:
    """Components plus the candidate models for each of them."""

    def __init__(self, components: Iterable[ComponentDecl], models: Iterable[SimulationModelDecl] = ()):
        self.components = tuple(sorted(components, key=lambda c: c.id))
        self.models = tuple(sorted(models, key=lambda m: m.id))
        self._components = {}
        for c in self.components:
            if c.id in self._components:
                raise DuplicateId(f"duplicate component id {c.id!r}")
            self._components[c.id] = c
        self._models = {}
        for m in self.models:
            if m.id in self._models:
                raise DuplicateId(f"duplicate model id {m.id!r}")
            comp = self._components.get(m.component)
            if comp is None:
                raise StructuralError(f"model {m.id} references unknown component {m.component!r}")
            missing = [p.variable.name for p in comp.ports if p.variable.name not in m.contract.alphabet]
            if missing:
                raise StructuralError(
                    f"contract {m.contract.id} of model {m.id} does not cover ports {missing} of {comp.id}"
                )
            self._models[m.id] = m

    def component(self, id: str) -> ComponentDecl:
        try:
            return self._components[id]
        except KeyError:
            raise StructuralError(f"unknown component {id!r}") from None

    def model(self, id: str) -> SimulationModelDecl:
        try:
            return self._models[id]
        except KeyError:
            raise StructuralError(f"unknown model {id!r}") from None

    def models_for(self, component_id: str) -> tuple[SimulationModelDecl, ...]:
        return tuple(m for m in self.models if m.component == component_id)

    @property
    def alphabet(self) -> Alphabet:
        """Union of all port variables and contract alphabets."""
        parts = [c.alphabet for c in self.components] + [m.contract.alphabet for m in self.models]
        return reduce(Alphabet.union, parts, Alphabet())

    @property
    def controlled_variables(self) -> frozenset:
        return frozenset(n for c in self.components for n in c.partition.controlled)

    def external_variables(self) -> frozenset:
        """Variables no component controls."""
        return frozenset(self.alphabet.names) - self.controlled_variables


@dataclass(frozen=True)
class Diagnostic:
    code: str  # decl-conflict | multiple-sources | incompatible | inconsistent
    message: str
    subjects: tuple = ()

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "subjects": list(self.subjects)}


@dataclass(frozen=True, eq=False)
class CompositionPlan:
    """Outcome of :func:`check_composability`.

    ``alphabet`` is ``None`` when declarations conflict.  The plan is usable
    only when ``ok``.
    """

    assignment: dict
    alphabet: Alphabet | None
    controllers: dict
    external_inputs: frozenset
    diagnostics: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.diagnostics


def _describe_decl(d: VariableDecl) -> str:
    return f"{d.kind}, unit {d.unit!r}, domain {list(d.domain)}"


def check_setup(arch: Architecture, setup: SetupAssignment, *, partial: bool = False) -> dict:
    """Validate an assignment structurally and return it in canonical order."""
    for cid, mid in setup.items():
        arch.component(cid)
        m = arch.model(mid)
        if m.component != cid:
            raise StructuralError(f"model {mid} implements {m.component}, not {cid}")
    if not partial:
        missing = [c.id for c in arch.components if c.id not in setup]
        if missing:
            raise StructuralError(f"setup does not assign a model to {missing}")
    return {cid: setup[cid] for cid in sorted(setup)}


def check_composability(arch: Architecture, setup: SetupAssignment, *, partial: bool = False) -> CompositionPlan:
    """Syntactic and port-level checks for a chosen set of models.

    Reports every violation: conflicting variable declarations, variables
    with more than one source, and contracts that are not compatible or not
    consistent with their component's ports.
    """
    setup = check_setup(arch, setup, partial=partial)
    comps = [arch.component(cid) for cid in setup]
    models = [arch.model(mid) for mid in setup.values()]
    diags: list[Diagnostic] = []

    decls: dict[str, dict[VariableDecl, list[str]]] = defaultdict(lambda: defaultdict(list))
    for c in comps:
        for p in c.ports:
            decls[p.variable.name][p.variable].append(f"component {c.id}")
    for m in models:
        for v in m.contract.alphabet:
            decls[v.name][v].append(f"contract {m.contract.id}")
    conflict = False
    for name in sorted(decls):
        variants = decls[name]
        if len(variants) > 1:
            conflict = True
            kinds = {d.kind for d in variants}
            units = {d.unit for d in variants}
            what = "kind mismatch" if len(kinds) > 1 else "unit mismatch" if len(units) > 1 else "domain mismatch"
            detail = "; ".join(
                f"{', '.join(sorted(srcs))}: {_describe_decl(d)}"
                for d, srcs in sorted(variants.items(), key=lambda kv: sorted(kv[1]))
            )
            diags.append(Diagnostic("decl-conflict", f"variable {name}: {what} ({detail})", (name,)))

    controllers: dict[str, list[str]] = defaultdict(list)
    for c in comps:
        for n in c.partition.controlled:
            controllers[n].append(c.id)
    for name in sorted(controllers):
        srcs = sorted(controllers[name])
        if len(srcs) > 1:
            diags.append(
                Diagnostic("multiple-sources", f"variable {name} has {len(srcs)} sources ({', '.join(srcs)})", (name, *srcs))
            )

    for cid, mid in setup.items():
        comp, m = arch.component(cid), arch.model(mid)
        ports = comp.partition
        assume, guar = m.contract.assumption, m.contract.guarantee
        bad = sorted(n for n in ports.controlled if not assume.is_receptive([n]))
        if bad or not assume.is_receptive(ports.controlled):
            diags.append(
                Diagnostic(
                    "incompatible",
                    f"contract {m.contract.id} of model {mid}: assumption constrains controlled ports {bad or sorted(ports.controlled)} of {cid}",
                    (mid, *bad),
                )
            )
        bad = sorted(n for n in ports.uncontrolled if not guar.is_receptive([n]))
        if bad or not guar.is_receptive(ports.uncontrolled):
            diags.append(
                Diagnostic(
                    "inconsistent",
                    f"contract {m.contract.id} of model {mid}: guarantee constrains uncontrolled ports {bad or sorted(ports.uncontrolled)} of {cid}",
                    (mid, *bad),
                )
            )

    alphabet = None
    external = frozenset()
    if not conflict:
        parts = [c.alphabet for c in comps] + [m.contract.alphabet for m in models]
        alphabet = reduce(Alphabet.union, parts, Alphabet())
        external = frozenset(alphabet.names) - frozenset(controllers)
    return CompositionPlan(
        assignment=setup,
        alphabet=alphabet,
        controllers={n: controllers[n][0] for n in sorted(controllers) if len(controllers[n]) == 1},
        external_inputs=external,
        diagnostics=tuple(diags),
    )


def external_inputs(plan: CompositionPlan) -> frozenset:
    """Variables left uncontrolled by every chosen model."""
    return plan.external_inputs
