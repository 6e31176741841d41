"""Assume-guarantee contracts and their algebra.

A contract ``(A, G)`` pairs an assumption on the environment with a
guarantee of the component.  Everything here is a pure function of immutable
values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

from .assertions import Alphabet, AssertionSet
from .errors import AlphabetMismatch, UnknownVariable


@dataclass(frozen=True, eq=False)
class Contract:
    id: str
    alphabet: Alphabet
    assumption: AssertionSet
    guarantee: AssertionSet
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise ValueError("contract id must be non-empty")
        for part, e in (("assumption", self.assumption), ("guarantee", self.guarantee)):
            if e.alphabet != self.alphabet:
                raise AlphabetMismatch(f"contract {self.id}: {part} is not over the contract alphabet")

    @classmethod
    def make(cls, id: str, assumption: AssertionSet, guarantee: AssertionSet, **metadata) -> Contract:
        return cls(id, assumption.alphabet, assumption, guarantee, dict(metadata))

    @classmethod
    def true(cls, alphabet: Alphabet, id: str = "true") -> Contract:
        """The contract that assumes and guarantees nothing."""
        u = AssertionSet.universe(alphabet)
        return cls(id, alphabet, u, u)

    def __eq__(self, other) -> bool:
        return isinstance(other, Contract) and self.id == other.id and equivalent(self, other)

    __hash__ = None

    def with_id(self, id: str) -> Contract:
        return Contract(id, self.alphabet, self.assumption, self.guarantee, dict(self.metadata))

    def extend_alphabet(self, alphabet: Alphabet) -> Contract:
        if alphabet == self.alphabet:
            return self
        return Contract(
            self.id,
            alphabet,
            self.assumption.extend_alphabet(alphabet),
            self.guarantee.extend_alphabet(alphabet),
            dict(self.metadata),
        )

    def __repr__(self) -> str:
        from .language import render_assertion

        return (
            f"Contract({self.id!r}, A={render_assertion(self.assumption)!r}, "
            f"G={render_assertion(self.guarantee)!r})"
        )


@dataclass(frozen=True)
class PortPartition:
    controlled: frozenset
    uncontrolled: frozenset

    def __post_init__(self):
        object.__setattr__(self, "controlled", frozenset(self.controlled))
        object.__setattr__(self, "uncontrolled", frozenset(self.uncontrolled))
        both = self.controlled & self.uncontrolled
        if both:
            raise ValueError(f"ports both controlled and uncontrolled: {sorted(both)}")


def equivalent(c1: Contract, c2: Contract) -> bool:
    """Semantic equality of assumption and guarantee, ignoring ids."""
    return c1.alphabet == c2.alphabet and c1.assumption == c2.assumption and c1.guarantee == c2.guarantee


def _same_alphabet(c1: Contract, c2: Contract) -> None:
    if c1.alphabet != c2.alphabet:
        raise AlphabetMismatch(
            f"contracts {c1.id} and {c2.id} have different alphabets; equalize them first"
        )


def requirement(c: Contract) -> AssertionSet:
    """The implication A => G as a set: G | !A."""
    return c.guarantee | ~c.assumption


def saturate(c: Contract) -> Contract:
    return Contract(c.id, c.alphabet, c.assumption, requirement(c), dict(c.metadata))


def is_saturated(c: Contract) -> bool:
    return (~c.assumption).is_subset(c.guarantee)


def satisfies(behavior: AssertionSet, c: Contract) -> bool:
    """True iff ``A & behavior`` is included in ``G``."""
    if behavior.alphabet != c.alphabet:
        raise AlphabetMismatch(f"behavior is not over the alphabet of contract {c.id}")
    return (c.assumption & behavior).is_subset(c.guarantee)


def refines_literal(c2: Contract, c1: Contract) -> bool:
    """``c2`` refines ``c1`` read verbatim: A2 >= A1 and G2 <= G1."""
    _same_alphabet(c1, c2)
    return c1.assumption.is_subset(c2.assumption) and c2.guarantee.is_subset(c1.guarantee)


def refines(c2: Contract, c1: Contract) -> bool:
    """Semantic refinement: the literal check on the saturated forms."""
    _same_alphabet(c1, c2)
    if not c1.assumption.is_subset(c2.assumption):
        return False
    return requirement(c2).is_subset(requirement(c1))


def refinement_witness(c2: Contract, c1: Contract, strict: bool = False) -> dict | None:
    """A valuation showing why ``c2`` does not refine ``c1``, else ``None``.

    The assumption side is tried first: a point of A1 outside A2.
    """
    _same_alphabet(c1, c2)
    w = (c1.assumption - c2.assumption).sample()
    if w is not None:
        return w
    if strict:
        return (c2.guarantee - c1.guarantee).sample()
    return (requirement(c2) - requirement(c1)).sample()


def _check_ports(c: Contract, names: Iterable[str]) -> None:
    for n in names:
        if n not in c.alphabet:
            raise UnknownVariable(f"port variable {n!r} is not in the alphabet of contract {c.id}")


def is_compatible(c: Contract, ports: PortPartition) -> bool:
    """The assumption does not constrain the controlled ports."""
    _check_ports(c, ports.controlled | ports.uncontrolled)
    return c.assumption.is_receptive(ports.controlled)


def is_consistent(c: Contract, ports: PortPartition) -> bool:
    """The guarantee does not constrain the uncontrolled ports."""
    _check_ports(c, ports.controlled | ports.uncontrolled)
    return c.guarantee.is_receptive(ports.uncontrolled)


def are_compatible(c1: Contract, c2: Contract, composite_ports: PortPartition) -> bool:
    """Relational compatibility: the composition is compatible w.r.t. the
    caller-supplied port partition of the composite."""
    return is_compatible(compose(c1, c2), composite_ports)


def are_consistent(c1: Contract, c2: Contract, composite_ports: PortPartition) -> bool:
    return is_consistent(compose(c1, c2), composite_ports)


def equalize_alphabets(c1: Contract, c2: Contract) -> tuple[Contract, Contract]:
    """Re-home both contracts over the union of their alphabets.

    Raises VariableDeclConflict when a shared name is declared differently.
    """
    alpha = c1.alphabet.union(c2.alphabet)
    return c1.extend_alphabet(alpha), c2.extend_alphabet(alpha)


def compose(c1: Contract, c2: Contract, id: str | None = None) -> Contract:
    """Parallel composition ``((A1 & A2) | !(G1 & G2), G1 & G2)``."""
    c1, c2 = equalize_alphabets(c1, c2)
    g = c1.guarantee & c2.guarantee
    a = (c1.assumption & c2.assumption) | ~g
    return Contract(id or f"({c1.id}*{c2.id})", c1.alphabet, a, g)


def compose_all(contracts: Sequence[Contract], id: str | None = None) -> Contract:
    """Left fold of :func:`compose` in the given order."""
    if not contracts:
        raise ValueError("nothing to compose")
    alpha = reduce(Alphabet.union, (c.alphabet for c in contracts))
    contracts = [c.extend_alphabet(alpha) for c in contracts]
    out = reduce(compose, contracts)
    return out.with_id(id) if id else out


def quotient(c_top: Contract, c1: Contract, id: str | None = None) -> Contract:
    """Largest contract that composed with ``c1`` refines ``c_top``.

    Unsaturated operands are saturated first; the result records this in
    ``metadata["saturated_operands"]``.
    """
    c_top, c1 = equalize_alphabets(c_top, c1)
    fixed = []
    if not is_saturated(c_top):
        c_top = saturate(c_top)
        fixed.append(c_top.id)
    if not is_saturated(c1):
        c1 = saturate(c1)
        fixed.append(c1.id)
    a = c_top.assumption & c1.guarantee
    g = (c1.assumption & c_top.guarantee) | ~a
    return Contract(id or f"({c_top.id}/{c1.id})", c_top.alphabet, a, g, {"saturated_operands": fixed})


def conjoin(c1: Contract, c2: Contract, id: str | None = None) -> Contract:
    """Conjunction ``(A1 | A2, G1 & G2)``; refines both operands."""
    c1, c2 = equalize_alphabets(c1, c2)
    return Contract(
        id or f"({c1.id}^{c2.id})",
        c1.alphabet,
        c1.assumption | c2.assumption,
        c1.guarantee & c2.guarantee,
    )
