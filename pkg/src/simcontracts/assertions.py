"""Exact set algebra over typed variable valuations.

An assertion is a set of valuations of a finite, bounded alphabet, stored as
a finite union of axis-aligned boxes.  Real and integer variables are
constrained by intervals with open/closed endpoint flags, enumeration and
boolean variables by label subsets.  All operations only copy and compare
endpoints, so results are bit-exact.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from itertools import chain
from typing import Any, Iterable, Iterator, Mapping, Union

from .errors import (
    AlphabetMismatch,
    DomainViolation,
    MissingVariable,
    NotASuperAlphabet,
    TypeMismatch,
    UnknownVariable,
    VariableDeclConflict,
)

REAL = "real"
INTEGER = "integer"
BOOLEAN = "boolean"
ENUMERATION = "enumeration"
KINDS = (REAL, INTEGER, BOOLEAN, ENUMERATION)
NUMERIC_KINDS = (REAL, INTEGER)

Label = Union[str, bool]
Valuation = Mapping[str, Any]


@dataclass(frozen=True)
class Interval:
    """Interval with per-endpoint open/closed flags."""

    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        for x in (self.lo, self.hi):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise TypeError(f"interval endpoint must be a number, got {x!r}")
            if math.isnan(x):
                raise ValueError("interval endpoint cannot be NaN")

    @classmethod
    def closed(cls, lo, hi) -> Interval:
        return cls(lo, hi, True, True)

    @classmethod
    def open(cls, lo, hi) -> Interval:
        return cls(lo, hi, False, False)

    @classmethod
    def point(cls, x) -> Interval:
        return cls(x, x, True, True)

    # endpoint keys make open/closed comparisons plain tuple comparisons
    @property
    def start_key(self) -> tuple:
        return (self.lo, 0 if self.lo_closed else 1)

    @property
    def end_key(self) -> tuple:
        return (self.hi, 0 if self.hi_closed else -1)

    @property
    def is_empty(self) -> bool:
        return self.start_key > self.end_key

    def contains(self, x) -> bool:
        return self.start_key <= (x, 0) <= self.end_key

    def __str__(self) -> str:
        return f"{'[' if self.lo_closed else '('}{self.lo}, {self.hi}{']' if self.hi_closed else ')'}"


Atom = Union[Interval, frozenset]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
RESERVED = frozenset({"in", "true", "false"})  # keywords of the assertion language


@dataclass(frozen=True)
class VariableDecl:
    """A typed variable with a unit and a bounded domain.

    ``domain`` is ``(lo, hi)`` for real and integer variables and the tuple of
    labels for enumerations.  Boolean domains are always ``(False, True)``.
    """

    name: str
    kind: str
    unit: str = ""
    domain: tuple = ()

    def __post_init__(self):
        if not isinstance(self.name, str) or not _IDENT.fullmatch(self.name) or self.name in RESERVED:
            raise ValueError(f"invalid variable name {self.name!r}")
        if self.kind not in KINDS:
            raise ValueError(f"variable {self.name}: unknown kind {self.kind!r}")
        dom = tuple(self.domain)
        if self.kind == BOOLEAN:
            dom = (False, True)
        elif self.kind == ENUMERATION:
            if not dom:
                raise ValueError(f"variable {self.name}: enumeration domain is empty")
            if len(set(dom)) != len(dom):
                raise ValueError(f"variable {self.name}: duplicate labels in domain")
            if not all(isinstance(x, str) and _IDENT.fullmatch(x) for x in dom):
                raise ValueError(f"variable {self.name}: enumeration labels must be identifiers")
        else:
            if len(dom) != 2:
                raise ValueError(f"variable {self.name}: numeric domain must be (lo, hi)")
            lo, hi = dom
            for x in dom:
                if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
                    raise ValueError(f"variable {self.name}: domain bounds must be finite numbers")
            if self.kind == INTEGER:
                if lo != int(lo) or hi != int(hi):
                    raise ValueError(f"variable {self.name}: integer domain bounds must be integral")
                lo, hi = int(lo), int(hi)
            if lo > hi:
                raise ValueError(f"variable {self.name}: domain lower bound exceeds upper bound")
            dom = (lo, hi)
        object.__setattr__(self, "domain", dom)

    @property
    def is_numeric(self) -> bool:
        return self.kind in NUMERIC_KINDS

    @property
    def full_atom(self) -> Atom:
        if self.is_numeric:
            return Interval(self.domain[0], self.domain[1], True, True)
        return frozenset(self.domain)

    def in_domain(self, value) -> bool:
        if self.kind == BOOLEAN:
            return isinstance(value, bool)
        if self.kind == ENUMERATION:
            return isinstance(value, str) and value in self.domain
        if isinstance(value, bool) or not isinstance(value, (int, float)) or math.isnan(value):
            return False
        if self.kind == INTEGER and value != math.floor(value):
            return False
        return self.domain[0] <= value <= self.domain[1]

    def check_value(self, value):
        if not self.in_domain(value):
            raise DomainViolation(f"value {value!r} is outside the domain of {self.name}")
        return value


class Alphabet:
    """Ordered collection of variable declarations (sorted by name)."""

    __slots__ = ("variables", "_index")

    def __init__(self, variables: Iterable[VariableDecl] = ()):
        index: dict[str, VariableDecl] = {}
        for v in variables:
            prev = index.get(v.name)
            if prev is not None and prev != v:
                raise VariableDeclConflict(f"conflicting declarations for variable {v.name}")
            index[v.name] = v
        self.variables = tuple(index[n] for n in sorted(index))
        self._index = index

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def __getitem__(self, name: str) -> VariableDecl:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariable(f"unknown variable {name!r}") from None

    def __contains__(self, name) -> bool:
        return name in self._index

    def __iter__(self) -> Iterator[VariableDecl]:
        return iter(self.variables)

    def __len__(self) -> int:
        return len(self.variables)

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.variables == other.variables

    def __hash__(self) -> int:
        return hash(self.variables)

    def __repr__(self) -> str:
        return f"Alphabet({list(self.names)})"

    def union(self, other: Alphabet) -> Alphabet:
        return Alphabet(chain(self.variables, other.variables))

    def restrict(self, names: Iterable[str]) -> Alphabet:
        return Alphabet(self[n] for n in names)

    def issubset(self, other: Alphabet) -> bool:
        return all(n in other._index and other._index[n] == v for n, v in self._index.items())

    def check_valuation(self, valuation: Valuation) -> None:
        for name in valuation:
            if name not in self._index:
                raise UnknownVariable(f"valuation names unknown variable {name!r}")
        for v in self.variables:
            if v.name not in valuation:
                raise MissingVariable(f"valuation lacks variable {v.name!r}")
            v.check_value(valuation[v.name])


# -- atom level --------------------------------------------------------------


def _integerize(iv: Interval) -> Interval:
    lo_f = math.floor(iv.lo)
    lo = (lo_f if iv.lo_closed else lo_f + 1) if iv.lo == lo_f else lo_f + 1
    hi_c = math.ceil(iv.hi)
    hi = (hi_c if iv.hi_closed else hi_c - 1) if iv.hi == hi_c else hi_c - 1
    return Interval(lo, hi, True, True)


def normalize_atom(var: VariableDecl, atom) -> Atom | None:
    """Clip ``atom`` to the declared domain; ``None`` means empty."""
    if var.is_numeric:
        if not isinstance(atom, Interval):
            raise TypeMismatch(f"variable {var.name} ({var.kind}) needs an interval constraint")
        dlo, dhi = var.domain
        lo, lc, hi, hc = atom.lo, atom.lo_closed, atom.hi, atom.hi_closed
        if lo < dlo:
            lo, lc = dlo, True
        if hi > dhi:
            hi, hc = dhi, True
        iv = Interval(lo, hi, lc, hc)
        if iv.is_empty:
            return None
        if var.kind == INTEGER:
            iv = _integerize(iv)
            if iv.is_empty:
                return None
        return iv
    if isinstance(atom, Interval):
        raise TypeMismatch(f"variable {var.name} ({var.kind}) needs a label-set constraint")
    labels = frozenset(atom)
    bad = [x for x in labels if not var.in_domain(x)]
    if bad:
        raise DomainViolation(f"labels {sorted(map(str, bad))} are not in the domain of {var.name}")
    return labels or None


def _is_full(var: VariableDecl, atom: Atom) -> bool:
    return atom == var.full_atom


def _atom_intersect(var: VariableDecl, a: Atom, b: Atom) -> Atom | None:
    if isinstance(a, Interval):
        lo, lc = max(a.start_key, b.start_key)
        hi, he = min(a.end_key, b.end_key)
        iv = Interval(lo, hi, lc == 0, he == 0)
        return None if iv.is_empty else iv
    return (a & b) or None


def _atom_complement(var: VariableDecl, a: Atom) -> list[Atom]:
    if isinstance(a, Interval):
        dlo, dhi = var.domain
        pieces = [Interval(dlo, a.lo, True, not a.lo_closed), Interval(a.hi, dhi, not a.hi_closed, True)]
        out = []
        for p in pieces:
            if not p.is_empty:
                p = _integerize(p) if var.kind == INTEGER else p
                if not p.is_empty:
                    out.append(p)
        return out
    rest = frozenset(var.domain) - a
    return [rest] if rest else []


def _atom_subset(a: Atom, b: Atom) -> bool:
    if isinstance(a, Interval):
        return b.start_key <= a.start_key and a.end_key <= b.end_key
    return a <= b


def _atom_merge(var: VariableDecl, a: Atom, b: Atom) -> Atom | None:
    """Union of two atoms if it is again a single atom."""
    if not isinstance(a, Interval):
        return a | b
    if b.start_key < a.start_key:
        a, b = b, a
    connected = b.start_key <= a.end_key or (a.hi == b.lo and (a.hi_closed or b.lo_closed))
    if var.kind == INTEGER:
        connected = connected or b.lo == a.hi + 1
    if not connected:
        return None
    hi, he = max(a.end_key, b.end_key)
    return Interval(a.lo, hi, a.lo_closed, he == 0)


def _atom_sort_key(atom: Atom) -> tuple:
    if isinstance(atom, Interval):
        return (0, atom.start_key, atom.end_key)
    return (1, tuple(sorted((type(x).__name__, str(x)) for x in atom)))


def atom_contains(var: VariableDecl, atom: Atom, value) -> bool:
    if isinstance(atom, Interval):
        return atom.contains(value)
    return value in atom


# -- boxes -------------------------------------------------------------------


@dataclass(frozen=True)
class Box:
    """Cartesian product of atoms; variables not listed are unconstrained."""

    atoms: tuple = ()
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        atoms = tuple(sorted(self.atoms, key=lambda kv: kv[0]))
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "_index", dict(atoms))

    def get(self, name: str) -> Atom | None:
        return self._index.get(name)

    @property
    def constrained(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.atoms)

    def sort_key(self) -> tuple:
        return tuple((n, _atom_sort_key(a)) for n, a in self.atoms)


def _make_box(alphabet: Alphabet, constraints: Mapping[str, Atom]) -> Box | None:
    atoms = []
    for name, raw in constraints.items():
        var = alphabet[name]
        atom = normalize_atom(var, raw)
        if atom is None:
            return None
        if not _is_full(var, atom):
            atoms.append((name, atom))
    return Box(tuple(atoms))


def _box_intersect(alphabet: Alphabet, b1: Box, b2: Box) -> Box | None:
    atoms = dict(b1.atoms)
    for name, a2 in b2.atoms:
        a1 = atoms.get(name)
        if a1 is None:
            atoms[name] = a2
            continue
        a = _atom_intersect(alphabet[name], a1, a2)
        if a is None:
            return None
        atoms[name] = a
    return Box(tuple(atoms.items()))


def _box_subset(b1: Box, b2: Box) -> bool:
    for name, a2 in b2.atoms:
        a1 = b1.get(name)
        if a1 is None or not _atom_subset(a1, a2):
            return False
    return True


def _box_subtract(alphabet: Alphabet, b1: Box, b2: Box) -> list[Box]:
    """``b1 minus b2`` as a list of pairwise disjoint boxes."""
    if _box_intersect(alphabet, b1, b2) is None:
        return [b1]
    pieces = []
    cur = dict(b1.atoms)
    for name, a2 in b2.atoms:
        var = alphabet[name]
        a1 = cur.get(name, var.full_atom)
        for c in _atom_complement(var, a2):
            x = _atom_intersect(var, a1, c)
            if x is not None:
                piece = dict(cur)
                piece[name] = x
                pieces.append(Box(tuple(piece.items())))
        cur[name] = _atom_intersect(var, a1, a2)
    return pieces


def _box_merge(alphabet: Alphabet, b1: Box, b2: Box) -> Box | None:
    names = set(b1.constrained) | set(b2.constrained)
    diff = [n for n in names if b1.get(n) != b2.get(n)]
    if not diff:
        return b1
    if len(diff) > 1:
        return None
    (name,) = diff
    var = alphabet[name]
    merged = _atom_merge(var, b1.get(name) or var.full_atom, b2.get(name) or var.full_atom)
    if merged is None:
        return None
    atoms = {n: a for n, a in b1.atoms if n != name}
    if not _is_full(var, merged):
        atoms[name] = merged
    return Box(tuple(atoms.items()))


def _normalize(alphabet: Alphabet, boxes: Iterable[Box]) -> tuple[Box, ...]:
    boxes = list(dict.fromkeys(boxes))
    changed = True
    while changed:
        changed = False
        # drop boxes subsumed by another one
        kept: list[Box] = []
        for i, b in enumerate(boxes):
            if any(j != i and _box_subset(b, c) and (j < i or not _box_subset(c, b)) for j, c in enumerate(boxes)):
                changed = True
                continue
            kept.append(b)
        boxes = kept
        i = 0
        while i < len(boxes):
            j = i + 1
            while j < len(boxes):
                m = _box_merge(alphabet, boxes[i], boxes[j])
                if m is not None:
                    boxes[i] = m
                    del boxes[j]
                    changed = True
                    j = i + 1
                else:
                    j += 1
            i += 1
    return tuple(sorted(boxes, key=Box.sort_key))


# -- assertion sets ----------------------------------------------------------


def _coerce_atom(var: VariableDecl, spec) -> Atom:
    if isinstance(spec, Interval):
        return spec
    if var.is_numeric:
        if isinstance(spec, tuple) and len(spec) == 2:
            return Interval.closed(*spec)
        return Interval.point(spec)
    if isinstance(spec, (set, frozenset, list, tuple)):
        return frozenset(spec)
    return frozenset([spec])


class AssertionSet:
    """Set of valuations over ``alphabet``, the union of ``boxes``.

    Equality (``==``) is semantic: two sets are equal when each includes the
    other.  Instances are immutable.
    """

    __slots__ = ("alphabet", "boxes")

    def __init__(self, alphabet: Alphabet, boxes: Iterable[Box] = (), *, normalized: bool = False):
        boxes = tuple(boxes)
        for b in boxes:
            for name in b.constrained:
                alphabet[name]
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "boxes", boxes if normalized else _normalize(alphabet, boxes))

    def __setattr__(self, name, value):
        raise AttributeError("AssertionSet is immutable")

    # construction helpers

    @classmethod
    def universe(cls, alphabet: Alphabet) -> AssertionSet:
        return cls(alphabet, (Box(),), normalized=True)

    @classmethod
    def empty(cls, alphabet: Alphabet) -> AssertionSet:
        return cls(alphabet, (), normalized=True)

    @classmethod
    def from_box(cls, alphabet: Alphabet, constraints: Mapping[str, Any]) -> AssertionSet:
        """Single box. Values may be an ``Interval``, a ``(lo, hi)`` closed
        pair, a label collection, or a scalar meaning a point."""
        return cls.from_boxes(alphabet, [constraints])

    @classmethod
    def from_boxes(cls, alphabet: Alphabet, boxes: Iterable[Mapping[str, Any]]) -> AssertionSet:
        out = []
        for constraints in boxes:
            atoms = {n: _coerce_atom(alphabet[n], s) for n, s in constraints.items()}
            b = _make_box(alphabet, atoms)
            if b is not None:
                out.append(b)
        return cls(alphabet, out)

    # membership

    def member(self, valuation: Valuation) -> bool:
        self.alphabet.check_valuation(valuation)
        return self._contains(valuation)

    def _contains(self, valuation: Valuation) -> bool:
        alpha = self.alphabet
        for b in self.boxes:
            if all(atom_contains(alpha[n], a, valuation[n]) for n, a in b.atoms):
                return True
        return False

    def __contains__(self, valuation) -> bool:
        return self.member(valuation)

    # boolean algebra

    def _check(self, other: AssertionSet) -> None:
        if not isinstance(other, AssertionSet):
            raise TypeError(f"expected AssertionSet, got {type(other).__name__}")
        if self.alphabet != other.alphabet:
            raise AlphabetMismatch(f"alphabets differ: {list(self.alphabet.names)} vs {list(other.alphabet.names)}")

    def union(self, other: AssertionSet) -> AssertionSet:
        self._check(other)
        return AssertionSet(self.alphabet, self.boxes + other.boxes)

    def intersect(self, other: AssertionSet) -> AssertionSet:
        self._check(other)
        alpha = self.alphabet
        out = []
        for b1 in self.boxes:
            for b2 in other.boxes:
                b = _box_intersect(alpha, b1, b2)
                if b is not None:
                    out.append(b)
        return AssertionSet(alpha, out)

    def difference(self, other: AssertionSet) -> AssertionSet:
        self._check(other)
        return AssertionSet(self.alphabet, self._difference_boxes(other))

    def _difference_boxes(self, other: AssertionSet, stop_at_first: bool = False) -> list[Box]:
        alpha = self.alphabet
        pieces = list(self.boxes)
        for b2 in other.boxes:
            pieces = [p for b in pieces for p in _box_subtract(alpha, b, b2)]
            if not pieces:
                break
            if len(pieces) > 16:
                pieces = list(_normalize(alpha, pieces))
        return pieces

    def complement(self) -> AssertionSet:
        return AssertionSet.universe(self.alphabet).difference(self)

    __or__ = union
    __and__ = intersect
    __sub__ = difference
    __invert__ = complement

    # decisions

    def is_empty(self) -> bool:
        return not self.boxes

    def is_universe(self) -> bool:
        return AssertionSet.universe(self.alphabet).is_subset(self)

    def is_subset(self, other: AssertionSet) -> bool:
        self._check(other)
        return not self._difference_boxes(other)

    def equals(self, other: AssertionSet) -> bool:
        return self.is_subset(other) and other.is_subset(self)

    def __le__(self, other: AssertionSet) -> bool:
        return self.is_subset(other)

    def __ge__(self, other: AssertionSet) -> bool:
        return other.is_subset(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AssertionSet) or self.alphabet != other.alphabet:
            return False
        return self.equals(other)

    __hash__ = None

    # alphabet manipulation

    def project(self, names: Iterable[str]) -> AssertionSet:
        """Existential projection onto ``names``."""
        keep = set(names)
        for n in keep:
            self.alphabet[n]
        alpha = self.alphabet.restrict(keep)
        boxes = [Box(tuple((n, a) for n, a in b.atoms if n in keep)) for b in self.boxes]
        return AssertionSet(alpha, boxes)

    def extend_alphabet(self, alphabet: Alphabet) -> AssertionSet:
        """Inverse projection: new variables are left unconstrained."""
        if not self.alphabet.issubset(alphabet):
            raise NotASuperAlphabet(
                f"{list(alphabet.names)} does not contain the declarations of {list(self.alphabet.names)}"
            )
        if alphabet == self.alphabet:
            return self
        return AssertionSet(alphabet, self.boxes, normalized=True)

    def is_receptive(self, names: Iterable[str]) -> bool:
        """True when the set does not constrain any variable in ``names``."""
        names = set(names)
        for n in names:
            self.alphabet[n]
        rest = [n for n in self.alphabet.names if n not in names]
        return self.project(rest).extend_alphabet(self.alphabet).is_subset(self)

    def constrained_variables(self) -> tuple[str, ...]:
        """Variables the set actually depends on (semantically)."""
        candidates = {n for b in self.boxes for n in b.constrained}
        return tuple(n for n in self.alphabet.names if n in candidates and not self.is_receptive([n]))

    # witnesses

    def sample(self) -> dict | None:
        """One valuation inside the set, or ``None`` when empty."""
        if not self.boxes:
            return None
        box = self.boxes[0]
        out = {}
        for var in self.alphabet:
            atom = box.get(var.name) or var.full_atom
            out[var.name] = _pick(var, atom)
        return out

    def __repr__(self) -> str:
        from .language import render_assertion

        return f"AssertionSet({render_assertion(self)!r})"


def _pick(var: VariableDecl, atom: Atom):
    if isinstance(atom, Interval):
        if var.kind == INTEGER or atom.lo == atom.hi:
            return atom.lo
        mid = atom.lo / 2 + atom.hi / 2
        if atom.contains(mid):
            return mid
        return atom.lo if atom.lo_closed else atom.hi
    return next(x for x in var.domain if x in atom)


# function-style aliases


def member(valuation: Valuation, e: AssertionSet) -> bool:
    return e.member(valuation)


def union(e1: AssertionSet, e2: AssertionSet) -> AssertionSet:
    return e1.union(e2)


def intersect(e1: AssertionSet, e2: AssertionSet) -> AssertionSet:
    return e1.intersect(e2)


def complement(e: AssertionSet) -> AssertionSet:
    return e.complement()


def is_empty(e: AssertionSet) -> bool:
    return e.is_empty()


def is_subset(e1: AssertionSet, e2: AssertionSet) -> bool:
    return e1.is_subset(e2)


def equals(e1: AssertionSet, e2: AssertionSet) -> bool:
    e1._check(e2)
    return e1.equals(e2)


def project(e: AssertionSet, names: Iterable[str]) -> AssertionSet:
    return e.project(names)


def extend_alphabet(e: AssertionSet, alphabet: Alphabet) -> AssertionSet:
    return e.extend_alphabet(alphabet)


def is_receptive(e: AssertionSet, names: Iterable[str]) -> bool:
    return e.is_receptive(names)
