"""Monitors generated from contracts, checked against recorded runs.

Checking is pointwise in time: each row of a trace is substituted into the
assumption and guarantee of every monitored contract.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

from .architecture import Architecture
from .assertions import BOOLEAN, ENUMERATION, INTEGER, Alphabet, AssertionSet, atom_contains
from .contracts import Contract
from .errors import TraceFormatError

ASSUMPTION_EXIT = "assumption-exit"
GUARANTEE_BREACH = "guarantee-breach"
DOMAIN_EXIT = "domain-exit"
KINDS = (ASSUMPTION_EXIT, GUARANTEE_BREACH, DOMAIN_EXIT)


@dataclass(frozen=True, eq=False)
class ContractMonitor:
    contract_id: str
    model_id: str | None
    assumption: AssertionSet
    guarantee: AssertionSet
    variables: tuple  # variables the assertions actually depend on

    @classmethod
    def from_contract(cls, contract: Contract, model_id: str | None = None, alphabet: Alphabet | None = None):
        if alphabet is not None:
            contract = contract.extend_alphabet(alphabet)
        a, g = contract.assumption, contract.guarantee
        relevant = sorted(set(a.constrained_variables()) | set(g.constrained_variables()))
        return cls(contract.id, model_id, a, g, tuple(relevant))


@dataclass(frozen=True, eq=False)
class MonitorSpec:
    alphabet: Alphabet
    monitors: tuple

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(sorted({v for m in self.monitors for v in m.variables}))


def generate_monitors(arch: Architecture, setup, tc_contract: Contract | None = None) -> MonitorSpec:
    """One monitor per chosen model contract (model-id order), then one for
    the test-case contract.  ``setup`` is a component->model mapping or a
    :class:`SetupCandidate`."""
    assignment = getattr(setup, "assignment", setup)
    alpha = arch.alphabet
    if tc_contract is not None:
        alpha = alpha.union(tc_contract.alphabet)
    monitors = []
    for mid in sorted(assignment.values()):
        m = arch.model(mid)
        monitors.append(ContractMonitor.from_contract(m.contract, mid, alpha))
    if tc_contract is not None:
        monitors.append(ContractMonitor.from_contract(tc_contract, None, alpha))
    return MonitorSpec(alpha, tuple(monitors))


@dataclass(frozen=True)
class Violation:
    kind: str
    contract_id: str
    model_id: str | None
    time: float
    row: int
    variables: tuple  # empty: the assertion failed jointly, no single culprit

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "contract": self.contract_id,
            "model": self.model_id,
            "time": self.time,
            "row": self.row,
            "variables": list(self.variables),
        }


@dataclass(frozen=True)
class MonitorReport:
    contract_ids: tuple
    violations: tuple
    rows: int

    @property
    def counts(self) -> dict:
        c = Counter(v.kind for v in self.violations)
        return {k: c.get(k, 0) for k in KINDS}

    @property
    def verdict(self) -> str:
        counts = self.counts
        if not self.violations:
            return "clean"
        if counts[GUARANTEE_BREACH] == 0 and counts[DOMAIN_EXIT] == 0:
            return "assumption-exits-only"
        return "breaches"

    def by_contract(self) -> dict[str, list[Violation]]:
        out = {cid: [] for cid in self.contract_ids}
        for v in self.violations:
            out[v.contract_id].append(v)
        return out

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "rows": self.rows,
            "counts": self.counts,
            "contracts": {cid: [v.to_dict() for v in vs] for cid, vs in self.by_contract().items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def table(self) -> str:
        lines = [f"verdict: {self.verdict}  ({self.rows} rows, {len(self.violations)} violations)"]
        if self.violations:
            lines.append(f"{'row':>6}  {'time':>10}  {'kind':<17} {'contract':<12} {'model':<10} variables")
            for v in self.violations:
                lines.append(
                    f"{v.row:>6}  {v.time:>10g}  {v.kind:<17} {v.contract_id:<12} {v.model_id or '-':<10} "
                    f"{', '.join(v.variables) or '(whole assertion)'}"
                )
        return "\n".join(lines)


def offending_variables(e: AssertionSet, valuation: Mapping) -> tuple[str, ...]:
    """Variables whose atom fails in every box of ``e`` at ``valuation``."""
    if not e.boxes:
        return ()
    alpha = e.alphabet
    out = []
    for name in alpha.names:
        if all(b.get(name) is not None and not atom_contains(alpha[name], b.get(name), valuation[name]) for b in e.boxes):
            out.append(name)
    return tuple(out)


def _holds(e: AssertionSet, valuation: Mapping) -> bool:
    alpha = e.alphabet
    return any(all(atom_contains(alpha[n], a, valuation[n]) for n, a in b.atoms) for b in e.boxes)


class TraceMonitor:
    """Incremental checker; feed rows in time order, then ask for the report.

    Not thread-safe: one instance per stream.
    """

    def __init__(self, spec: MonitorSpec, *, gated: bool = True):
        self.spec = spec
        self.gated = gated
        self._filler = {v.name: v.domain[0] for v in spec.alphabet}
        self._last_time = None
        self._rows = 0
        self._violations: list[Violation] = []

    def feed(self, time: float, valuation: Mapping) -> list[Violation]:
        row = self._rows
        if isinstance(time, bool) or not isinstance(time, (int, float)) or not math.isfinite(time):
            raise TraceFormatError(f"invalid time {time!r}", row=row)
        if self._last_time is not None and not time > self._last_time:
            raise TraceFormatError(f"time {time} does not increase (previous {self._last_time})", row=row)
        missing = [v for v in self.spec.variables if v not in valuation]
        if missing:
            raise TraceFormatError(f"missing values for {missing}", row=row)
        alpha = self.spec.alphabet
        # variables no monitor depends on may be absent or out of domain
        full = dict(self._filler)
        for name, value in valuation.items():
            if name in alpha and alpha[name].in_domain(value):
                full[name] = value
        found = []
        for mon in self.spec.monitors:
            outside = tuple(v for v in mon.variables if not alpha[v].in_domain(valuation[v]))
            if outside:
                found.append(Violation(DOMAIN_EXIT, mon.contract_id, mon.model_id, time, row, outside))
                continue
            vals = full
            assumed = _holds(mon.assumption, vals)
            if not assumed:
                found.append(
                    Violation(ASSUMPTION_EXIT, mon.contract_id, mon.model_id, time, row, offending_variables(mon.assumption, vals))
                )
                if self.gated:
                    continue
            if not _holds(mon.guarantee, vals):
                found.append(
                    Violation(GUARANTEE_BREACH, mon.contract_id, mon.model_id, time, row, offending_variables(mon.guarantee, vals))
                )
        self._last_time = time
        self._rows += 1
        self._violations.extend(found)
        return found

    def feed_rows(self, rows: Iterable[tuple[float, Mapping]]) -> None:
        for time, valuation in rows:
            self.feed(time, valuation)

    def report(self) -> MonitorReport:
        ids = tuple(dict.fromkeys(m.contract_id for m in self.spec.monitors))
        return MonitorReport(ids, tuple(self._violations), self._rows)


@dataclass(frozen=True)
class Trace:
    alphabet: Alphabet
    rows: tuple  # of (time, {name: value})

    def __post_init__(self):
        last = None
        names = set(self.alphabet.names)
        for i, (t, val) in enumerate(self.rows):
            if last is not None and not t > last:
                raise TraceFormatError(f"time {t} does not increase (previous {last})", row=i)
            if set(val) != names:
                raise TraceFormatError(f"row covers {sorted(val)}, expected {sorted(names)}", row=i)
            last = t


def check_trace(trace: Trace, spec: MonitorSpec, *, gated: bool = True) -> MonitorReport:
    missing = [v for v in spec.variables if v not in trace.alphabet]
    if missing:
        raise TraceFormatError(f"trace lacks columns {missing}")
    mon = TraceMonitor(spec, gated=gated)
    mon.feed_rows(trace.rows)
    return mon.report()


def _parse_value(var, text: str, line: int):
    text = text.strip()
    if var.kind == ENUMERATION:
        if not text:
            raise TraceFormatError(f"empty value for {var.name}", line=line, column=1)
        return text
    if var.kind == BOOLEAN:
        if text in ("true", "false"):
            return text == "true"
        raise TraceFormatError(f"cannot parse {text!r} as boolean for {var.name}", line=line, column=1)
    try:
        if var.kind == INTEGER:
            try:
                return int(text)
            except ValueError:
                pass
        x = float(text)
    except ValueError:
        raise TraceFormatError(f"cannot parse {text!r} as a number for {var.name}", line=line, column=1) from None
    if math.isnan(x):
        raise TraceFormatError(f"NaN value for {var.name}", line=line, column=1)
    return x


def parse_trace_csv(text: str, alphabet: Alphabet) -> Trace:
    """Read a CSV trace: header ``time,<var>,...``, ``#`` comment lines."""
    lines = [(i + 1, ln) for i, ln in enumerate(text.splitlines()) if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise TraceFormatError("empty trace")
    header_line, header = lines[0]
    cols = [c.strip() for c in next(csv.reader([header]))]
    if not cols or cols[0] != "time":
        raise TraceFormatError("first column header must be 'time'", line=header_line, column=1)
    names = cols[1:]
    if len(set(names)) != len(names):
        raise TraceFormatError("duplicate column headers", line=header_line, column=1)
    for n in names:
        if n not in alphabet:
            raise TraceFormatError(f"unknown column {n!r}", line=header_line, column=1)
    sub = alphabet.restrict(names)
    rows = []
    last = None
    for lineno, ln in lines[1:]:
        cells = next(csv.reader([ln]))
        if len(cells) != len(cols):
            raise TraceFormatError(f"expected {len(cols)} values, got {len(cells)}", line=lineno, column=1)
        try:
            t = float(cells[0])
        except ValueError:
            raise TraceFormatError(f"cannot parse time {cells[0]!r}", line=lineno, column=1) from None
        if not math.isfinite(t):
            raise TraceFormatError(f"invalid time {cells[0]!r}", line=lineno, column=1)
        if last is not None and not t > last:
            raise TraceFormatError(f"time {t} does not increase (previous {last})", line=lineno, column=1)
        last = t
        rows.append((t, {n: _parse_value(sub[n], c, lineno) for n, c in zip(names, cells[1:])}))
    return Trace(sub, tuple(rows))


def read_trace_csv(path, alphabet: Alphabet) -> Trace:
    with open(path, encoding="utf-8") as f:
        return parse_trace_csv(f.read(), alphabet)


def trace_to_csv(trace: Trace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = list(trace.alphabet.names)
    w.writerow(["time", *names])
    for t, val in trace.rows:
        w.writerow([repr(t), *(_cell(val[n]) for n in names)])
    return buf.getvalue()


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)
