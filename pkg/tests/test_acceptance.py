"""Acceptance criteria, one test each, at the stated sizes and time limits.

Each test prints a single PASS/FAIL line (collected into the pytest summary).
Run directly with ``python tests/test_acceptance.py`` for the lines alone.
"""

import json
import random
import time
from contextlib import contextmanager

import numpy as np

import conftest
from gen import (
    random_abstraction_of,
    random_alphabet,
    random_contract,
    random_project_doc,
    random_refinement_of,
    random_set,
)
from oracle import brute_configure, grid_for
from simcontracts import (
    Alphabet,
    Architecture,
    AssertionSet,
    ComponentDecl,
    Contract,
    PortDecl,
    SimulationModelDecl,
    Trace,
    TraceMonitor,
    VariableDecl,
    check_trace,
    compose,
    configure,
    conjoin,
    derive_missing_requirement,
    equivalent,
    generate_monitors,
    is_saturated,
    load_example_project,
    load_project,
    parse_assertion,
    quotient,
    refines,
    refines_literal,
    render_assertion,
    saturate,
)
from simcontracts.errors import ContractError
from simcontracts.monitor import ASSUMPTION_EXIT, DOMAIN_EXIT, GUARANTEE_BREACH
from simcontracts.projectfile import example_project_path


@contextmanager
def criterion(number, title, limit=None):
    """Print one PASS/FAIL line; fail when the body raises or exceeds ``limit`` seconds."""
    info = {}
    start = time.perf_counter()
    try:
        yield info
        elapsed = time.perf_counter() - start
        if limit is not None:
            assert elapsed < limit, f"took {elapsed:.2f} s, limit {limit} s"
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        _line(f"FAIL  criterion {number}: {title} ({elapsed:.2f} s) -- {type(exc).__name__}: {exc}")
        raise
    _line(f"PASS  criterion {number}: {title} ({elapsed:.2f} s{', ' + info['detail'] if 'detail' in info else ''})")


def _line(text):
    print(text)
    conftest.ACCEPTANCE_LINES.append(text)


# 1 -------------------------------------------------------------------------------


def test_criterion_1_boolean_algebra():
    rng = random.Random(101)
    n = 1000
    with criterion(1, f"Boolean-algebra laws on {n} random assertion sets", limit=30) as info:
        for _ in range(n):
            alpha = random_alphabet(rng, max_vars=4)
            _, x = random_set(rng, alpha, max_boxes=4)
            _, y = random_set(rng, alpha, max_boxes=4)
            u, empty = AssertionSet.universe(alpha), AssertionSet.empty(alpha)
            assert ~(x | y) == ~x & ~y
            assert ~(x & y) == ~x | ~y
            assert ~~x == x
            assert x | ~x == u
            assert x & ~x == empty
        info["detail"] = "0 failures"


# 2 -------------------------------------------------------------------------------


def test_criterion_2_oracle_equivalence():
    rng = random.Random(202)
    n = 1000
    points = 0
    with criterion(2, f"grid-oracle membership on {4 * n} set-operation results") as info:
        for _ in range(n):
            alpha = random_alphabet(rng, max_vars=4)
            rx, x = random_set(rng, alpha)
            ry, y = random_set(rng, alpha)
            results = {"union": x | y, "intersect": x & y, "complement": ~x, "difference": x - y}
            g = grid_for(alpha, rx, ry, *results.values())
            mx, my = g.mask(rx), g.mask(ry)
            expected = {"union": mx | my, "intersect": mx & my, "complement": ~mx, "difference": mx & ~my}
            for name, e in results.items():
                assert np.array_equal(g.mask_of(e), expected[name]), (name, render_assertion(e))
            points += 4 * g.size
        info["detail"] = f"{points} grid points, 100% agreement"


# 3 -------------------------------------------------------------------------------


def test_criterion_3_contract_laws():
    rng = random.Random(303)
    n = 500
    with criterion(3, f"contract laws on {n} random saturated pairs/triples", limit=60) as info:
        for _ in range(n):
            alpha = random_alphabet(rng, max_vars=4)
            c1, c2, c3 = (random_contract(rng, alpha, f"C{i}", max_boxes=3) for i in (1, 2, 3))
            c12 = compose(c1, c2)
            assert equivalent(c12, compose(c2, c1))
            assert equivalent(compose(c12, c3), compose(c1, compose(c2, c3)))
            assert is_saturated(c12)
            assert refines(c1, c1)
            r2 = random_refinement_of(rng, c1, "R2")
            r3 = random_refinement_of(rng, r2, "R3")
            assert refines(r2, c1) and refines(r3, r2) and refines(r3, c1)
            assert refines(compose(r2, c2), c12)
            k = conjoin(c1, c2)
            assert refines_literal(k, c1) and refines_literal(k, c2)
        info["detail"] = "0 failures"


# 4 -------------------------------------------------------------------------------


def test_criterion_4_quotient_adjoint():
    rng = random.Random(404)
    n = 500
    nontrivial = 0
    with criterion(4, f"quotient adjoint and maximality on {n} random saturated pairs") as info:
        for _ in range(n):
            alpha = random_alphabet(rng, max_vars=4)
            c1 = random_contract(rng, alpha, "C1", max_boxes=3)
            top = random_contract(rng, alpha, "Top", max_boxes=3)
            q = quotient(top, c1)
            assert refines(compose(c1, q), top)
            # maximality: a C2 that completes C1 below a top built above C1*C2
            c2 = random_contract(rng, alpha, "C2", max_boxes=3)
            top2 = random_abstraction_of(rng, compose(c1, c2), "Top2")
            assert refines(compose(c1, c2), top2)
            assert refines(c2, quotient(top2, c1))
            # and any C2 that happens to complete the unrelated top
            if refines(compose(c1, c2), top):
                nontrivial += 1
                assert refines(c2, q)
        info["detail"] = f"0 failures, {n} constructed + {nontrivial} incidental completions"


# 5 -------------------------------------------------------------------------------


def _example_doc():
    return json.loads(example_project_path().read_text(encoding="utf-8"))


def test_criterion_5_two_component_example():
    with criterion(5, "two-component example: {M1,M2b} valid at 12, {M1,M2a} rejected, M2c reorders", limit=1) as info:
        p = load_example_project()
        report = configure(p.architecture, p.test_case("tc_highway"))
        assert [(c.model_ids, c.total_cost) for c in report.valid] == [(("M1", "M2b"), 12)]
        (bad,) = report.rejected
        assert bad.model_ids == ("M1", "M2a") and bad.reason == "refinement"
        tc = p.test_case_contract("tc_highway")
        assert bad.witness in tc.assumption and bad.witness not in bad.composed_contract.assumption

        doc = _example_doc()
        doc["contracts"].append(
            {"id": "C2c", "variables": ["ego_speed", "pos_err"], "assume": "ego_speed in [0, 70]", "guarantee": "pos_err in [0, 0.2]"}
        )
        doc["models"].append({"id": "M2c", "component": "I2", "contract": "C2c", "cost": 3, "metadata": {}})
        p2 = load_project(doc)
        report2 = configure(p2.architecture, p2.test_case("tc_highway"))
        assert [(c.model_ids, c.total_cost) for c in report2.valid] == [(("M1", "M2c"), 5), (("M1", "M2b"), 12)]
        w = ", ".join(f"{k}={v}" for k, v in bad.witness.items())
        info["detail"] = f"witness {w}"


# 6 -------------------------------------------------------------------------------


def test_criterion_6_quotient_as_requirement():
    with criterion(6, "missing-model requirement for I2 accepts C2b and rejects C2a") as info:
        p = load_example_project()
        arch = p.architecture
        tc = p.test_case_contract("tc_highway")
        q = derive_missing_requirement(arch, tc, {"I1": "M1"}, "I2")
        alpha = arch.alphabet
        c2b = saturate(p.contract("C2b").extend_alphabet(alpha))
        c2a = saturate(p.contract("C2a").extend_alphabet(alpha))
        assert refines(c2b, q)
        assert not refines(c2a, q)
        assert refines(compose(saturate(p.contract("C1").extend_alphabet(alpha)), q), saturate(tc))
        # consistent with the configurator's verdicts
        report = configure(arch, p.test_case("tc_highway"))
        assert {c.assignment["I2"] for c in report.valid} == {"M2b"}
        info["detail"] = f"Q: A = {render_assertion(q.assumption)}"


# 7 -------------------------------------------------------------------------------

X = VariableDecl("x", "real", "m", (0, 100))
Y = VariableDecl("y", "real", "m", (0, 100))
M = VariableDecl("mode", "enumeration", "", ("a", "b", "c"))
Z = VariableDecl("z", "real", "s", (0, 10))
U = VariableDecl("u", "real", "m/s", (0, 20))
V = VariableDecl("v", "real", "m", (0, 2))


def _monitor_setup():
    def contract(id, alpha, assume, guarantee):
        return Contract(id, alpha, parse_assertion(assume, alpha), parse_assertion(guarantee, alpha))

    ca = contract("CA", Alphabet([X, Y]), "x in [0, 50]", "y in [0, 80]")
    cb = contract("CB", Alphabet([M, Z]), "mode in {a, b}", "z in [0, 5]")
    tc_alpha = Alphabet([X, Y, M, Z, U, V])
    tc = contract("tc", tc_alpha, "u in [0, 10]", "v in [0, 1]")
    arch = Architecture(
        [
            ComponentDecl("IA", (PortDecl(X, "uncontrolled"), PortDecl(Y, "controlled"))),
            ComponentDecl("IB", (PortDecl(M, "uncontrolled"), PortDecl(Z, "controlled"))),
        ],
        [SimulationModelDecl("MA", "IA", ca, 1), SimulationModelDecl("MB", "IB", cb, 1)],
    )
    return generate_monitors(arch, {"IA": "MA", "IB": "MB"}, tc)


# (kind, contract, variable, value generator)
_PLANTS = (
    [(ASSUMPTION_EXIT, "CA", "x", lambda r: r.uniform(50.5, 100))] * 4
    + [(ASSUMPTION_EXIT, "CB", "mode", lambda r: "c")] * 3
    + [(ASSUMPTION_EXIT, "tc", "u", lambda r: r.uniform(10.5, 20))] * 3
    + [(GUARANTEE_BREACH, "CA", "y", lambda r: r.uniform(80.5, 100))] * 2
    + [(GUARANTEE_BREACH, "CB", "z", lambda r: r.uniform(5.5, 10))] * 2
    + [(GUARANTEE_BREACH, "tc", "v", lambda r: r.uniform(1.1, 2))]
    + [(DOMAIN_EXIT, "CA", "x", lambda r: 150.0), (DOMAIN_EXIT, "CB", "z", lambda r: -1.0)]
)


def _planted_trace(rng, alphabet, n_rows=1000):
    rows = []
    for i in range(n_rows):
        rows.append(
            (
                round(0.01 * i, 2),
                {
                    "x": rng.uniform(0, 50),
                    "y": rng.uniform(0, 80),
                    "mode": rng.choice(["a", "b"]),
                    "z": rng.uniform(0, 5),
                    "u": rng.uniform(0, 10),
                    "v": rng.uniform(0, 1),
                },
            )
        )
    where = rng.sample(range(n_rows), len(_PLANTS))
    expected = set()
    for row, (kind, cid, var, value) in zip(where, _PLANTS):
        rows[row][1][var] = value(rng)
        expected.add((kind, cid, var, row, rows[row][0]))
    return Trace(alphabet, tuple(rows)), expected


def test_criterion_7_monitor():
    rng = random.Random(707)
    with criterion(7, "monitor finds exactly 10+5+2 planted violations, chunked streaming identical", limit=1) as info:
        spec = _monitor_setup()
        trace, expected = _planted_trace(rng, spec.alphabet)
        report = check_trace(trace, spec)
        got = {(v.kind, v.contract_id, *v.variables, v.row, v.time) for v in report.violations}
        assert len(report.violations) == 17
        assert got == expected
        assert report.counts == {ASSUMPTION_EXIT: 10, GUARANTEE_BREACH: 5, DOMAIN_EXIT: 2}
        for size in (1, 7, 100, 999):
            mon = TraceMonitor(spec)
            for i in range(0, len(trace.rows), size):
                mon.feed_rows(trace.rows[i : i + size])
            assert mon.report() == report
        info["detail"] = "17/17 attributed"


# 8 -------------------------------------------------------------------------------


_FUZZ_PIECES = ["s", "t", "n", "r", "b", "x", "in", "[", "]", "(", ")", "{", "}", ",", "|", "&", "!",
                "<", "<=", "==", "!=", ">", ">=", "0", "1.5", "-3", "1e3", "8", "hw", "ru", "true",
                "false", " ", "\n", "#c\n", "\t", "$", "\x00", "é"]


def _fuzz(rng):
    mode = rng.random()
    if mode < 0.4:
        return bytes(rng.randrange(256) for _ in range(rng.randint(0, 60)))
    if mode < 0.8:
        return "".join(rng.choice(_FUZZ_PIECES) for _ in range(rng.randint(0, 30))).encode()
    # mutate a valid expression
    text = bytearray(b"s in [0, 4) & r in {hw, ru} | !(n >= 3) & b == true")
    for _ in range(rng.randint(1, 4)):
        i = rng.randrange(len(text))
        if rng.random() < 0.5:
            del text[i]
        else:
            text.insert(i, rng.randrange(256))
    return bytes(text)


def test_criterion_8_dsl():
    rng = random.Random(808)
    n_round, n_fuzz = 1000, 10_000
    from gen import POOL

    full = Alphabet(POOL)
    with criterion(8, f"DSL round-trip on {n_round} assertions, {n_fuzz} fuzzed inputs") as info:
        for _ in range(n_round):
            alpha = random_alphabet(rng)
            _, e = random_set(rng, alpha)
            text = render_assertion(e)
            assert parse_assertion(text, alpha) == e, text
        rejected = 0
        for _ in range(n_fuzz):
            data = _fuzz(rng)
            try:
                parse_assertion(data, full)
            except ContractError as exc:
                rejected += 1
                assert exc.line is not None and exc.line >= 1 and exc.column >= 1, data
        info["detail"] = f"{rejected} rejections, all with line/column"


# 9 -------------------------------------------------------------------------------


def test_criterion_9_configurator_vs_brute_force():
    rng = random.Random(909)
    n = 100
    tallies = {"valid": 0, "refinement": 0, "composability": 0}
    with criterion(9, f"configure vs exhaustive evaluator on {n} random architectures") as info:
        for _ in range(n):
            doc, raw = random_project_doc(rng)
            p = load_project(doc)
            report = configure(p.architecture, p.test_case("tc"))
            got = {frozenset(c.model_ids): True for c in report.valid}
            got.update({frozenset(c.model_ids): False for c in report.rejected})
            assert got == brute_configure(doc, raw)
            tallies["valid"] += len(report.valid)
            for c in report.rejected:
                tallies[c.reason] += 1
        info["detail"] = ", ".join(f"{k} {v}" for k, v in tallies.items())


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except BaseException:
                failed += 1
    sys.exit(1 if failed else 0)
