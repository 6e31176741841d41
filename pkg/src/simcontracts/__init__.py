"""Assume-guarantee contracts for configuring sufficiently valid simulation setups."""

from .architecture import (
    CONTROLLED,
    UNCONTROLLED,
    Architecture,
    CompositionPlan,
    ComponentDecl,
    Diagnostic,
    PortDecl,
    SimulationModelDecl,
    check_composability,
    external_inputs,
)
from .assertions import (
    BOOLEAN,
    ENUMERATION,
    INTEGER,
    REAL,
    Alphabet,
    AssertionSet,
    Box,
    Interval,
    VariableDecl,
    complement,
    equals,
    extend_alphabet,
    intersect,
    is_empty,
    is_receptive,
    is_subset,
    member,
    project,
    union,
)
from .configurator import (
    ConfigurationReport,
    SetupCandidate,
    TestCaseSpec,
    build_test_case_contract,
    configure,
    derive_missing_requirement,
    evaluate_setup,
)
from .contracts import (
    Contract,
    PortPartition,
    are_compatible,
    are_consistent,
    compose,
    compose_all,
    conjoin,
    equalize_alphabets,
    equivalent,
    is_compatible,
    is_consistent,
    is_saturated,
    quotient,
    refinement_witness,
    refines,
    refines_literal,
    requirement,
    satisfies,
    saturate,
)
from .errors import *  # noqa: F401,F403
from .language import parse_assertion, render_assertion
from .monitor import (
    MonitorReport,
    MonitorSpec,
    Trace,
    TraceMonitor,
    Violation,
    check_trace,
    generate_monitors,
    parse_trace_csv,
    read_trace_csv,
)
from .projectfile import Project, load_example_project, load_project, read_project, save_project

__version__ = "0.1.0"
