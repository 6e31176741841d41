"""
Assume-guarantee contracts
==========================

Saturation, refinement, composition, quotient and conjunction on the
contracts of the bundled two-component example.
"""

# %%
from simcontracts import (
    compose,
    conjoin,
    load_example_project,
    quotient,
    refinement_witness,
    refines,
    render_assertion,
    saturate,
)

project = load_example_project()
C1, C2a, C2b, Ctc = (project.contract(i) for i in ("C1", "C2a", "C2b", "Ctc"))


def show(c):
    print(f"{c.id}:\n  A: {render_assertion(c.assumption)}\n  G: {render_assertion(c.guarantee)}")


for c in (C1, C2a, C2b, Ctc):
    show(c)

# %%
# Saturation folds the assumption into the guarantee: G | !A.
show(saturate(C2a))

# %%
# Composition of the ego-speed model with each position-error model, checked
# against the test-case contract.
for c2 in (C2a, C2b):
    cs = compose(C1, c2)
    ok = refines(cs, saturate(Ctc.extend_alphabet(cs.alphabet)))
    print(f"{cs.id} refines Ctc: {ok}")
    if not ok:
        print("  witness:", refinement_witness(cs, saturate(Ctc.extend_alphabet(cs.alphabet))))

# %%
# The quotient gives the weakest contract that, next to C1, still meets Ctc.
Q = quotient(Ctc, C1)
show(Q)
print("saturated first:", Q.metadata["saturated_operands"])

# %%
# Conjunction merges two viewpoints and refines both.
show(conjoin(C2a, C2b))
