"""
Requirements for a model that does not exist yet
================================================

With I1 fixed to M1, the quotient states what any model for I2 has to
guarantee under which assumption.
"""

# %%
from simcontracts import derive_missing_requirement, load_example_project, refines, render_assertion, saturate

project = load_example_project()
arch = project.architecture
tc = project.test_case_contract("tc_highway")

Q = derive_missing_requirement(arch, tc, {"I1": "M1"}, "I2")
print("assume:   ", render_assertion(Q.assumption))
print("guarantee:", render_assertion(Q.guarantee))

# %%
# Existing candidates measured against the requirement.
for mid in ("M2a", "M2b"):
    c = saturate(arch.model(mid).contract.extend_alphabet(arch.alphabet))
    print(mid, "meets the requirement:", refines(c, Q))
