"""
Monitoring a recorded run
=========================

Monitors generated from the chosen models and the test case are replayed
over a CSV trace, row by row.
"""

# %%
from simcontracts import check_trace, generate_monitors, load_example_project, read_trace_csv
from simcontracts.projectfile import example_project_path

project = load_example_project()
arch = project.architecture
tc = project.test_case_contract("tc_highway")
trace_path = example_project_path().parent / "two_component_trace.csv"

# %%
# The valid setup stays inside every validity domain.
spec = generate_monitors(arch, {"I1": "M1", "I2": "M2b"}, tc)
trace = read_trace_csv(trace_path, spec.alphabet)
print(check_trace(trace, spec).table())

# %%
# The rejected setup leaves the validity domain of M2a once ego_speed
# passes 30 m/s; the monitor names the variable and the time step.
spec = generate_monitors(arch, {"I1": "M1", "I2": "M2a"}, tc)
print(check_trace(read_trace_csv(trace_path, spec.alphabet), spec).table())
