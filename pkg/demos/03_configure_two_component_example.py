"""
Choosing the cheapest sufficiently valid setup
==============================================

Every assignment of models to components is composed and checked against the
test-case contract; valid ones are ranked by cost.
"""

# %%
import json

from simcontracts import TestCaseSpec, configure, load_example_project, load_project
from simcontracts.projectfile import example_project_path

project = load_example_project()
report = configure(project.architecture, project.test_case("tc_highway"))
print(report.summary())

# %%
# A cheaper model with a wider validity domain takes the first place.
doc = json.loads(example_project_path().read_text())
doc["contracts"].append(
    {"id": "C2c", "variables": ["ego_speed", "pos_err"],
     "assume": "ego_speed in [0, 70]", "guarantee": "pos_err in [0, 0.2]"}
)
doc["models"].append({"id": "M2c", "component": "I2", "contract": "C2c", "cost": 3})
extended = load_project(doc)
print(configure(extended.architecture, extended.test_case("tc_highway")).summary())

# %%
# On urban roads no candidate is valid: every model assumes hw or ru.
urban = TestCaseSpec("tc_urban", {"road_type": "ur"}, "pos_err in [0, 1]")
print(configure(project.architecture, urban).summary())

# %%
# The machine-readable report is canonical JSON.
print(report.to_json()[:400], "...")
