"""
Assertions as unions of boxes
=============================

Variables, sets of valuations, and the exact set algebra on them.
"""

# %%
# Three typed variables with units and bounded domains.
from simcontracts import Alphabet, AssertionSet, VariableDecl, parse_assertion, render_assertion

speed = VariableDecl("ego_speed", "real", "m/s", (0, 70))
err = VariableDecl("pos_err", "real", "m", (0, 5))
road = VariableDecl("road_type", "enumeration", "", ("hw", "ru", "ur"))
alpha = Alphabet([speed, err, road])

# %%
# Assertions are written in a small expression language and elaborated to a
# union of axis-aligned boxes.
slow_or_highway = parse_assertion("ego_speed <= 30 | road_type == hw", alpha)
print("E       =", render_assertion(slow_or_highway))
print("not E   =", render_assertion(~slow_or_highway))
print("not not E == E:", ~~slow_or_highway == slow_or_highway)

# %%
# Membership, inclusion and receptiveness.
print({"ego_speed": 35, "pos_err": 0.1, "road_type": "hw"} in slow_or_highway)
small = parse_assertion("ego_speed in [0, 40] & pos_err in [0, 0.2]", alpha)
big = parse_assertion("pos_err in [0, 1] | road_type in {ru, ur}", alpha)
print("small <= big:", small <= big)
print("E ignores pos_err:", slow_or_highway.is_receptive({"pos_err"}))

# %%
# Projection drops variables; extending the alphabet adds them back
# unconstrained.  The round trip over-approximates.
hull = small.project({"ego_speed"}).extend_alphabet(alpha)
print("hull =", render_assertion(hull), "| contains small:", small <= hull)
