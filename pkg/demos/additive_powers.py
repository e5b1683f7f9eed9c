"""Squares modulo a map to Z^2 in h6, and additive cubes in a four-letter word.

The cube check on f takes several minutes.
"""

import sys

from abelfree.applications import decide_additive
from abelfree.cli import load_gmap, load_morphism
from abelfree.oracle import find_power_mod
from abelfree.templates import DecideConfig
from abelfree.words import fixed_point_prefix

h6, _ = load_morphism("h6")
phi = load_gmap("phi_z2")
F = phi.matrix(h6.source.letters)
print("F for phi:", F)
res = decide_additive(h6, F, 2, config=DecideConfig(power=2))
print("squares modulo phi in h6:", res.verdict, f"({len(res.candidates)} kernel gaps,",
      f"closure {len(res.decision.closure.templates)})")

f, _ = load_morphism("f_cassaigne")
values = [[int(a) for a in f.source.letters]]
w = fixed_point_prefix(f, 10_000)
print("oracle, additive cubes in a 10^4 prefix of f:", find_power_mod(w, values, 3, uniform=True))
if "--full" in sys.argv:
    res = decide_additive(f, values, 3, uniform=True)
    print("additive cubes in f:", res.verdict)
else:
    print("(pass --full to run the complete decision for f)")
