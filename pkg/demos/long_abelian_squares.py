"""Abelian squares in the image g3(h6^ω): unavoidable when short, absent when long."""

from abelfree.applications import decide_long_abelian
from abelfree.cli import load_morphism
from abelfree.oracle import find_abelian_power, find_kabelian_power
from abelfree.words import fixed_point_prefix

h6, _ = load_morphism("h6")
g3, _ = load_morphism("g3")
h2, _ = load_morphism("h2")

res = decide_long_abelian(h6, g3, 2, 1)
w = "".join(g3.target.letters[i] for i in res.witness_word)
print("period >= 1:", res.verdict, "witness", w)

res = decide_long_abelian(h6, g3, 2, 6)
print("period >= 6:", res.verdict, f"({len(res.candidates)} candidate templates,",
      f"periods {res.short_periods} checked on {res.factors_checked} factors)")

img = g3.apply(fixed_point_prefix(h6, 3000))[:20_000]
print("oracle, period >= 6 in a 2·10^4 prefix:", find_abelian_power(img, 2, min_period=6, n=3))

two = h2.apply(img)[:20_000]
print("oracle, 2-abelian squares of period > 60:", find_kabelian_power(two, 2, 2, min_period=61))
print("oracle, first 2-abelian square of period 60:", find_kabelian_power(two, 2, 2, 60, 60))
