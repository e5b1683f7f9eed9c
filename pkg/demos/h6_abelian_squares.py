"""Walk through the abelian-square decision for the six-letter morphism h6.

Run with ``python3 demos/h6_abelian_squares.py``.  Takes about half a minute.
"""

from abelfree.cli import fixtures_dir, load_morphism
from abelfree.linalg.spectral import parse_jordan_override, spectral_data
from abelfree.bounds import contracting_bounds
from abelfree.oracle import find_abelian_power
from abelfree.templates import DecideConfig, decide, trivial_template
from abelfree.words import fixed_point_prefix, is_primitive

h, _ = load_morphism("h6")
print("h6:", ", ".join(f"{a} -> {h.image_str(i)}" for i, a in enumerate(h.source.letters)))
print("primitive (exponent):", is_primitive(h))

# Spectrum: the eigenvalue 0 carries a Jordan block of size 2 and one of size 1.
jordan = parse_jordan_override((fixtures_dir() / "h6.jordan").read_text())
sd = spectral_data(h.matrix, jordan_override=jordan)
for s in sd.summary():
    print(f"  eigenvalue {s['eigenvalue']:.6f}  block {s['size']}  {s['class']}")

# Bounds on the contracting coordinates of Parikh vectors, computed on h^2.
prof = contracting_bounds(h, sd, 2)
print("template bounds r*:", [str(prof.rstar[i]) for i in prof.indices])

# The decision: close the trivial 2-template under parents, then scan factors.
dec = decide(trivial_template(2, h.n), h, DecideConfig(power=2, jordan_override=jordan))
print("parents of the trivial template:", dec.closure.parents_of_seed)
print("closure size:", len(dec.closure.templates))
print("scan threshold s:", dec.threshold, "  factors scanned:", dec.factors_scanned)
print("verdict:", dec.verdict)

# Independent brute-force check on a long prefix.
w = fixed_point_prefix(h, 10_000)
print("oracle on a 10^4 prefix finds:", find_abelian_power(w, 2, n=h.n))
