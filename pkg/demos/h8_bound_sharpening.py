"""How iterating the morphism sharpens the bound on a contracting complex pair of h8."""

from abelfree.bounds import choose_power, contracting_bounds
from abelfree.cli import load_morphism
from abelfree.linalg.spectral import spectral_data

h, _ = load_morphism("h8")
sd = spectral_data(h.matrix)
lam = sd.eigenvalue(0).approx
print(f"first contracting pair: {lam.real:.5f} ± {abs(lam.imag):.5f}i, modulus {abs(lam):.6f}")
for l in (1, 2, 4, 8, 16, 20):
    prof = contracting_bounds(h, sd, l)
    print(f"  power {l:2d}: factor bound {float(prof.m[0]):.6f}")
best = choose_power(h, sd)
print("automatic choice of power:", best.power)
