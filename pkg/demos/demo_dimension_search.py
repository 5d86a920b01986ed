"""Exact dimensions by lattice-point search, against the closed forms.

The dimension of a divisor-type variety is the maximum of the dimension
functional over integer triangles with the given top row; for d = 2 and 3
closed formulas reproduce the search on their validity range.
"""

from kisindim.kisin_model import KisinInstance
from kisindim.solver import DimQuery, dim_d2_closed, dim_d3_closed, dim_exact

inst = KisinInstance(2, 2)
for mu in [(3, 0), (5, 1), (8, 0), (9, 3)]:
    r = dim_exact(DimQuery(inst, "mu", mu=mu))
    cf = dim_d2_closed(*mu, inst)
    print(f"d=2 b=2 mu={mu}: search={r.dim if r.status != 'empty' else 'empty'}"
          f"  closed form={cf}")

# the witness triangle achieving the maximum
r = dim_exact(DimQuery(inst, "mu", mu=(3, 0)))
print("\noptimal triangle for mu=(3,0):", dict(
    ((i, j), int(r.witness[(i, j)])) for (i, j) in inst.cells))

# d = 3 needs a wide, regular spread for the formula to be proven
inst3 = KisinInstance(3, 2)
val, valid = dim_d3_closed(30, 15, 0, inst3)
r = dim_exact(DimQuery(inst3, "mu", mu=(30, 15, 0)))
print(f"\nd=3 b=2 mu=(30,15,0): formula={val} (valid={valid}), search={r.dim}")

# e-bounded family: nondecreasing in e, with the exact period in d = 2
print("\nd=2 b=2: dim of the e-bounded family for e = 0..12")
dims = [dim_exact(DimQuery(inst, "le_e", e=e)).dim for e in range(13)]
print("  ", dims)
print("   step under e -> e+3 is b-1 = 1:",
      all(dims[e + 3] == dims[e] + 1 for e in range(10)))

# h = 0 turns exact values into width-d(d-1)/2 intervals
r = dim_exact(DimQuery(KisinInstance(3, 2, h_zero=True), "mu", mu=(4, 2, 0)))
print("\nh=0 interval for d=3 b=2 mu=(4,2,0):", r.interval)
