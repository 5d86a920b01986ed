"""Walk through the K(b) polytopes and their vertex tables.

K(b) is the chain-cone slice of the shifted dual regularity cone; its
vertices are the candidate linear forms whose minimum bounds the dimension
of the dominance-bounded varieties.  Adding the dual chain cone C* throws
away the forms that never attain the minimum on sorted inputs.
"""

from kisindim.bounds import k_polytopes
from kisindim.kisin_model import KisinInstance
from kisindim.polyhedra import fmt_frac

# vertex counts explode with d while K + C* stays much leaner
print("vertex counts at b = 10000")
print("d    K    K+C*")
for d in range(2, 8):
    kt = k_polytopes(KisinInstance(d, 10000))
    print(f"{d}    {kt.counts[0]:<4} {kt.counts[1]}")

# the d = 4 coordinates, exact, straight off the vertex enumeration
print("\nvertices of K + C* for d = 4, b = 7")
kt = k_polytopes(KisinInstance(4, 7))
for v in kt.Kp_vertices:
    print("  (" + ", ".join(fmt_frac(x) for x in v) + ")")

# the apex 2*rho/(b+1) is always among them: it carries the main term
# <2 rho | mu>/(b+1) of every upper bound
apex = kt.Kp_vertices[0]
print("\nCSV export:\n")
print(kt.coords_csv())
