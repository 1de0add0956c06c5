"""
Exact DoF regions as the CSIT quality varies
============================================

The achievable DoF region with delayed CSIT plus an estimate of quality
alpha is a polygon with rational vertices. This walk-through builds it
from its half-plane constraints and compares it with the reference regions.
"""

# %%
# Build the polygon for a few exponents. Vertices come out as exact
# fractions, listed counter-clockwise from the origin.
from fractions import Fraction

from dofsim.region import contains, reference_regions, theorem1_region, theorem2_region

for alpha in (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)):
    poly = theorem1_region(alpha)
    print(f"alpha={alpha}:", " ".join(f"({x},{y})" for x, y in poly.vertices))

# %%
# The symmetric vertex (2+alpha)/3 moves from 2/3 (delayed CSIT only) to 1
# (perfect CSIT). The end points match the reference regions.
for name, poly in reference_regions().items():
    print(f"{name:>8}:", " ".join(f"({x},{y})" for x, y in poly.vertices))

# %%
# With N receive antennas and M >= 2N transmit antennas every vertex
# scales by N.
print(" ".join(f"({x},{y})" for x, y in theorem2_region(Fraction(1, 2), 2).vertices))

# %%
# Membership of floating point DoF estimates uses an inflation eps.
poly = theorem1_region(Fraction(1, 2))
for pt in [(0.83, 0.83), (0.86, 0.86), (0.9, 0.9)]:
    print(pt, contains(poly, pt, 0.02, metric="chebyshev"))
