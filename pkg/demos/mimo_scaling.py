"""
Antenna scaling of the three-slot scheme
========================================

With M = 2N transmit antennas and N receive antennas per user, the
precoders use the range and null space of the channel estimate. Every
symbol becomes an N-vector, and the DoF scale by N.
"""

# %%
from dofsim.doffit import fit_dof, power_grid_db, sweep
from dofsim.schemes import SchemeConfig

grid = power_grid_db(40, 80, 5)
for dims in ((2, 1), (4, 2)):
    n = dims[1]
    for alpha in (0.0, 0.5, 1.0):
        tmpl = SchemeConfig(alpha, grid[0], trials=1000, dims=dims, seed=3)
        fit = fit_dof(sweep("mimo", tmpl, grid), window=5)
        print(f"M,N={dims} alpha={alpha:.1f}: d1={fit.slope1:.3f}  N(2+a)/3={n * (2 + alpha) / 3:.3f}")

# %%
# For (2,1) with the codeword sent on antenna 1 the MIMO code path gives the
# MISO rates exactly.
from dofsim.schemes import run_enhanced_miso, run_mimo_enhanced

cfg = SchemeConfig(0.5, 1e6, trials=1000, seed=3, common_precoder="antenna")
print(run_enhanced_miso(cfg).r1, run_mimo_enhanced(cfg).r1)
