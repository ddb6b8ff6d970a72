"""
Roughness makes the film anisotropic
=====================================

When the roughness period is much longer than the film thickness, each
column of the cell behaves like a flat film with conductance phi(h(z')).
The periodic corrector problem averages these into a 2x2 tensor. Grooves
across the flow (h varying along z1) throttle it like resistors in series.
Along the grooves the columns act in parallel.
"""

import numpy as np

from thinbrink import CellGrid, RoughnessProfile, effective_tensor_subcritical, make_params
from thinbrink.oracle import laminate_tensor_1d, voigt_reuss_bounds

params = make_params(1.0, 1.0, 1.0, 1.0)

grooves = RoughnessProfile.sinusoidal(1.0, 0.0, amplitudes=(0.3, 0.0), wavenumbers=(1, 0))
A, _ = effective_tensor_subcritical(grooves, params, CellGrid(64, 64))
print("grooves along z2, A_M =\n", A.matrix)
print("series / parallel means:\n", laminate_tensor_1d(grooves, params.M))

# rotating the profile swaps the principal conductances
A_rot, _ = effective_tensor_subcritical(grooves.rotated(), params, CellGrid(64, 64))
print("rotated profile:", np.diag(A_rot.matrix))

# an egg-crate profile is isotropic but sits strictly between the bounds
egg = RoughnessProfile.sinusoidal(1.0, 0.3)
lo, hi = voigt_reuss_bounds(egg, params.M)
print("\nn     a11")
for n in (16, 32, 64, 128):
    A, _ = effective_tensor_subcritical(egg, params, CellGrid(n, n))
    print(f"{n:<5d} {A.a11:.8f}")
print(f"bounds: [{lo:.8f}, {hi:.8f}]")
