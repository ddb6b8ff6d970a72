"""
The vertical Brinkman profile and its flow factor
==================================================

A film of height h between a fixed bottom and a no-slip top, pushed by a unit
pressure drop, has the velocity shape s(z3) solving -(1/M^2) s'' + s = 1.
Its integral phi_M(h) is the conductance that every regime builds on.
"""

import numpy as np

from thinbrink.oracle import brinkman_bvp_1d
from thinbrink.profile import darcy_limit, flow_factor, poiseuille_limit, profile_coeffs, profile_velocity

# closed form against a finite-difference solve
M, h = 2.0, 0.5
c = profile_coeffs(M, h)
bvp = brinkman_bvp_1d(M, h, 8192)
z = np.linspace(0.0, h, 9)
print("z3      closed form     finite differences")
for zi in z:
    print(f"{zi:5.3f}  {profile_velocity(c, zi):.10f}   {bvp.at(zi):.10f}")

# the two asymptotic regimes: thin/weakly porous (Poiseuille) and thick (Darcy)
print("\n  M h        phi          Poiseuille     Darcy")
for Mh in (1e-2, 1e-1, 1.0, 10.0, 100.0):
    M = Mh
    print(f"{Mh:7.2g}  {flow_factor(M, 1.0):.6e}  {poiseuille_limit(M, 1.0):.6e}  {darcy_limit(M, 1.0):.6e}")

# stable for very large M h, where exp(M h) overflows
print("\nphi at M h = 1e4:", flow_factor(1e4, 1.0))
