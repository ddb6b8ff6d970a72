"""
Why the implemented closed forms differ from the circulating ones
==================================================================

Each alternative expression is evaluated next to the quantity it is supposed
to reproduce. The flow factor variant blows up for thin films. The
fixed-height temperature violates its own boundary conditions. The smooth
temperature built from V1 and V2 is off by orders of magnitude even when
the suspected typo is repaired.
"""

from thinbrink.discrepancy import discrepancy_report
from thinbrink.params import make_params

for b in (0.0, 1.0):
    print(f"b = {b}")
    for name, lit, ref, dev, rel in discrepancy_report(make_params(1.0, 1.0, 1.0, 1.0, b=b)):
        print(f"  {name:36s} literal {lit: .5e}  reference {ref: .5e}  max dev {dev:.3e}  rel {rel:.3g}")
