"""Sudden change of the optimal direction in the three-mode GHZ state.

For the fully separable partition A|B|C the best squeezing direction at low
transmission ignores mode A and uses x_B - x_C. Once enough of mode A
survives, a direction using the momenta of all three modes takes over. The
trace reports where the support of the direction jumps.
"""

import numpy as np

from cventangle import R_PAPER, analytic_covariance, parse_partition
from cventangle.transitions import optimal_direction_trace

p = parse_partition("A|B|C")
etas = np.linspace(0.0, 1.0, 101)


def state_at(eta):
    return analytic_covariance("ghz3", R_PAPER, eta)


for criterion in ("squeezing", "qfi_witness"):
    trace = optimal_direction_trace(state_at, etas, p, criterion)
    print(f"\n{criterion}:")
    for k in (0, 10, 20, 40, 80, 100):
        pt = trace.points[k]
        print(f"  eta={pt.eta:4.2f} value={pt.value:8.5f} direction={np.round(pt.direction, 3)}")
    for t in trace.transitions:
        print(f"  transition at eta = {t.eta:.4f}, bracket {t.bracket[0]:.4f}..{t.bracket[1]:.4f}, "
              f"branch advantage {100 * t.gain:.1f}%")
