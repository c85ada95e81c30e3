"""Two-mode squeezed state under loss on mode A.

Builds the state from its beam-splitter circuit, checks it against the closed
form, then follows the three criteria as mode A loses transmission. Both
witnesses fall towards their separable boundary but only reach it when mode A
is gone entirely.
"""

import math

import numpy as np

from cventangle import (
    R_HALF,
    analytic_covariance,
    parse_partition,
    ppt_criterion,
    qfi_witness,
    squeezing_coefficient,
)
from cventangle.network import recipe, run_circuit

ab = parse_partition("A|B")

circuit = run_circuit(recipe("two_mode_epr", r=R_HALF))
print(f"circuit vs closed form, max deviation: {np.abs(circuit - analytic_covariance('epr', R_HALF, 1.0)).max():.1e}")

print("\n  eta   lambda_max   xi^-2    PPT nu_min")
for eta in np.linspace(0.0, 1.0, 6):
    g = analytic_covariance("epr", R_HALF, eta)
    lam = qfi_witness(g, ab).value
    xi = squeezing_coefficient(g, ab).value
    nu = ppt_criterion(g, ab).value
    print(f"{eta:5.1f}   {lam:10.6f}   {xi:8.6f}   {nu:8.6f}")

g = analytic_covariance("epr", R_HALF, 1.0)
w = qfi_witness(g, ab)
print(f"\nat eta=1: lambda_max = {w.value:.6f} (2 sinh 2r = {2 * math.sinh(2 * R_HALF):.6f}), "
      f"eigenspace dimension {w.degeneracy}")
print("e_max =", np.round(w.optimal_direction, 6))
