"""Where the metrological witnesses and PPT part ways.

Three situations, all on Gaussian states:

* reduced three-mode cluster states, where the squeezing coefficient needs a
  minimum transmission while the Fisher-information witness does not;
* reduced two-mode cluster states of neighbouring modes, entangled by PPT
  yet invisible to both witnesses;
* a two-mode squeezed state mixed with vacuum, PPT-entangled for any weight
  but witnessed only above a weight threshold.
"""

import numpy as np

from cventangle import (
    R_PAPER,
    analytic_covariance,
    p_max_threshold,
    parse_partition,
    ppt_criterion,
    qfi_witness,
    reduce,
    squeezing_coefficient,
    vacuum_mixed,
)
from cventangle.transitions import detection_threshold


def acd(eta):
    return reduce(analytic_covariance("cluster4", R_PAPER, eta), [0, 2, 3])


p = parse_partition("A|BC")
onset = detection_threshold(acd, p, "squeezing", 0.05, 0.3)
print(f"reduced ACD, partition A|CD: squeezing detects for eta > {onset:.4f}")
for eta in (0.05, 0.10, onset - 1e-3, onset + 1e-3, 0.5):
    g = acd(eta)
    print(f"  eta={eta:6.4f}  lambda_max={qfi_witness(g, p).value:9.6f}  xi^-2={squeezing_coefficient(g, p).value:8.6f}")

print("\nreduced two-mode cluster states at eta = 1:")
full = analytic_covariance("cluster4", R_PAPER, 1.0)
ab = parse_partition("A|B")
for pair in ("AB", "AC", "AD", "BC", "BD", "CD"):
    g = reduce(full, ["ABCD".index(c) for c in pair])
    print(f"  {pair[0]}|{pair[1]}: witness {qfi_witness(g, ab).entangled!s:5}  "
          f"squeezing {squeezing_coefficient(g, ab).entangled!s:5}  PPT {ppt_criterion(g, ab).entangled}")

print("\nvacuum-mixed two-mode state, r = 0.8:")
pm = p_max_threshold(0.8)
print(f"  witnesses silent up to p = {pm:.6f}")
for weight in np.round([0.2, 0.5, pm - 1e-3, pm + 1e-3, 0.9], 4):
    g = vacuum_mixed(0.8, weight)
    print(f"  p={weight:6.4f}  PPT nu_min={ppt_criterion(g, ab).value:7.4f}  lambda_max={qfi_witness(g, ab).value:9.5f}")
