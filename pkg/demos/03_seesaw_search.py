"""
Searching for the quantum maximum by see-saw.

Starting from Haar-random bases, the search alternates two steps:
the best state for fixed measurements is the top eigenvector of the 9x9
Bell operator (found with a Jacobi eigensolver), and the measurements are
then improved by gradient ascent on their unitary generators.  Twenty
restarts land on 2(2/3)^(3/2), the value of the canonical strategy.

If the state is confined to two levels per party, the best value found is
the binary bound 1: the extra outcome alone does not help.
"""

import numpy as np

from ternarybell import seesaw
from ternarybell.qcore import canonical_bases

target = 2 * (2 / 3) ** 1.5

best = seesaw.optimize(seed=0, restarts=20)
print(f"best of 20 restarts: {best.value:.10f} (restart {best.restart}, "
      f"{best.iterations} iterations), target {target:.10f}")
print("history of the winning run:", np.round(best.history[:6], 5), "...")

schmidt = np.linalg.svd(best.state.matrix, compute_uv=False)
print("Schmidt coefficients^2 of the optimal state:", np.round(schmidt ** 2, 4))

ops = seesaw.bell_operator(canonical_bases(), canonical_bases())
print("spectrum of the canonical Bell operator:", np.round(np.linalg.eigvalsh(ops), 4))

qubit = seesaw.optimize(seed=0, restarts=4, subspace=2)
print(f"state confined to two levels: {qubit.value:.10f}")
