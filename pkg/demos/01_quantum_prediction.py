"""
The quantum side of the qutrit Bell functional I_a.

Two parties share the qutrit state (sqrt(2)|00> + |11> - |22>)/2 and each
measures one of two fixed three-outcome bases.  The Born rule gives the
full table P(a,b|x,y), and I_a is the signed sum

    sum over k, x, y in {0,1} of (-1)^(k+x+y) P(k,k|x,y).

Binary nonsignaling correlations reach at most 1, general nonsignaling
correlations 4/3, and this quantum strategy reaches 2(2/3)^(3/2) ~ 1.0887.
White noise pulls the value down linearly with the state visibility.
"""

import numpy as np

from ternarybell import behavior as bh
from ternarybell.qcore import apply_noise, born_behavior, canonical_bases, canonical_state

state = canonical_state()
bases = canonical_bases()
print("state weights |<jj|psi>|^2:", np.round(np.abs(state.amplitudes[[0, 4, 8]]) ** 2, 4))
print("reduced state diagonal:", np.round(np.diag(state.reduced_alice()).real, 4))

quantum = born_behavior(state, bases, bases)
print(f"P(2,2|0,0) = {quantum.p[0, 0, 2, 2]:.6f}  (1/18 = {1 / 18:.6f})")
print(f"I_a = {bh.i_a(quantum):.9f}   2(2/3)^1.5 = {2 * (2 / 3) ** 1.5:.9f}")
print("nonsignaling violations:", bh.check_nonsignaling(quantum))

# the nonsignaling auxiliaries vanish on any quantum table
print(f"X_A = {bh.x_a(quantum):+.2e}, X_B = {bh.x_b(quantum):+.2e}")

for v in (1.0, 0.98, 0.95, 0.92, 0.9):
    print(f"visibility {v:.2f}: I_a = {bh.i_a(apply_noise(quantum, v)):.4f}")
# the binary bound 1 is crossed for visibility above 1/1.0887 ~ 0.919
