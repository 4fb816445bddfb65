"""
Exact bounds on I_a without floating point.

Binary nonsignaling correlations are mixtures of behaviors in which each
measurement uses only two of its three outcomes.  For each of the 81 ways to
preclude one outcome per setting, the extremal points are the 16
deterministic boxes and 8 PR boxes of the two-outcome scenario, embedded on
the remaining outcomes.  Evaluating I_a on all of them with Fractions gives
the binary bound 1.

Without the binary restriction, an exact simplex over the nonsignaling
polytope gives 4/3, which matches the coefficient argument: every
coefficient of 3 I_a - X_A - X_B is -1, 0 or 1.
"""

from collections import Counter

from ternarybell import behavior as bh
from ternarybell import polytope as pt

vertices = pt.enumerate_binary_ns_vertices()
print("distinct binary nonsignaling vertices:", len(vertices), dict(Counter(v.tag for v in vertices)))

values = Counter(bh.i_a(v.behavior) for v in vertices)
for value in sorted(values, reverse=True)[:4]:
    print(f"  I_a = {str(value):>5}: {values[value]} vertices")
print("binary maximum:", pt.max_ia_binary(vertices))

# the two-outcome boxes found by brute force agree with the hand-written list
brute = pt.bruteforce_ns2222_vertices()
print("brute-force two-outcome vertices:", len(brute))

cert = pt.certify_coefficient_argument()
print("coefficients of 3 I_a - X_A - X_B for x=y=0:")
print(cert.coefficients[0, 0])
print("all in {-1,0,1}:", cert.passed, "-> I_a <=", cert.ns_bound)

print("simplex maximum over nonsignaling behaviors:", pt.max_ia_nonsignaling_lp())
print("simplex minimum:", pt.max_ia_nonsignaling_lp(minimize=True))
best = pt.lp_optimal_behavior()
print("an optimal nonsignaling table, slice x=y=0:")
print(best.p[0, 0])
