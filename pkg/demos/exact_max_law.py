"""Exact law of the worst queue over a short horizon, for a few light cycles."""

from fractions import Fraction

from stoplight import joint_dist, make_params, max_dist, moment

p = Fraction(1, 3)
n = 12

for ell in (1, 2, 3):
    dist = max_dist(joint_dist(make_params(p, ell), n))
    print(f"cycle {ell} red / {ell} green, n={n}")
    for a, prob in enumerate(dist.values):
        print(f"  P(M_n = {a}) = {str(prob):>22}  ~ {float(prob):.6f}")
    print(f"  E(M_n) = {float(moment(dist, 1)):.6f}\n")
