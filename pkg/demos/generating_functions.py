"""One red / one green: the closed-form generating functions against the recursion."""

from fractions import Fraction

from stoplight.series import em2n_gf, max_gf_coeffs, theta_series
from stoplight.walk import iter_joint, make_params, max_dist

p = Fraction(2, 5)
terms = 10

print("theta(lam) at p = 2/5:", [str(c) for c in theta_series(p, 5)])

tables = list(iter_joint(make_params(p, 1), 2 * terms))
for a in (1, 2, 3):
    coeffs = max_gf_coeffs(p, a, terms)
    same = all(coeffs[n] == max_dist(tables[2 * n])[a] for n in range(1, terms + 1))
    print(f"a={a}: first coefficients {[str(coeffs[n]) for n in range(1, 4)]}, all {terms} equal DP: {same}")

# mean of the maximum at p = 1/2, exact
g = em2n_gf(8)
print("E(M_2n), n=1..8:", [str(g[n]) for n in range(1, 9)])
