"""Two red / two green: kernel zeros, closed forms and the level-by-level systems."""

from stoplight.ell2 import appendix_cascade, closed_form_g, dp_partial_sum, printed_g02, quartic_zeros

p, lam = 0.3, 0.25
z = quartic_zeros(p, lam)
print(f"theta={z.theta:.10f} omega={z.omega:.10f}")
print("kernel residuals:", ["%.1e" % r for r in z.residuals])

for which in [(0, 1), (1, 1), (0, 2)]:
    dp, tail = dp_partial_sum(p, lam, *which, 60)
    print(f"G{which}: closed form {closed_form_g(p, lam, which):.15f}  walk {dp:.15f}")
print(f"printed G(0,2) as written: {printed_g02(p, lam):.15f}  (sign flipped)")

cascade = appendix_cascade(p, lam, 6)
for (x, a), v in sorted(cascade.values.items(), key=lambda kv: kv[0][::-1]):
    dp, _ = dp_partial_sum(p, lam, x, a, 60)
    print(f"  ({x},{a}) cascade {v:.6e}  walk {dp:.6e}")
print("not determined by the systems:", {a: e for a, e in cascade.open_entries.items() if e})
