"""Long-run queue length for p < 1/2 and how the walk settles into it."""

from fractions import Fraction

from stoplight.stationary import (phase_report, stationary_model, stationary_moments,
                                  stationary_pmf)

p = Fraction(1, 3)
for ell in (1, 2, 3, 6):
    model = stationary_model(p, ell)
    pmf = stationary_pmf(model, 5).values
    mean, fact2 = stationary_moments(model)
    print(f"ell={ell}: roots {[complex(round(r.real, 6), round(r.imag, 6)) for r in model.roots]}")
    print(f"   P(S=0..5) {[round(v, 6) for v in pmf]}  mean {mean:.6f}  E S(S-1) {fact2:.6f}")

# the limit describes the queue at the end of a full cycle
print("TV distance by phase offset, ell=2:", {r: f"{d:.2e}" for r, d in phase_report(p, 2, 500).items()})
