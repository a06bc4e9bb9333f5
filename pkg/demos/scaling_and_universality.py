"""M_n / sqrt(n) at p = 1/2: exact recursion, simulation, and several light cycles."""

from stoplight.asymptotics import convergence_report, limit_constants
from stoplight.montecarlo import universality_experiment

first, second = limit_constants()
print(f"limits: E(M)/sqrt(n) -> {first:.6f},  E(M^2)/n -> {second:.6f}")

report = convergence_report("1/2", 1, [100, 1000, 5000])
for row, (d1, d2) in zip(report.rows, report.deltas()):
    print(f"  n={row.n:>5}  {row.estimate_first:.5f} ({d1:.2%})  {row.estimate_second:.5f} ({d2:.2%})")
print(report.note)

rep = universality_experiment("1/2", [1, 2, 3], n=4000, reps=20_000, seed=1)
print(rep.label)
for row in rep.rows():
    print(f"  ell={row['ell']}: {row['scaled_first']:.4f} +- {row['stderr_first']:.4f}   "
          f"z vs ell=1: {row['z_first']:+.2f}")
