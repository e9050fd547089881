"""The Cantor function is continuous and monotone but not absolutely continuous."""
from tmslab.ac import builtin, standard_ac_check

report = standard_ac_check(builtin("cantor"), 0.0, 1.0, (1e-1, 1e-2, 1e-3, 1e-4), eps=0.9)
for row in report.per_delta:
    print(f"delta={row['delta']:g}  sum of jumps={row['best_sum']:.4f}  intervals={row.get('count')}"
          f"  total length={row.get('total_length', float('nan')):.3g}  via {row['generator']}")
print("standard absolute continuity holds:", report.holds)
