"""Tour of the library: measure brackets, axiom checks, AC verdicts, linear maps."""
import math

from tmslab import spaces as sp
from tmslab.ac import analyze, builtin, falsify_ac
from tmslab.linear import FunctionalOnRn, ac_from_bounded
from tmslab.measure import measure_of, separated_additivity_check
from tmslab.tms import TmsInstance, check_instance

plane, circle, line = sp.EuclideanBox.plane(), sp.Circle(), sp.RealInterval()

print("nu of a ball of radius 0.3:", measure_of(plane, "diam", sp.Ball((0.0, 0.0), 0.3), 1000).to_dict())
strip = sp.Box(((0, 1), (0, 0.01)))
print("nu of a thin strip:", measure_of(plane, "diam", strip, 100).upper,
      "vs Lebesgue", measure_of(plane, "lebesgue", strip).upper)

rep = separated_additivity_check(circle, sp.Arc(0, 0.6 * math.pi), sp.Arc(math.pi, 1.6 * math.pi))
print("two long arcs: nu(A)+nu(B) =", rep.nu_a.upper + rep.nu_b.upper, " nu(A u B) =", rep.nu_union.upper)

for space, kind in ((line, "lebesgue"), (line, "counting"), (circle, "lebesgue"), (circle, "diam")):
    r = check_instance(TmsInstance(space, kind), 100, seed=1)
    print(f"{space.space_id:28s} {kind:9s} failed axioms: {r.failed_axioms}")

leb = TmsInstance(line, "lebesgue")
for name in ("sin", "square"):
    v = analyze(builtin(name), leb, 0.5 if name == "square" else 0.01)
    print(name, "->", v.status, getattr(v, "certificate", ""))

f = builtin("x_sin_inv_x", sp.RealInterval(0.0, 1.0))
v = falsify_ac(f, TmsInstance(f.domain, "lebesgue"), 0.5)
print("x sin(1/x) at eps=0.5 ->", v.status)
for w in v.witnesses:
    print(f"  delta={w.delta:g}: {len(w.family)} intervals, total length {w.total_measure_upper:.3g},"
          f" oscillation sum >= {w.oscillation_sum_lower:.3f}")

v = ac_from_bounded(FunctionalOnRn([3, 4]))
print("functional (3,4): norm", v.params["norm"], " delta(0.6) =", v.delta(0.6))
