"""Per-voter fooling-set size against its asymptotic estimates.

Prints ln|F|/n next to the finite sum and the leading (ln m)^2/2 term for
growing m.  Both ratios head towards one, but slowly: at m = 4096 the
exact value is still about 20% above the leading term.
"""

import math

from irv_commlab import FoolingSpec, asymptotic_estimate, log_cardinality

print(f"{'m':>6} {'ln|F|/n':>10} {'finite':>10} {'leading':>10} {'exact/lead':>11} {'finite/lead':>12}")
for e in range(3, 13):
    spec = FoolingSpec("irv", 2**e)
    exact = log_cardinality(spec, per_voter=True)
    finite, leading = asymptotic_estimate(spec, per_voter=True)
    print(f"{spec.m:>6} {exact:>10.4f} {finite:>10.4f} {leading:>10.4f} "
          f"{exact / leading:>11.4f} {finite / leading:>12.4f}")

print("\nsingle-peaked, ell=3: relative gap between ln|F| and n ln m")
for e in range(2, 13):
    spec = FoolingSpec("sp", 2**e, 3)
    gap = abs(log_cardinality(spec, per_voter=True) - math.log(spec.m)) / math.log(spec.m)
    print(f"{spec.m:>6} {gap:.4f}")
