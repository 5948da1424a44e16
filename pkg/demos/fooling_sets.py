"""Build, count and check fooling sets for small elections.

For IRV with three candidates every pair among the 180 arrangements is
split by a one-voter swap.  The same check on the STV family with two
seats finds pairs that no mix separates; see the printout.
"""

import math

from irv_commlab import FoolingSpec, fooling_cardinality, log_cardinality, verify_fooling_set
from irv_commlab.fooling import RuleSpec

for spec in [FoolingSpec("irv", 3), FoolingSpec("irv", 4), FoolingSpec("sp", 4, 3),
             FoolingSpec("stv", 4, 1, k=2)]:
    size = fooling_cardinality(spec)
    print(f"{spec.family} m={spec.m} ell={spec.ell} k={spec.k}: n={spec.n}, "
          f"|F|={size}, log2|F|={log_cardinality(spec) / math.log(2):.1f} bits")

print()
print(verify_fooling_set(FoolingSpec("irv", 3)).to_text(timing=False))
print(verify_fooling_set(FoolingSpec("sp", 4, 3), mode="sampled", samples=300).to_text(timing=False))

stv = verify_fooling_set(FoolingSpec("stv", 3, 1, k=2), RuleSpec("stv", k=2), exhaustive_mixes=True)
print(f"stv m=3 k=2: {stv.pairs_checked} pairs, {len(stv.failures)} without any witness")
print("  e.g.", ", ".join(stv.failures[:3]))
