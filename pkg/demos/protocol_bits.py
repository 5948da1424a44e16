"""How many bits the lazy elicitation protocols spend.

Runs plain PPR and its single-peaked version on the bundled 18-voter
profile, prints the transcript of the single-peaked run and compares both
totals with the naive cost of sending every full ranking.
"""

import math
from pathlib import Path

from irv_commlab import parse_profile, run_ppr, run_sp_ppr, transcript_bound_check

DATA = Path(__file__).parent / "data"
p = parse_profile((DATA / "single_peaked_18.profile").read_text())

naive = p.n * math.ceil(math.log2(math.factorial(p.m)))
for run in (run_ppr, run_sp_ppr):
    winner, t = run(p)
    print(f"{t.protocol}: winner {winner}, {t.total_bits} bits, "
          f"re-queries per round {t.requery_counts()}, "
          f"within bound: {transcript_bound_check(t, p.m, p.n)}")
print(f"sending full rankings: {naive} bits\n")

print(run_sp_ppr(p)[1].to_text())
