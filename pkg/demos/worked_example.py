"""Two fooling profiles that elect the same winner, and a mix that does not.

P and Q hold the same six ballots, arranged differently.  IRV elects 0 on
both, but handing voter 3 their Q ballot while everyone else keeps P
elects 2.  A protocol that mixed up P and Q would therefore get the mix
wrong, which is why every member of a fooling set needs its own transcript.
"""

from pathlib import Path

from irv_commlab import irv_tally, mix, parse_profile
from irv_commlab.ballots import format_ranking

DATA = Path(__file__).parent / "data"

P = parse_profile((DATA / "p_fooling.profile").read_text())
Q = parse_profile((DATA / "q_fooling.profile").read_text())

for name, prof in [("P", P), ("Q", Q), ("P with voter 3 from Q", mix(P, Q, {3}))]:
    winner, trace = irv_tally(prof)
    print(f"{name}: winner {winner}")
    for v, r in enumerate(prof.voters):
        print(f"  voter {v}: {format_ranking(r)}")
    for r in trace.rounds:
        scores = ", ".join(f"{c}:{s}" for c, s in r.scores.items())
        print(f"  scores {scores} -> eliminate {r.candidates[0]}")
    print()
