"""Simulated elicitation protocols with exact bit accounting.

Voters are oracles answering from their full rankings.  A "top among A"
answer costs ``ceil(log2 |A|)`` bits (zero when ``A`` is a singleton, in
which case the query is still logged) and a left/right answer costs one bit.
Answers the centre can infer on its own are not queries at all.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .ballots import Profile, ProfileError, single_peaked_violation, _axis_positions
from .rules import (
    DEFAULT_TIEBREAK,
    StvConfig,
    StvCount,
    TieBreak,
    top_among,
)

PPR = "ppr"
SP_PPR = "sp-ppr"
STV_PPR = "stv-ppr"

TRANSCRIPT_FORMAT = "irv-commlab-transcript/1"


def top_cost(k: int) -> int:
    """Bits needed to name one of ``k`` candidates."""
    return (k - 1).bit_length()


@dataclass(frozen=True)
class Query:
    voter: int
    round: int
    kind: str  # "top" or "direction"
    answer: int | str
    bits: int
    active: tuple[int, ...] = ()
    pivot: int | None = None
    left: int | None = None
    right: int | None = None


@dataclass(frozen=True)
class RoundRecord:
    """Bookkeeping for one removal.

    ``active_size`` is the number of active candidates when the removed
    candidate was chosen; ``requeried`` counts queries issued afterwards and
    ``forced`` counts transfers the centre inferred without asking.
    """

    index: int
    event: str
    candidate: int
    active_size: int
    requeried: int
    forced: int = 0
    live_voters: int = 0
    uniform_weights: bool = True


@dataclass
class Transcript:
    protocol: str
    m: int
    n: int
    queries: list[Query] = field(default_factory=list)
    rounds: list[RoundRecord] = field(default_factory=list)
    winners: tuple[int, ...] = ()

    @property
    def total_bits(self) -> int:
        return sum(q.bits for q in self.queries)

    def requery_counts(self) -> list[int]:
        return [r.requeried for r in self.rounds if r.event in ("eliminated", "elected")]

    def to_text(self) -> str:
        lines = [
            f"format: {TRANSCRIPT_FORMAT}",
            f"protocol: {self.protocol}",
            f"m: {self.m}",
            f"n: {self.n}",
        ]
        by_round: dict[int, list[Query]] = {}
        for q in self.queries:
            by_round.setdefault(q.round, []).append(q)
        lines.append("round: 0 event=initial")
        lines += [_query_line(q) for q in by_round.get(0, [])]
        for r in self.rounds:
            lines.append(
                f"round: {r.index} event={r.event} candidate={r.candidate} "
                f"active_size={r.active_size} requeried={r.requeried} forced={r.forced}"
            )
            lines += [_query_line(q) for q in by_round.get(r.index, [])]
        lines.append("winners: " + " ".join(str(w) for w in self.winners))
        lines.append(f"total_bits: {self.total_bits}")
        return "\n".join(lines) + "\n"


def _query_line(q: Query) -> str:
    if q.kind == "top":
        where = "active=" + ",".join(str(c) for c in q.active)
    else:
        where = f"pivot={q.pivot} left={q.left} right={q.right}"
    return f"  query: voter={q.voter} kind={q.kind} {where} answer={q.answer} bits={q.bits}"


def _ask_top(t: Transcript, p: Profile, v: int, active, rnd: int) -> int:
    c = top_among(p.voters[v], active)
    t.queries.append(Query(v, rnd, "top", c, top_cost(len(active)), tuple(sorted(active))))
    return c


def _majority(scores: dict[int, int], n: int) -> int | None:
    for c, s in scores.items():
        if 2 * s > n:
            return c
    return None


def run_ppr(p: Profile, tb: TieBreak = DEFAULT_TIEBREAK) -> tuple[int, Transcript]:
    """Progressive preference revelation for IRV, with the majority stop.

    Every voter names a top candidate once; afterwards only supporters of
    the candidate just eliminated are asked again, among the survivors.
    """
    t = Transcript(PPR, p.m, p.n)
    active = set(range(p.m))
    tops = {v: _ask_top(t, p, v, active, 0) for v in range(p.n)}
    rnd = 0
    while True:
        scores = {c: 0 for c in sorted(active)}
        for c in tops.values():
            scores[c] += 1
        rnd += 1
        w = _majority(scores, p.n)
        if w is not None:
            t.rounds.append(RoundRecord(rnd, "majority", w, len(active), 0, live_voters=p.n))
            t.winners = (w,)
            return w, t
        low = min(scores.values())
        out = tb.loser(c for c, s in scores.items() if s == low)
        size = len(active)
        active.remove(out)
        movers = [v for v, c in tops.items() if c == out]
        for v in movers:
            tops[v] = _ask_top(t, p, v, active, rnd)
        t.rounds.append(RoundRecord(rnd, "eliminated", out, size, len(movers), live_voters=p.n))


def run_sp_ppr(
    p: Profile, axis: Sequence[int] | None = None, tb: TieBreak = DEFAULT_TIEBREAK
) -> tuple[int, Transcript]:
    """PPR specialised to single-peaked profiles along a known axis.

    After candidate ``c`` is eliminated its supporters move to the nearest
    surviving candidate on one side of ``c``.  They are asked which side (one
    bit) only when survivors exist on both sides.
    """
    pos = _axis_positions(p.m, axis)
    order = list(axis) if axis is not None else list(range(p.m))
    for v, r in enumerate(p.voters):
        bad = single_peaked_violation(r, axis)
        if bad is not None:
            raise ProfileError(f"voter {v} is not single-peaked: triple {bad}")
    t = Transcript(SP_PPR, p.m, p.n)
    active = set(range(p.m))
    tops = {v: _ask_top(t, p, v, active, 0) for v in range(p.n)}
    rnd = 0
    while True:
        scores = {c: 0 for c in sorted(active)}
        for c in tops.values():
            scores[c] += 1
        rnd += 1
        w = _majority(scores, p.n)
        if w is not None:
            t.rounds.append(RoundRecord(rnd, "majority", w, len(active), 0, live_voters=p.n))
            t.winners = (w,)
            return w, t
        low = min(scores.values())
        out = tb.loser(c for c, s in scores.items() if s == low)
        size = len(active)
        active.remove(out)
        left = next((order[i] for i in range(pos[out] - 1, -1, -1) if order[i] in active), None)
        right = next((order[i] for i in range(pos[out] + 1, p.m) if order[i] in active), None)
        asked = forced = 0
        for v in [v for v, c in tops.items() if c == out]:
            nxt = top_among(p.voters[v], active)
            if left is not None and right is not None:
                side = "L" if nxt == left else "R"
                t.queries.append(Query(v, rnd, "direction", side, 1, pivot=out, left=left, right=right))
                asked += 1
            else:
                forced += 1
            tops[v] = nxt
        t.rounds.append(RoundRecord(rnd, "eliminated", out, size, asked, forced, live_voters=p.n))


def run_stv_ppr(
    p: Profile, cfg: StvConfig = StvConfig(), tb: TieBreak = DEFAULT_TIEBREAK
) -> tuple[tuple[int, ...], Transcript]:
    """The PPR idea carried over to STV.

    Supporters of an elected candidate who keep a positive weight, and all
    supporters of an eliminated one, are asked for their next top.  The
    count stops before re-asking once the seats are decided.
    """
    count = StvCount(p.n, p.m, cfg, tb)
    t = Transcript(STV_PPR, p.m, p.n)
    count.tops = {v: _ask_top(t, p, v, count.active, 0) for v in range(p.n)}
    uniform = True
    rnd = 0
    while True:
        rnd += 1
        live = len(count.weights)
        rec, moving, done = count.step()
        for v in moving:
            count.tops[v] = _ask_top(t, p, v, count.active, rnd)
        t.rounds.append(
            RoundRecord(rnd, rec.event, rec.candidates[0], len(rec.active), len(moving),
                        live_voters=live, uniform_weights=uniform)
        )
        if rec.event == "elected":
            uniform = False
        if done:
            t.winners = count.winners()
            return t.winners, t


def transcript_bound_check(t: Transcript, m: int, n: int) -> bool:
    """Check a transcript against the worst-case upper-bound arithmetic.

    PPR and single-peaked PPR: a round with ``j`` active candidates removes a
    candidate with at most ``n // j`` supporters, and the totals are bounded by
    ``ceil(log2 m) * (n + sum_{j=2..m} n // j)`` and
    ``n * ceil(log2 m) + sum_{j=3..m} n // j`` respectively.

    STV-PPR: the per-round bound holds only for eliminations made while all
    weights are still 1.  Elections and later eliminations may move more
    voters, so each voter is only bounded by one initial query plus one
    query per removal, giving ``ceil(log2 m) * n * m`` overall.
    """
    if t.protocol not in (PPR, SP_PPR, STV_PPR) or (not t.rounds and t.queries):
        raise ValueError(f"transcript has no round structure (protocol {t.protocol!r})")
    bits = top_cost(m)
    for q in t.queries:
        if q.kind == "top" and q.bits != top_cost(len(q.active)):
            return False
        if q.kind == "direction" and q.bits != 1:
            return False
    for r in t.rounds:
        if r.event == "majority":
            continue
        moved = r.requeried + r.forced
        if r.event == "eliminated" and r.uniform_weights and moved > n // r.active_size:
            return False
        if moved > r.live_voters:
            return False
    if t.protocol == PPR:
        bound = bits * (n + sum(n // j for j in range(2, m + 1)))
    elif t.protocol == SP_PPR:
        bound = n * bits + sum(n // j for j in range(3, m + 1))
    else:
        bound = bits * n * m
    return t.total_bits <= bound
