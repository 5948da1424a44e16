"""IRV, IRV-Average and STV on full profiles, with round-by-round traces.

Scores and weights are :class:`fractions.Fraction` throughout so that ties
are detected exactly, including after fractional surplus transfers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .ballots import Profile, check_ranking

LOWER_INDEX_WINS = "lower-index-wins"
HIGHER_INDEX_WINS = "higher-index-wins"
EXPLICIT = "explicit"


@dataclass(frozen=True)
class TieBreak:
    """Deterministic priority among tied candidates.

    ``lower-index-wins`` (the default) favours small indices, so among
    candidates tied for the lowest score the largest index is eliminated.
    An explicit ``order`` lists candidates from most to least favoured.
    """

    kind: str = LOWER_INDEX_WINS
    order: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in (LOWER_INDEX_WINS, HIGHER_INDEX_WINS, EXPLICIT):
            raise ValueError(f"unknown tie-break kind {self.kind!r}")
        if self.kind == EXPLICIT:
            if self.order is None:
                raise ValueError("explicit tie-break needs an order")
            object.__setattr__(self, "order", check_ranking(self.order, len(self.order)))

    @classmethod
    def explicit(cls, order: Sequence[int]) -> "TieBreak":
        return cls(EXPLICIT, tuple(order))

    def key(self, c: int) -> int:
        """Sort key: smaller means more favoured."""
        if self.kind == LOWER_INDEX_WINS:
            return c
        if self.kind == HIGHER_INDEX_WINS:
            return -c
        return self.order.index(c)

    def favourite(self, candidates: Iterable[int]) -> int:
        return min(candidates, key=self.key)

    def loser(self, candidates: Iterable[int]) -> int:
        return max(candidates, key=self.key)


DEFAULT_TIEBREAK = TieBreak()


@dataclass(frozen=True)
class Round:
    """One counting step: the active set and scores it saw, and what happened.

    ``event`` is one of ``eliminated``, ``elected``, ``majority`` (a strict
    majority ended the count) or ``declared`` (an exception rule picked the
    winner).
    """

    active: tuple[int, ...]
    scores: dict[int, Fraction]
    event: str
    candidates: tuple[int, ...]


@dataclass
class TallyTrace:
    rounds: list[Round] = field(default_factory=list)
    winners: tuple[int, ...] = ()

    @property
    def winner(self) -> int:
        if len(self.winners) != 1:
            raise ValueError(f"trace has {len(self.winners)} winners")
        return self.winners[0]

    def elimination_order(self) -> list[int]:
        return [c for r in self.rounds if r.event == "eliminated" for c in r.candidates]


def droop_quota(n: int, k: int) -> int:
    return n // (k + 1) + 1


def top_among(ranking: Sequence[int], active) -> int:
    for c in ranking:
        if c in active:
            return c
    raise ValueError("no active candidate on ballot")


def _plurality_scores(p: Profile, active: set[int]) -> dict[int, Fraction]:
    scores = {c: Fraction(0) for c in sorted(active)}
    for r in p.voters:
        scores[top_among(r, active)] += 1
    return scores


def irv_tally(
    p: Profile, tb: TieBreak = DEFAULT_TIEBREAK, majority_stop: bool = False
) -> tuple[int, TallyTrace]:
    """Instant-runoff winner of ``p``.

    Each round drops the active candidate with the fewest first preferences,
    the least favoured under ``tb`` among ties.  With ``majority_stop`` the
    count ends as soon as some score exceeds ``n/2``.
    """
    active = set(range(p.m))
    trace = TallyTrace()
    while len(active) > 1:
        scores = _plurality_scores(p, active)
        if majority_stop:
            leader = [c for c, s in scores.items() if 2 * s > p.n]
            if leader:
                trace.rounds.append(Round(tuple(sorted(active)), scores, "majority", (leader[0],)))
                trace.winners = (leader[0],)
                return leader[0], trace
        low = min(scores.values())
        out = tb.loser(c for c, s in scores.items() if s == low)
        trace.rounds.append(Round(tuple(sorted(active)), scores, "eliminated", (out,)))
        active.remove(out)
    (winner,) = active
    trace.winners = (winner,)
    return winner, trace


STRICT = "strict"
WEAK = "weak"
DECLARE_SMALLEST = "declare-smallest-index-winner"
ELIMINATE_LARGEST = "eliminate-largest-index"


@dataclass(frozen=True)
class AvgConfig:
    variant: str = STRICT
    exception: str = ELIMINATE_LARGEST

    def __post_init__(self):
        if self.variant not in (STRICT, WEAK):
            raise ValueError(f"unknown IRV-Average variant {self.variant!r}")
        if self.exception not in (DECLARE_SMALLEST, ELIMINATE_LARGEST):
            raise ValueError(f"unknown exception rule {self.exception!r}")


def irv_average_tally(
    p: Profile, cfg: AvgConfig = AvgConfig(), tb: TieBreak = DEFAULT_TIEBREAK
) -> tuple[int, TallyTrace]:
    """IRV-Average: every round removes all candidates below (or at) the mean.

    The mean over ``A`` active candidates is ``n/|A|``.  When the rule would
    remove nobody or everybody (a perfect tie) the exception applies; "smallest"
    and "largest" index are read through ``tb``, which coincides with the
    literal indices under the default policy.
    """
    active = set(range(p.m))
    trace = TallyTrace()
    while len(active) > 1:
        scores = _plurality_scores(p, active)
        avg = Fraction(p.n, len(active))
        if cfg.variant == STRICT:
            out = {c for c, s in scores.items() if s < avg}
        else:
            out = {c for c, s in scores.items() if s <= avg}
        if not out or out == active:
            if cfg.exception == DECLARE_SMALLEST:
                w = tb.favourite(active)
                trace.rounds.append(Round(tuple(sorted(active)), scores, "declared", (w,)))
                trace.winners = (w,)
                return w, trace
            out = {tb.loser(active)}
        trace.rounds.append(
            Round(tuple(sorted(active)), scores, "eliminated", tuple(sorted(out, key=tb.key)))
        )
        active -= out
    (winner,) = active
    trace.winners = (winner,)
    return winner, trace


@dataclass(frozen=True)
class StvConfig:
    """STV parameters.  Only the Droop quota and Gregory transfers are implemented."""

    k: int = 1
    quota: str = "droop"
    transfer: str = "gregory"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.quota != "droop":
            raise ValueError(f"unsupported quota {self.quota!r}")
        if self.transfer != "gregory":
            raise ValueError(f"unsupported transfer rule {self.transfer!r}")


class StvCount:
    """Mutable state of an STV count; shared by :func:`stv_tally` and the protocol.

    ``tops[v]`` is voter ``v``'s current top among active candidates and
    ``weights[v]`` their remaining weight.  Voters whose weight reaches zero
    are dropped from both maps.
    """

    def __init__(self, n: int, m: int, cfg: StvConfig, tb: TieBreak):
        if not 1 <= cfg.k < m:
            raise ValueError(f"need 1 <= k < m, got k={cfg.k}, m={m}")
        self.cfg, self.tb = cfg, tb
        self.quota = droop_quota(n, cfg.k)
        self.active = set(range(m))
        self.elected: list[int] = []
        self.tops: dict[int, int] = {}
        self.weights: dict[int, Fraction] = {v: Fraction(1) for v in range(n)}

    def scores(self) -> dict[int, Fraction]:
        scores = {c: Fraction(0) for c in sorted(self.active)}
        for v, c in self.tops.items():
            scores[c] += self.weights[v]
        return scores

    def supporters(self, c: int) -> list[int]:
        return [v for v, t in self.tops.items() if t == c]

    def step(self) -> tuple[Round, list[int], bool]:
        """Run one election or elimination.

        Returns the round record, the voters whose top must be refreshed and
        whether the count has finished.
        """
        scores = self.scores()
        snapshot = tuple(sorted(self.active))
        high = max(scores.values())
        best = self.tb.favourite(c for c, s in scores.items() if s == high)
        if high >= self.quota:
            self.active.remove(best)
            self.elected.append(best)
            rnd = Round(snapshot, scores, "elected", (best,))
            if len(self.elected) == self.cfg.k:
                return rnd, [], True
            keep = Fraction(high - self.quota, high)
            moving = []
            for v in self.supporters(best):
                self.weights[v] *= keep
                if self.weights[v] == 0:
                    del self.weights[v]
                    del self.tops[v]
                else:
                    moving.append(v)
            return rnd, moving, False
        low = min(scores.values())
        out = self.tb.loser(c for c, s in scores.items() if s == low)
        self.active.remove(out)
        rnd = Round(snapshot, scores, "eliminated", (out,))
        if len(self.elected) + len(self.active) == self.cfg.k:
            return rnd, [], True
        return rnd, self.supporters(out), False

    def winners(self) -> tuple[int, ...]:
        if len(self.elected) == self.cfg.k:
            return tuple(sorted(self.elected))
        return tuple(sorted(self.elected + list(self.active)))


def stv_tally(
    p: Profile, cfg: StvConfig = StvConfig(), tb: TieBreak = DEFAULT_TIEBREAK
) -> tuple[tuple[int, ...], TallyTrace]:
    """Single transferable vote with Droop quota and fractional surplus transfer.

    One candidate moves per round: the highest scorer is elected if it meets
    the quota (its supporters keep ``(score - Q)/score`` of their weight),
    otherwise the lowest scorer is eliminated.  Election ties go to the
    ``tb`` favourite.
    """
    count = StvCount(p.n, p.m, cfg, tb)
    count.tops = {v: r[0] for v, r in enumerate(p.voters)}
    trace = TallyTrace()
    while True:
        rnd, moving, done = count.step()
        trace.rounds.append(rnd)
        if done:
            trace.winners = count.winners()
            return trace.winners, trace
        for v in moving:
            count.tops[v] = top_among(p.voters[v], count.active)


def rule_outcome(name: str, p: Profile, tb: TieBreak = DEFAULT_TIEBREAK, **options):
    """Outcome of a named rule: an int winner, or a tuple of winners for ``stv``."""
    if name == "irv":
        return irv_tally(p, tb, majority_stop=options.get("majority_stop", False))[0]
    if name == "irv-average":
        cfg = AvgConfig(
            options.get("variant", STRICT), options.get("exception", ELIMINATE_LARGEST)
        )
        return irv_average_tally(p, cfg, tb)[0]
    if name == "stv":
        return stv_tally(p, StvConfig(options.get("k", 1)), tb)[0]
    raise ValueError(f"unknown rule {name!r}")
