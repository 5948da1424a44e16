"""Rankings, profiles and the grouped profile text format.

Candidates are always the integers ``0..m-1``; a ranking is a tuple listing
them from most to least preferred and a profile is an ordered tuple of
rankings, one per voter.  Everything here is immutable.

The text format is line based::

    # comment
    2 x 0 > 2 > 1
    1 > 2 > 0

An optional ``k x`` prefix repeats a ranking ``k`` times in place.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

Ranking = tuple[int, ...]


class ProfileError(ValueError):
    """Raised for malformed rankings, profiles or profile text."""


def check_ranking(ranking: Sequence[int], m: int) -> Ranking:
    r = tuple(int(c) for c in ranking)
    if len(r) != m or set(r) != set(range(m)):
        raise ProfileError(f"not a permutation of 0..{m - 1}: {r}")
    return r


@dataclass(frozen=True)
class Profile:
    """An ordered collection of ``n`` rankings over ``m`` candidates."""

    m: int
    voters: tuple[Ranking, ...]

    def __post_init__(self):
        if self.m < 1:
            raise ProfileError("a profile needs at least one candidate")
        if not self.voters:
            raise ProfileError("a profile needs at least one voter")
        object.__setattr__(
            self, "voters", tuple(check_ranking(r, self.m) for r in self.voters)
        )

    @classmethod
    def from_rankings(cls, rankings: Iterable[Sequence[int]]) -> "Profile":
        rankings = [tuple(r) for r in rankings]
        if not rankings:
            raise ProfileError("a profile needs at least one voter")
        return cls(len(rankings[0]), tuple(rankings))

    @classmethod
    def from_groups(cls, groups: Iterable[tuple[int, Sequence[int]]]) -> "Profile":
        """Build from ``(multiplicity, ranking)`` pairs, expanded in order."""
        rankings = []
        for k, r in groups:
            if k < 1:
                raise ProfileError(f"multiplicity must be positive, got {k}")
            rankings.extend([tuple(r)] * k)
        return cls.from_rankings(rankings)

    @property
    def n(self) -> int:
        return len(self.voters)

    def __len__(self) -> int:
        return len(self.voters)

    def __iter__(self):
        return iter(self.voters)

    def __getitem__(self, v: int) -> Ranking:
        return self.voters[v]

    def __add__(self, other: "Profile") -> "Profile":
        if other.m != self.m:
            raise ProfileError(f"cannot concatenate m={self.m} and m={other.m}")
        return Profile(self.m, self.voters + other.voters)

    def counts(self) -> Counter:
        return Counter(self.voters)


_LINE = re.compile(r"^(?:(?P<k>[+-]?\d+)\s*[xX]\s*)?(?P<body>.*)$")


def parse_profile(text: str) -> Profile:
    """Parse the grouped profile format; ``m`` is inferred from the indices."""
    groups: list[tuple[int, Ranking, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = _LINE.match(line)
        k = int(match["k"]) if match["k"] is not None else 1
        if k < 1:
            raise ProfileError(f"line {lineno}: multiplicity must be positive, got {k}")
        try:
            ranking = tuple(int(tok) for tok in match["body"].split(">"))
        except ValueError:
            raise ProfileError(f"line {lineno}: cannot parse ranking {match['body']!r}")
        if len(set(ranking)) != len(ranking) or sorted(ranking) != list(
            range(len(ranking))
        ):
            raise ProfileError(f"line {lineno}: not a permutation: {ranking}")
        groups.append((k, ranking, lineno))
    if not groups:
        raise ProfileError("empty profile")
    m = len(groups[0][1])
    for _, ranking, lineno in groups:
        if len(ranking) != m:
            raise ProfileError(
                f"line {lineno}: ranking has {len(ranking)} candidates, expected {m}"
            )
    return Profile.from_groups((k, r) for k, r, _ in groups)


def format_ranking(ranking: Sequence[int]) -> str:
    return " > ".join(str(c) for c in ranking)


def serialize_profile(p: Profile, grouped: bool = False) -> str:
    """Write ``p`` in the text format read by :func:`parse_profile`.

    Grouped output lists each distinct ranking once, in order of first
    appearance, so identical voters end up adjacent.
    """
    if grouped:
        lines = [f"{k} x {format_ranking(r)}" for r, k in p.counts().items()]
    else:
        lines = [format_ranking(r) for r in p.voters]
    return "\n".join(lines) + "\n"


def mix(p: Profile, q: Profile, take_from_q: Iterable[int]) -> Profile:
    """Return ``p`` with the voters in ``take_from_q`` replaced by their ``q`` ballots."""
    if p.m != q.m or p.n != q.n:
        raise ProfileError(
            f"cannot mix profiles of shape (m={p.m}, n={p.n}) and (m={q.m}, n={q.n})"
        )
    chosen = set(take_from_q)
    bad = [v for v in chosen if not 0 <= v < p.n]
    if bad:
        raise ProfileError(f"voter indices out of range: {sorted(bad)}")
    return Profile(
        p.m, tuple(q.voters[v] if v in chosen else r for v, r in enumerate(p.voters))
    )


def _axis_positions(m: int, axis: Sequence[int] | None) -> list[int]:
    if axis is None:
        return list(range(m))
    axis = tuple(axis)
    if len(axis) != m:
        raise ProfileError(f"axis has {len(axis)} candidates, profile has {m}")
    check_ranking(axis, m)
    pos = [0] * m
    for i, c in enumerate(axis):
        pos[c] = i
    return pos


def single_peaked_violation(
    ranking: Sequence[int], axis: Sequence[int] | None = None
) -> tuple[int, int, int] | None:
    """Return a triple ``(a, b, c)`` in axis order with ``b`` ranked last, or None.

    Works on the prefix characterisation: every prefix of a single-peaked
    ranking covers a contiguous stretch of the axis.
    """
    m = len(ranking)
    pos = _axis_positions(m, axis)
    by_pos = list(axis) if axis is not None else list(range(m))
    lo = hi = pos[ranking[0]]
    for c in ranking[1:]:
        x = pos[c]
        if x == lo - 1:
            lo = x
        elif x == hi + 1:
            hi = x
        else:
            # c jumps over an unranked neighbour b, which then loses to both sides
            if x < lo:
                return (c, by_pos[lo - 1], by_pos[lo])
            return (by_pos[hi], by_pos[hi + 1], c)
    return None


def is_single_peaked(p: Profile, axis: Sequence[int] | None = None) -> bool:
    _axis_positions(p.m, axis)
    return all(single_peaked_violation(r, axis) is None for r in p.voters)


def random_profile(m: int, n: int, seed: int) -> Profile:
    """``n`` independent uniform rankings over ``m`` candidates."""
    rng = np.random.default_rng(seed)
    perms = np.argsort(rng.random((n, m)), axis=1)
    return Profile(m, tuple(tuple(int(c) for c in row) for row in perms))


def random_single_peaked_ranking(
    m: int, rng: np.random.Generator, axis: Sequence[int] | None = None
) -> Ranking:
    order = list(axis) if axis is not None else list(range(m))
    lo = hi = int(rng.integers(m))
    out = [order[lo]]
    while len(out) < m:
        if lo == 0:
            go_left = False
        elif hi == m - 1:
            go_left = True
        else:
            go_left = bool(rng.integers(2))
        if go_left:
            lo -= 1
            out.append(order[lo])
        else:
            hi += 1
            out.append(order[hi])
    return tuple(out)


def random_single_peaked_profile(
    m: int, n: int, seed: int, axis: Sequence[int] | None = None
) -> Profile:
    """Peak drawn uniformly, then each step extends to a uniformly chosen side."""
    _axis_positions(m, axis)
    rng = np.random.default_rng(seed)
    return Profile(m, tuple(random_single_peaked_ranking(m, rng, axis) for _ in range(n)))
