"""Fooling sets for IRV, single-peaked IRV and STV.

A signature is the decreasing list of record minima of a ranking: the
candidates an IRV count sees when candidates drop out in the order
``m-1, m-2, ..., 0``.  Replacing every ballot by the representative of its
signature (the compatible ranking that ranks high indices as early as
possible) turns a perfectly symmetric profile into a member of the fooling
set; all reorderings of that profile form the set.

Counting is exact with Python integers.  Log-cardinalities use log-gamma
sums, switching to closed forms for the subset sums once ``m`` is too large
to enumerate the ``2**(m-1)`` signatures.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np
from scipy.special import gammaln

from .ballots import Profile, Ranking, mix
from .rules import (
    DEFAULT_TIEBREAK,
    ELIMINATE_LARGEST,
    STRICT,
    TieBreak,
    rule_outcome,
)

IRV = "irv"
SP = "sp"
STV = "stv"

REPORT_FORMAT = "irv-commlab-fooling-report/1"

# largest m whose 2**(m-1) subset terms are summed one by one
DIRECT_MAX_M = 20


class FoolingSpecError(ValueError):
    pass


@dataclass(frozen=True)
class FoolingSpec:
    """Which fooling family to build.

    IRV and STV use ``n = ell * m!`` significant voters; the single-peaked
    family uses ``n = ell * m`` with ``m`` a power of two and ``ell > 2``.
    """

    family: str
    m: int
    ell: int = 1
    k: int = 1
    tiebreak_voters: bool = False

    def __post_init__(self):
        if self.family not in (IRV, SP, STV):
            raise FoolingSpecError(f"unknown family {self.family!r}")
        if self.m < 1:
            raise FoolingSpecError("m must be at least 1")
        if self.ell < 1:
            raise FoolingSpecError("ell must be at least 1")
        if self.family == STV:
            if not 1 <= self.k < self.m:
                raise FoolingSpecError(f"STV needs 1 <= k < m, got k={self.k}, m={self.m}")
        elif self.k != 1:
            raise FoolingSpecError(f"k only applies to the STV family, got k={self.k}")
        if self.family == SP:
            if self.m & (self.m - 1):
                raise FoolingSpecError(f"single-peaked family needs m a power of two, got {self.m}")
            if self.ell <= 2:
                raise FoolingSpecError(f"single-peaked family needs ell > 2, got {self.ell}")
            if self.tiebreak_voters and self.ell < 2**self.m:
                raise FoolingSpecError(
                    f"single-peaked tie-breaking voters need ell >= 2**m = {2**self.m}"
                )
        elif self.tiebreak_voters and self.ell <= self.m * (self.m + 1) // 2:
            raise FoolingSpecError(
                f"tie-breaking voters need ell > m(m+1)/2 = {self.m * (self.m + 1) // 2}"
            )

    @property
    def n(self) -> int:
        """Number of significant voters."""
        if self.family == SP:
            return self.ell * self.m
        return self.ell * math.factorial(self.m)

    def log_n(self) -> float:
        if self.family == SP:
            return math.log(self.ell * self.m)
        return math.log(self.ell) + math.lgamma(self.m + 1)

    def expected_outcome(self):
        return tuple(range(self.k)) if self.family == STV else 0


# -- signatures and representatives ------------------------------------------


def signature(r: Sequence[int]) -> tuple[int, ...]:
    """Record minima of ``r``; always ends with candidate 0."""
    out = []
    for c in r:
        if not out or c < out[-1]:
            out.append(c)
    return tuple(out)


def stv_signature(r: Sequence[int], k: int) -> tuple[int, ...]:
    """Record minima of ``r``, cut after the first candidate below ``k``."""
    out = []
    for c in r:
        if not out or c < out[-1]:
            out.append(c)
            if c < k:
                break
    return tuple(out)


def _check_decreasing(s: Sequence[int], m: int):
    if not s or any(a <= b for a, b in zip(s, s[1:])) or s[0] >= m or s[-1] < 0:
        raise ValueError(f"not a decreasing candidate list over m={m}: {tuple(s)}")


def is_signature(s: Sequence[int], m: int) -> bool:
    try:
        _check_decreasing(s, m)
    except ValueError:
        return False
    return s[-1] == 0


def is_stv_signature(s: Sequence[int], m: int, k: int) -> bool:
    try:
        _check_decreasing(s, m)
    except ValueError:
        return False
    return s[-1] < k and all(c >= k for c in s[:-1])


def _greedy_completion(s: Sequence[int], m: int) -> Ranking:
    placed: list[int] = []
    seen = set()
    for c in s:
        placed.append(c)
        seen.add(c)
        for d in range(m - 1, c, -1):
            if d not in seen:
                placed.append(d)
                seen.add(d)
    placed.extend(d for d in range(m - 1, -1, -1) if d not in seen)
    return tuple(placed)


def representative(s: Sequence[int], m: int) -> Ranking:
    """The ranking with signature ``s`` that ranks high indices earliest.

    >>> representative((2, 0), 5)
    (2, 4, 3, 0, 1)
    """
    if not is_signature(s, m):
        raise ValueError(f"invalid IRV signature for m={m}: {tuple(s)}")
    return _greedy_completion(s, m)


def stv_representative(s: Sequence[int], m: int, k: int) -> Ranking:
    """STV analogue of :func:`representative`.

    The tail after the final (sub-``k``) element lists the leftovers in
    decreasing order.
    """
    if not is_stv_signature(s, m, k):
        raise ValueError(f"invalid STV signature for m={m}, k={k}: {tuple(s)}")
    return _greedy_completion(s, m)


def all_signatures(m: int) -> list[tuple[int, ...]]:
    """Every IRV signature over ``m`` candidates, in lexicographic order."""
    sigs = [
        tuple(sorted(head, reverse=True)) + (0,)
        for size in range(m)
        for head in itertools.combinations(range(1, m), size)
    ]
    return sorted(sigs)


def all_stv_signatures(m: int, k: int) -> list[tuple[int, ...]]:
    sigs = [
        tuple(sorted(head, reverse=True)) + (last,)
        for last in range(k)
        for size in range(m - k + 1)
        for head in itertools.combinations(range(k, m), size)
    ]
    return sorted(sigs)


def count_signature(s: Sequence[int], m: int, k: int | None = None) -> int:
    """Number of rankings of ``m`` candidates with signature ``s``.

    For IRV signatures this is the product of the candidates missing from
    ``s``.  With ``k`` given, ``s`` is an STV signature and the product runs
    over ``1..m-1`` minus every element of ``s`` except the last.
    """
    if k is None:
        if not is_signature(s, m):
            raise ValueError(f"invalid IRV signature for m={m}: {tuple(s)}")
        return math.prod(c for c in range(1, m) if c not in s)
    if not is_stv_signature(s, m, k):
        raise ValueError(f"invalid STV signature for m={m}, k={k}: {tuple(s)}")
    head = set(s[:-1])
    return math.prod(c for c in range(1, m) if c not in head)


# -- construction ------------------------------------------------------------


def sp_ranking(peak: int, m: int) -> Ranking:
    """``peak > peak-1 > ... > 0 > peak+1 > ... > m-1``."""
    return tuple(range(peak, -1, -1)) + tuple(range(peak + 1, m))


def tie_breaking_block(m: int, family: str = IRV) -> Profile:
    """Extra voters that make the count behave as if ties favoured low indices.

    IRV: ``m - i`` voters put ``i`` first and the rest in ascending order.
    Single-peaked: ``2**(m-1-c)`` voters with the single-peaked ballot
    peaking at ``c``, so no two scores can ever coincide.
    """
    groups = []
    for i in range(m - 1, -1, -1):
        if family == SP:
            groups.append((2 ** (m - 1 - i), sp_ranking(i, m)))
        elif family in (IRV, STV):
            groups.append((m - i, (i,) + tuple(c for c in range(m) if c != i)))
        else:
            raise FoolingSpecError(f"unknown family {family!r}")
    return Profile.from_groups(groups)


def _significant_groups(spec: FoolingSpec) -> list[tuple[int, Ranking]]:
    if spec.family == SP:
        return [(spec.ell, sp_ranking(c, spec.m)) for c in range(spec.m)]
    if spec.family == IRV:
        return [
            (spec.ell * count_signature(s, spec.m), representative(s, spec.m))
            for s in all_signatures(spec.m)
        ]
    return [
        (spec.ell * count_signature(s, spec.m, spec.k), stv_representative(s, spec.m, spec.k))
        for s in all_stv_signatures(spec.m, spec.k)
    ]


def canonical_fooling_profile(spec: FoolingSpec) -> Profile:
    """The member of the family with voters sorted by signature.

    Tie-breaking voters, when requested, come after the significant ones.
    """
    p = Profile.from_groups(_significant_groups(spec))
    if spec.tiebreak_voters:
        p = p + tie_breaking_block(spec.m, spec.family)
    return p


def _next_permutation(a: list[int]) -> bool:
    i = len(a) - 2
    while i >= 0 and a[i] >= a[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = len(a) - 1
    while a[j] <= a[i]:
        j -= 1
    a[i], a[j] = a[j], a[i]
    a[i + 1:] = reversed(a[i + 1:])
    return True


def enumerate_fooling_profiles(
    spec: FoolingSpec, limit: int | None = None
) -> Iterator[Profile]:
    """Distinct reorderings of the canonical profile, lexicographically.

    Only significant voters are permuted; a tie-breaking block stays at the end.
    """
    groups = _significant_groups(spec)
    rankings = sorted(r for _, r in groups)
    index = {r: i for i, r in enumerate(rankings)}
    word = sorted(index[r] for k, r in groups for _ in range(k))
    tail = tie_breaking_block(spec.m, spec.family).voters if spec.tiebreak_voters else ()
    produced = 0
    while limit is None or produced < limit:
        yield Profile(spec.m, tuple(rankings[i] for i in word) + tail)
        produced += 1
        if not _next_permutation(word):
            return


# -- counting ----------------------------------------------------------------


def fooling_cardinality(spec: FoolingSpec) -> int:
    """Exact number of profiles in the family (tie-breaking voters excluded)."""
    n = spec.n
    if spec.family == SP:
        return math.factorial(n) // math.factorial(spec.ell) ** spec.m
    k = spec.k
    base = spec.ell * math.factorial(k - 1)
    denom = 1
    for size in range(spec.m - k + 1):
        for subset in itertools.combinations(range(k, spec.m), size):
            denom *= math.factorial(base * math.prod(subset))
    return math.factorial(n) // denom**k


def _subset_log_products(lo: int, hi: int) -> np.ndarray:
    """``log(prod(T))`` for every subset ``T`` of ``lo..hi-1``."""
    logs = np.zeros(1)
    for c in range(lo, hi):
        logs = np.concatenate([logs, logs + math.log(c)])
    return logs


def _scaled(value_per_voter: float, spec: FoolingSpec) -> float:
    if spec.log_n() > 700:
        raise OverflowError(
            f"n = {spec.ell} * {spec.m}! is too large for a float; use per_voter=True"
        )
    return value_per_voter * spec.n


def log_cardinality(spec: FoolingSpec, per_voter: bool = False) -> float:
    """Natural log of :func:`fooling_cardinality`, or that divided by ``n``.

    Large ``m`` only works with ``per_voter=True``, since ``n = ell * m!``
    itself overflows a float.
    """
    m, ell, k = spec.m, spec.ell, spec.k
    log_n = spec.log_n()
    if spec.family == SP:
        n = spec.n
        pv = (math.lgamma(n + 1) - m * math.lgamma(ell + 1)) / n
    elif m <= DIRECT_MAX_M:
        n = spec.n
        logs = math.log(ell) + math.lgamma(k) + _subset_log_products(k, m)
        terms = gammaln(np.exp(logs) + 1.0)
        pv = (math.lgamma(n + 1) - k * math.fsum(terms)) / n
    else:
        # sum of log-factorials over all subsets via Stirling; the subset
        # sums of a*log(a) - a, log(a) and 1/a all collapse to products
        log_base = math.log(ell) + math.lgamma(k)
        log_sum = math.fsum(math.log(c) for c in range(k, m))
        pv = math.log(m) + math.fsum(math.log(c) / (c + 1) for c in range(k, m))
        inv_n = math.exp(-log_n)
        half_log_terms = 0.5 * (
            math.exp((m - k) * math.log(2) - log_n) * (math.log(2 * math.pi) + log_base)
            + math.exp((m - k - 1) * math.log(2) - log_n) * log_sum
        )
        pv += 0.5 * (math.log(2 * math.pi) + log_n) * inv_n + inv_n * inv_n / 12
        pv -= k * half_log_terms
        pv -= m * math.exp(-log_n - math.lgamma(k)) / (12 * ell)
    return pv if per_voter else _scaled(pv, spec)


def asymptotic_estimate(spec: FoolingSpec, per_voter: bool = False) -> tuple[float, float]:
    """``(finite_sum, leading_term)`` approximations of ``log |F|``.

    IRV/STV: ``n * sum_{j=k}^{m-1} ln(j)/(j+1)`` and ``n * ln(m)**2 / 2``.
    Single-peaked: both are ``n * ln(m)``.
    """
    if spec.family == SP:
        finite = leading = math.log(spec.m)
    else:
        finite = math.fsum(math.log(j) / (j + 1) for j in range(spec.k, spec.m))
        leading = math.log(spec.m) ** 2 / 2
    if per_voter:
        return finite, leading
    return _scaled(finite, spec), _scaled(leading, spec)


# -- verification ------------------------------------------------------------


@dataclass(frozen=True)
class RuleSpec:
    """A picklable voting rule: ``irv``, ``irv-average`` or ``stv``."""

    name: str = "irv"
    tb: TieBreak = DEFAULT_TIEBREAK
    k: int = 1
    variant: str = STRICT
    exception: str = ELIMINATE_LARGEST

    def __call__(self, p: Profile):
        return rule_outcome(
            self.name, p, self.tb, k=self.k, variant=self.variant, exception=self.exception
        )

    def describe(self) -> str:
        extra = {"stv": f" k={self.k}", "irv-average": f" {self.variant}/{self.exception}"}
        return f"{self.name}{extra.get(self.name, '')} tiebreak={self.tb.kind}"


def default_rule(spec: FoolingSpec) -> RuleSpec:
    return RuleSpec("stv", k=spec.k) if spec.family == STV else RuleSpec("irv")


@dataclass(frozen=True)
class Witness:
    """A mix of two profiles whose outcome differs from theirs.

    ``base`` names the profile the mix starts from and ``swapped`` the voters
    taken from the other one.
    """

    profile: Profile
    outcome: object
    base: str
    swapped: tuple[int, ...]

    @property
    def single(self) -> bool:
        return len(self.swapped) == 1

    @property
    def kind(self) -> str:
        size = "single" if self.single else "multi"
        return f"{size}:{'q-into-p' if self.base == 'p' else 'p-into-q'}"


def verify_fooling_pair(
    p: Profile,
    q: Profile,
    rule: Callable[[Profile], object],
    exhaustive: bool = False,
    expected=None,
) -> Witness | None:
    """Look for a voter-wise mix of ``p`` and ``q`` with a different outcome.

    Single-voter swaps are tried first, in both directions; with
    ``exhaustive`` every other subset of differing voters follows.
    """
    if p.m != q.m or p.n != q.n:
        raise ValueError("profiles have different dimensions")
    if p == q:
        raise ValueError("profiles are equal")
    w = rule(p)
    if rule(q) != w:
        raise ValueError(f"rule disagrees on the two profiles: {w} vs {rule(q)}")
    if expected is not None and w != expected:
        raise ValueError(f"common outcome {w} differs from the expected {expected}")
    diff = [v for v in range(p.n) if p.voters[v] != q.voters[v]]
    for v in diff:
        for base, a, b in (("p", p, q), ("q", q, p)):
            t = mix(a, b, {v})
            out = rule(t)
            if out != w:
                return Witness(t, out, base, (v,))
    if not exhaustive:
        return None
    for size in range(2, len(diff)):
        for subset in itertools.combinations(diff, size):
            t = mix(p, q, subset)
            out = rule(t)
            if out != w:
                return Witness(t, out, "p", subset)
    return None


@dataclass
class FoolingReport:
    spec: FoolingSpec
    rule: str
    mode: str
    profiles_checked: int = 0
    pairs_checked: int = 0
    witnesses: Counter = field(default_factory=Counter)
    failures: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_text(self, timing: bool = True) -> str:
        s = self.spec
        lines = [
            f"format: {REPORT_FORMAT}",
            f"family: {s.family}",
            f"m: {s.m}",
            f"ell: {s.ell}",
            f"k: {s.k}",
            f"tiebreak_voters: {str(s.tiebreak_voters).lower()}",
            f"rule: {self.rule}",
            f"mode: {self.mode}",
            f"profiles_checked: {self.profiles_checked}",
            f"pairs_checked: {self.pairs_checked}",
        ]
        lines += [f"witness.{kind}: {n}" for kind, n in sorted(self.witnesses.items())]
        lines.append(f"failures: {len(self.failures)}")
        lines += [f"  failure: {f}" for f in self.failures]
        if timing:
            lines.append(f"elapsed_seconds: {self.elapsed:.3f}")
        return "\n".join(lines) + "\n"


class _Memo:
    def __init__(self, rule):
        self.rule = rule
        self.cache: dict = {}

    def __call__(self, p: Profile):
        key = p.voters
        if key not in self.cache:
            self.cache[key] = self.rule(p)
        return self.cache[key]


def _check_pairs(profiles, pairs, rule, expected, exhaustive):
    memo = _Memo(rule)
    hist: Counter = Counter()
    failures = []
    for i, j in pairs:
        p, q = profiles[i], profiles[j]
        try:
            wit = verify_fooling_pair(p, q, memo, exhaustive=exhaustive, expected=expected)
        except ValueError as err:
            failures.append(f"pair ({i}, {j}): {err}")
            continue
        if wit is None:
            failures.append(f"pair ({i}, {j}): no witness")
        else:
            hist[wit.kind] += 1
    return hist, failures


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    return max(1, int(os.environ.get("IRV_COMMLAB_THREADS", "1")))


def verify_fooling_set(
    spec: FoolingSpec,
    rule: RuleSpec | None = None,
    mode: str = "exhaustive",
    samples: int = 500,
    seed: int = 0,
    ceiling: int = 20_000,
    exhaustive_mixes: bool = False,
    workers: int | None = None,
) -> FoolingReport:
    """Check both fooling-set conditions on the family described by ``spec``.

    ``exhaustive`` enumerates every member (refusing above ``ceiling``
    profiles) and every pair; ``sampled`` draws ``samples`` random pairs of
    distinct members.  Every checked profile must produce the expected
    outcome and every pair must have a witnessing mix.
    """
    rule = rule or default_rule(spec)
    expected = spec.expected_outcome()
    start = time.perf_counter()
    if mode == "exhaustive":
        size = fooling_cardinality(spec)
        if size > ceiling:
            raise FoolingSpecError(f"{size} profiles exceed the enumeration ceiling {ceiling}")
        profiles = list(enumerate_fooling_profiles(spec))
        pairs = list(itertools.combinations(range(len(profiles)), 2))
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        canon = canonical_fooling_profile(spec)
        sig = canon.voters[: spec.n]
        tail = canon.voters[spec.n:]
        profiles, pairs = [], []
        seen: dict = {}

        def draw():
            order = rng.permutation(spec.n)
            voters = tuple(sig[i] for i in order) + tail
            if voters not in seen:
                seen[voters] = len(profiles)
                profiles.append(Profile(spec.m, voters))
            return seen[voters]

        if fooling_cardinality(spec) < 2:
            raise FoolingSpecError("family has fewer than two profiles")
        while len(pairs) < samples:
            i, j = draw(), draw()
            if i != j:
                pairs.append((i, j))
    else:
        raise ValueError(f"unknown mode {mode!r}")

    report = FoolingReport(spec, rule.describe(), mode)
    for idx, p in enumerate(profiles):
        out = rule(p)
        if out != expected:
            report.failures.append(f"profile {idx}: outcome {out}, expected {expected}")
    report.profiles_checked = len(profiles)

    n_workers = _worker_count(workers)
    if n_workers == 1 or len(pairs) < 2 * n_workers:
        chunks = [_check_pairs(profiles, pairs, rule, expected, exhaustive_mixes)]
    else:
        step = -(-len(pairs) // n_workers)
        with ProcessPoolExecutor(n_workers) as pool:
            futures = [
                pool.submit(_check_pairs, profiles, pairs[i:i + step], rule, expected,
                            exhaustive_mixes)
                for i in range(0, len(pairs), step)
            ]
            chunks = [f.result() for f in futures]
    for hist, failures in chunks:
        report.witnesses.update(hist)
        report.failures.extend(failures)
    report.pairs_checked = len(pairs)
    report.elapsed = time.perf_counter() - start
    return report
