import itertools
import math

import pytest

from irv_commlab.ballots import Profile, ProfileError, random_profile, random_single_peaked_profile
from irv_commlab.elicitation import (
    Transcript,
    run_ppr,
    run_sp_ppr,
    run_stv_ppr,
    top_cost,
    transcript_bound_check,
)
from irv_commlab.rules import StvConfig, TieBreak, irv_tally, stv_tally


def ceil_log2(k):
    return math.ceil(math.log2(k)) if k > 1 else 0


@pytest.mark.parametrize("k", range(1, 70))
def test_top_cost(k):
    assert top_cost(k) == ceil_log2(k)


def check_answers(p, t):
    """Every answer must be recomputable from the voter's ranking."""
    for q in t.queries:
        r = p.voters[q.voter]
        if q.kind == "top":
            assert q.answer == next(c for c in r if c in q.active)
            assert q.bits == ceil_log2(len(q.active))
        else:
            assert q.bits == 1
            target = q.left if q.answer == "L" else q.right
            assert r.index(target) < r.index(q.right if q.answer == "L" else q.left)


def check_shape(t):
    sizes = [r.active_size for r in t.rounds]
    assert all(a > b for a, b in zip(sizes, sizes[1:]))
    assert t.total_bits == sum(q.bits for q in t.queries)
    per_round = {}
    for q in t.queries:
        per_round[(q.round, q.voter)] = per_round.get((q.round, q.voter), 0) + 1
    assert max(per_round.values()) == 1


def test_ppr_worked_example(P):
    winner, t = run_ppr(P)
    assert winner == 0
    assert t.total_bits == 14
    assert [q.bits for q in t.queries if q.round > 0] == [1, 1, 0, 0, 0]
    assert t.requery_counts() == [2, 3]


@pytest.mark.parametrize("m", range(1, 9))
def test_ppr_single_voter(m):
    r = tuple(reversed(range(m)))
    winner, t = run_ppr(Profile(m, (r,)))
    assert winner == m - 1 and t.total_bits == ceil_log2(m)


def test_sp_ppr_eighteen_voter_example(sp18):
    winner, t = run_sp_ppr(sp18)
    assert winner == 3
    assert t.total_bits == 61 == 18 * 3 + 2 + 5
    assert t.requery_counts() == [2, 0, 5]
    assert [r.forced for r in t.rounds if r.event == "eliminated"] == [0, 3, 0]
    assert [q.answer for q in t.queries if q.kind == "direction"] == ["L"] * 4 + ["R"] * 3
    check_answers(sp18, t)
    assert transcript_bound_check(t, 5, 18)


def test_sp_ppr_small():
    winner, t = run_sp_ppr(Profile(4, ((2, 3, 1, 0),)))
    assert (winner, t.total_bits) == (2, 2)


def test_sp_ppr_rejects_non_single_peaked(P):
    with pytest.raises(ProfileError, match="triple"):
        run_sp_ppr(P)


def test_sp_ppr_custom_axis():
    axis = (3, 0, 2, 1)
    p = random_single_peaked_profile(4, 30, 5, axis=axis)
    assert run_sp_ppr(p, axis)[0] == irv_tally(p, majority_stop=True)[0]


def test_sp_no_direction_query_at_extremes():
    for seed in range(50):
        p = random_single_peaked_profile(6, 25, seed)
        _, t = run_sp_ppr(p)
        for rnd in t.rounds:
            if rnd.event != "eliminated":
                continue
            asked = [q for q in t.queries if q.round == rnd.index]
            if rnd.forced:
                assert not asked
            for q in asked:
                assert q.left is not None and q.right is not None


def test_stv_ppr_examples(stv_example):
    winners, t = run_stv_ppr(stv_example, StvConfig(2))
    assert winners == (0, 1)
    check_answers(stv_example, t)
    p = Profile.from_groups([(3, (0, 1)), (1, (1, 0))])
    winners, t = run_stv_ppr(p, StvConfig(1))
    assert winners == (0,) and t.total_bits == 4


def _query_log(t):
    return [(q.voter, q.round, q.active, q.answer, q.bits) for q in t.queries]


@pytest.mark.parametrize("seed", range(200))
def test_stv_ppr_k1_matches_ppr(seed):
    p = random_profile(2 + seed % 6, 2 * (seed % 15) + 1, seed)
    winners, t_stv = run_stv_ppr(p, StvConfig(1))
    winner, t_ppr = run_ppr(p)
    assert winners == (winner,)
    assert _query_log(t_stv) == _query_log(t_ppr)


@pytest.mark.parametrize("seed", range(100))
def test_protocol_invariants(seed):
    p = random_profile(2 + seed % 7, 1 + seed % 40, seed)
    winner, t = run_ppr(p)
    check_answers(p, t)
    check_shape(t)
    # only supporters of the removed candidate are asked again
    tops = {q.voter: q.answer for q in t.queries if q.round == 0}
    for rnd in t.rounds:
        if rnd.event == "eliminated":
            asked = {q.voter for q in t.queries if q.round == rnd.index}
            assert asked == {v for v, c in tops.items() if c == rnd.candidate}
            for q in t.queries:
                if q.round == rnd.index:
                    tops[q.voter] = q.answer
    sp = random_single_peaked_profile(2 + seed % 9, 1 + seed % 40, seed)
    _, t = run_sp_ppr(sp)
    check_answers(sp, t)
    check_shape(t)


def test_exhaustive_protocol_equivalence_m3():
    perms = list(itertools.permutations(range(3)))
    for n in range(1, 5):
        for voters in itertools.product(perms, repeat=n):
            p = Profile(3, voters)
            for tb in (TieBreak(), TieBreak("higher-index-wins")):
                winner, t = run_ppr(p, tb)
                assert winner == irv_tally(p, tb, majority_stop=True)[0]
                assert transcript_bound_check(t, 3, n)
                for k in (1, 2):
                    assert run_stv_ppr(p, StvConfig(k), tb)[0] == stv_tally(p, StvConfig(k), tb)[0]


def test_bound_check_trivial_and_errors(sp18):
    _, t = run_ppr(Profile(5, ((3, 1, 0, 2, 4),)))
    assert transcript_bound_check(t, 5, 1)
    bogus = Transcript("mystery", 3, 1)
    with pytest.raises(ValueError):
        transcript_bound_check(bogus, 3, 1)


def test_bound_check_detects_inflated_bits(P):
    _, t = run_ppr(P)
    t.queries[0] = type(t.queries[0])(**{**t.queries[0].__dict__, "bits": 40})
    assert not transcript_bound_check(t, 3, 6)


def test_stv_ppr_elections_can_exceed_ppr_round_bound():
    # 100 voters ride a surplus onto 5, which is then eliminated with j = 3
    groups = [(100, (0, 5, 1, 2, 3, 4, 6, 7)), (40, (1, 2, 0, 3, 4, 5, 6, 7)),
              (40, (2, 1, 0, 3, 4, 5, 6, 7))]
    p = Profile.from_groups(groups)
    winners, t = run_stv_ppr(p, StvConfig(2))
    assert winners == stv_tally(p, StvConfig(2))[0]
    late = [r for r in t.rounds if r.event == "eliminated" and r.candidate == 5]
    assert late and late[0].requeried > p.n // late[0].active_size
    assert transcript_bound_check(t, p.m, p.n)


def test_transcript_text(sp18):
    _, t = run_sp_ppr(sp18)
    text = t.to_text()
    assert text.startswith("format: irv-commlab-transcript/1\nprotocol: sp-ppr\n")
    assert text.endswith("winners: 3\ntotal_bits: 61\n")
    assert "round: 2 event=eliminated candidate=4 active_size=4 requeried=0 forced=3" in text
    assert text.count("kind=direction") == 7
