import itertools
from math import comb, factorial

import pytest
from hypothesis import given, settings, strategies as st

from matchaudit.cases import example1_profile
from matchaudit.market import (SELF, AgentPermutation, BlockingPair, Market, Matching,
                               PreferenceProfile, ResourceLimitError, all_permutations,
                               check_ranking, enumerate_internal_matchings,
                               enumerate_matchings, find_permutation, is_stable_fast,
                               is_stable_matching, man, permute_matching, permute_profile,
                               rank_of, ranking_from_list, woman)
from matchaudit.stability import example2_profile

from conftest import profiles

P2 = example2_profile()


def brute_force_matchings(market):
    """Every partial injection from men to women, built independently."""
    out = set()
    for k in range(min(market.num_men, market.num_women) + 1):
        for ms in itertools.combinations(range(market.num_men), k):
            for ws in itertools.permutations(range(market.num_women), k):
                out.add(Matching.from_pairs(market, zip(ms, ws)))
    return out


# -- rankings ------------------------------------------------------------------

def test_rank_lookups():
    assert rank_of(P2, man(0), woman(0)) == 1
    assert rank_of(P2, man(0), man(0)) == 4
    p3 = PreferenceProfile.from_lists([[0, 1], [0, 1], [2]], [[0], [1], [2]])
    assert rank_of(p3, man(1), woman(1)) == 2
    assert rank_of(p3, man(1), man(1)) == 3
    assert rank_of(p3, man(1), woman(2)) == 4


def test_rank_rejects_same_side_outcome():
    with pytest.raises(ValueError):
        rank_of(P2, man(0), man(1))


def test_truncated_lists_put_unlisted_partners_after_self():
    assert ranking_from_list([2], 3) == (2, SELF, 0, 1)
    assert ranking_from_list([1, SELF, 0], 3) == (1, SELF, 0, 2)


@pytest.mark.parametrize("bad", [(0, 0, SELF), (0, 1), (0, 1, 2, SELF, SELF)])
def test_invalid_rankings_rejected(bad):
    with pytest.raises(ValueError):
        check_ranking(bad, 2)


@given(profiles())
def test_rank_is_a_bijection(p):
    m = p.market
    for a in m.agents:
        outcomes = [a] + [type(a)(a.opposite, j) for j in range(m.side_size(a.opposite))]
        ranks = sorted(rank_of(p, a, o) for o in outcomes)
        assert ranks == list(range(1, len(outcomes) + 1))


# -- enumeration -----------------------------------------------------------------

@pytest.mark.parametrize("n,count", [(1, 2), (2, 7), (3, 34)])
def test_square_market_counts(n, count):
    assert len(enumerate_matchings(Market(n, n))) == count


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_counts_match_formula_and_brute_force(n):
    market = Market(n, n)
    got = enumerate_matchings(market)
    assert len(got) == sum(comb(n, k) ** 2 * factorial(k) for k in range(n + 1))
    assert len(set(got)) == len(got)
    assert set(got) == brute_force_matchings(market)


@pytest.mark.parametrize("shape", [(1, 3), (3, 1), (2, 3)])
def test_rectangular_markets_match_brute_force(shape):
    market = Market(*shape)
    assert set(enumerate_matchings(market)) == brute_force_matchings(market)


def test_canonical_order_is_lexicographic_with_self_last():
    got = enumerate_matchings(Market(3, 3))
    keys = [mu.sort_key() for mu in got]
    assert keys == sorted(keys)
    assert got[0].men == (0, 1, 2)
    assert got[-1].men == (SELF, SELF, SELF)


def test_enumeration_cap_is_loud():
    with pytest.raises(ResourceLimitError, match="cap"):
        enumerate_matchings(Market(4, 4), cap=100)


def test_internal_matchings():
    market = Market(3, 3)
    assert len(enumerate_internal_matchings(market, [man(0), woman(2)])) == 2
    assert enumerate_internal_matchings(market, [man(1)]) == [
        Matching((SELF, SELF, SELF), 3)]
    assert enumerate_internal_matchings(market, market.agents) == enumerate_matchings(market)
    for mu in enumerate_internal_matchings(market, [man(0), man(2), woman(1)]):
        assert mu.men[1] == SELF and all(w in (1, SELF) for w in mu.men)


# -- stability of one matching ---------------------------------------------------

def test_documented_stability_verdicts():
    p1 = example1_profile()
    assert is_stable_matching(p1, Matching.from_pairs(p1.market, [(0, 1), (1, 2), (2, 0)]))
    assert is_stable_matching(P2, Matching.from_pairs(P2.market, [(0, 0), (1, 1), (2, 2)]))
    verdict = is_stable_matching(P2, Matching.from_pairs(P2.market, [(0, 1), (1, 0), (2, 2)]))
    assert not verdict.stable
    assert BlockingPair(man(0), woman(0)) in verdict.violations


def _violations_oracle(p, mu):
    """Definition-level check written against rank_of only."""
    out = set()
    for a in p.market.agents:
        if rank_of(p, a, mu.partner(a)) > rank_of(p, a, a):
            out.add(("ir", a))
    for m in p.market.men:
        for w in p.market.women:
            if (rank_of(p, m, w) < rank_of(p, m, mu.partner(m))
                    and rank_of(p, w, m) < rank_of(p, w, mu.partner(w))):
                out.add(("pair", m, w))
    return out


@settings(max_examples=60, deadline=None)
@given(profiles())
def test_violation_list_is_exact(p):
    for mu in enumerate_matchings(p.market):
        verdict = is_stable_matching(p, mu)
        got = set()
        for v in verdict.violations:
            got.add(("pair", v.man, v.woman) if isinstance(v, BlockingPair) else ("ir", v.agent))
        assert got == _violations_oracle(p, mu)
        assert is_stable_fast(p, mu) == verdict.stable


# -- permutations ----------------------------------------------------------------

def test_identity_and_swap():
    ident = AgentPermutation.identity(P2.market)
    assert permute_profile(P2, ident) == P2
    swap = AgentPermutation((1, 0, 2), (1, 0, 2))
    assert permute_profile(P2, swap).men[1][:3] == (1, 0, 2)


def test_find_permutation_examples():
    assert find_permutation(P2, P2) == AgentPermutation.identity(P2.market)
    assert find_permutation(example1_profile(), P2) is None


sigmas = st.tuples(st.permutations(range(3)), st.permutations(range(3))).map(
    lambda t: AgentPermutation(tuple(t[0]), tuple(t[1])))


@settings(max_examples=60, deadline=None)
@given(profiles(market=Market(3, 3)),
       sigmas, sigmas)
def test_group_action_and_equivariance(p, s, t):
    assert permute_profile(permute_profile(p, s), t) == permute_profile(p, t.compose(s))
    assert permute_profile(permute_profile(p, s), s.inverse()) == p
    found = find_permutation(permute_profile(p, s), p)
    assert permute_profile(p, found) == permute_profile(p, s)
    assert list(all_permutations(p.market)).index(found) <= list(
        all_permutations(p.market)).index(s)
    for mu in enumerate_matchings(p.market)[::5]:
        assert (is_stable_matching(p, mu).stable
                == is_stable_matching(permute_profile(p, s), permute_matching(mu, s)).stable)
