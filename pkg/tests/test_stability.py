import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from matchaudit import stability
from matchaudit.cases import example1_profile, example3_prior
from matchaudit.market import (Market, Matching, ranking_from_list as rl, enumerate_internal_matchings,
                               enumerate_matchings, man, rank_of, woman)
from matchaudit.mechanisms import (Mechanism, RandomMatching, da_mechanism,
                                   random_stable_mechanism, table_mechanism,
                                   uniform_random_full, uniform_random_mechanism)
from matchaudit.priors import (AgentTypeDistribution, Event, Prior, condition, marginal_types,
                               point_mass, product_prior)
from matchaudit.stability import (DOMINATED_BY, EQUAL, INCOMPARABLE, STRICTLY_DOMINATES,
                                  Deviation, ex_ante_block, ex_ante_pairwise_stable,
                                  ex_ante_stable_at, ex_post_block, ex_post_stable_at,
                                  example2_profile, fosd_compare, interim_block,
                                  interim_instability_witness, interim_pairwise_stable,
                                  interim_to_ex_ante, lift_ex_post, mutual_first_violation,
                                  permutation_orbit)
from matchaudit.verify import WitnessError, check_block_witness, check_interim_witness

from conftest import profiles, random_complete_profile

P1, P2 = example1_profile(), example2_profile()
M33 = Market(3, 3)


# -- dominance -------------------------------------------------------------------

def test_dominance_examples():
    third = F(1, 3)
    assert fosd_compare((third, third, third), (third, third, third)).relation == EQUAL
    v = fosd_compare((2 * third, third, 0), (2 * third, 0, third))
    assert v.relation == STRICTLY_DOMINATES and v.thresholds == (2,)
    assert fosd_compare((F(1, 2), 0, F(1, 2)), (0, 1, 0)).relation == INCOMPARABLE
    assert fosd_compare((0, 1), (1, 0)).relation == DOMINATED_BY
    with pytest.raises(ValueError):
        fosd_compare((1,), (1, 0))


laws = st.lists(st.integers(0, 4), min_size=3, max_size=3).filter(any).map(
    lambda xs: tuple(F(x, sum(xs)) for x in xs))


@given(laws, laws, laws)
def test_dominance_is_antisymmetric_and_transitive(x, y, z):
    xy, yx = fosd_compare(x, y), fosd_compare(y, x)
    assert (xy.relation == STRICTLY_DOMINATES) == (yx.relation == DOMINATED_BY)
    assert (xy.relation == EQUAL) == (x == y)
    assert (xy.relation == INCOMPARABLE) == (yx.relation == INCOMPARABLE)
    if xy.strict and fosd_compare(y, z).strict:
        assert fosd_compare(x, z).strict


# -- ex post -----------------------------------------------------------------------

def test_mutual_firsts_block_the_uniform_lottery():
    w = ex_post_block(uniform_random_mechanism(M33), P2, [man(0), woman(0)])
    assert w is not None
    assert w.deviation.at(P2, None) == RandomMatching.point(Matching.from_pairs(M33, [(0, 0)]))
    check_block_witness(uniform_random_mechanism(M33), point_mass(P2), w)


def test_stable_mechanism_is_not_blocked_by_any_coalition():
    report = ex_post_stable_at(random_stable_mechanism(), P1)
    assert report.stable and report.coalitions_checked == 63


def test_uniform_full_survives_the_four_agent_coalition():
    assert ex_post_block(uniform_random_full(M33), P1,
                         [man(1), man(2), woman(0), woman(1)]) is None
    assert ex_post_stable_at(uniform_random_full(M33), P1).stable


def test_coalition_order():
    got = list(stability.coalitions(M33, 2))
    assert got[:6] == [(a,) for a in M33.agents] and len(got) == 6 + 15
    pairs = list(stability.coalitions(M33, pairwise=True))
    assert len(pairs) == 6 + 9 and pairs[6] == (man(0), woman(0))


def grid_lotteries(k, den):
    for combo in itertools.product(range(den + 1), repeat=k - 1):
        if sum(combo) <= den:
            yield [F(c, den) for c in combo] + [F(den - sum(combo), den)]


def grid_block_exists(mech, profile, coalition, den=6):
    internal = enumerate_internal_matchings(profile.market, coalition)
    base = mech(profile)
    before = {}
    for a in coalition:
        law = [F(0)] * profile.market.option_count(a)
        for mu, w in base:
            law[rank_of(profile, a, mu.partner(a)) - 1] += w
        before[a] = law
    for q in grid_lotteries(len(internal), den):
        ok = True
        for a in coalition:
            law = [F(0)] * len(before[a])
            for mu, w in zip(internal, q):
                law[rank_of(profile, a, mu.partner(a)) - 1] += w
            if not fosd_compare(law, before[a]).strict:
                ok = False
                break
        if ok:
            return True
    return False


@st.composite
def lottery_mechanisms(draw, market):
    everything = enumerate_matchings(market)
    weights = draw(st.lists(st.integers(0, 3), min_size=len(everything),
                            max_size=len(everything)).filter(any))
    total = sum(weights)
    lottery = RandomMatching((mu, F(w, total)) for mu, w in zip(everything, weights) if w)
    return Mechanism(lambda p: lottery, "fixed-lottery", market)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_block_lp_agrees_with_grid_search(data):
    market = Market(2, 2)
    p = data.draw(profiles(market=market))
    mech = data.draw(lottery_mechanisms(market))
    for coal in stability.coalitions(market, 3):
        w = ex_post_block(mech, p, coal)
        if w is not None:
            check_block_witness(mech, point_mass(p), w)
        elif grid_block_exists(mech, p, coal):
            pytest.fail(f"grid finds a block for {coal} that the LP misses")


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_pruning_never_hides_a_block(data):
    market = Market(2, 2)
    p = data.draw(profiles(market=market))
    q = data.draw(profiles(market=market))
    mech = data.draw(lottery_mechanisms(market))
    prior = point_mass(p) if p == q else Prior([(p, F(1, 3)), (q, F(2, 3))])
    original = stability._prunable
    for coal in stability.coalitions(market):
        pruned = ex_ante_block(mech, prior, coal)
        stability._prunable = lambda groups: False
        try:
            full = ex_ante_block(mech, prior, coal)
        finally:
            stability._prunable = original
        assert (pruned is None) == (full is None)


# -- ex ante ---------------------------------------------------------------------

def test_pair_off_blocks_ex_ante():
    prior = example3_prior(F(1, 8))
    mech = random_stable_mechanism()
    w = ex_ante_block(mech, prior, [man(0), woman(0)])
    pair = RandomMatching.point(Matching.from_pairs(M33, [(0, 0)]))
    assert all(w.deviation.at(p, mech) == pair for p, _ in prior.support)
    for a in (man(0), woman(0)):
        assert w.per_agent[a].after.masses == (F(3, 4), F(1, 8), F(1, 8), 0)
        assert w.per_agent[a].before.masses == (F(11, 16), F(1, 8), F(3, 16), 0)
    check_block_witness(mech, prior, w)
    assert ex_ante_block(mech, prior, [man(2), woman(2)]) is None


def test_pairwise_audits():
    report = ex_ante_pairwise_stable(random_stable_mechanism(), example3_prior(F(1, 8)))
    assert not report.stable and report.witness.coalition == {man(0), woman(0)}
    assert ex_ante_pairwise_stable(random_stable_mechanism(), point_mass(P2)).stable
    report = ex_ante_pairwise_stable(uniform_random_full(M33), point_mass(P2))
    assert report.witness.coalition == {man(0), woman(0)}


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_point_mass_ex_ante_equals_ex_post(data):
    market = Market(2, 2)
    p = data.draw(profiles(market=market))
    mech = data.draw(lottery_mechanisms(market))
    for coal in stability.coalitions(market):
        a = ex_ante_block(mech, point_mass(p), coal)
        b = ex_post_block(mech, p, coal)
        assert (a is None) == (b is None)
        if a is not None:
            assert a.deviation.entries == b.deviation.entries


def test_tampered_block_witness_is_rejected():
    prior = example3_prior(F(1, 8))
    mech = random_stable_mechanism()
    w = ex_ante_block(mech, prior, [man(0), woman(0)])
    w.deviation = Deviation({p: mech(p) for p, _ in prior.support})
    with pytest.raises(WitnessError):
        check_block_witness(mech, prior, w)
    w = ex_ante_block(mech, prior, [man(0), woman(0)])
    leak = RandomMatching.point(Matching.from_pairs(M33, [(0, 0), (1, 1)]))
    w.deviation = Deviation({p: leak for p, _ in prior.support})
    with pytest.raises(WitnessError, match="outside"):
        check_block_witness(mech, prior, w)


# -- interim ---------------------------------------------------------------------

def test_da_is_interim_pairwise_stable_exhaustively():
    report = interim_pairwise_stable(da_mechanism(), example3_prior(F(1, 8)))
    assert report.stable and report.exhaustive


def test_interim_at_point_mass_matches_ex_post():
    mech = uniform_random_full(M33)
    search = interim_block(mech, point_mass(P2), [man(0), woman(0)])
    assert search.blocked and search.exhaustive
    check_interim_witness(mech, point_mass(P2), search.witness)
    search = interim_block(random_stable_mechanism(), point_mass(P1), [man(0), woman(1)])
    assert not search.blocked and search.exhaustive


def test_interim_budget_is_reported():
    prior = example3_prior(F(1, 8))
    search = interim_block(random_stable_mechanism(), prior, [man(0), woman(0)],
                           max_candidate_sets=1)
    assert not search.blocked and not search.exhaustive and search.reason == "budget"


def _two_type_prior():
    """m1 and w1 each have two types; everyone else is fixed."""
    flex = [(rl([0, 1, 2], 3), F(1, 2)), (rl([1, 0, 2], 3), F(1, 2))]
    fixed = lambda r: [(rl(r, 3), 1)]
    return product_prior(M33, [
        AgentTypeDistribution(man(0), flex), AgentTypeDistribution(man(1), fixed([1, 0, 2])),
        AgentTypeDistribution(man(2), fixed([2, 0, 1])),
        AgentTypeDistribution(woman(0), [(rl([0, 1, 2], 3), F(1, 2)),
                                         (rl([1, 0, 2], 3), F(1, 2))]),
        AgentTypeDistribution(woman(1), fixed([1, 0, 2])),
        AgentTypeDistribution(woman(2), fixed([2, 0, 1]))])


def test_interim_witness_reduces_to_ex_ante():
    prior = _two_type_prior()
    mech = uniform_random_full(M33)
    search = interim_block(mech, prior, [man(0), woman(0)])
    assert search.blocked
    w = search.witness
    check_interim_witness(mech, prior, w)
    conditioned, block = interim_to_ex_ante(w, mech, prior)
    check_block_witness(mech, conditioned, block)
    assert ex_ante_block(mech, conditioned, w.coalition) is not None
    assert conditioned == condition(prior, Event(w.type_sets))


def test_interim_iff_is_enforced_by_the_checker():
    prior = _two_type_prior()
    mech = uniform_random_full(M33)
    w = interim_block(mech, prior, [man(0), woman(0)]).witness
    for a in w.coalition:
        everything = frozenset(r for r, _ in marginal_types(prior, a))
        if w.type_sets[a] != everything:
            smaller = dict(w.type_sets)
            smaller[a] = everything
            w.type_sets = smaller
            with pytest.raises(WitnessError):
                check_interim_witness(mech, prior, w)
            return
    # full type sets: dropping a consenting type must break the "only if" half
    a = sorted(w.coalition)[0]
    t = sorted(w.type_sets[a])[0]
    w.type_sets = {**w.type_sets, a: w.type_sets[a] - {t}}
    with pytest.raises(WitnessError):
        check_interim_witness(mech, prior, w)


def test_restricted_search_refuses_leaky_mimicry():
    prior = example3_prior(F(1, 8))
    with pytest.raises(ValueError, match="leave the coalition"):
        interim_block(random_stable_mechanism(), prior, [man(0), woman(0)],
                      free_profiles=[prior.support[0][0]])


# -- mutual first choices and the dichotomy --------------------------------------

def test_mutual_first_checks():
    v = mutual_first_violation(uniform_random_full(M33), point_mass(P2))
    assert (v.man, v.woman, v.probability) == (man(0), woman(0), F(1, 3))
    assert mutual_first_violation(da_mechanism(), example3_prior(F(1, 8))) is None
    rng = random.Random(11)
    for _ in range(20):
        p = random_complete_profile(rng)
        assert mutual_first_violation(random_stable_mechanism(), point_mass(p)) is None


def test_dichotomy_pair_branch():
    mech = uniform_random_full(M33)
    out = interim_instability_witness(mech, run_search=False)
    assert out.kind == "pair-ex-post" and out.profile == P2
    assert out.block.coalition == {man(0), woman(0)}
    check_interim_witness(mech, point_mass(P2), out.lifted)


def test_dichotomy_finds_an_overridden_relabelling():
    base = random_stable_mechanism()
    target = permutation_orbit(P2)[17]
    # a lottery over perfect matchings leaves the mutual firsts apart sometimes
    mech = table_mechanism({target: uniform_random_full(M33)(target)}, base)
    out = interim_instability_witness(mech, run_search=False)
    assert out.kind == "pair-ex-post" and out.profile == target


@settings(max_examples=20, deadline=None)
@given(profiles(market=Market(2, 2)))
def test_ex_post_blocks_lift_to_point_mass(p):
    mech = uniform_random_mechanism(p.market)
    report = ex_post_stable_at(mech, p)
    if not report.stable:
        lifted = lift_ex_post(report.witness, mech, p)
        check_interim_witness(mech, point_mass(p), lifted)
        assert interim_block(mech, point_mass(p), report.witness.coalition).blocked
