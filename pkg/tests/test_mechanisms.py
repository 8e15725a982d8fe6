import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from matchaudit import jsonio
from matchaudit.cases import appendix_a_prior, example1_profile, example3_prior
from matchaudit.market import (MAN, SELF, WOMAN, AgentPermutation, Market, Matching,
                               PreferenceProfile, all_permutations, enumerate_matchings,
                               is_stable_matching, man, permute_matching, permute_profile,
                               rank_of, woman)
from matchaudit.mechanisms import (RandomMatching, UtilityFunction, da_mechanism,
                                   deferred_acceptance, example2_deviation, expected_utility,
                                   random_stable_mechanism, rank_distribution, stable_set,
                                   table_mechanism, uniform_random_full,
                                   uniform_random_mechanism)
from matchaudit.priors import condition, point_mass
from matchaudit.stability import example2_profile, permutation_orbit, uniform_3x3_prior

from conftest import profiles, random_complete_profile

P1, P2 = example1_profile(), example2_profile()
M33 = Market(3, 3)


def pairs(*ps):
    return Matching.from_pairs(M33, ps)


# -- deferred acceptance and the stable set -------------------------------------

@pytest.mark.parametrize("side", [MAN, WOMAN])
def test_da_on_documented_profiles(side):
    assert deferred_acceptance(P1, side) == pairs((0, 1), (1, 2), (2, 0))
    assert deferred_acceptance(P2, side) == pairs((0, 0), (1, 1), (2, 2))


def test_everyone_prefers_single():
    p = PreferenceProfile(((SELF, 0, 1),) * 2, ((SELF, 0, 1),) * 2)
    assert deferred_acceptance(p).pairs() == []


def test_stable_sets():
    assert stable_set(P1) == [pairs((0, 1), (1, 2), (2, 0))]
    assert pairs((0, 0), (1, 1), (2, 2)) in stable_set(P2)
    one = PreferenceProfile(((0, SELF),), ((0, SELF),))
    assert stable_set(one) == [Matching((0,), 1)]


def test_stable_set_with_two_elements():
    # men and women disagree cyclically: both side-optimal matchings are stable
    p = PreferenceProfile.from_lists([[0, 1], [1, 0]], [[1, 0], [0, 1]])
    got = stable_set(p)
    assert got == [Matching((0, 1), 2), Matching((1, 0), 2)]
    assert deferred_acceptance(p, MAN) == got[0]
    assert deferred_acceptance(p, WOMAN) == got[1]


@settings(max_examples=150, deadline=None)
@given(profiles())
def test_stable_set_matches_brute_force_and_da_is_side_optimal(p):
    brute = [mu for mu in enumerate_matchings(p.market) if is_stable_matching(p, mu)]
    got = stable_set(p)
    assert got == brute and got
    for side in (MAN, WOMAN):
        best = deferred_acceptance(p, side)
        assert best in got
        own = p.market.men if side == MAN else p.market.women
        for mu in got:
            for a in own:
                assert rank_of(p, a, best.partner(a)) <= rank_of(p, a, mu.partner(a))


sigmas = st.tuples(st.permutations(range(3)), st.permutations(range(3))).map(
    lambda t: AgentPermutation(tuple(t[0]), tuple(t[1])))


@settings(max_examples=100, deadline=None)
@given(profiles(market=M33), sigmas, st.sampled_from([MAN, WOMAN]))
def test_da_is_permutation_equivariant(p, s, side):
    assert (deferred_acceptance(permute_profile(p, s), side)
            == permute_matching(deferred_acceptance(p, side), s))


# -- lotteries and built-ins -----------------------------------------------------

def test_random_matching_validation():
    mu = pairs((0, 0))
    with pytest.raises(ValueError):
        RandomMatching([(mu, F(1, 2))])
    with pytest.raises(ValueError):
        RandomMatching([(mu, F(3, 2)), (pairs(), F(-1, 2))])
    merged = RandomMatching([(mu, F(1, 2)), (mu, F(1, 2))])
    assert merged == RandomMatching.point(mu)


def test_uniform_mechanisms():
    lottery = uniform_random_mechanism(M33)(P1)
    assert len(lottery) == 34 and {w for _, w in lottery} == {F(1, 34)}
    assert uniform_random_mechanism(M33)(P1) == uniform_random_mechanism(M33)(P2)
    assert len(uniform_random_mechanism(Market(1, 1))(
        PreferenceProfile(((0, SELF),), ((0, SELF),)))) == 2
    full = uniform_random_full(M33)(P1)
    assert len(full) == 6 and {w for _, w in full} == {F(1, 6)}


def test_random_stable_outputs_only_stable_matchings():
    rng = random.Random(7)
    mech = random_stable_mechanism()
    assert mech(P1) == RandomMatching.point(pairs((0, 1), (1, 2), (2, 0)))
    assert mech(P2) == RandomMatching.point(pairs((0, 0), (1, 1), (2, 2)))
    for _ in range(30):
        p = random_complete_profile(rng)
        assert all(is_stable_matching(p, mu) for mu, _ in mech(p))


def test_table_mechanism_lookup():
    base = random_stable_mechanism()
    swapped = RandomMatching.point(pairs((0, 1), (1, 0), (2, 2)))
    assert table_mechanism({}, base)(P1) == base(P1)
    table = table_mechanism({P2: swapped}, base)
    assert table(P2) == swapped and table(P1) == base(P1)


def test_table_mechanism_json_round_trip():
    base = random_stable_mechanism(M33)
    swapped = RandomMatching([(pairs((0, 1), (1, 0), (2, 2)), F(1, 3)),
                              (pairs((0, 0)), F(2, 3))])
    table = table_mechanism({P2: swapped}, base)
    text = jsonio.dumps(jsonio.mechanism_to_json(table))
    again = jsonio.parse_mechanism(jsonio.loads(text), M33)
    for p in [P1, P2] + permutation_orbit(P2)[:10]:
        assert again(p) == table(p)


def test_swap_deviation():
    base = random_stable_mechanism()
    dev = example2_deviation(base, P2)
    assert dev(P2) == RandomMatching.point(pairs((0, 1), (1, 0), (2, 2)))
    assert dev(P1) == base(P1)
    for sigma in list(all_permutations(M33))[::7]:
        image = permute_matching(pairs((0, 1), (1, 0), (2, 2)), sigma)
        assert dev(permute_profile(P2, sigma)) == RandomMatching.point(image)
    rng = random.Random(3)
    orbit = set(permutation_orbit(P2))
    for _ in range(50):
        p = random_complete_profile(rng)
        if p not in orbit:
            assert dev(p) == base(p)


# -- laws under a prior ------------------------------------------------------------

def test_rank_law_under_three_type_prior():
    for p in (F(1, 10), F(1, 8), F(1, 5)):
        got = rank_distribution(random_stable_mechanism(), example3_prior(p), man(0))
        assert got.masses == (1 - 3 * p + 4 * p * p, p, 2 * p - 4 * p * p, 0)
    assert rank_distribution(random_stable_mechanism(), example3_prior(F(1, 8)),
                             man(0)).masses == (F(11, 16), F(1, 8), F(3, 16), 0)


def test_rank_law_uniform_full_at_point_mass():
    for a in M33.agents:
        assert rank_distribution(uniform_random_full(M33), point_mass(P1), a).masses == (
            F(1, 3), F(1, 3), F(1, 3), 0)


def test_rank_law_of_swap_on_relabellings():
    orbit = set(permutation_orbit(P2))
    cond = condition(uniform_3x3_prior(), lambda p: p in orbit)
    dev = example2_deviation(random_stable_mechanism(), P2)
    for a in M33.agents:
        assert rank_distribution(dev, cond, a).masses == (F(2, 3), F(1, 3), 0, 0)


@settings(max_examples=40, deadline=None)
@given(profiles())
def test_rank_law_sums_to_one_and_matches_single_profile(p):
    mech = random_stable_mechanism()
    for a in p.market.agents:
        law = rank_distribution(mech, point_mass(p), a)
        assert sum(law.masses) == 1
        direct = [F(0)] * len(law)
        for mu, w in mech(p):
            direct[rank_of(p, a, mu.partner(a)) - 1] += w
        assert list(law.masses) == direct


def _utility(agent, values):
    other = [type(agent)(agent.opposite, j) for j in range(3)]
    return UtilityFunction(agent, dict(zip(other + [agent], values)))


def test_expected_utility():
    mech = da_mechanism()
    u = _utility(man(0), [F(5), F(2), F(1), F(0)])
    assert expected_utility(mech, point_mass(P1), man(0), u) == 2
    flat = _utility(man(1), [F(7, 3)] * 4)
    assert expected_utility(mech, example3_prior(F(1, 8)), man(1), flat) == F(7, 3)
    for p in (F(1, 4), F(1, 2), F(1, 3)):
        u1, u2, u3 = F(1), F(3, 4), F(0)
        util = _utility(man(1), [u1, u2, u3, F(-1)])
        assert expected_utility(random_stable_mechanism(), appendix_a_prior(p), man(1),
                                util) == (p * (1 - p) * u1 + ((1 - p) ** 2 + p * p) * u2
                                          + p * (1 - p) * u3)


def test_expected_utility_needs_full_domain():
    with pytest.raises(ValueError):
        expected_utility(da_mechanism(), point_mass(P1), man(0),
                         UtilityFunction(man(0), {woman(0): 1}))
