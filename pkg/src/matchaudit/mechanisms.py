"""Mechanisms: maps from preference profiles to lotteries over matchings."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .market import (MAN, SELF, WOMAN, Agent, Market, Matching, PreferenceProfile,
                     enumerate_matchings, is_stable_fast, permute_matching,
                     permute_profile, all_permutations)
from .priors import Prior


class RandomMatching:
    """Finite lottery over distinct matchings, kept in canonical order."""

    __slots__ = ("outcomes", "_hash", "_scaled")

    def __init__(self, outcomes: Iterable[tuple[Matching, object]]):
        merged: dict = {}
        for m, w in outcomes:
            w = Fraction(w)
            if w < 0:
                raise ValueError("negative lottery weight")
            if w:
                merged[m] = merged.get(m, 0) + w
        if not merged:
            raise ValueError("empty lottery")
        if sum(merged.values()) != 1:
            raise ValueError(f"lottery weights sum to {sum(merged.values())}")
        markets = {m.market for m in merged}
        if len(markets) != 1:
            raise ValueError("lottery mixes matchings of different markets")
        self.outcomes = tuple(sorted(merged.items(), key=lambda kv: kv[0].sort_key()))
        self._hash = hash(self.outcomes)
        self._scaled = None

    @classmethod
    def point(cls, matching: Matching) -> "RandomMatching":
        return cls([(matching, 1)])

    @classmethod
    def uniform(cls, matchings: Iterable[Matching]) -> "RandomMatching":
        matchings = list(matchings)
        w = Fraction(1, len(matchings))
        return cls([(m, w) for m in matchings])

    def __eq__(self, other):
        return isinstance(other, RandomMatching) and self.outcomes == other.outcomes

    def __hash__(self):
        return self._hash

    def __iter__(self):
        return iter(self.outcomes)

    def __len__(self):
        return len(self.outcomes)

    def __repr__(self):
        inner = ", ".join(f"{m}: {w}" for m, w in self.outcomes)
        return f"RandomMatching({inner})"

    @property
    def market(self) -> Market:
        return self.outcomes[0][0].market

    def scaled(self) -> tuple[int, tuple]:
        """(D, ((matching, D * weight), ...)) with integer numerators."""
        if self._scaled is None:
            den = math.lcm(*(w.denominator for _, w in self.outcomes))
            self._scaled = (den, tuple((m, w.numerator * (den // w.denominator))
                                       for m, w in self.outcomes))
        return self._scaled

    def probability(self, matching: Matching) -> Fraction:
        return dict(self.outcomes).get(matching, Fraction(0))

    def pair_probability(self, m: int, w: int) -> Fraction:
        return sum((q for mu, q in self.outcomes if mu.men[m] == w), Fraction(0))

    def rank_masses(self, profile: PreferenceProfile, agent: Agent) -> list[Fraction]:
        """Law of agent's partner rank as a list indexed by rank - 1."""
        size = len(profile.ranking(agent))
        out = [Fraction(0)] * size
        for mu, q in self.outcomes:
            out[profile.rank(agent, mu.partner_index(agent)) - 1] += q
        return out


class Mechanism:
    """A profile -> RandomMatching evaluator with a descriptive kind tag.

    Evaluations are memoised per profile; the evaluator must be a pure
    function of the profile.
    """

    def __init__(self, evaluator: Callable[[PreferenceProfile], RandomMatching],
                 kind: str, market: Market | None = None, **params):
        self._evaluator = evaluator
        self.kind = kind
        self.market = market
        self.params = params
        self._cache: dict = {}
        self._lock = threading.Lock()

    def __call__(self, profile: PreferenceProfile) -> RandomMatching:
        out = self._cache.get(profile)
        if out is None:
            if self.market is not None and profile.market != self.market:
                raise ValueError(f"{self.kind} mechanism is defined on {self.market}")
            out = self._evaluator(profile)
            with self._lock:
                out = self._cache.setdefault(profile, out)
        return out

    def __repr__(self):
        return f"Mechanism({self.kind})"


# -- deferred acceptance and stable sets ---------------------------------------

def _propose(prop_prefs, recv_ranks, n_recv):
    """Gale-Shapley with proposers walking their lists down to SELF."""
    n = len(prop_prefs)
    held = [SELF] * n_recv          # receiver -> proposer index
    nxt = [0] * n
    match = [SELF] * n
    free = list(range(n - 1, -1, -1))
    while free:
        p = free.pop()
        prefs = prop_prefs[p]
        while True:
            target = prefs[nxt[p]]
            nxt[p] += 1
            if target == SELF:
                break
            ranks = recv_ranks[target]
            if ranks[p] > ranks[SELF]:
                continue
            cur = held[target]
            if cur == SELF:
                held[target] = p
                match[p] = target
                break
            if ranks[p] < ranks[cur]:
                held[target] = p
                match[p] = target
                match[cur] = SELF
                free.append(cur)
                break
    return match


def deferred_acceptance(profile: PreferenceProfile, proposing_side: str = MAN) -> Matching:
    """Proposing-side-optimal stable matching."""
    ranks = profile._ranks
    if proposing_side == MAN:
        men = _propose(profile.men, ranks[WOMAN], len(profile.women))
        return Matching(tuple(men), len(profile.women))
    if proposing_side == WOMAN:
        women = _propose(profile.women, ranks[MAN], len(profile.men))
        return Matching.from_pairs(profile.market,
                                   [(m, w) for w, m in enumerate(women) if m != SELF])
    raise ValueError(f"unknown side {proposing_side!r}")


def stable_set(profile: PreferenceProfile) -> list[Matching]:
    """All stable matchings, canonical order."""
    men_opt = deferred_acceptance(profile, MAN)
    if men_opt == deferred_acceptance(profile, WOMAN):
        # optimal for both sides: the lattice collapses to a point
        return [men_opt]
    return [mu for mu in enumerate_matchings(profile.market) if is_stable_fast(profile, mu)]


# -- built-in mechanisms ----------------------------------------------------------

def da_mechanism(market: Market | None = None, proposing_side: str = MAN) -> Mechanism:
    kind = "da-men" if proposing_side == MAN else "da-women"
    return Mechanism(lambda p: RandomMatching.point(deferred_acceptance(p, proposing_side)),
                     kind, market)


def uniform_random_mechanism(market: Market) -> Mechanism:
    lottery = RandomMatching.uniform(enumerate_matchings(market))
    return Mechanism(lambda p: lottery, "uniform-random", market)


def uniform_random_full(market: Market) -> Mechanism:
    """Uniform over matchings of maximum size (perfect matchings when square)."""
    everything = enumerate_matchings(market)
    size = min(market.num_men, market.num_women)
    lottery = RandomMatching.uniform(mu for mu in everything if len(mu.pairs()) == size)
    return Mechanism(lambda p: lottery, "uniform-random-full", market)


def random_stable_mechanism(market: Market | None = None) -> Mechanism:
    return Mechanism(lambda p: RandomMatching.uniform(stable_set(p)), "random-stable", market)


def stable_lottery_mechanism(weights: Callable[[PreferenceProfile, list[Matching]], list],
                             name: str = "stable-lottery") -> Mechanism:
    """Randomise over the stable set with caller-chosen positive weights."""
    def evaluate(p):
        stable = stable_set(p)
        ws = [Fraction(w) for w in weights(p, stable)]
        total = sum(ws)
        return RandomMatching((mu, w / total) for mu, w in zip(stable, ws))
    return Mechanism(evaluate, name)


def table_mechanism(entries: Mapping[PreferenceProfile, RandomMatching],
                    default: Mechanism) -> Mechanism:
    entries = dict(entries)
    for p, lottery in entries.items():
        if not isinstance(lottery, RandomMatching):
            raise TypeError("table entries must be RandomMatching values")
        if lottery.market != p.market:
            raise ValueError("table entry matching does not fit its profile's market")
    mech = Mechanism(lambda p: entries[p] if p in entries else default(p), "table",
                     default.market, entries=entries, default=default)
    return mech


def example2_deviation(base: Mechanism, base_profile: PreferenceProfile) -> Mechanism:
    """Swap the first two men's partners on every relabelling of ``base_profile``.

    On the relabelling by sigma it returns
    {sigma(m1)sigma(w2), sigma(m2)sigma(w1), sigma(m3)sigma(w3)}; anywhere else
    it copies ``base``.  Ties between several sigma resolve to the
    lexicographically least one.
    """
    market = base_profile.market
    if (market.num_men, market.num_women) != (3, 3):
        raise ValueError("example2_deviation needs a 3x3 base profile")
    swapped = Matching.from_pairs(market, [(0, 1), (1, 0), (2, 2)])
    orbit: dict = {}
    for sigma in all_permutations(market):
        orbit.setdefault(permute_profile(base_profile, sigma), sigma)

    def evaluate(p):
        sigma = orbit.get(p)
        if sigma is None:
            return base(p)
        return RandomMatching.point(permute_matching(swapped, sigma))

    return Mechanism(evaluate, "example2-deviation", market, base=base,
                     base_profile=base_profile, orbit=orbit)


# -- evaluation under a prior ------------------------------------------------------

@dataclass(frozen=True)
class RankDistribution:
    agent: Agent
    masses: tuple  # masses[r - 1] = Pr(rank == r)

    def __post_init__(self):
        masses = tuple(Fraction(m) for m in self.masses)
        if any(m < 0 for m in masses) or sum(masses) != 1:
            raise ValueError(f"not a distribution: {masses}")
        object.__setattr__(self, "masses", masses)

    def cdf(self) -> list[Fraction]:
        out, acc = [], Fraction(0)
        for m in self.masses:
            acc += m
            out.append(acc)
        return out

    def __len__(self):
        return len(self.masses)

    def __str__(self):
        return "(" + ", ".join(str(m) for m in self.masses) + ")"


class LawAccumulator:
    """Exact running sum of weight x lottery rank laws, kept in integers.

    Terms are bucketed by their common denominator so additions stay in
    machine-friendly ints until ``result``.
    """

    __slots__ = ("size", "buckets", "mass_num")

    def __init__(self, size: int):
        self.size = size
        self.buckets: dict = {}
        self.mass_num = 0

    def add(self, weight_num: int, lottery: RandomMatching, profile: PreferenceProfile,
            agent: Agent):
        den, outs = lottery.scaled()
        vec = self.buckets.get(den)
        if vec is None:
            vec = self.buckets[den] = [0] * self.size
        self.mass_num += weight_num
        for mu, n in outs:
            vec[profile.rank(agent, mu.partner_index(agent)) - 1] += weight_num * n

    def result(self, weight_den: int, normalise: bool = False) -> list[Fraction]:
        out = [Fraction(0)] * self.size
        for den, vec in self.buckets.items():
            for r, v in enumerate(vec):
                if v:
                    out[r] += Fraction(v, den * weight_den)
        if normalise:
            mass = Fraction(self.mass_num, weight_den)
            out = [v / mass for v in out]
        return out


def rank_distribution(mechanism: Mechanism, prior: Prior, agent: Agent) -> RankDistribution:
    prior.market.check_agent(agent)
    den, support = prior.scaled()
    acc = LawAccumulator(prior.market.option_count(agent))
    for p, n in support:
        acc.add(n, mechanism(p), p, agent)
    return RankDistribution(agent, tuple(acc.result(den)))


@dataclass(frozen=True)
class UtilityFunction:
    agent: Agent
    values: Mapping  # outcome Agent (the agent itself for single) -> Fraction

    def __call__(self, outcome: Agent) -> Fraction:
        return Fraction(self.values[outcome])


def expected_utility(mechanism: Mechanism, prior: Prior, agent: Agent,
                     utility: UtilityFunction) -> Fraction:
    """Sum over partners (not ranks), so it stays exact when ranks shift by profile."""
    market = prior.market
    domain = [Agent(agent.opposite, j) for j in range(market.side_size(agent.opposite))]
    missing = [a for a in domain + [agent] if a not in utility.values]
    if missing:
        raise ValueError(f"utility undefined on {', '.join(map(str, missing))}")
    total = Fraction(0)
    for p, w in prior.support:
        for mu, q in mechanism(p):
            total += w * q * utility(mu.partner(agent))
    return total
