"""Finitely supported priors over preference profiles."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

from .market import (SELF, Agent, Market, PreferenceProfile, Ranking, ResourceLimitError,
                     check_ranking)

SUPPORT_CAP = 10**5


class ZeroMassEventError(ValueError):
    """Conditioning on an event the prior assigns probability zero."""


class Prior:
    """Exact distribution over distinct profiles; weights are positive and sum to 1."""

    def __init__(self, support: Iterable[tuple[PreferenceProfile, Fraction]]):
        items = [(p, Fraction(w)) for p, w in support]
        if not items:
            raise ValueError("a prior needs a non-empty support")
        market = items[0][0].market
        seen = {}
        for p, w in items:
            if w <= 0:
                raise ValueError(f"non-positive weight {w}")
            if p.market != market:
                raise ValueError("support profiles belong to different markets")
            if p in seen:
                raise ValueError("duplicate profile in support")
            seen[p] = w
        total = sum(seen.values())
        if total != 1:
            raise ValueError(f"weights sum to {total}, not 1")
        self.support: tuple = tuple(items)
        self.market = market
        self._weights = seen
        self._scaled = None

    def __len__(self):
        return len(self.support)

    def __iter__(self):
        return iter(self.support)

    def __eq__(self, other):
        return isinstance(other, Prior) and self._weights == other._weights

    def __repr__(self):
        return f"Prior({len(self.support)} profiles on {self.market})"

    def scaled(self) -> tuple[int, list]:
        """(L, [(profile, L * weight), ...]) with integer numerators."""
        if self._scaled is None:
            den = math.lcm(*(w.denominator for _, w in self.support))
            self._scaled = (den, [(p, w.numerator * (den // w.denominator))
                                  for p, w in self.support])
        return self._scaled

    def probability(self, profile: PreferenceProfile) -> Fraction:
        return self._weights.get(profile, Fraction(0))

    def mass(self, event) -> Fraction:
        pred = _predicate(event)
        return sum((w for p, w in self.support if pred(p)), Fraction(0))


def point_mass(profile: PreferenceProfile) -> Prior:
    return Prior([(profile, Fraction(1))])


@dataclass(frozen=True)
class AgentTypeDistribution:
    agent: Agent
    types: tuple  # ((ranking, weight), ...)

    def __init__(self, agent: Agent, types: Iterable[tuple[Sequence[int], object]]):
        types = tuple((tuple(r), Fraction(w)) for r, w in types)
        if not types:
            raise ValueError(f"{agent} has no types")
        if any(w <= 0 for _, w in types):
            raise ValueError(f"{agent} has a non-positive type weight")
        if sum(w for _, w in types) != 1:
            raise ValueError(f"type weights of {agent} do not sum to 1")
        if len({r for r, _ in types}) != len(types):
            raise ValueError(f"{agent} lists a ranking twice")
        object.__setattr__(self, "agent", agent)
        object.__setattr__(self, "types", types)


class Event:
    """Conjunction of per-agent constraints ``P_a in allowed[a]``."""

    def __init__(self, constraints: Mapping[Agent, Iterable[Ranking]]):
        cons = {}
        for agent, rankings in constraints.items():
            rankings = frozenset(tuple(r) for r in rankings)
            if not rankings:
                raise ValueError(f"empty constraint set for {agent}")
            cons[agent] = rankings
        self.constraints = cons

    def __call__(self, profile: PreferenceProfile) -> bool:
        return all(profile.ranking(a) in allowed for a, allowed in self.constraints.items())

    def __and__(self, other: "Event") -> "Event":
        cons = dict(self.constraints)
        for a, allowed in other.constraints.items():
            cons[a] = cons[a] & allowed if a in cons else allowed
            if not cons[a]:
                raise ValueError(f"conjunction leaves {a} no admissible ranking")
        return Event(cons)

    def __eq__(self, other):
        return isinstance(other, Event) and self.constraints == other.constraints

    def __repr__(self):
        return f"Event({ {str(a): len(s) for a, s in self.constraints.items()} })"


EventLike = Union[Event, Callable[[PreferenceProfile], bool]]


def _predicate(event) -> Callable[[PreferenceProfile], bool]:
    if event is None:
        return lambda p: True
    return event


def product_prior(market: Market, per_agent: Sequence[AgentTypeDistribution],
                  cap: int = SUPPORT_CAP) -> Prior:
    by_agent = {d.agent: d for d in per_agent}
    if set(by_agent) != set(market.agents) or len(per_agent) != len(market.agents):
        raise ValueError("need exactly one type distribution per agent")
    for d in per_agent:
        size = market.side_size(d.agent.opposite)
        for r, _ in d.types:
            check_ranking(r, size)
    dists = [by_agent[a].types for a in market.agents]
    count = 1
    for d in dists:
        count *= len(d)
    if count > cap:
        raise ResourceLimitError(f"product prior has {count} profiles (support cap {cap})")
    n = market.num_men
    support = []
    for combo in itertools.product(*dists):
        w = Fraction(1)
        for _, wt in combo:
            w *= wt
        rankings = [r for r, _ in combo]
        support.append((PreferenceProfile(tuple(rankings[:n]), tuple(rankings[n:])), w))
    return Prior(support)


def self_last_rankings(opposite_size: int) -> list[Ranking]:
    return [perm + (SELF,) for perm in itertools.permutations(range(opposite_size))]


def iid_uniform_prior(market: Market, cap: int = SUPPORT_CAP) -> Prior:
    """Every agent ranks the other side uniformly at random, self last."""
    per_agent = []
    for a in market.agents:
        rankings = self_last_rankings(market.side_size(a.opposite))
        w = Fraction(1, len(rankings))
        per_agent.append(AgentTypeDistribution(a, [(r, w) for r in rankings]))
    return product_prior(market, per_agent, cap)


def condition(prior: Prior, event: EventLike) -> Prior:
    """The conditional prior given ``event`` (an Event or a profile predicate)."""
    pred = _predicate(event)
    kept = [(p, w) for p, w in prior.support if pred(p)]
    total = sum((w for _, w in kept), Fraction(0))
    if total == 0:
        raise ZeroMassEventError("conditioning event has zero prior mass")
    return Prior([(p, w / total) for p, w in kept])


def marginal_types(prior: Prior, agent: Agent) -> list[tuple[Ranking, Fraction]]:
    """Marginal law of ``agent``'s ranking, in order of first appearance."""
    prior.market.check_agent(agent)
    den, support = prior.scaled()
    out: dict = {}
    for p, n in support:
        r = p.ranking(agent)
        out[r] = out.get(r, 0) + n
    return [(r, Fraction(n, den)) for r, n in out.items()]
