"""Two-sided markets, strict preference profiles and matchings.

Agents are ``Agent(side, index)`` pairs with side ``"m"`` or ``"w"`` and a
0-based index; they print as ``m1``, ``w3`` and so on.  A ranking is a tuple
listing opposite-side indices in order of preference with ``SELF`` (-1)
marking the option of staying unmatched.  Partners listed after ``SELF`` are
unacceptable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

SELF = -1
MAN, WOMAN = "m", "w"

ENUMERATION_CAP = 10**6

Ranking = tuple  # tuple[int, ...] over opposite indices plus SELF


class ResourceLimitError(RuntimeError):
    """An enumeration or solver budget was exceeded."""


class Agent(NamedTuple):
    side: str
    index: int

    def __str__(self):
        return f"{self.side}{self.index + 1}"

    @property
    def opposite(self) -> str:
        return WOMAN if self.side == MAN else MAN

    @classmethod
    def parse(cls, key: str) -> "Agent":
        side, num = key[:1], key[1:]
        if side not in (MAN, WOMAN) or not num.isdigit() or int(num) < 1:
            raise ValueError(f"bad agent key {key!r}")
        return cls(side, int(num) - 1)


def man(i: int) -> Agent:
    return Agent(MAN, i)


def woman(i: int) -> Agent:
    return Agent(WOMAN, i)


@dataclass(frozen=True)
class Market:
    num_men: int
    num_women: int

    def __post_init__(self):
        if self.num_men < 1 or self.num_women < 1:
            raise ValueError("a market needs at least one man and one woman")

    @property
    def men(self) -> list[Agent]:
        return [man(i) for i in range(self.num_men)]

    @property
    def women(self) -> list[Agent]:
        return [woman(i) for i in range(self.num_women)]

    @property
    def agents(self) -> list[Agent]:
        return self.men + self.women

    def side_size(self, side: str) -> int:
        return self.num_men if side == MAN else self.num_women

    def option_count(self, agent: Agent) -> int:
        """|S| for ``agent``: the opposite side plus the self option."""
        return self.side_size(agent.opposite) + 1

    def check_agent(self, agent: Agent):
        if agent.side not in (MAN, WOMAN) or not 0 <= agent.index < self.side_size(agent.side):
            raise ValueError(f"{agent} is not an agent of {self}")


def check_ranking(ranking: Sequence[int], opposite_size: int) -> Ranking:
    ranking = tuple(ranking)
    if sorted(ranking) != [SELF] + list(range(opposite_size)):
        raise ValueError(f"ranking {ranking} is not a bijection onto "
                         f"{opposite_size} partners plus self")
    return ranking


def ranking_from_list(prefix: Sequence[int], opposite_size: int) -> Ranking:
    """Complete a truncated list: listed partners, then self, then the rest."""
    prefix = list(prefix)
    if SELF not in prefix:
        prefix.append(SELF)
    rest = [j for j in range(opposite_size) if j not in prefix]
    return check_ranking(prefix + rest, opposite_size)


@dataclass(frozen=True)
class PreferenceProfile:
    men: tuple
    women: tuple

    def __post_init__(self):
        men = tuple(check_ranking(r, len(self.women)) for r in self.men)
        women = tuple(check_ranking(r, len(self.men)) for r in self.women)
        object.__setattr__(self, "men", men)
        object.__setattr__(self, "women", women)

    @classmethod
    def from_lists(cls, men: Iterable[Sequence[int]], women: Iterable[Sequence[int]]):
        """Build from possibly truncated lists (see ``ranking_from_list``)."""
        men, women = list(men), list(women)
        return cls(tuple(ranking_from_list(r, len(women)) for r in men),
                   tuple(ranking_from_list(r, len(men)) for r in women))

    @property
    def market(self) -> Market:
        return Market(len(self.men), len(self.women))

    def ranking(self, agent: Agent) -> Ranking:
        return self.men[agent.index] if agent.side == MAN else self.women[agent.index]

    @cached_property
    def _ranks(self):
        # _ranks[side][i][j] = rank of opposite j; index -1 holds the self rank
        def table(rankings, size):
            out = []
            for r in rankings:
                row = [0] * (size + 1)
                for pos, j in enumerate(r, start=1):
                    row[j] = pos
                out.append(row)
            return out
        return {MAN: table(self.men, len(self.women)),
                WOMAN: table(self.women, len(self.men))}

    def rank(self, agent: Agent, partner_index: int) -> int:
        """Rank that ``agent`` gives opposite index ``partner_index`` (SELF ok)."""
        return self._ranks[agent.side][agent.index][partner_index]

    def with_ranking(self, agent: Agent, ranking: Sequence[int]) -> "PreferenceProfile":
        if agent.side == MAN:
            men = list(self.men)
            men[agent.index] = tuple(ranking)
            return PreferenceProfile(tuple(men), self.women)
        women = list(self.women)
        women[agent.index] = tuple(ranking)
        return PreferenceProfile(self.men, tuple(women))

    def __str__(self):
        def show(owner, r, other):
            names = ["self" if j == SELF else f"{other}{j + 1}" for j in r]
            return f"{owner}: {', '.join(names)}"
        lines = [show(f"m{i + 1}", r, WOMAN) for i, r in enumerate(self.men)]
        lines += [show(f"w{i + 1}", r, MAN) for i, r in enumerate(self.women)]
        return "\n".join(lines)


def rank_of(profile: PreferenceProfile, agent: Agent, outcome: Agent) -> int:
    """P_agent(outcome): rank in 1..|S|, 1 being best."""
    profile.market.check_agent(agent)
    if outcome == agent:
        return profile.rank(agent, SELF)
    if outcome.side == agent.side:
        raise ValueError(f"{outcome} is on the same side as {agent}")
    profile.market.check_agent(outcome)
    return profile.rank(agent, outcome.index)


@dataclass(frozen=True, order=False)
class Matching:
    """``men[i]`` is the woman index matched to man i, or SELF."""
    men: tuple
    num_women: int

    def __post_init__(self):
        taken = [w for w in self.men if w != SELF]
        if len(set(taken)) != len(taken) or any(not 0 <= w < self.num_women for w in taken):
            raise ValueError(f"invalid matching {self.men}")

    @classmethod
    def from_pairs(cls, market: Market, pairs: Iterable[tuple[int, int]]) -> "Matching":
        men = [SELF] * market.num_men
        for m, w in pairs:
            if men[m] != SELF:
                raise ValueError(f"man {m + 1} matched twice")
            men[m] = w
        return cls(tuple(men), market.num_women)

    @cached_property
    def women(self) -> tuple:
        out = [SELF] * self.num_women
        for m, w in enumerate(self.men):
            if w != SELF:
                out[w] = m
        return tuple(out)

    @property
    def market(self) -> Market:
        return Market(len(self.men), self.num_women)

    def partner_index(self, agent: Agent) -> int:
        return self.men[agent.index] if agent.side == MAN else self.women[agent.index]

    def partner(self, agent: Agent) -> Agent:
        j = self.partner_index(agent)
        return agent if j == SELF else Agent(agent.opposite, j)

    def pairs(self) -> list[tuple[int, int]]:
        return [(m, w) for m, w in enumerate(self.men) if w != SELF]

    def sort_key(self) -> tuple:
        return tuple(self.num_women if w == SELF else w for w in self.men)

    def __str__(self):
        parts = [f"m{m + 1}w{w + 1}" for m, w in self.pairs()]
        return "{" + ", ".join(parts) + "}"


_ENUM_CACHE: dict = {}


def _enumerate(men: Sequence[int], women: Sequence[int], market: Market, cap: int):
    key = (tuple(men), tuple(women), market)
    hit = _ENUM_CACHE.get(key)
    if hit is not None and len(hit) <= cap:
        return list(hit)
    out = []
    assign = [SELF] * market.num_men

    def rec(k, free):
        if k == len(men):
            if len(out) >= cap:
                raise ResourceLimitError(f"more than {cap} matchings (enumeration cap)")
            out.append(Matching(tuple(assign), market.num_women))
            return
        m = men[k]
        for w in sorted(free):
            assign[m] = w
            rec(k + 1, free - {w})
        assign[m] = SELF
        rec(k + 1, free)

    rec(0, frozenset(women))
    if len(out) <= 10**4:
        _ENUM_CACHE[key] = tuple(out)
    return out


def enumerate_matchings(market: Market, cap: int = ENUMERATION_CAP) -> list[Matching]:
    """All matchings, lexicographic by men's partners with self last."""
    return _enumerate(range(market.num_men), range(market.num_women), market, cap)


def enumerate_internal_matchings(market: Market, coalition: Iterable[Agent],
                                 cap: int = ENUMERATION_CAP) -> list[Matching]:
    """Matchings pairing coalition members only among themselves."""
    coalition = set(coalition)
    for a in coalition:
        market.check_agent(a)
    men = sorted(a.index for a in coalition if a.side == MAN)
    women = sorted(a.index for a in coalition if a.side == WOMAN)
    return _enumerate(men, women, market, cap)


def is_internal(matching: Matching, coalition: Iterable[Agent]) -> bool:
    coalition = set(coalition)
    for m, w in matching.pairs():
        if man(m) not in coalition or woman(w) not in coalition:
            return False
    return True


# -- stability of a single matching -------------------------------------------

@dataclass(frozen=True)
class IndividualRationality:
    agent: Agent


@dataclass(frozen=True)
class BlockingPair:
    man: Agent
    woman: Agent


@dataclass(frozen=True)
class StabilityVerdict:
    violations: tuple

    @property
    def stable(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.stable


def is_stable_matching(profile: PreferenceProfile, matching: Matching) -> StabilityVerdict:
    if matching.market != profile.market:
        raise ValueError("matching and profile belong to different markets")
    ranks = profile._ranks
    violations = []
    for side, partners in ((MAN, matching.men), (WOMAN, matching.women)):
        for i, j in enumerate(partners):
            row = ranks[side][i]
            if row[j] > row[SELF]:
                violations.append(IndividualRationality(Agent(side, i)))
    for m, mrow in enumerate(ranks[MAN]):
        current = mrow[matching.men[m]]
        for w, wrow in enumerate(ranks[WOMAN]):
            if mrow[w] < current and wrow[m] < wrow[matching.women[w]]:
                violations.append(BlockingPair(man(m), woman(w)))
    return StabilityVerdict(tuple(violations))


def is_stable_fast(profile: PreferenceProfile, matching: Matching) -> bool:
    ranks = profile._ranks
    mr, wr = ranks[MAN], ranks[WOMAN]
    wpart = matching.women
    for i, j in enumerate(matching.men):
        if mr[i][j] > mr[i][SELF]:
            return False
    for i, j in enumerate(wpart):
        if wr[i][j] > wr[i][SELF]:
            return False
    for m, mrow in enumerate(mr):
        current = mrow[matching.men[m]]
        for w in range(len(wr)):
            if mrow[w] < current and wr[w][m] < wr[w][wpart[w]]:
                return False
    return True


# -- permutations ---------------------------------------------------------------

@dataclass(frozen=True)
class AgentPermutation:
    """Side-preserving relabelling: man i -> man_map[i], woman j -> woman_map[j]."""
    man_map: tuple
    woman_map: tuple

    def __post_init__(self):
        for perm in (self.man_map, self.woman_map):
            if sorted(perm) != list(range(len(perm))):
                raise ValueError(f"{perm} is not a permutation")

    @classmethod
    def identity(cls, market: Market) -> "AgentPermutation":
        return cls(tuple(range(market.num_men)), tuple(range(market.num_women)))

    def __call__(self, agent: Agent) -> Agent:
        perm = self.man_map if agent.side == MAN else self.woman_map
        return Agent(agent.side, perm[agent.index])

    def compose(self, inner: "AgentPermutation") -> "AgentPermutation":
        """self o inner (apply ``inner`` first)."""
        return AgentPermutation(tuple(self.man_map[i] for i in inner.man_map),
                                tuple(self.woman_map[j] for j in inner.woman_map))

    def inverse(self) -> "AgentPermutation":
        inv_m = [0] * len(self.man_map)
        inv_w = [0] * len(self.woman_map)
        for i, j in enumerate(self.man_map):
            inv_m[j] = i
        for i, j in enumerate(self.woman_map):
            inv_w[j] = i
        return AgentPermutation(tuple(inv_m), tuple(inv_w))


def _check_perm(market: Market, sigma: AgentPermutation):
    if len(sigma.man_map) != market.num_men or len(sigma.woman_map) != market.num_women:
        raise ValueError("permutation does not fit the market")


def permute_profile(profile: PreferenceProfile, sigma: AgentPermutation) -> PreferenceProfile:
    """The P' with P_a(a') = P'_{sigma(a)}(sigma(a')) for all a, a'."""
    _check_perm(profile.market, sigma)
    wm, mm = sigma.woman_map, sigma.man_map
    men = [None] * len(profile.men)
    for i, r in enumerate(profile.men):
        men[mm[i]] = tuple(SELF if j == SELF else wm[j] for j in r)
    women = [None] * len(profile.women)
    for i, r in enumerate(profile.women):
        women[wm[i]] = tuple(SELF if j == SELF else mm[j] for j in r)
    return PreferenceProfile(tuple(men), tuple(women))


def permute_matching(matching: Matching, sigma: AgentPermutation) -> Matching:
    _check_perm(matching.market, sigma)
    pairs = [(sigma.man_map[m], sigma.woman_map[w]) for m, w in matching.pairs()]
    return Matching.from_pairs(matching.market, pairs)


def all_permutations(market: Market):
    """Side-preserving permutations, lexicographic by man_map then woman_map."""
    for mm in itertools.permutations(range(market.num_men)):
        for wm in itertools.permutations(range(market.num_women)):
            yield AgentPermutation(mm, wm)


def find_permutation(candidate: PreferenceProfile,
                     base: PreferenceProfile) -> AgentPermutation | None:
    """Least sigma (lexicographic) with permute_profile(base, sigma) == candidate."""
    if candidate.market != base.market:
        raise ValueError("profiles belong to different markets")
    for sigma in all_permutations(base.market):
        if permute_profile(base, sigma) == candidate:
            return sigma
    return None
