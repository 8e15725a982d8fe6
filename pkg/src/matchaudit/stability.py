"""Blocking searches under first-order stochastic dominance.

A coalition's deviation is searched as a lottery over internal matchings
for each cell of profiles that share the members' rankings.  Every blocking
condition (ex-post, ex-ante and interim) only sees the profile through the
members' own rankings and through events built from them, so this loses no
generality.  Strict dominance is encoded with a single slack: all
per-threshold gaps are constrained to be non-negative and their sum must be
at least ``eps``; a block exists iff the LP optimum has ``eps > 0``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from . import lp as lpmod
from .market import (MAN, SELF, WOMAN, Agent, Market, Matching, PreferenceProfile,
                     ResourceLimitError, enumerate_internal_matchings, man, woman,
                     permute_profile, all_permutations)
from .mechanisms import (LawAccumulator, Mechanism, RandomMatching, RankDistribution,
                         example2_deviation)
from .priors import Event, Prior, iid_uniform_prior, marginal_types, point_mass

log = logging.getLogger(__name__)

STRICTLY_DOMINATES = "strictly-dominates"
EQUAL = "equal"
INCOMPARABLE = "incomparable"
DOMINATED_BY = "dominated-by"

LP_VARIABLE_CAP = 20_000

ZERO = Fraction(0)


class InternalError(RuntimeError):
    """A constructed witness failed its own verification."""


# -- stochastic dominance ---------------------------------------------------------

@dataclass(frozen=True)
class DominanceVerdict:
    relation: str
    thresholds: tuple = ()  # ranks n where the CDFs differ, when comparable

    @property
    def strict(self) -> bool:
        return self.relation == STRICTLY_DOMINATES


def _masses(x) -> tuple:
    return x.masses if isinstance(x, RankDistribution) else tuple(Fraction(v) for v in x)


def fosd_compare(x, y) -> DominanceVerdict:
    """Compare rank laws; rank 1 is best, so dominating means a larger CDF."""
    xm, ym = _masses(x), _masses(y)
    if len(xm) != len(ym):
        raise ValueError(f"rank domains differ: {len(xm)} vs {len(ym)}")
    cx = cy = ZERO
    above, below = [], []
    for n, (a, b) in enumerate(zip(xm, ym), start=1):
        cx += a
        cy += b
        if cx > cy:
            above.append(n)
        elif cx < cy:
            below.append(n)
    if above and below:
        return DominanceVerdict(INCOMPARABLE)
    if above:
        return DominanceVerdict(STRICTLY_DOMINATES, tuple(above))
    if below:
        return DominanceVerdict(DOMINATED_BY, tuple(below))
    return DominanceVerdict(EQUAL)


# -- witnesses ----------------------------------------------------------------------

def make_coalition(members: Iterable) -> frozenset:
    out = frozenset(Agent.parse(a) if isinstance(a, str) else a for a in members)
    if not out:
        raise ValueError("a coalition needs at least one member")
    return out


def coalition_label(coalition) -> str:
    return "{" + ", ".join(str(a) for a in sorted(coalition)) + "}"


@dataclass
class Deviation:
    """The coalition's alternative mechanism on the prior's support.

    ``fallback="mimic"`` means profiles without an entry copy the audited
    mechanism; otherwise every support profile must have an entry.
    """
    entries: dict
    fallback: str | None = None

    def at(self, profile: PreferenceProfile, mechanism: Mechanism) -> RandomMatching:
        out = self.entries.get(profile)
        if out is not None:
            return out
        if self.fallback == "mimic":
            return mechanism(profile)
        raise KeyError("deviation undefined at a support profile")


@dataclass
class AgentCertificate:
    before: RankDistribution
    after: RankDistribution
    verdict: DominanceVerdict


@dataclass
class BlockWitness:
    coalition: frozenset
    deviation: Deviation
    per_agent: dict
    epsilon: Fraction | None = None
    slacks: dict = field(default_factory=dict)  # agent -> per-threshold gaps


@dataclass
class TypeCertificate:
    agent: Agent
    ranking: tuple
    event: Event
    mass: Fraction
    before: RankDistribution
    after: RankDistribution
    verdict: DominanceVerdict


@dataclass
class InterimWitness:
    coalition: frozenset
    type_sets: dict  # agent -> frozenset of rankings
    deviation: Deviation
    per_type: list
    epsilon: Fraction | None = None
    slacks: dict = field(default_factory=dict)  # (agent, ranking) -> gaps


@dataclass
class InterimSearch:
    witness: InterimWitness | None
    exhaustive: bool
    families_tried: int = 0
    lps_solved: int = 0
    reason: str = ""

    @property
    def blocked(self) -> bool:
        return self.witness is not None


@dataclass
class StabilityReport:
    stable: bool
    witness: object = None
    coalitions_checked: int = 0
    lps_solved: int = 0
    exhaustive: bool = True


# -- cells and the block LP ---------------------------------------------------------

class _Cell:
    __slots__ = ("key", "profiles", "mass", "ranks", "before")

    def __init__(self, key):
        self.key = key
        self.profiles = []
        self.mass = ZERO
        self.ranks = {}
        self.before = {}


def _pmf_cache(mechanism: Mechanism, members):
    cache = {}

    def pmf(p):
        out = cache.get(p)
        if out is None:
            lottery = mechanism(p)
            out = {a: lottery.rank_masses(p, a) for a in members}
            cache[p] = out
        return out
    return pmf


def _build_cells(items, members, internal, pmf, key_of):
    cells: dict = {}
    for p, w in items:
        k = key_of(p)
        cell = cells.get(k)
        if cell is None:
            cell = cells[k] = _Cell(k)
            for a in members:
                cell.ranks[a] = [p.rank(a, mu.partner_index(a)) for mu in internal]
                cell.before[a] = [ZERO] * len(p.ranking(a))
        cell.profiles.append((p, w))
        cell.mass += w
        dist = pmf(p)
        for a in members:
            acc = cell.before[a]
            for r, q in enumerate(dist[a]):
                if q:
                    acc[r] += w * q
    out = list(cells.values())
    for cell in out:
        for a in members:
            cell.before[a] = [v / cell.mass for v in cell.before[a]]
    return out


def _cdf(masses):
    out, acc = [], ZERO
    for m in masses:
        acc += m
        out.append(acc)
    return out


def _mix(cells_weights, agent, attr="before"):
    """Weighted mixture of the cells' per-agent rank laws."""
    size = None
    acc = None
    for cell, wt in cells_weights:
        vec = getattr(cell, attr)[agent]
        if acc is None:
            size = len(vec)
            acc = [ZERO] * size
        for r in range(size):
            if vec[r]:
                acc[r] += wt * vec[r]
    return acc


def _best_case(cells_weights, agent):
    size = len(cells_weights[0][0].before[agent])
    acc = [ZERO] * size
    for cell, wt in cells_weights:
        acc[min(cell.ranks[agent]) - 1] += wt
    return acc


def _prunable(groups) -> bool:
    """True when some group cannot be strictly improved by any internal lottery."""
    for agent, cws in groups:
        best = _best_case(cws, agent)
        if not fosd_compare(best, _mix(cws, agent)).strict:
            return True
    return False


@dataclass
class _LpResult:
    epsilon: Fraction
    q: list  # per cell: list of weights over internal matchings
    slacks: list  # per group: per-threshold gaps


def _solve_groups(cells, groups, n_match) -> _LpResult | None:
    index = {id(c): i for i, c in enumerate(cells)}
    nvar = len(cells) * n_match + 1
    if nvar > LP_VARIABLE_CAP:
        raise ResourceLimitError(f"block LP needs {nvar} variables (cap {LP_VARIABLE_CAP})")
    eps = nvar - 1
    prog = lpmod.LinearProgram(nvar, {eps: 1})
    for i in range(len(cells)):
        prog.add({i * n_match + k: 1 for k in range(n_match)}, lpmod.EQ, 1)
    plans = []
    for agent, cws in groups:
        size = len(cws[0][0].before[agent])
        before_cdf = _cdf(_mix(cws, agent))
        rows = []
        for n in range(1, size):
            coeffs = {}
            for cell, wt in cws:
                base = index[id(cell)] * n_match
                for k, r in enumerate(cell.ranks[agent]):
                    if r <= n:
                        coeffs[base + k] = coeffs.get(base + k, ZERO) + wt
            prog.add(coeffs, lpmod.GE, before_cdf[n - 1])
            rows.append(coeffs)
        total = {}
        for cell, wt in cws:
            base = index[id(cell)] * n_match
            for k, r in enumerate(cell.ranks[agent]):
                if r < size:
                    total[base + k] = total.get(base + k, ZERO) + wt * (size - r)
        total[eps] = Fraction(-1)
        prog.add(total, lpmod.GE, sum(before_cdf[: size - 1], ZERO))
        plans.append((rows, before_cdf))
    out = lpmod.solve_max(prog)
    if not out.optimal:
        # the all-internal-single lottery is never guaranteed feasible
        return None
    x = out.assignment
    if out.optimal_value <= 0:
        return None
    q = [x[i * n_match:(i + 1) * n_match] for i in range(len(cells))]
    slacks = []
    for rows, before_cdf in plans:
        gaps = tuple(sum((c * x[j] for j, c in row.items()), ZERO) - before_cdf[n]
                     for n, row in enumerate(rows))
        # sum-slack strictness must coincide with a strict threshold
        if any(g < 0 for g in gaps) or not any(g > 0 for g in gaps):
            raise InternalError("sum-slack strictness without a strict threshold")
        slacks.append(gaps)
    return _LpResult(out.optimal_value, q, slacks)


def _lottery(internal, weights) -> RandomMatching:
    return RandomMatching((mu, w) for mu, w in zip(internal, weights) if w)


def _members(coalition) -> list:
    return sorted(make_coalition(coalition))


# -- ex-ante / ex-post ------------------------------------------------------------------

def _dist(agent, masses) -> RankDistribution:
    return RankDistribution(agent, tuple(masses))


def ex_ante_block(mechanism: Mechanism, prior: Prior, coalition,
                  stats: dict | None = None) -> BlockWitness | None:
    """A deviation every member strictly prefers ex ante, or None."""
    members = _members(coalition)
    market = prior.market
    for a in members:
        market.check_agent(a)
    internal = enumerate_internal_matchings(market, members)
    pmf = _pmf_cache(mechanism, members)
    cells = _build_cells(prior.support, members, internal, pmf,
                         lambda p: tuple(p.ranking(a) for a in members))
    groups = [(a, [(c, c.mass) for c in cells]) for a in members]
    if _prunable(groups):
        return None
    if stats is not None:
        stats["lps"] = stats.get("lps", 0) + 1
    res = _solve_groups(cells, groups, len(internal))
    if res is None:
        return None
    entries = {}
    for cell, q in zip(cells, res.q):
        lottery = _lottery(internal, q)
        for p, _ in cell.profiles:
            entries[p] = lottery
    per_agent, slacks = {}, {}
    for (a, cws), gaps in zip(groups, res.slacks):
        before = _mix(cws, a)
        after = [ZERO] * len(before)
        for cell, q in zip(cells, res.q):
            for k, r in enumerate(cell.ranks[a]):
                if q[k]:
                    after[r - 1] += cell.mass * q[k]
        verdict = fosd_compare(after, before)
        if not verdict.strict:
            raise InternalError(f"LP block for {a} is not strict")
        per_agent[a] = AgentCertificate(_dist(a, before), _dist(a, after), verdict)
        slacks[a] = gaps
    return BlockWitness(frozenset(members), Deviation(entries), per_agent,
                        res.epsilon, slacks)


def ex_post_block(mechanism: Mechanism, profile: PreferenceProfile, coalition,
                  stats: dict | None = None) -> BlockWitness | None:
    return ex_ante_block(mechanism, point_mass(profile), coalition, stats)


def coalitions(market: Market, max_size: int | None = None, pairwise: bool = False):
    """Coalitions by size, then lexicographically (men before women)."""
    agents = market.agents
    if pairwise:
        yield from ((a,) for a in agents)
        for m in market.men:
            for w in market.women:
                yield (m, w)
        return
    top = len(agents) if max_size is None else min(max_size, len(agents))
    for k in range(1, top + 1):
        yield from itertools.combinations(agents, k)


def ex_post_stable_at(mechanism: Mechanism, profile: PreferenceProfile,
                      max_coalition: int | None = None) -> StabilityReport:
    prior = point_mass(profile)
    stats: dict = {}
    checked = 0
    for coal in coalitions(profile.market, max_coalition):
        checked += 1
        w = ex_ante_block(mechanism, prior, coal, stats)
        if w is not None:
            return StabilityReport(False, w, checked, stats.get("lps", 0))
    return StabilityReport(True, None, checked, stats.get("lps", 0))


def ex_ante_stable_at(mechanism: Mechanism, prior: Prior,
                      max_coalition: int | None = None, pairwise: bool = False) -> StabilityReport:
    stats: dict = {}
    checked = 0
    for coal in coalitions(prior.market, max_coalition, pairwise):
        checked += 1
        w = ex_ante_block(mechanism, prior, coal, stats)
        if w is not None:
            return StabilityReport(False, w, checked, stats.get("lps", 0))
    return StabilityReport(True, None, checked, stats.get("lps", 0))


def ex_ante_pairwise_stable(mechanism: Mechanism, prior: Prior) -> StabilityReport:
    return ex_ante_stable_at(mechanism, prior, pairwise=True)


# -- interim --------------------------------------------------------------------------------

def _families(ks: Sequence[int]):
    """Non-empty index subsets per agent: total size descending, then lexicographic."""
    def sizes(i, remaining):
        if i == len(ks):
            if remaining == 0:
                yield ()
            return
        rest_max = sum(ks[i + 1:])
        rest_min = len(ks) - i - 1
        for z in range(min(ks[i], remaining - rest_min), 0, -1):
            if remaining - z <= rest_max:
                for tail in sizes(i + 1, remaining - z):
                    yield (z,) + tail

    for total in range(sum(ks), len(ks) - 1, -1):
        for vec in sizes(0, total):
            yield from itertools.product(
                *(itertools.combinations(range(k), z) for k, z in zip(ks, vec)))


def _family_count(ks) -> int:
    out = 1
    for k in ks:
        out *= 2 ** k - 1
    return out


def _worst_internal(internal, profile, agent) -> Matching:
    ranks = [profile.rank(agent, mu.partner_index(agent)) for mu in internal]
    return internal[ranks.index(max(ranks))]


class _InterimContext:
    """Shared per-(mechanism, prior, coalition) data for the interim search."""

    def __init__(self, mechanism, prior, members, free_profiles=None):
        self.mechanism = mechanism
        self.prior = prior
        self.members = members
        self.market = prior.market
        self.internal = enumerate_internal_matchings(self.market, members)
        self.single = self.internal[-1]  # canonical order puts all-single last
        self.pmf = _pmf_cache(mechanism, members)
        self.types = {a: [r for r, w in marginal_types(prior, a)] for a in members}
        self.free = None if free_profiles is None else set(free_profiles)
        if self.free is not None:
            unknown = [p for p in self.free if prior.probability(p) == 0]
            if unknown:
                raise ValueError("free profiles must lie in the prior's support")
            cells = _build_cells(
                [(p, w) for p, w in prior.support if p in self.free],
                members, self.internal, self.pmf, lambda p: p)
        else:
            cells = _build_cells(prior.support, members, self.internal, self.pmf,
                                 lambda p: tuple(p.ranking(a) for a in members))
            if len(cells) * len(self.internal) > LP_VARIABLE_CAP:
                raise ResourceLimitError(
                    f"{len(cells)} type cells x {len(self.internal)} internal matchings "
                    f"exceeds the LP cap; restrict the deviation's free profiles")
        self.cells = cells
        self.cell_types = [
            tuple(c.profiles[0][0].ranking(a) for a in members) for c in cells]
        # type-vector masses over the whole support (for events)
        den, support = prior.scaled()
        tau_num: dict = {}
        for p, n in support:
            tau = tuple(p.ranking(a) for a in members)
            tau_num[tau] = tau_num.get(tau, 0) + n
        self.tau_den = den
        self.tau_mass = tau_num

    def y_mass(self, i, t, sets) -> Fraction:
        total = 0
        for tau, n in self.tau_mass.items():
            if tau[i] == t and all(tau[j] in sets[j] for j in range(len(sets)) if j != i):
                total += n
        return Fraction(total, self.tau_den)

    def groups(self, sets):
        """Per (member, type) constraint groups, or None if some type has no mass."""
        in_product = [
            (c, tau) for c, tau in zip(self.cells, self.cell_types)
            if all(tau[j] in sets[j] for j in range(len(sets)))]
        out = []
        for i, a in enumerate(self.members):
            for t in self.types[a]:
                if t not in sets[i]:
                    continue
                mass = self.y_mass(i, t, sets)
                if mass == 0:
                    return None
                cws = [(c, c.mass / mass) for c, tau in in_product if tau[i] == t]
                if not cws:
                    # Y has mass only on mimicked profiles: no strict gain possible
                    return None
                out.append(((a, t), cws, mass))
        return out

    def deviation(self, sets, res, groups) -> Deviation:
        if self.free is not None:
            entries = {}
            cell_q = {id(c): q for c, q in zip(self._lp_cells, res.q)}
            for c in self._lp_cells:
                lottery = _lottery(self.internal, cell_q[id(c)])
                for p, _ in c.profiles:
                    entries[p] = lottery
            return Deviation(entries, "mimic")
        cell_q = {id(c): q for c, q in zip(self._lp_cells, res.q)}
        entries = {}
        for c, tau in zip(self.cells, self.cell_types):
            q = cell_q.get(id(c))
            if q is not None:
                lottery = _lottery(self.internal, q)
            else:
                outside = [i for i in range(len(sets)) if tau[i] not in sets[i]]
                if len(outside) == 1:
                    a = self.members[outside[0]]
                    lottery = RandomMatching.point(
                        _worst_internal(self.internal, c.profiles[0][0], a))
                else:
                    lottery = RandomMatching.point(self.single)
            for p, _ in c.profiles:
                entries[p] = lottery
        return Deviation(entries)

    def solve(self, sets):
        groups = self.groups(sets)
        if groups is None:
            return None, None, "zero-mass"
        lp_groups = [(a, cws) for (a, t), cws, _ in groups]
        if self.free is None and _prunable(lp_groups):
            return None, groups, "pruned"
        used = []
        seen = set()
        for _, cws, _ in groups:
            for c, _ in cws:
                if id(c) not in seen:
                    seen.add(id(c))
                    used.append(c)
        self._lp_cells = used
        res = _solve_groups(used, lp_groups, len(self.internal))
        return res, groups, "lp"


def _conditional_laws(mechanism, prior, deviation, agent, event_pred):
    size = prior.market.option_count(agent)
    before, after = LawAccumulator(size), LawAccumulator(size)
    den, support = prior.scaled()
    for p, n in support:
        if event_pred(p):
            before.add(n, mechanism(p), p, agent)
            after.add(n, deviation.at(p, mechanism), p, agent)
    if before.mass_num == 0:
        return ZERO, None, None
    return (Fraction(before.mass_num, den), before.result(den, True),
            after.result(den, True))


def interim_certificates(mechanism, prior, members, type_sets, deviation):
    """Per-type certificates plus the list of outside types that would also join.

    A profile lies in Y_a(P_a) exactly when every other member's ranking is
    in its type set, so one pass over the support fills every event.
    """
    den, support = prior.scaled()
    acc: dict = {}
    for p, n in support:
        outside = [a for a in members if p.ranking(a) not in type_sets[a]]
        if len(outside) > 1:
            continue
        targets = outside or members
        lottery = mechanism(p)
        alt = deviation.at(p, mechanism)
        for a in targets:
            key = (a, p.ranking(a))
            slot = acc.get(key)
            if slot is None:
                size = len(p.ranking(a))
                slot = acc[key] = (LawAccumulator(size), LawAccumulator(size))
            slot[0].add(n, lottery, p, a)
            slot[1].add(n, alt, p, a)
    acc = {key: (Fraction(b.mass_num, den), b.result(den, True), d.result(den, True))
           for key, (b, d) in acc.items()}
    per_type, joiners = [], []
    for a in members:
        others = {b: type_sets[b] for b in members if b != a}
        for t, _ in marginal_types(prior, a):
            slot = acc.get((a, t))
            if t in type_sets[a]:
                if slot is None:
                    return None, None
                mass, before, after = slot
                verdict = fosd_compare(after, before)
                per_type.append(TypeCertificate(a, t, Event({a: [t], **others}), mass,
                                                _dist(a, before), _dist(a, after), verdict))
            elif slot is not None:
                _, before, after = slot
                if fosd_compare(after, before).strict:
                    joiners.append((a, t))
    return per_type, joiners


def interim_block(mechanism: Mechanism, prior: Prior, coalition,
                  max_candidate_sets: int = 4096, expansion_rounds: int = 8,
                  free_profiles: Iterable[PreferenceProfile] | None = None) -> InterimSearch:
    """Search type sets and a deviation blocking ``mechanism`` in the interim.

    ``free_profiles`` restricts the deviation to those profiles and copies the
    audited mechanism elsewhere; a None verdict is then never exhaustive.
    """
    members = _members(coalition)
    ctx = _InterimContext(mechanism, prior, members, free_profiles)
    if ctx.free is not None:
        outside = [p for p, _ in prior.support if p not in ctx.free]
        coalition_set = set(members)
        if len(coalition_set) < len(prior.market.agents):
            from .market import is_internal
            if any(not is_internal(mu, coalition_set)
                   for p in outside for mu, _ in mechanism(p)):
                raise ValueError("mimicking the mechanism off the free profiles "
                                 "would leave the coalition")
    ks = [len(ctx.types[a]) for a in members]
    total = _family_count(ks)
    tried = lps = 0
    for combo in _families(ks):
        if tried >= max_candidate_sets:
            return InterimSearch(None, False, tried, lps, "budget")
        tried += 1
        sets = [frozenset(ctx.types[a][j] for j in idx) for a, idx in zip(members, combo)]
        for _ in range(expansion_rounds + 1):
            res, groups, how = ctx.solve(sets)
            if how == "lp":
                lps += 1
            if res is None:
                break
            deviation = ctx.deviation(sets, res, groups)
            type_sets = {a: s for a, s in zip(members, sets)}
            per_type, joiners = interim_certificates(mechanism, prior, members,
                                                     type_sets, deviation)
            if per_type is None:
                break
            if not joiners:
                if not all(c.verdict.strict for c in per_type):
                    raise InternalError("interim LP solution is not strict for some type")
                slacks = {(a, t): g for ((a, t), _, _), g in zip(groups, res.slacks)}
                witness = InterimWitness(frozenset(members), type_sets, deviation,
                                         per_type, res.epsilon, slacks)
                return InterimSearch(witness, ctx.free is None and tried <= total,
                                     tried, lps, "found")
            grown = [set(s) for s in sets]
            for a, t in joiners:
                grown[members.index(a)].add(t)
            sets = [frozenset(s) for s in grown]
    exhaustive = ctx.free is None and tried == total
    return InterimSearch(None, exhaustive, tried, lps,
                         "exhausted" if exhaustive else "restricted")


def interim_stable_at(mechanism: Mechanism, prior: Prior, max_coalition: int | None = None,
                      pairwise: bool = False, **opts) -> StabilityReport:
    checked = lps = 0
    exhaustive = True
    for coal in coalitions(prior.market, max_coalition, pairwise):
        checked += 1
        search = interim_block(mechanism, prior, coal, **opts)
        lps += search.lps_solved
        if search.witness is not None:
            return StabilityReport(False, search.witness, checked, lps, True)
        exhaustive = exhaustive and search.exhaustive
    return StabilityReport(True, None, checked, lps, exhaustive)


def interim_pairwise_stable(mechanism: Mechanism, prior: Prior, **opts) -> StabilityReport:
    return interim_stable_at(mechanism, prior, pairwise=True, **opts)


# -- mutual first choices and the interim impossibility construction ----------------------

@dataclass(frozen=True)
class MutualFirstViolation:
    profile: PreferenceProfile
    man: Agent
    woman: Agent
    probability: Fraction


def _mutual_first_at(mechanism, p) -> MutualFirstViolation | None:
    lottery = None
    for m, ranking in enumerate(p.men):
        w = ranking[0]
        if w == SELF or p.women[w][0] != m:
            continue
        if lottery is None:
            lottery = mechanism(p)
        prob = lottery.pair_probability(m, w)
        if prob < 1:
            return MutualFirstViolation(p, man(m), woman(w), prob)
    return None


def mutual_first_violation(mechanism: Mechanism, prior: Prior) -> MutualFirstViolation | None:
    """First support profile where a mutual-first pair is not surely matched."""
    for p, _ in prior.support:
        v = _mutual_first_at(mechanism, p)
        if v is not None:
            return v
    return None


def example2_profile() -> PreferenceProfile:
    return PreferenceProfile.from_lists(
        men=[[0, 1, 2], [0, 2, 1], [2, 0, 1]],
        women=[[0, 1, 2], [0, 2, 1], [2, 0, 1]])


@lru_cache(maxsize=None)
def uniform_3x3_prior() -> Prior:
    return iid_uniform_prior(Market(3, 3))


def permutation_orbit(profile: PreferenceProfile) -> list:
    """Distinct relabellings of ``profile``, in order of their least sigma."""
    seen = {}
    for sigma in all_permutations(profile.market):
        seen.setdefault(permute_profile(profile, sigma), sigma)
    return list(seen)


@dataclass
class InstabilityWitness:
    kind: str  # "pair-ex-post" or "grand-coalition"
    profile: PreferenceProfile | None = None
    block: BlockWitness | None = None
    lifted: InterimWitness | None = None
    interim: InterimWitness | None = None
    search: InterimSearch | None = None


def lift_ex_post(witness: BlockWitness, mechanism: Mechanism,
                 profile: PreferenceProfile) -> InterimWitness:
    """An ex-post block at P is an interim block at the point mass on P."""
    prior = point_mass(profile)
    members = sorted(witness.coalition)
    type_sets = {a: frozenset([profile.ranking(a)]) for a in members}
    deviation = Deviation({profile: witness.deviation.at(profile, mechanism)})
    per_type, joiners = interim_certificates(mechanism, prior, members, type_sets, deviation)
    if per_type is None or joiners or not all(c.verdict.strict for c in per_type):
        raise InternalError("ex-post witness does not lift to the point-mass prior")
    return InterimWitness(witness.coalition, type_sets, deviation, per_type)


def interim_to_ex_ante(witness: InterimWitness, mechanism: Mechanism,
                       prior: Prior) -> tuple[Prior, BlockWitness]:
    """Condition on every member holding a consenting type; the deviation then
    blocks ex ante under the conditional prior."""
    from .priors import condition
    members = sorted(witness.coalition)
    conditioned = condition(prior, Event(witness.type_sets))
    per_agent = {}
    for a in members:
        _, before, after = _conditional_laws(mechanism, conditioned, witness.deviation,
                                             a, lambda p: True)
        verdict = fosd_compare(after, before)
        if not verdict.strict:
            raise InternalError(f"interim witness does not reduce ex ante for {a}")
        per_agent[a] = AgentCertificate(_dist(a, before), _dist(a, after), verdict)
    return conditioned, BlockWitness(witness.coalition, witness.deviation, per_agent)


def interim_instability_witness(mechanism: Mechanism,
                                base_profile: PreferenceProfile | None = None,
                                prior: Prior | None = None,
                                run_search: bool = True) -> InstabilityWitness:
    """The constructive dichotomy behind the impossibility of interim stability.

    Either the mechanism is pairwise blocked ex post on some relabelling of the
    base profile, or it is forced there and the grand coalition blocks it in
    the interim with the partner-swapping deviation.
    """
    from .verify import check_block_witness, check_interim_witness
    base = base_profile or example2_profile()
    market = base.market
    orbit = permutation_orbit(base)
    for p in orbit:
        v = _mutual_first_at(mechanism, p)
        pairs = [(v.man, v.woman)] if v is not None else []
        pairs += [coal for coal in coalitions(market, pairwise=True)]
        for coal in pairs:
            block = ex_post_block(mechanism, p, coal)
            if block is not None:
                check_block_witness(mechanism, point_mass(p), block)
                lifted = lift_ex_post(block, mechanism, p)
                check_interim_witness(mechanism, point_mass(p), lifted)
                return InstabilityWitness("pair-ex-post", p, block, lifted)
    prior = prior or uniform_3x3_prior()
    members = sorted(market.agents)
    deviating = example2_deviation(mechanism, base)
    deviation = Deviation({p: deviating(p) for p in orbit}, "mimic")
    type_sets = {a: frozenset(r for r, _ in marginal_types(prior, a)) for a in members}
    per_type, joiners = interim_certificates(mechanism, prior, members, type_sets, deviation)
    witness = InterimWitness(frozenset(members), type_sets, deviation, per_type or [])
    try:
        check_interim_witness(mechanism, prior, witness)
    except Exception as exc:
        raise InternalError(f"grand-coalition witness failed verification: {exc}") from exc
    search = None
    if run_search:
        search = interim_block(mechanism, prior, members, free_profiles=orbit)
        if search.witness is None:
            raise InternalError("restricted interim search found no block")
        check_interim_witness(mechanism, prior, search.witness)
    return InstabilityWitness("grand-coalition", base, interim=witness, search=search)
