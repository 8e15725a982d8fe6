"""Reproducible scenarios with exact claim lists.

Each case builds a small market and prior, evaluates the mechanisms under
audit by brute-force enumeration, and compares every computed quantity with
its closed form.  A claim passes only on exact rational equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import lp as lpmod
from .market import (MAN, WOMAN, Agent, Market, Matching, PreferenceProfile,
                     enumerate_matchings, man, ranking_from_list, woman)
from .mechanisms import (Mechanism, RandomMatching, UtilityFunction, da_mechanism,
                         example2_deviation, expected_utility, random_stable_mechanism,
                         rank_distribution, stable_set, uniform_random_full)
from .priors import (AgentTypeDistribution, Prior, condition, marginal_types, point_mass,
                     product_prior)
from .stability import (INCOMPARABLE, STRICTLY_DOMINATES, coalition_label,
                        ex_ante_block, ex_ante_pairwise_stable, ex_post_block,
                        ex_post_stable_at, example2_profile, fosd_compare, interim_block,
                        interim_instability_witness, interim_pairwise_stable,
                        mutual_first_violation, permutation_orbit, uniform_3x3_prior)
from .verify import check_block_witness

F = Fraction
CASE_KINDS = ("example1", "example2", "example3", "appendix-a", "appendix-b")


# -- identifiers and reports ----------------------------------------------------------

@dataclass(frozen=True)
class CaseId:
    kind: str
    params: tuple = ()  # ((name, value), ...)

    def __post_init__(self):
        if self.kind not in CASE_KINDS:
            raise ValueError(f"unknown case {self.kind!r}; choose from {', '.join(CASE_KINDS)}")
        p = dict(self.params)
        if self.kind == "example3":
            if not 0 < p["p"] < F(1, 4):
                raise ValueError("p must lie strictly between 0 and 1/4")
        elif self.kind == "appendix-a":
            if not 0 < p["p"] < 1:
                raise ValueError("p must lie strictly between 0 and 1")
            u = p.get("utilities")
            if u is not None and len(u) != 3:
                raise ValueError("utilities are three values, best rank first")
        elif self.kind == "appendix-b":
            if not (0 <= p["delta"] < 1 and 0 < p["epsilon"] < 1):
                raise ValueError("need 0 <= delta < 1 and 0 < epsilon < 1")

    def param(self, name, default=None):
        return dict(self.params).get(name, default)

    def __str__(self):
        inner = ", ".join(f"{k}={_fmt(v)}" for k, v in self.params)
        return f"{self.kind}({inner})" if inner else self.kind


def example1() -> CaseId:
    return CaseId("example1")


def example2() -> CaseId:
    return CaseId("example2")


def example3(p) -> CaseId:
    return CaseId("example3", (("p", F(p)),))


def appendix_a(p, utilities=(1, F(3, 4), 0)) -> CaseId:
    return CaseId("appendix-a", (("p", F(p)), ("utilities", tuple(F(u) for u in utilities))))


def appendix_b(delta, epsilon) -> CaseId:
    return CaseId("appendix-b", (("delta", F(delta)), ("epsilon", F(epsilon))))


@dataclass
class Claim:
    description: str
    expected: object
    computed: object

    @property
    def passed(self) -> bool:
        return self.expected == self.computed


@dataclass
class CaseReport:
    case: CaseId
    claims: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)  # (label, witness)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    def claim(self, description, expected, computed) -> Claim:
        c = Claim(description, expected, computed)
        self.claims.append(c)
        return c

    def find(self, description) -> Claim:
        return next(c for c in self.claims if c.description == description)

    def to_text(self) -> str:
        lines = [f"case {self.case}"]
        for c in self.claims:
            mark = "PASS" if c.passed else "FAIL"
            lines.append(f"  [{mark}] {c.description}")
            lines.append(f"         expected {_fmt(c.expected)}")
            if not c.passed:
                lines.append(f"         computed {_fmt(c.computed)}")
        for label, w in self.witnesses:
            lines.append(f"  witness {label}: coalition {coalition_label(w.coalition)}")
        ok = sum(c.passed for c in self.claims)
        lines.append(f"  {ok}/{len(self.claims)} claims pass")
        return "\n".join(lines)


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (tuple, list)):
        return "(" + ", ".join(_fmt(x) for x in v) + ")"
    if isinstance(v, frozenset):
        return coalition_label(v)
    return str(v)


@dataclass
class Scenario:
    market: Market
    prior: Prior
    mechanisms: dict  # name -> Mechanism


# -- scenario builders ----------------------------------------------------------------

def example1_profile() -> PreferenceProfile:
    return PreferenceProfile.from_lists(
        men=[[0, 1, 2], [0, 2, 1], [1, 0, 2]],
        women=[[2, 1, 0], [1, 0, 2], [2, 1, 0]])


def example3_prior(p) -> Prior:
    p = F(p)
    market = Market(3, 3)
    rl = ranking_from_list
    flexible = [([0, 2, 1], 1 - 2 * p), ([1, 0, 2], p), ([2, 1, 0], p)]
    return product_prior(market, [
        AgentTypeDistribution(man(0), [(rl(r, 3), w) for r, w in flexible]),
        AgentTypeDistribution(man(1), [(rl([0, 1], 3), 1)]),
        AgentTypeDistribution(man(2), [(rl([2], 3), 1)]),
        AgentTypeDistribution(woman(0), [(rl(r, 3), w) for r, w in flexible]),
        AgentTypeDistribution(woman(1), [(rl([0, 1], 3), 1)]),
        AgentTypeDistribution(woman(2), [(rl([2], 3), 1)]),
    ])


def appendix_a_prior(p) -> Prior:
    p = F(p)
    market = Market(3, 3)
    usual = ranking_from_list([0, 1, 2], 3)
    flipped = ranking_from_list([2, 0, 1], 3)
    two = [(usual, 1 - p), (flipped, p)]
    one = [(usual, 1)]
    return product_prior(market, [
        AgentTypeDistribution(man(0), two),
        AgentTypeDistribution(man(1), one),
        AgentTypeDistribution(man(2), one),
        AgentTypeDistribution(woman(0), two),
        AgentTypeDistribution(woman(1), one),
        AgentTypeDistribution(woman(2), one),
    ])


# Students are the men (1, 2, 3 -> m1, m2, m3); schools are the women
# (A, B, C -> w1, w2, w3).  Every school uses one common student order.
STUDENT_TYPES = ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0))
SCHOOL_ORDERS = ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0))


def _two_two_weights(x):
    return ((1 - x) / 2, x / 2, (1 - x) / 2, x / 2)


def appendix_b_prior(delta, epsilon) -> Prior:
    delta, epsilon = F(delta), F(epsilon)
    sw = _two_two_weights(delta)
    cw = _two_two_weights(epsilon)
    support = []
    for i1, t1 in enumerate(STUDENT_TYPES):
        for i2, t2 in enumerate(STUDENT_TYPES):
            for i3, t3 in enumerate(STUDENT_TYPES):
                for k, order in enumerate(SCHOOL_ORDERS):
                    w = sw[i1] * sw[i2] * sw[i3] * cw[k]
                    if not w:
                        continue
                    r = ranking_from_list(order, 3)
                    profile = PreferenceProfile(
                        tuple(ranking_from_list(t, 3) for t in (t1, t2, t3)), (r, r, r))
                    support.append((profile, w))
    return Prior(support)


def serial_dictatorship(profile: PreferenceProfile, students=None, schools=None) -> Matching:
    """Students, in the first school's order, take their favourite open school."""
    market = profile.market
    students = set(range(market.num_men) if students is None else students)
    open_schools = set(range(market.num_women) if schools is None else schools)
    pairs = []
    for s in profile.women[0]:
        if s < 0:
            break
        if s not in students:
            continue
        for c in profile.men[s]:
            if c < 0:
                break
            if c in open_schools:
                open_schools.discard(c)
                pairs.append((s, c))
                break
    return Matching.from_pairs(market, pairs)


def serial_dictatorship_mechanism(students=None, schools=None, kind="serial-dictatorship"):
    return Mechanism(lambda p: RandomMatching.point(serial_dictatorship(p, students, schools)),
                     kind)


def build_case(case: CaseId) -> Scenario:
    if case.kind == "example1":
        p = example1_profile()
        return Scenario(p.market, point_mass(p),
                        {"uniform-random-full": uniform_random_full(p.market)})
    if case.kind == "example2":
        prior = uniform_3x3_prior()
        return Scenario(prior.market, prior, {
            "random-stable": random_stable_mechanism(),
            "uniform-random-full": uniform_random_full(prior.market)})
    if case.kind == "example3":
        prior = example3_prior(case.param("p"))
        return Scenario(prior.market, prior, _stable_mechanisms())
    if case.kind == "appendix-a":
        prior = appendix_a_prior(case.param("p"))
        return Scenario(prior.market, prior, {"random-stable": random_stable_mechanism()})
    prior = appendix_b_prior(case.param("delta"), case.param("epsilon"))
    return Scenario(prior.market, prior, {
        "serial-dictatorship": serial_dictatorship_mechanism(),
        "sub-market": serial_dictatorship_mechanism([0, 1], [0, 1], "sub-market")})


def _stable_mechanisms() -> dict:
    return {"random-stable": random_stable_mechanism(),
            "da-men": da_mechanism(None, MAN),
            "da-women": da_mechanism(None, WOMAN)}


def run_case(case: CaseId) -> CaseReport:
    runner = {"example1": _run_example1, "example2": _run_example2,
              "example3": _run_example3, "appendix-a": _run_appendix_a,
              "appendix-b": _run_appendix_b}[case.kind]
    report = CaseReport(case)
    runner(case, build_case(case), report)
    return report


def _law(mechanism, prior, agent) -> tuple:
    return rank_distribution(mechanism, prior, agent).masses


# -- unique stable matching, uniform random lottery -------------------------------------

def _weak_dominance_lp(profile: PreferenceProfile, lottery: RandomMatching,
                       matchings: list, objective: dict) -> lpmod.LpOutcome:
    """Optimise over lotteries on ``matchings`` that weakly dominate ``lottery``
    for every agent, rank by rank."""
    n = len(matchings)
    lp = lpmod.LinearProgram(n, objective)
    lp.add({k: 1 for k in range(n)}, lpmod.EQ, 1)
    for a in profile.market.agents:
        before = lottery.rank_masses(profile, a)
        ranks = [profile.rank(a, mu.partner_index(a)) for mu in matchings]
        acc = F(0)
        for t in range(1, len(before)):
            acc += before[t - 1]
            lp.add({k: 1 for k, r in enumerate(ranks) if r <= t}, lpmod.GE, acc)
    return lpmod.solve_max(lp)


def _run_example1(case, scn, report):
    p = scn.prior.support[0][0]
    urf = scn.mechanisms["uniform-random-full"]
    expected = Matching.from_pairs(p.market, [(0, 1), (1, 2), (2, 0)])
    report.claim("stable set is the single matching {m1w2, m2w3, m3w1}",
                 [str(expected)], [str(mu) for mu in stable_set(p)])
    res = ex_post_stable_at(urf, p, 6)
    report.claim("uniform random perfect matching is ex-post stable (all 63 coalitions)",
                 (True, 63), (res.stable, res.coalitions_checked))
    four = [man(1), man(2), woman(0), woman(1)]
    report.claim("coalition {m2, m3, w1, w2} cannot block", None, ex_post_block(urf, p, four))
    report.claim("the grand coalition cannot block", None,
                 ex_post_block(urf, p, p.market.agents))

    # maximal total gain over lotteries that weakly dominate for everyone
    matchings = enumerate_matchings(p.market)
    lottery = urf(p)
    gain: dict = {}
    for a in p.market.agents:
        before = lottery.rank_masses(p, a)
        size = len(before)
        for k, mu in enumerate(matchings):
            r = p.rank(a, mu.partner_index(a))
            gain[k] = gain.get(k, 0) + (size - r)
    const = sum(sum((len(lottery.rank_masses(p, a)) - r) * q
                    for r, q in enumerate(lottery.rank_masses(p, a), start=1))
                for a in p.market.agents)
    out = _weak_dominance_lp(p, lottery, matchings, gain)
    report.claim("largest total CDF gain of a weakly dominating lottery is 0",
                 F(0), out.optimal_value - const if out.optimal else out.status)

    def idx(pairs):
        return matchings.index(Matching.from_pairs(p.market, pairs))
    cyclic = [idx([(0, 0), (1, 1), (2, 2)]), idx([(0, 1), (1, 2), (2, 0)]),
              idx([(0, 2), (1, 0), (2, 1)])]
    anti = [idx([(0, 0), (1, 2), (2, 1)]), idx([(0, 1), (1, 0), (2, 2)]),
            idx([(0, 2), (1, 1), (2, 0)])]
    spreads = []
    for triple in (cyclic, anti):
        for i, j in ((triple[0], triple[1]), (triple[1], triple[2])):
            hi = _weak_dominance_lp(p, lottery, matchings, {i: 1, j: -1}).optimal_value
            lo = _weak_dominance_lp(p, lottery, matchings, {i: -1, j: 1}).optimal_value
            spreads.append((hi, -lo))
    report.claim("weak dominance forces equal weight within each triple of perfect matchings",
                 [(F(0), F(0))] * 4, spreads)
    off = [k for k, mu in enumerate(matchings) if len(mu.pairs()) < 3]
    worst = max(_weak_dominance_lp(p, lottery, matchings, {k: 1}).optimal_value for k in off)
    report.claim("weak dominance puts no weight on imperfect matchings", F(0), worst)


# -- independent uniform 3x3 preferences -------------------------------------------------

def _run_example2(case, scn, report, run_search: bool = True):
    base = example2_profile()
    orbit = permutation_orbit(base)
    report.claim("the 36 relabellings of the base profile are distinct", 36, len(orbit))
    prior = scn.prior
    on_orbit = condition(prior, set(orbit).__contains__)
    stable_law = (F(2, 3), F(0), F(1, 3), F(0))
    swap_law = (F(2, 3), F(1, 3), F(0), F(0))
    for name, mech in _stable_mechanisms().items():
        laws = {_law(mech, on_orbit, a) for a in prior.market.agents}
        report.claim(f"{name}: every agent's law on the relabellings", [stable_law],
                     sorted(laws))
    rs = scn.mechanisms["random-stable"]
    deviating = example2_deviation(rs, base)
    laws = {_law(deviating, on_orbit, a) for a in prior.market.agents}
    report.claim("partner swap: every agent's law on the relabellings", [swap_law],
                 sorted(laws))

    urf = scn.mechanisms["uniform-random-full"]
    v = mutual_first_violation(urf, point_mass(base))
    report.claim("uniform random perfect matching pairs mutual firsts m1, w1 w.p. 1/3",
                 ("m1", "w1", F(1, 3)),
                 None if v is None else (str(v.man), str(v.woman), v.probability))
    pair = interim_instability_witness(urf)
    report.claim("uniform random perfect matching: pair witness",
                 ("pair-ex-post", frozenset({man(0), woman(0)})),
                 (pair.kind, pair.block.coalition if pair.block else None))
    if pair.block is not None:
        report.witnesses.append(("uniform-random-full ex post", pair.block))
        report.witnesses.append(("uniform-random-full interim lift", pair.lifted))

    grand = interim_instability_witness(rs, run_search=run_search)
    report.claim("random stable: grand-coalition interim witness",
                 ("grand-coalition", 6),
                 (grand.kind, len(grand.interim.coalition) if grand.interim else None))
    if grand.interim is not None:
        report.witnesses.append(("random-stable grand coalition", grand.interim))
        strict = all(c.verdict.relation == STRICTLY_DOMINATES for c in grand.interim.per_type)
        report.claim("every type of every agent strictly gains from the partner swap",
                     True, strict)
    if grand.search is not None:
        report.claim("restricted LP search over the relabellings finds a block",
                     True, grand.search.witness is not None
                     and grand.search.witness.epsilon > 0)
        if grand.search.witness is not None:
            report.witnesses.append(("random-stable LP search", grand.search.witness))


# -- one flexible agent per side ---------------------------------------------------------

def _run_example3(case, scn, report):
    p = case.param("p")
    prior = scn.prior
    m1, w1 = man(0), woman(0)
    report.claim("support size", 9, len(prior))
    flexible = [(1 - 2 * p), p, p]
    for a in (m1, w1):
        report.claim(f"marginal type law of {a}", flexible,
                     [w for _, w in marginal_types(prior, a)])
    forced = {}
    for name, mech in scn.mechanisms.items():
        forced[name] = all(_forced_matches_hold(prof, mech(prof)) for prof, _ in prior.support)
    report.claim("forced matches hold for every stable mechanism on every profile",
                 {name: True for name in scn.mechanisms}, forced)
    stable_law = (1 - 3 * p + 4 * p * p, p, 2 * p - 4 * p * p, F(0))
    pair_law = (1 - 2 * p, p, p, F(0))
    for name, mech in scn.mechanisms.items():
        report.claim(f"{name}: laws of m1 and w1", [stable_law, stable_law],
                     [_law(mech, prior, m1), _law(mech, prior, w1)])
    pair_off = Mechanism(
        lambda prof: RandomMatching.point(Matching.from_pairs(prof.market, [(0, 0)])),
        "pair-m1-w1")
    report.claim("pairing m1 with w1: laws of m1 and w1", [pair_law, pair_law],
                 [_law(pair_off, prior, m1), _law(pair_off, prior, w1)])
    report.claim("pairing strictly dominates the stable outcome",
                 STRICTLY_DOMINATES, fosd_compare(pair_law, stable_law).relation)
    rs = scn.mechanisms["random-stable"]
    res = ex_ante_pairwise_stable(rs, prior)
    report.claim("random stable is blocked ex ante by {m1, w1}",
                 (False, frozenset({m1, w1})),
                 (res.stable, res.witness.coalition if res.witness else None))
    if res.witness is not None:
        check_block_witness(rs, prior, res.witness)
        report.witnesses.append(("random-stable ex ante", res.witness))
    da = interim_pairwise_stable(scn.mechanisms["da-men"], prior)
    report.claim("men-proposing DA is interim pairwise stable (exhaustive)",
                 (True, True), (da.stable, da.exhaustive))


def _forced_matches_hold(profile, lottery) -> bool:
    men, women = profile.men, profile.women
    w1_first_for_m1 = men[0].index(0) < men[0].index(1)
    m1_first_for_w1 = women[0].index(0) < women[0].index(1)
    if lottery.pair_probability(2, 2) != 1:
        return False
    if not w1_first_for_m1 and (lottery.pair_probability(0, 1) != 1
                                or lottery.pair_probability(1, 0) != 1):
        return False
    if not m1_first_for_w1 and (lottery.pair_probability(1, 0) != 1
                                or lottery.pair_probability(0, 1) != 1):
        return False
    if w1_first_for_m1 and m1_first_for_w1 and lottery.pair_probability(0, 0) != 1:
        return False
    return True


# -- expected utility versus dominance ---------------------------------------------------

def _utility_by_rank(agent: Agent, ranking, values, market) -> UtilityFunction:
    table = {agent: F(0)}
    for r, partner in enumerate(ranking[:3]):
        table[Agent(agent.opposite, partner)] = F(values[r])
    return UtilityFunction(agent, table)


def appendix_a_eu_block(p, utilities=(1, F(3, 4), 0)) -> CaseReport:
    return run_case(appendix_a(p, utilities))


def _run_appendix_a(case, scn, report):
    p = case.param("p")
    utilities = case.param("utilities")
    prior = scn.prior
    rs = scn.mechanisms["random-stable"]
    m2, w2 = man(1), woman(1)
    sizes = [len(stable_set(prof)) for prof, _ in prior.support]
    report.claim("each of the 4 realizations has a unique stable matching", [1] * 4, sizes)
    stable_law = (p * (1 - p), (1 - p) ** 2 + p * p, p * (1 - p), F(0))
    for a in (m2, w2):
        report.claim(f"{a}: law under the stable matching", stable_law, _law(rs, prior, a))
    pair_law = (F(0), F(1), F(0), F(0))
    report.claim("dominance between pairing off and the stable lottery",
                 INCOMPARABLE, fosd_compare(pair_law, stable_law).relation)

    def eu_pair_vs_stable(values):
        out = []
        for a in (m2, w2):
            ranking = prior.support[0][0].ranking(a)
            u = _utility_by_rank(a, ranking, values, prior.market)
            out.append((F(values[1]), expected_utility(rs, prior, a, u)))
        return out

    results = eu_pair_vs_stable(utilities)
    u1, u2, u3 = utilities
    closed = stable_law[0] * u1 + stable_law[1] * u2 + stable_law[2] * u3
    report.claim("expected utility (pair, stable) for m2 and w2",
                 [(F(u2), closed)] * 2, results)
    verdict = "pair" if u2 > closed else ("tie" if u2 == closed else "stable")
    computed = {("pair" if a > b else "tie" if a == b else "stable") for a, b in results}
    report.claim("option preferred under expected utility", [verdict], sorted(computed))
    linear = eu_pair_vs_stable((1, F(1, 2), 0))
    report.claim("rank-linear utilities tie", [True, True], [a == b for a, b in linear])
    search = interim_block(rs, prior, [m2, w2])
    report.claim("the pair {m2, w2} does not block in the interim", (None, True),
                 (search.witness, search.exhaustive))


# -- perfectly correlated school orders ----------------------------------------------------

def appendix_b_laws(delta, epsilon) -> dict:
    """Rank laws of A, B, 1, 2 with everyone in, and with only (A, B, 1, 2) in."""
    prior = appendix_b_prior(delta, epsilon)
    full = serial_dictatorship_mechanism()
    sub = serial_dictatorship_mechanism([0, 1], [0, 1], "sub-market")
    out = {}
    for a in (woman(0), woman(1), man(0), man(1)):
        out[a] = (_law(full, prior, a)[:3], _law(sub, prior, a)[:3])
    return out


def appendix_b_closed_forms(delta, epsilon) -> dict:
    d, e = F(delta), F(epsilon)
    half = F(1, 2)
    school_full = (half, (1 - d) / 2, d / 2)
    school_sub = (half, (1 - e) / 2, e / 2)
    base = (F(3, 4), F(1, 4), F(0))
    corr = (2 - d, 2 - 5 * d + 3 * d * d, -4 + 6 * d - 3 * d * d)
    student_full = tuple(b - e / 8 * c for b, c in zip(base, corr))
    student_sub = tuple(b - d / 4 * c for b, c in zip(base, (0, 1, -1)))
    return {"school_full": school_full, "school_sub": school_sub,
            "student_full": student_full, "student_sub": student_sub}


def appendix_b_inequality(delta, epsilon) -> bool:
    d, e = F(delta), F(epsilon)
    return e < d < 2 * e * (1 - F(3, 2) * d + F(3, 4) * d * d)


def appendix_b_all_prefer(delta, epsilon) -> bool:
    laws = appendix_b_laws(delta, epsilon)
    return all(fosd_compare(sub, full).strict for full, sub in laws.values())


def _run_appendix_b(case, scn, report):
    d, e = case.param("delta"), case.param("epsilon")
    prior = scn.prior
    report.claim("support size", (4 if d else 2) ** 3 * 4, len(prior))
    laws = appendix_b_laws(d, e)
    closed = appendix_b_closed_forms(d, e)
    A, B, s1, s2 = woman(0), woman(1), man(0), man(1)
    for a in (A, B):
        report.claim(f"school {'AB'[a.index]}: law with everyone in",
                     closed["school_full"], laws[a][0])
        report.claim(f"school {'AB'[a.index]}: law in the (A, B, 1, 2) market",
                     closed["school_sub"], laws[a][1])
    for a in (s1, s2):
        report.claim(f"student {a.index + 1}: law with everyone in",
                     closed["student_full"], laws[a][0])
        report.claim(f"student {a.index + 1}: law in the (A, B, 1, 2) market",
                     closed["student_sub"], laws[a][1])
    report.claim("all four strictly prefer the (A, B, 1, 2) market iff "
                 "epsilon < delta < 2 epsilon (1 - 3/2 delta + 3/4 delta^2)",
                 appendix_b_inequality(d, e),
                 all(fosd_compare(sub, full).strict for full, sub in laws.values()))
    full = scn.mechanisms["serial-dictatorship"]
    block = ex_ante_block(full, prior, [s1, s2, A, B])
    report.claim("some deviation of (A, B, 1, 2) blocks ex ante iff the inequality holds",
                 appendix_b_inequality(d, e), block is not None)
    if block is not None:
        check_block_witness(full, prior, block)
        report.witnesses.append(("(A, B, 1, 2) ex ante", block))
