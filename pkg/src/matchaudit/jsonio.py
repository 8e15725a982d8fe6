"""JSON reading and writing for markets, priors, mechanisms and witnesses.

Agents are keyed "m1".."mN", "w1".."wK"; rankings are arrays of agent keys in
which "self" may appear anywhere.  Partners missing from a ranking are
appended in index order, after "self" when "self" is absent.  Rationals are
always "num/den" strings; floats are rejected.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .market import (MAN, SELF, WOMAN, Agent, Market, Matching, PreferenceProfile,
                     check_ranking)
from .mechanisms import (Mechanism, RandomMatching, RankDistribution, da_mechanism,
                         example2_deviation, random_stable_mechanism, table_mechanism,
                         uniform_random_full, uniform_random_mechanism)
from .priors import AgentTypeDistribution, Event, Prior, product_prior
from .stability import (AgentCertificate, BlockWitness, Deviation, DominanceVerdict,
                        InterimWitness, StabilityReport, TypeCertificate)


class InputError(ValueError):
    """Malformed or inconsistent JSON input."""


_RATIONAL = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(value) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise InputError(f"expected an exact rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise InputError(f"expected a \"num/den\" string, got {value!r}")
    m = _RATIONAL.match(value)
    if not m:
        raise InputError(f"not a rational: {value!r}")
    den = int(m.group(2) or 1)
    if den == 0:
        raise InputError(f"zero denominator in {value!r}")
    return Fraction(int(m.group(1)), den)


def rational_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def loads(text: str, source: str = "<input>"):
    try:
        return json.loads(text, parse_float=_no_float)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _no_float(token):
    raise InputError(f"floats are not accepted ({token}); write rationals as \"num/den\"")


def load_file(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return loads(text, path)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2)


# -- market-level objects ------------------------------------------------------------

def parse_agent(key, market: Market | None = None) -> Agent:
    if not isinstance(key, str):
        raise InputError(f"agent keys are strings, got {key!r}")
    try:
        agent = Agent.parse(key)
        if market is not None:
            market.check_agent(agent)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return agent


def market_to_json(market: Market) -> dict:
    return {"men": market.num_men, "women": market.num_women}


def parse_market(obj) -> Market:
    if not isinstance(obj, dict) or set(obj) != {"men", "women"}:
        raise InputError("a market is {\"men\": n, \"women\": k}")
    n, k = obj["men"], obj["women"]
    if not (isinstance(n, int) and isinstance(k, int)) or n < 0 or k < 0:
        raise InputError("market sizes must be non-negative integers")
    return Market(n, k)


def ranking_to_json(agent: Agent, ranking) -> list:
    side = agent.opposite
    return ["self" if j == SELF else str(Agent(side, j)) for j in ranking]


def parse_ranking(agent: Agent, items, market: Market) -> tuple:
    if not isinstance(items, list):
        raise InputError(f"ranking of {agent} must be an array")
    size = market.side_size(agent.opposite)
    out = []
    for item in items:
        if item == "self":
            out.append(SELF)
            continue
        other = parse_agent(item, market)
        if other.side != agent.opposite:
            raise InputError(f"{agent} ranks {other}, who is on the same side")
        out.append(other.index)
    if len(set(out)) != len(out):
        raise InputError(f"ranking of {agent} repeats an entry")
    if SELF not in out:
        out.append(SELF)
    out += [j for j in range(size) if j not in out]
    try:
        return check_ranking(tuple(out), size)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def profile_to_json(profile: PreferenceProfile) -> dict:
    market = profile.market
    return {str(a): ranking_to_json(a, profile.ranking(a)) for a in market.agents}


def _market_from_keys(keys) -> Market:
    agents = [parse_agent(k) for k in keys]
    n = sum(a.side == MAN for a in agents)
    k = sum(a.side == WOMAN for a in agents)
    market = Market(n, k)
    if set(agents) != set(market.agents):
        raise InputError("profile keys must be exactly m1..mN and w1..wK")
    return market


def parse_profile(obj, market: Market | None = None) -> PreferenceProfile:
    if not isinstance(obj, dict):
        raise InputError("a profile is an object keyed by agent")
    if market is None:
        market = _market_from_keys(obj)
    keys = {str(a) for a in market.agents}
    if set(obj) != keys:
        missing = sorted(keys - set(obj))
        extra = sorted(set(obj) - keys)
        raise InputError(f"profile keys do not match the market (missing {missing}, "
                         f"unexpected {extra})")
    men = tuple(parse_ranking(a, obj[str(a)], market) for a in market.men)
    women = tuple(parse_ranking(a, obj[str(a)], market) for a in market.women)
    return PreferenceProfile(men, women)


def matching_to_json(matching: Matching) -> dict:
    market = matching.market
    pairs = [[f"m{m + 1}", f"w{w + 1}"] for m, w in matching.pairs()]
    single = [str(a) for a in market.agents if matching.partner_index(a) == SELF]
    return {"pairs": pairs, "single": single}


def parse_matching(obj, market: Market) -> Matching:
    if not isinstance(obj, dict) or "pairs" not in obj:
        raise InputError("a matching is {\"pairs\": [[m, w], ...], \"single\": [...]}")
    pairs = []
    for pair in obj["pairs"]:
        if not isinstance(pair, list) or len(pair) != 2:
            raise InputError(f"bad pair {pair!r}")
        a, b = (parse_agent(x, market) for x in pair)
        if a.side == b.side:
            raise InputError(f"pair {pair!r} is not a man and a woman")
        m, w = (a, b) if a.side == MAN else (b, a)
        pairs.append((m.index, w.index))
    try:
        matching = Matching.from_pairs(market, pairs)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if "single" in obj:
        declared = {parse_agent(x, market) for x in obj["single"]}
        actual = {a for a in market.agents if matching.partner_index(a) == SELF}
        if declared != actual:
            raise InputError("\"single\" list disagrees with the pairs")
    return matching


def lottery_to_json(lottery: RandomMatching) -> list:
    return [{"matching": matching_to_json(mu), "probability": rational_str(q)}
            for mu, q in lottery]


def parse_lottery(obj, market: Market) -> RandomMatching:
    if not isinstance(obj, list) or not obj:
        raise InputError("a lottery is a non-empty array of {matching, probability}")
    try:
        return RandomMatching((parse_matching(e["matching"], market),
                               parse_rational(e["probability"])) for e in obj)
    except (KeyError, TypeError) as exc:
        raise InputError("lottery entries need \"matching\" and \"probability\"") from exc
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(str(exc)) from exc


# -- priors -------------------------------------------------------------------------------

def prior_to_json(prior: Prior) -> dict:
    return {"market": market_to_json(prior.market),
            "support": [{"profile": profile_to_json(p), "weight": rational_str(w)}
                        for p, w in prior.support]}


def parse_prior(obj) -> Prior:
    if not isinstance(obj, dict) or "market" not in obj:
        raise InputError("a prior needs a \"market\" and either \"support\" or \"product\"")
    market = parse_market(obj["market"])
    try:
        if "support" in obj:
            return Prior((parse_profile(e["profile"], market), parse_rational(e["weight"]))
                         for e in obj["support"])
        if "product" in obj:
            per_agent = []
            table = obj["product"]
            if set(table) != {str(a) for a in market.agents}:
                raise InputError("product prior needs a type list for every agent")
            for a in market.agents:
                types = [(parse_ranking(a, t["ranking"], market), parse_rational(t["weight"]))
                         for t in table[str(a)]]
                per_agent.append(AgentTypeDistribution(a, types))
            return product_prior(market, per_agent)
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed prior entry: missing {exc}") from exc
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    raise InputError("a prior needs either \"support\" or \"product\"")


# -- mechanisms ---------------------------------------------------------------------------

SIMPLE_KINDS = ("da-men", "da-women", "uniform-random", "uniform-random-full", "random-stable")


def parse_mechanism(obj, market: Market) -> Mechanism:
    if isinstance(obj, str):
        obj = {"kind": obj}
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InputError("a mechanism descriptor is {\"kind\": ...}")
    kind = obj["kind"]
    if kind == "da-men":
        return da_mechanism(market, MAN)
    if kind == "da-women":
        return da_mechanism(market, WOMAN)
    if kind == "uniform-random":
        return uniform_random_mechanism(market)
    if kind == "uniform-random-full":
        return uniform_random_full(market)
    if kind == "random-stable":
        return random_stable_mechanism(market)
    if kind == "table":
        default = parse_mechanism(obj.get("default", "random-stable"), market)
        entries = {}
        for e in obj.get("entries", []):
            p = parse_profile(e["profile"], market)
            if p in entries:
                raise InputError("table lists a profile twice")
            entries[p] = parse_lottery(e["lottery"], market)
        return table_mechanism(entries, default)
    if kind == "example2-deviation":
        base = parse_mechanism(obj.get("base", "random-stable"), market)
        return example2_deviation(base, parse_profile(obj["profile"], market))
    raise InputError(f"unknown mechanism kind {kind!r}")


def mechanism_to_json(mech: Mechanism) -> dict:
    if mech.kind in SIMPLE_KINDS:
        return {"kind": mech.kind}
    if mech.kind == "table":
        return {"kind": "table",
                "entries": [{"profile": profile_to_json(p), "lottery": lottery_to_json(q)}
                            for p, q in mech.params["entries"].items()],
                "default": mechanism_to_json(mech.params["default"])}
    if mech.kind == "example2-deviation":
        return {"kind": mech.kind, "base": mechanism_to_json(mech.params["base"]),
                "profile": profile_to_json(mech.params["base_profile"])}
    raise InputError(f"mechanism {mech.kind!r} has no JSON form")


# -- witnesses and reports ----------------------------------------------------------------

def _dist_json(d: RankDistribution) -> list:
    return [rational_str(m) for m in d.masses]


def deviation_to_json(dev: Deviation) -> dict:
    return {"fallback": dev.fallback,
            "entries": [{"profile": profile_to_json(p), "lottery": lottery_to_json(q)}
                        for p, q in dev.entries.items()]}


def parse_deviation(obj, market: Market) -> Deviation:
    entries = {}
    for e in obj["entries"]:
        entries[parse_profile(e["profile"], market)] = parse_lottery(e["lottery"], market)
    return Deviation(entries, obj.get("fallback"))


def witness_to_json(w) -> dict:
    if isinstance(w, BlockWitness):
        return {
            "type": "block",
            "coalition": sorted(str(a) for a in sorted(w.coalition)),
            "deviation": deviation_to_json(w.deviation),
            "agents": {str(a): {"before": _dist_json(c.before), "after": _dist_json(c.after),
                                "relation": c.verdict.relation,
                                "thresholds": list(c.verdict.thresholds)}
                       for a, c in sorted(w.per_agent.items())},
            "epsilon": None if w.epsilon is None else rational_str(w.epsilon),
            "slacks": {str(a): [rational_str(g) for g in gaps]
                       for a, gaps in sorted(w.slacks.items())},
        }
    if isinstance(w, InterimWitness):
        return {
            "type": "interim",
            "coalition": [str(a) for a in sorted(w.coalition)],
            "type_sets": {str(a): sorted(ranking_to_json(a, r) for r in sorted(ts))
                          for a, ts in sorted(w.type_sets.items())},
            "deviation": deviation_to_json(w.deviation),
            "types": [{"agent": str(c.agent), "ranking": ranking_to_json(c.agent, c.ranking),
                       "event_mass": rational_str(c.mass),
                       "before": _dist_json(c.before), "after": _dist_json(c.after),
                       "relation": c.verdict.relation,
                       "thresholds": list(c.verdict.thresholds)} for c in w.per_type],
            "epsilon": None if w.epsilon is None else rational_str(w.epsilon),
            "slacks": [{"agent": str(a), "ranking": ranking_to_json(a, r),
                        "gaps": [rational_str(g) for g in gaps]}
                       for (a, r), gaps in w.slacks.items()],
        }
    raise TypeError(f"no JSON form for {type(w).__name__}")


def _verdict(obj) -> DominanceVerdict:
    return DominanceVerdict(obj["relation"], tuple(obj["thresholds"]))


def _dist(agent, items) -> RankDistribution:
    return RankDistribution(agent, tuple(parse_rational(v) for v in items))


def parse_witness(obj, market: Market):
    kind = obj.get("type")
    deviation = parse_deviation(obj["deviation"], market)
    coalition = frozenset(parse_agent(a, market) for a in obj["coalition"])
    eps = None if obj.get("epsilon") is None else parse_rational(obj["epsilon"])
    if kind == "block":
        per_agent = {}
        for key, c in obj["agents"].items():
            a = parse_agent(key, market)
            per_agent[a] = AgentCertificate(_dist(a, c["before"]), _dist(a, c["after"]),
                                            _verdict(c))
        slacks = {parse_agent(k, market): tuple(parse_rational(g) for g in gaps)
                  for k, gaps in obj.get("slacks", {}).items()}
        return BlockWitness(coalition, deviation, per_agent, eps, slacks)
    if kind == "interim":
        type_sets = {}
        for key, rankings in obj["type_sets"].items():
            a = parse_agent(key, market)
            type_sets[a] = frozenset(parse_ranking(a, r, market) for r in rankings)
        per_type = []
        for c in obj["types"]:
            a = parse_agent(c["agent"], market)
            t = parse_ranking(a, c["ranking"], market)
            others = {b: s for b, s in type_sets.items() if b != a}
            per_type.append(TypeCertificate(
                a, t, Event({a: [t], **others}), parse_rational(c["event_mass"]),
                _dist(a, c["before"]), _dist(a, c["after"]), _verdict(c)))
        slacks = {}
        for s in obj.get("slacks", []):
            a = parse_agent(s["agent"], market)
            slacks[(a, parse_ranking(a, s["ranking"], market))] = tuple(
                parse_rational(g) for g in s["gaps"])
        return InterimWitness(coalition, type_sets, deviation, per_type, eps, slacks)
    raise InputError(f"unknown witness type {kind!r}")


def report_to_json(report: StabilityReport, notion: str, scope: str) -> dict:
    if report.witness is not None:
        verdict = "blocked"
    elif report.exhaustive:
        verdict = "stable"
    else:
        verdict = "inconclusive"
    return {"notion": notion, "scope": scope, "verdict": verdict,
            "coalitions_checked": report.coalitions_checked,
            "lps_solved": report.lps_solved, "exhaustive": report.exhaustive,
            "witness": None if report.witness is None else witness_to_json(report.witness)}


def value_to_json(v):
    """Generic encoder for claim values."""
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, Fraction):
        return rational_str(v)
    if isinstance(v, Agent):
        return str(v)
    if isinstance(v, frozenset):
        return [value_to_json(x) for x in sorted(v)]
    if isinstance(v, (tuple, list)):
        return [value_to_json(x) for x in v]
    if isinstance(v, dict):
        return {str(k): value_to_json(x) for k, x in v.items()}
    if isinstance(v, (BlockWitness, InterimWitness)):
        return witness_to_json(v)
    return str(v)


def case_report_to_json(report) -> dict:
    return {
        "case": report.case.kind,
        "params": {k: value_to_json(v) for k, v in report.case.params},
        "passed": report.passed,
        "claims": [{"description": c.description, "expected": value_to_json(c.expected),
                    "computed": value_to_json(c.computed), "pass": c.passed}
                   for c in report.claims],
        "witnesses": [{"label": label, "witness": witness_to_json(w)}
                      for label, w in report.witnesses],
    }
