"""Command-line entry point.

Exit status: 0 stable or every claim passes, 1 block found or a claim
fails, 2 usage or input error, 3 budget exhausted (verdict inconclusive).
"""

from __future__ import annotations

import argparse
import os
import sys

from . import jsonio
from .cases import CASE_KINDS, CaseId, run_case
from .jsonio import InputError, parse_rational
from .market import ResourceLimitError
from .mechanisms import rank_distribution, stable_set
from .priors import point_mass
from .stability import (StabilityReport, coalition_label, ex_ante_block,
                        ex_ante_stable_at, interim_block, interim_stable_at, make_coalition)
from .verify import check_block_witness, check_interim_witness

EXIT_OK, EXIT_BLOCKED, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
NOTIONS = ("ex-post", "interim", "ex-ante")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _parser() -> argparse.ArgumentParser:
    top = _Parser(prog="matchaudit", description="Audit random matching mechanisms for "
                  "coalitional stability under uncertainty.")
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def output(p):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--json", action="store_const", const="json", dest="format",
                       help="same as --format json")

    def audit_args(p):
        p.add_argument("--mechanism", required=True,
                       help="a built-in kind (da-men, random-stable, ...) or a JSON file")
        p.add_argument("--prior", required=True, help="prior JSON file")
        p.add_argument("--notion", choices=NOTIONS, required=True)
        p.add_argument("--max-candidate-sets", type=int, default=4096)
        p.add_argument("--expansion-rounds", type=int, default=8)
        output(p)

    p = sub.add_parser("audit", help="search every coalition (or pair) for a block")
    audit_args(p)
    p.add_argument("--scope", choices=("pairwise", "coalitions"), default="coalitions")
    p.add_argument("--max-coalition", type=int, default=None)

    p = sub.add_parser("find-block", help="search one coalition for a block")
    audit_args(p)
    p.add_argument("--coalition", required=True, help="comma-separated agents, e.g. m1,w1")

    p = sub.add_parser("reproduce", help="run a built-in scenario and check its claims")
    p.add_argument("case", choices=CASE_KINDS)
    p.add_argument("--p", dest="p")
    p.add_argument("--delta")
    p.add_argument("--epsilon")
    p.add_argument("--utilities", help="three rationals, best rank first, e.g. 1,3/4,0")
    output(p)

    p = sub.add_parser("rankdist", help="rank distribution of one agent")
    p.add_argument("--mechanism", required=True)
    p.add_argument("--prior", required=True)
    p.add_argument("--agent", required=True)
    output(p)

    p = sub.add_parser("stable-set", help="all stable matchings of a profile")
    p.add_argument("--profile", required=True, help="profile JSON file")
    output(p)
    return top


def _load_mechanism(source: str, market):
    if os.path.exists(source):
        return jsonio.parse_mechanism(jsonio.load_file(source), market)
    return jsonio.parse_mechanism(source, market)


def _load_profile(path: str):
    obj = jsonio.load_file(path)
    if isinstance(obj, dict) and "profile" in obj:
        market = jsonio.parse_market(obj["market"]) if "market" in obj else None
        return jsonio.parse_profile(obj["profile"], market)
    return jsonio.parse_profile(obj)


# -- audits ------------------------------------------------------------------------------

def _ex_post_audit(mech, prior, max_coalition, pairwise) -> StabilityReport:
    checked = lps = 0
    for p, _ in prior.support:
        rep = ex_ante_stable_at(mech, point_mass(p), max_coalition, pairwise)
        checked += rep.coalitions_checked
        lps += rep.lps_solved
        if not rep.stable:
            return StabilityReport(False, rep.witness, checked, lps)
    return StabilityReport(True, None, checked, lps)


def _verify(mech, prior, notion, witness):
    if notion == "interim":
        check_interim_witness(mech, prior, witness)
    elif notion == "ex-post":
        (profile,) = witness.deviation.entries
        check_block_witness(mech, point_mass(profile), witness)
    else:
        check_block_witness(mech, prior, witness)


def _audit(args, single: bool) -> int:
    prior = jsonio.parse_prior(jsonio.load_file(args.prior))
    mech = _load_mechanism(args.mechanism, prior.market)
    opts = {"max_candidate_sets": args.max_candidate_sets,
            "expansion_rounds": args.expansion_rounds}
    if single:
        coal = make_coalition(s.strip() for s in args.coalition.split(","))
        for a in coal:
            prior.market.check_agent(a)
        scope = coalition_label(coal)
        if args.notion == "interim":
            search = interim_block(mech, prior, coal, **opts)
            report = StabilityReport(not search.blocked, search.witness, 1,
                                     search.lps_solved, search.blocked or search.exhaustive)
        elif args.notion == "ex-ante":
            w = ex_ante_block(mech, prior, coal)
            report = StabilityReport(w is None, w, 1, 0)
        else:
            report = StabilityReport(True, None, 0, 0)
            for p, _ in prior.support:
                report.coalitions_checked += 1
                w = ex_ante_block(mech, point_mass(p), coal)
                if w is not None:
                    report = StabilityReport(False, w, report.coalitions_checked, 0)
                    break
    else:
        pairwise = args.scope == "pairwise"
        scope = args.scope
        if args.notion == "interim":
            report = interim_stable_at(mech, prior, args.max_coalition, pairwise, **opts)
        elif args.notion == "ex-ante":
            report = ex_ante_stable_at(mech, prior, args.max_coalition, pairwise)
        else:
            report = _ex_post_audit(mech, prior, args.max_coalition, pairwise)
    if report.witness is not None:
        _verify(mech, prior, args.notion, report.witness)
    out = jsonio.report_to_json(report, args.notion, scope)
    if args.format == "json":
        print(jsonio.dumps(out))
    else:
        print(_audit_text(out, report))
    if report.witness is not None:
        return EXIT_BLOCKED
    return EXIT_OK if report.exhaustive else EXIT_BUDGET


def _audit_text(out: dict, report: StabilityReport) -> str:
    lines = [f"notion {out['notion']}, scope {out['scope']}: {out['verdict']}",
             f"coalitions checked {out['coalitions_checked']}, LPs solved {out['lps_solved']}"]
    w = report.witness
    if w is not None:
        lines.append(f"blocking coalition {coalition_label(w.coalition)}")
        if hasattr(w, "per_agent"):
            for a, c in sorted(w.per_agent.items()):
                lines.append(f"  {a}: {c.before} -> {c.after}")
        else:
            for c in w.per_type:
                lines.append(f"  {c.agent} type {c.ranking}: {c.before} -> {c.after}")
        if w.epsilon is not None:
            lines.append(f"LP margin {w.epsilon}")
    elif not report.exhaustive:
        lines.append("budget exhausted before every candidate was examined")
    return "\n".join(lines)


# -- other commands ----------------------------------------------------------------------

def _reproduce(args) -> int:
    params = []
    if args.case == "example3":
        params.append(("p", parse_rational(args.p or "1/8")))
    elif args.case == "appendix-a":
        params.append(("p", parse_rational(args.p or "1/2")))
        raw = (args.utilities or "1,3/4,0").split(",")
        params.append(("utilities", tuple(parse_rational(u) for u in raw)))
    elif args.case == "appendix-b":
        params.append(("delta", parse_rational(args.delta or "1/5")))
        params.append(("epsilon", parse_rational(args.epsilon or "3/20")))
    try:
        case = CaseId(args.case, tuple(params))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    report = run_case(case)
    if args.format == "json":
        print(jsonio.dumps(jsonio.case_report_to_json(report)))
    else:
        print(report.to_text())
    return EXIT_OK if report.passed else EXIT_BLOCKED


def _rankdist(args) -> int:
    prior = jsonio.parse_prior(jsonio.load_file(args.prior))
    mech = _load_mechanism(args.mechanism, prior.market)
    agent = jsonio.parse_agent(args.agent, prior.market)
    dist = rank_distribution(mech, prior, agent)
    if args.format == "json":
        print(jsonio.dumps({"agent": str(agent),
                            "masses": [jsonio.rational_str(m) for m in dist.masses]}))
    else:
        print(f"{agent}: {dist}")
    return EXIT_OK


def _stable_set(args) -> int:
    profile = _load_profile(args.profile)
    matchings = stable_set(profile)
    if args.format == "json":
        print(jsonio.dumps([jsonio.matching_to_json(mu) for mu in matchings]))
    else:
        for mu in matchings:
            print(mu)
    return EXIT_OK


def run(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
        if args.command == "audit":
            return _audit(args, single=False)
        if args.command == "find-block":
            return _audit(args, single=True)
        if args.command == "reproduce":
            return _reproduce(args)
        if args.command == "rankdist":
            return _rankdist(args)
        return _stable_set(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())
