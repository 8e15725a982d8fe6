"""Independent re-verification of blocking witnesses.

Nothing here reuses the search code: rank laws are recomputed by direct
summation over the prior, dominance is re-derived from cumulative sums, and
the interim type sets are re-checked clause by clause, including the
"only if" half of the consistency condition.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _gcd

from .market import is_internal
from .priors import marginal_types


class WitnessError(AssertionError):
    """A witness does not certify what it claims."""


def _strictly_better(after, before) -> bool:
    ca = cb = Fraction(0)
    strict = False
    for a, b in zip(after, before):
        ca += a
        cb += b
        if ca < cb:
            return False
        if ca > cb:
            strict = True
    return strict


def _check_deviation(mechanism, prior, witness):
    members = set(witness.coalition)
    for p, _ in prior.support:
        lottery = witness.deviation.at(p, mechanism)
        if sum(q for _, q in lottery) != 1:
            raise WitnessError("deviation lottery does not sum to one")
        for mu, _ in lottery:
            if not is_internal(mu, members):
                raise WitnessError(f"deviation matches outside the coalition: {mu}")


class _Tally:
    """Integer-scaled rank histogram: entries are prior-num x lottery-num."""

    _scaled_lotteries: dict = {}

    def __init__(self, size):
        self.size = size
        self.parts: dict = {}

    @classmethod
    def _scale(cls, lottery):
        hit = cls._scaled_lotteries.get(lottery)
        if hit is None:
            den = 1
            for _, q in lottery:
                den = den * q.denominator // _gcd(den, q.denominator)
            hit = (den, [(mu, q.numerator * (den // q.denominator)) for mu, q in lottery])
            if len(cls._scaled_lotteries) < 10**5:
                cls._scaled_lotteries[lottery] = hit
        return hit

    def add(self, weight_num, lottery, profile, agent):
        den, outs = self._scale(lottery)
        vec = self.parts.get(den)
        if vec is None:
            vec = self.parts[den] = [0] * self.size
        for mu, n in outs:
            vec[profile.rank(agent, mu.partner_index(agent)) - 1] += weight_num * n

    def masses(self, weight_den):
        out = [Fraction(0)] * self.size
        for den, vec in self.parts.items():
            for r, v in enumerate(vec):
                out[r] += Fraction(v, den * weight_den)
        return out


def _scaled_support(prior):
    den = 1
    for _, w in prior.support:
        den = den * w.denominator // _gcd(den, w.denominator)
    return den, [(p, w.numerator * (den // w.denominator)) for p, w in prior.support]


def check_block_witness(mechanism, prior, witness) -> bool:
    """Re-verify an ex-ante (or, on a point mass, ex-post) block."""
    _check_deviation(mechanism, prior, witness)
    if set(witness.per_agent) != set(witness.coalition):
        raise WitnessError("certificates do not cover the coalition")
    den, support = _scaled_support(prior)
    for a in witness.coalition:
        size = prior.market.option_count(a)
        before, after = _Tally(size), _Tally(size)
        for p, n in support:
            before.add(n, mechanism(p), p, a)
            after.add(n, witness.deviation.at(p, mechanism), p, a)
        before, after = before.masses(den), after.masses(den)
        cert = witness.per_agent[a]
        if list(cert.before.masses) != before or list(cert.after.masses) != after:
            raise WitnessError(f"stored rank laws for {a} do not recompute")
        if not _strictly_better(after, before):
            raise WitnessError(f"{a} does not strictly gain")
    for a, gaps in witness.slacks.items():
        if any(g < 0 for g in gaps) or not any(g > 0 for g in gaps):
            raise WitnessError(f"slack certificate for {a} is not a strict gain")
    return True


def check_interim_witness(mechanism, prior, witness) -> bool:
    """Re-verify every clause of an interim block, both directions of the iff.

    Type t of member a is judged on {P_a = t, P_b in T_b for every other
    member b}; a profile feeds that event for every member when all members
    are inside their sets, and only for the lone outsider otherwise.
    """
    _check_deviation(mechanism, prior, witness)
    members = sorted(witness.coalition)
    sets = witness.type_sets
    if set(sets) != set(members):
        raise WitnessError("type sets do not cover the coalition")
    stored = {(c.agent, c.ranking): c for c in witness.per_type}
    den, support = _scaled_support(prior)
    tallies: dict = {}
    seen_types = {a: set() for a in members}
    for p, n in support:
        outside = []
        for a in members:
            seen_types[a].add(p.ranking(a))
            if p.ranking(a) not in sets[a]:
                outside.append(a)
        if len(outside) > 1:
            continue
        judged = outside or members
        base = mechanism(p)
        dev = witness.deviation.at(p, mechanism)
        for a in judged:
            key = (a, p.ranking(a))
            entry = tallies.get(key)
            if entry is None:
                size = prior.market.option_count(a)
                entry = tallies[key] = [0, _Tally(size), _Tally(size)]
            entry[0] += n
            entry[1].add(n, base, p, a)
            entry[2].add(n, dev, p, a)
    for a in members:
        for t in seen_types[a]:
            entry = tallies.get((a, t))
            if entry is None:
                joins, mass = False, Fraction(0)
            else:
                mass = Fraction(entry[0], den)
                before, after = entry[1].masses(den), entry[2].masses(den)
                joins = _strictly_better(after, before)
            if t in sets[a]:
                if not joins:
                    raise WitnessError(f"{a} with a consenting type does not gain")
                cert = stored.get((a, t))
                if cert is None or cert.mass != mass:
                    raise WitnessError(f"missing or wrong certificate for {a}")
                if list(cert.before.masses) != [v / mass for v in before] or \
                        list(cert.after.masses) != [v / mass for v in after]:
                    raise WitnessError(f"stored conditional laws for {a} do not recompute")
            elif joins:
                raise WitnessError(f"{a} would also join with a type outside its set")
        if any(t not in seen_types[a] for t in sets[a]):
            raise WitnessError(f"{a} consents with a type the prior never draws")
    return True
