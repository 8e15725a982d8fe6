"""Exact rational linear programming.

A two-phase primal simplex over the rationals.  The tableau is kept as rows
of Python integers, each row carrying its own positive scale, so a pivot is
a fraction-free row combination followed by a gcd reduction.  Entering
columns use the steepest reduced cost, switching to Bland's rule during long
degenerate stretches so the highly degenerate polytopes produced by the
blocking searches cannot make it cycle.  Leaving rows use the minimum ratio
with ties broken by the smallest basic index.

Every optimal assignment is re-checked against the original constraints in
exact arithmetic before it is returned.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

log = logging.getLogger(__name__)

LE, EQ, GE = "<=", "==", ">="
_RELATIONS = (LE, EQ, GE)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

# Process-wide tallies; read by the acceptance report.
SOLVE_STATS: Counter = Counter()

Coefficients = Union[Sequence, Mapping[int, object]]


class LpError(ValueError):
    """Malformed linear program."""


class LpVerificationError(RuntimeError):
    """An optimal assignment failed the exact post-solve check."""


@dataclass(frozen=True)
class Constraint:
    coeffs: Mapping[int, Fraction]
    relation: str
    rhs: Fraction

    def activity(self, x: Sequence[Fraction]) -> Fraction:
        return sum((c * x[j] for j, c in self.coeffs.items()), Fraction(0))

    def holds(self, x: Sequence[Fraction]) -> bool:
        lhs = self.activity(x)
        if self.relation == LE:
            return lhs <= self.rhs
        if self.relation == GE:
            return lhs >= self.rhs
        return lhs == self.rhs


def _sparse(coeffs: Coefficients, num_vars: int) -> dict[int, Fraction]:
    if isinstance(coeffs, Mapping):
        items = coeffs.items()
    else:
        if len(coeffs) != num_vars:
            raise LpError(
                f"coefficient list has length {len(coeffs)}, expected {num_vars}")
        items = enumerate(coeffs)
    out = {}
    for j, c in items:
        if not 0 <= j < num_vars:
            raise LpError(f"variable index {j} out of range")
        c = Fraction(c)
        if c:
            out[j] = c
    return out


class LinearProgram:
    """maximize objective . x  subject to constraints, x >= 0.

    Coefficients may be given densely (a list of length ``num_vars``) or
    sparsely (a mapping from variable index to value).
    """

    def __init__(self, num_vars: int, objective: Coefficients = None):
        if num_vars < 0:
            raise LpError("num_vars must be non-negative")
        self.num_vars = num_vars
        self.objective = _sparse(objective if objective is not None else {}, num_vars)
        self.constraints: list[Constraint] = []

    def add(self, coeffs: Coefficients, relation: str, rhs) -> int:
        if relation not in _RELATIONS:
            raise LpError(f"unknown relation {relation!r}")
        self.constraints.append(
            Constraint(_sparse(coeffs, self.num_vars), relation, Fraction(rhs)))
        return len(self.constraints) - 1

    def objective_value(self, x: Sequence[Fraction]) -> Fraction:
        return sum((c * x[j] for j, c in self.objective.items()), Fraction(0))

    def is_feasible(self, x: Sequence[Fraction]) -> bool:
        return (len(x) == self.num_vars and all(v >= 0 for v in x)
                and all(con.holds(x) for con in self.constraints))


@dataclass
class LpOutcome:
    status: str
    optimal_value: Fraction | None = None
    assignment: list[Fraction] | None = None
    pivots: int = 0
    verified: bool = field(default=False, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _lcm(values) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def _reduce(row: list[int]) -> list[int]:
    g = math.gcd(*row)
    if g > 1:
        return [v // g for v in row]
    return row


class _Tableau:
    """Integer tableau; row i reads  sum_j T[i][j] x_j = T[i][-1]."""

    def __init__(self, rows, basis, width):
        self.rows = rows
        self.basis = basis
        self.width = width
        self.pivots = 0

    def combine(self, row: list[int], r: int, c: int) -> list[int]:
        # eliminate column c from `row` using pivot row r (pivot entry > 0)
        a = row[c]
        if not a:
            return row
        prow = self.rows[r]
        p = prow[c]
        return _reduce([p * x - a * y for x, y in zip(row, prow)])

    def pivot(self, r: int, c: int, objective_rows: list[list[int]]):
        if self.rows[r][c] < 0:
            self.rows[r] = [-v for v in self.rows[r]]
        for k in range(len(self.rows)):
            if k != r and self.rows[k][c]:
                self.rows[k] = self.combine(self.rows[k], r, c)
        for k, orow in enumerate(objective_rows):
            objective_rows[k] = self.combine(orow, r, c)
        self.basis[r] = c
        self.pivots += 1

    def ratio_row(self, c: int) -> int | None:
        best = None
        for i, row in enumerate(self.rows):
            a = row[c]
            if a <= 0:
                continue
            if best is None:
                best = i
                continue
            brow = self.rows[best]
            # compare row[-1]/a against brow[-1]/brow[c]
            lhs = row[-1] * brow[c]
            rhs = brow[-1] * a
            if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[best]):
                best = i
        return best

    def dump(self, label: str):
        if log.isEnabledFor(logging.DEBUG):
            log.debug("tableau %s, basis=%s", label, self.basis)
            for row in self.rows:
                log.debug("  %s", row)


DEGENERATE_STREAK = 50


def _run(tab: _Tableau, obj: list[list[int]], allowed: int) -> str:
    """Maximise; obj[0] holds reduced costs (negative = improving).

    Entering columns follow the steepest reduced cost; after a long run of
    degenerate pivots the choice falls back to Bland's rule until the
    objective moves again, which rules out cycling.
    """
    streak = 0
    while True:
        row0 = obj[0]
        if streak >= DEGENERATE_STREAK:
            c = next((j for j in range(allowed) if row0[j] < 0), None)
        else:
            c, best = None, 0
            for j in range(allowed):
                if row0[j] < best:
                    c, best = j, row0[j]
        if c is None:
            return OPTIMAL
        r = tab.ratio_row(c)
        if r is None:
            return UNBOUNDED
        streak = streak + 1 if tab.rows[r][-1] == 0 else 0
        tab.pivot(r, c, obj)


def solve_max(lp: LinearProgram) -> LpOutcome:
    """Solve ``lp`` exactly.  Raises LpVerificationError on a failed self-check."""
    n = lp.num_vars
    cons = lp.constraints
    # orient every row so its right-hand side is non-negative
    oriented = []
    for con in cons:
        coeffs, rel, rhs = con.coeffs, con.relation, con.rhs
        if rhs < 0:
            coeffs = {j: -v for j, v in coeffs.items()}
            rhs = -rhs
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
        oriented.append((coeffs, rel, rhs))

    n_slack = sum(1 for _, rel, _ in oriented if rel != EQ)
    n_art = sum(1 for _, rel, _ in oriented if rel != LE)
    width = n + n_slack + n_art
    art_start = n + n_slack
    rows, basis = [], []
    s = n
    a = art_start
    for coeffs, rel, rhs in oriented:
        scale = _lcm([v.denominator for v in coeffs.values()] + [rhs.denominator])
        row = [0] * (width + 1)
        for j, v in coeffs.items():
            row[j] = int(v * scale)
        row[-1] = int(rhs * scale)
        if rel == LE:
            row[s] = scale
            basis.append(s)
            s += 1
        elif rel == GE:
            row[s] = -scale
            s += 1
            row[a] = scale
            basis.append(a)
            a += 1
        else:
            row[a] = scale
            basis.append(a)
            a += 1
        rows.append(_reduce(row))
    tab = _Tableau(rows, basis, width)

    # phase 1: maximise -(sum of artificials)
    if n_art:
        row0 = [0] * (width + 1)
        for j in range(art_start, width):
            row0[j] = 1
        obj = [row0]
        for i, b in enumerate(tab.basis):
            if b >= art_start:
                obj[0] = tab.combine(obj[0], i, b)
        tab.dump("phase 1 start")
        _run(tab, obj, width)
        if obj[0][-1] != 0:
            SOLVE_STATS["infeasible"] += 1
            return LpOutcome(INFEASIBLE, pivots=tab.pivots)
        # drive zero-level artificials out of the basis
        i = 0
        while i < len(tab.rows):
            if tab.basis[i] >= art_start:
                row = tab.rows[i]
                c = next((j for j in range(art_start) if row[j]), None)
                if c is None:
                    del tab.rows[i]
                    del tab.basis[i]
                    continue
                tab.pivot(i, c, obj)
            i += 1

    # phase 2 over the structural and slack columns only
    row0 = [0] * (width + 1)
    if lp.objective:
        scale = _lcm(v.denominator for v in lp.objective.values())
        for j, v in lp.objective.items():
            row0[j] = -int(v * scale)
    obj = [row0]
    for i, b in enumerate(tab.basis):
        obj[0] = tab.combine(obj[0], i, b)
    status = _run(tab, obj, art_start)
    tab.dump("final")
    if status == UNBOUNDED:
        SOLVE_STATS["unbounded"] += 1
        return LpOutcome(UNBOUNDED, pivots=tab.pivots)

    x = [Fraction(0)] * n
    for i, b in enumerate(tab.basis):
        if b < n:
            row = tab.rows[i]
            x[b] = Fraction(row[-1], row[b])
    value = lp.objective_value(x)
    if not lp.is_feasible(x):
        SOLVE_STATS["verification_failures"] += 1
        raise LpVerificationError("optimal assignment violates a constraint")
    SOLVE_STATS["optimal"] += 1
    SOLVE_STATS["verified"] += 1
    log.debug("optimal value %s after %d pivots", value, tab.pivots)
    return LpOutcome(OPTIMAL, value, x, tab.pivots, verified=True)
