"""Two uncertain agents who do better by committing to each other early.

m1 and w1 usually rank each other first.  Waiting for the stable match gets
them together less often than simply pairing off before types are known.
"""

import sys
from fractions import Fraction

from matchaudit import ex_ante_pairwise_stable, random_stable_mechanism
from matchaudit.cases import example3_prior

p = Fraction(sys.argv[1]) if len(sys.argv) > 1 else Fraction(1, 8)
report = ex_ante_pairwise_stable(random_stable_mechanism(), example3_prior(p))
w = report.witness
print(f"p = {p}: blocked by {sorted(map(str, w.coalition))}")
for a, c in sorted(w.per_agent.items()):
    print(f"  {a}: stable {c.before}  pair off {c.after}  (better at ranks {c.verdict.thresholds})")
