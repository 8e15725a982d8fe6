"""Schools sharing one test ranking: does the top half want to match early?

Computes every rank law by enumerating all 256 joint preference profiles and
compares it with the closed forms.  With this type table the full-market
school law puts delta/4 (not delta/2) on the third choice, and no deviation
by A, B, 1, 2 blocks.
"""

from fractions import Fraction as F

from matchaudit.cases import (appendix_b_closed_forms, appendix_b_inequality,
                              appendix_b_laws)

for d, e in [(F(1, 5), F(3, 20)), (F(3, 10), F(1, 4)), (F(1, 10), F(1, 12))]:
    print(f"delta={d} epsilon={e}  inequality holds: {appendix_b_inequality(d, e)}")
    closed = appendix_b_closed_forms(d, e)
    for a, (full, sub) in appendix_b_laws(d, e).items():
        kind = "school" if a.side == "w" else "student"
        show = lambda xs: "(" + ", ".join(map(str, xs)) + ")"
        print(f"  {a}: all in {show(full)} [closed form {show(closed[kind + '_full'])}]"
              f"  sub-market {show(sub)}")
