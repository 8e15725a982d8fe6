"""A pair that gains in expected utility but not in stochastic dominance.

m2 and w2 are each other's second choice.  The stable match gives them a
first, second or third choice; pairing off gives a sure second choice.  With
utilities (1, 3/4, 0) pairing off is worth more, but the two rank laws are
incomparable, so the ordinal notion does not count it as a block.
"""

from fractions import Fraction

from matchaudit.cases import appendix_a_eu_block

print(appendix_a_eu_block(Fraction(1, 2)).to_text())
