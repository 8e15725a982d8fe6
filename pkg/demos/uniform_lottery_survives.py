"""A uniform lottery over perfect matchings that no coalition can block ex post.

Every agent has a clear favourite here, yet once everyone is paired at random
no group can reshuffle among itself so that every member does better in the
stochastic-dominance sense.
"""

from matchaudit import ex_post_stable_at, stable_set, uniform_random_full
from matchaudit.cases import example1_profile

profile = example1_profile()
print(profile, "\n")
print("stable matchings:", *stable_set(profile))
report = ex_post_stable_at(uniform_random_full(profile.market), profile)
print(f"uniform perfect matching: stable={report.stable} after "
      f"{report.coalitions_checked} coalitions ({report.lps_solved} LPs)")
