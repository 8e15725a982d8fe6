"""Shared generators for property tests."""

import itertools
import random

from hypothesis import strategies as st

from matchaudit.market import SELF, Market, PreferenceProfile


def rankings(opposite_size: int, self_last: bool = False):
    partners = list(range(opposite_size))
    if self_last:
        return st.permutations(partners).map(lambda p: tuple(p) + (SELF,))
    return st.permutations(partners + [SELF]).map(tuple)


@st.composite
def profiles(draw, max_men=3, max_women=3, self_last=False, market=None):
    if market is None:
        market = Market(draw(st.integers(1, max_men)), draw(st.integers(1, max_women)))
    men = tuple(draw(rankings(market.num_women, self_last)) for _ in range(market.num_men))
    women = tuple(draw(rankings(market.num_men, self_last)) for _ in range(market.num_women))
    return PreferenceProfile(men, women)


def random_complete_profile(rng: random.Random, n: int = 3) -> PreferenceProfile:
    def one():
        r = list(range(n))
        rng.shuffle(r)
        return tuple(r) + (SELF,)
    return PreferenceProfile(tuple(one() for _ in range(n)), tuple(one() for _ in range(n)))


def all_rankings(opposite_size: int):
    return [tuple(p) for p in itertools.permutations(list(range(opposite_size)) + [SELF])]


# verdict lines from the acceptance checks, echoed in the terminal summary
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
