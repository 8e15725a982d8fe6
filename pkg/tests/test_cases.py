from fractions import Fraction as F

import pytest

from matchaudit.cases import (CaseId, appendix_a, appendix_a_eu_block, appendix_b,
                              appendix_b_closed_forms, appendix_b_inequality, appendix_b_laws,
                              appendix_b_prior, build_case, example1, example3,
                              serial_dictatorship, run_case)
from matchaudit.jsonio import case_report_to_json, dumps
from matchaudit.market import Market, PreferenceProfile, is_stable_matching, man, woman
from matchaudit.mechanisms import stable_set
from matchaudit.stability import fosd_compare


@pytest.mark.parametrize("kind,params", [
    ("example3", (("p", F(1, 4)),)), ("example3", (("p", F(0)),)),
    ("appendix-a", (("p", F(1)),)), ("appendix-b", (("delta", F(1)), ("epsilon", F(1, 2)))),
    ("appendix-b", (("delta", F(1, 2)), ("epsilon", F(0)))), ("nonsense", ()),
])
def test_parameter_ranges(kind, params):
    with pytest.raises(ValueError):
        CaseId(kind, params)


def test_built_scenarios():
    scn = build_case(example3(F(1, 8)))
    assert len(scn.prior) == 9 and set(scn.mechanisms) == {"random-stable", "da-men",
                                                           "da-women"}
    assert len(build_case(appendix_b(F(1, 5), F(3, 20))).prior) == 256
    assert len(build_case(example1()).prior) == 1


def test_unique_stable_profile_case():
    report = run_case(example1())
    assert report.passed, report.to_text()


@pytest.mark.parametrize("p", [F(1, 10), F(1, 8), F(1, 5), F(6, 25)])
def test_three_type_case(p):
    report = run_case(example3(p))
    assert report.passed, report.to_text()
    law = report.find("random-stable: laws of m1 and w1").computed[0]
    assert law == (1 - 3 * p + 4 * p * p, p, 2 * p - 4 * p * p, 0)


@pytest.mark.parametrize("p", [F(1, 4), F(1, 2), F(2, 3)])
def test_expected_utility_case(p):
    report = run_case(appendix_a(p))
    assert report.passed, report.to_text()


def test_expected_utility_numbers():
    report = appendix_a_eu_block(F(1, 2))
    eu = report.find("expected utility (pair, stable) for m2 and w2").computed
    assert eu[0] == (F(3, 4), F(5, 8))
    assert report.find("option preferred under expected utility").computed == ["pair"]
    assert report.find("dominance between pairing off and the stable lottery"
                           ).computed == "incomparable"


def test_serial_dictatorship_is_the_stable_matching():
    prior = appendix_b_prior(F(1, 5), F(3, 20))
    for p, _ in prior.support:
        assert stable_set(p) == [serial_dictatorship(p)]


def test_school_laws_by_enumeration():
    # with school order 1, 2, 3 school A gets its third student only when
    # student 1 is B-first and student 2 has type B, C, A: (1/2)(delta/2)
    for d, e in [(F(1, 5), F(3, 20)), (F(1, 10), F(1, 12)), (F(1, 2), F(1, 4))]:
        laws = appendix_b_laws(d, e)
        for school in (woman(0), woman(1)):
            full, sub = laws[school]
            assert full == (F(1, 2), F(1, 2) - d / 4, d / 4)
            assert sub == appendix_b_closed_forms(d, e)["school_sub"]


@pytest.mark.parametrize("d,e", [(F(1, 5), F(3, 20)), (F(1, 10), F(1, 12))])
def test_student_laws_match_closed_forms(d, e):
    laws = appendix_b_laws(d, e)
    closed = appendix_b_closed_forms(d, e)
    for s in (man(0), man(1)):
        assert laws[s] == (closed["student_full"], closed["student_sub"])


def test_without_flexible_types_the_schools_refuse():
    # students gain from leaving, but schools then risk their third student
    laws = appendix_b_laws(F(0), F(1, 10))
    for s in (man(0), man(1)):
        full, sub = laws[s]
        assert fosd_compare(sub, full).strict
    for school in (woman(0), woman(1)):
        full, sub = laws[school]
        assert fosd_compare(full, sub).strict
    assert run_case(appendix_b(F(0), F(1, 10))).passed


def test_inequality_helper():
    assert appendix_b_inequality(F(1, 5), F(3, 20))
    assert not appendix_b_inequality(F(1, 10), F(1, 5))
    assert 2 * F(3, 20) * (1 - F(3, 2) * F(1, 5) + F(3, 4) * F(1, 25)) == F(219, 1000)


def test_reports_serialise():
    report = run_case(example3(F(1, 8)))
    text = dumps(case_report_to_json(report))
    assert '"passed": true' in text and "11/16" in text
    assert report.to_text().splitlines()[-1] == f"  {len(report.claims)}/" \
        f"{len(report.claims)} claims pass"
