import csv
import io
import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schurlab import probability as pr
from schurlab.identities import series_g3
from schurlab.partitions import SchurParams, is_schur_admissible
from schurlab.probability import EventConfiguration, ProbabilityModel
from schurlab.qseries import SeriesError, qs_eval_real

P31 = SchurParams(3, 1)
P52 = SchurParams(5, 2)
G3_SET = [SchurParams(3, 1), SchurParams(4, 1), SchurParams(5, 1), P52, SchurParams(7, 3)]


def euler_inverse(q, d):
    return 1 / math.prod(1 + q ** (d * n) for n in range(1, 2000))


# -- events and predicates --------------------------------------------------------------------


def test_event_prob_examples():
    assert pr.event_prob(1, 0.5) == pytest.approx(1 / 3)
    assert pr.event_prob(2, 0.5) == pytest.approx(0.2)
    assert pr.event_prob(3, 1e-9) < 1e-26
    with pytest.raises(ValueError):
        pr.event_prob(0, 0.5)
    with pytest.raises(ValueError):
        pr.event_prob(1, 1.0)


def test_truncation_index_meets_epsilon():
    for q in (0.1, 0.5, 0.9):
        for eps in (1e-3, 1e-9):
            J = pr.truncation_index(q, eps)
            assert q**J <= eps * (1 - q) * (1 + 1e-12)
            assert J == 1 or q ** (J - 1) > eps * (1 - q)


def test_model_rejects_short_J():
    with pytest.raises(ValueError, match="tail above epsilon"):
        ProbabilityModel(0.5, P31, 1e-9, J=5)
    m = ProbabilityModel(0.5, P31)
    assert m.probs()[0] == pytest.approx(1 / 3)
    assert len(m.probs()) == m.J


def test_predicate_examples():
    empty = EventConfiguration.from_indices([], 12)
    assert pr.satisfies_U(empty, P31) and pr.satisfies_V(empty, P31)
    c12 = EventConfiguration.from_indices([1, 2], 12)
    assert not pr.satisfies_U(c12, P31)
    assert pr.satisfies_V(c12, P31)
    c47 = EventConfiguration.from_indices([4, 7], 12)
    assert pr.satisfies_U(c47, P31)
    assert c47.indices() == [4, 7] and c47[4] and not c47[5] and not c47[40]


@given(st.sampled_from(G3_SET), st.lists(st.booleans(), min_size=24, max_size=24), st.integers(1, 24))
def test_irrelevant_indices_do_not_matter(p, occ, j):
    if j % p.d in (0, p.r, p.d - p.r):
        return
    flipped = list(occ)
    flipped[j - 1] = not flipped[j - 1]
    a, b = EventConfiguration(tuple(occ)), EventConfiguration(tuple(flipped))
    assert pr.satisfies_U(a, p) == pr.satisfies_U(b, p)
    assert pr.satisfies_V(a, p) == pr.satisfies_V(b, p)


@pytest.mark.parametrize("p", [P31, SchurParams(4, 1), P52], ids=str)
def test_bijection_with_schur_conditions(p):
    J = 12
    for bits in itertools.product((False, True), repeat=J):
        config = EventConfiguration(bits)
        parts = sorted(config.indices(), reverse=True)
        relevant = [x for x in parts if p.admits(x)]
        assert pr.satisfies_U(config, p) == is_schur_admissible(relevant, p)


@given(st.sampled_from(G3_SET), st.integers(0, 2**20))
@settings(max_examples=60)
def test_batch_predicates_match_scalar(p, seed):
    rng = np.random.default_rng(seed)
    E = rng.random((40, 20)) < 0.3
    U = pr.satisfies_U_batch(E, p)
    V = pr.satisfies_V_batch(E, p)
    for row, u, v in zip(E, U, V):
        config = EventConfiguration(tuple(row))
        assert u == pr.satisfies_U(config, p)
        assert v == pr.satisfies_V(config, p)


# -- exact values -----------------------------------------------------------------------------


def test_prob_U_example():
    v = pr.exact_prob_Uk(P31, 0.5, 0)
    assert v.value == pytest.approx(0.8733, abs=1e-4)
    assert v.value == pytest.approx(euler_inverse(0.5, 3), abs=1e-13)
    assert pr.prob_U(P31, 0.5) == pytest.approx(v.value, abs=1e-14)


@pytest.mark.parametrize("p", G3_SET, ids=str)
@pytest.mark.parametrize("q", [0.2, 0.6, 0.9])
def test_P_U_closed_form(p, q):
    assert pr.exact_prob_Uk(p, q, 0).value == pytest.approx(euler_inverse(q, p.d), abs=1e-12)


@pytest.mark.parametrize("p", G3_SET, ids=str)
@pytest.mark.parametrize("q", [0.3, 0.7])
@pytest.mark.parametrize("k", [1, 2, 4])
def test_h_routes_agree(p, q, k):
    a = pr.exact_prob_Uk(p, q, k, route="fqseries")
    b = pr.exact_prob_Uk(p, q, k, route="second")
    assert abs(a.value - b.value) < 1e-12 + a.tail_bound + b.tail_bound


def test_exact_prob_limits_and_errors():
    for k in range(4):
        assert pr.exact_prob_Uk(P52, 1e-6, k).value == pytest.approx(1, abs=1e-5)
    vals = [pr.exact_prob_Uk(P31, 0.8, k).value for k in range(6)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        pr.exact_prob_Uk(P31, 0.5, 0, route="fqseries")
    with pytest.raises(SeriesError, match="below double precision"):
        pr.exact_prob_Uk(P31, 0.5, 1, tol=1e-20)
    with pytest.raises(ValueError):
        pr.exact_prob_Uk(P31, 0.5, 1, route="third")


def test_exact_prob_V_by_enumeration():
    # independent route: sum over all configurations of E_1..E_J at tiny J
    q, p = 0.3, P31
    J = 30
    relevant = [j for j in range(1, J + 1) if p.admits(j)]
    total = 0.0
    for bits in itertools.product((False, True), repeat=len(relevant[:14])):
        occ = [False] * J
        weight = 1.0
        for j, b in zip(relevant, bits):
            occ[j - 1] = b
            weight *= pr.event_prob(j, q) if b else pr.complement_prob(j, q)
        if pr.satisfies_V(EventConfiguration(tuple(occ)), p):
            total += weight
    # the indices past the 14 enumerated ones occur with probability below 1e-6
    assert total == pytest.approx(pr.exact_prob_Uk(p, q, 1).value, abs=1e-6)


# -- the conditional-probability theorem ----------------------------------------------------------


def test_theorem_examples():
    rep = pr.theorem_prob_check(P31, 0.3, tol=1e-3)
    assert rep.passed
    assert rep.details["g3"] == pytest.approx(0.706, abs=1e-3)
    assert rep.details["P(F|U)"] == pytest.approx(0.706, abs=1e-3)
    assert pr.theorem_prob_check(P52, 0.4, tol=1e-6).passed
    tiny = pr.theorem_prob_check(P52, 1e-4, tol=1e-6)
    assert tiny.details["P(U|V)"] == pytest.approx(1, abs=1e-3)
    assert tiny.details["g3"] == pytest.approx(1, abs=1e-3)


@pytest.mark.parametrize("p", G3_SET, ids=str)
@pytest.mark.parametrize("q", [0.1, 0.5, 0.9])
def test_theorem_across_grid(p, q):
    assert pr.theorem_prob_check(p, q, tol=1e-9).passed


def test_theorem_catches_mutated_series():
    rep = pr.theorem_prob_check(P31, 0.5, tol=1e-9, g3_perturb=3)
    assert rep.status == "fail"


def test_recurrence_examples():
    assert pr.verify_Uk_recurrence(P31, 0.5, 6, 1e-10).passed
    assert pr.verify_Uk_recurrence(P52, 0.6, 5, 1e-10).passed
    bad = pr.verify_Uk_recurrence(P31, 0.5, 6, 1e-10, p_override={4: pr.event_prob(4, 0.5) + 1e-3})
    assert bad.status == "fail"


@pytest.mark.parametrize("p", G3_SET, ids=str)
@pytest.mark.parametrize("q", np.round(np.arange(0.1, 1.0, 0.1), 1).tolist())
def test_g3_below_one(p, q):
    v = pr.g3_value(p, q)
    assert v.value + v.tail_bound < 1
    direct = qs_eval_real(series_g3(p.r, p.d, 4000), q) if q < 0.9 else None
    if direct is not None:
        assert abs(direct.value - v.value) < direct.tail_bound + v.tail_bound + 1e-13


# -- Monte Carlo --------------------------------------------------------------------------------


def test_simulate_P_U():
    rep = pr.simulate(P31, 0.5, 100_000, seed=42)
    e = rep["P(U)"]
    assert e.target == pytest.approx(0.8733, abs=1e-4)
    assert abs(e.estimate - e.target) <= 4 * e.stderr
    assert rep.within(4)


@pytest.mark.slow
def test_simulate_conditional_at_q03():
    rep = pr.simulate(P31, 0.3, 1_000_000, seed=7, workers=4)
    e = rep["P(F|U)"]
    assert e.target == pytest.approx(0.706, abs=1e-3)
    assert abs(e.estimate - e.target) <= 4 * e.stderr


def test_simulate_tiny_q():
    rep = pr.simulate(P52, 0.01, 20_000, seed=1)
    for name in ("P(U|V)", "P(F|U)"):
        assert rep[name].estimate > 0.99
    assert rep.within(4)


def test_simulate_is_worker_independent():
    a = pr.simulate(P52, 0.6, 70_000, seed=9, workers=1)
    b = pr.simulate(P52, 0.6, 70_000, seed=9, workers=3)
    assert a == b
    assert json.dumps(a.to_json()) == json.dumps(b.to_json())
    c = pr.simulate(P52, 0.6, 70_000, seed=10)
    assert c != a


def test_simulation_report_exports():
    rep = pr.simulate(P31, 0.4, 5_000, seed=3)
    data = json.loads(json.dumps(rep.to_json()))
    assert data["schema_version"] == 1
    assert "treated as not occurring" in data["caveat"]
    assert {e["name"] for e in data["estimates"]} == {"P(U)", "P(V)", "P(U|V)", "P(F|U)"}
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert rows[0] == ["quantity", "estimate", "stderr", "target", "z"]
    assert len(rows) == 5


def test_score_z_stays_finite_when_all_hit():
    e = pr.Estimate("x", 100, 100, 0.999)
    assert e.stderr == 0 and math.isfinite(e.z)
    with pytest.raises(ValueError):
        pr.simulate(P31, 0.5, 0)
