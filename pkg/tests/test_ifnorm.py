import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ifn
from ifba.errors import DomainError, StructuralError
from ifba.ifnorm import (
    AXIOM_IDS,
    BallSpec,
    IFNormModel,
    check_ifna_axioms,
    crisp_ball_radius,
    in_open_ball,
    induced_degrees,
    membership,
    replay_witness,
    targeted_counterexample_search,
)
from ifba.triangular import TriangularNorm

pos = st.floats(1e-6, 1e6, allow_nan=False)
nonneg = st.floats(0, 1e6, allow_nan=False)


def test_membership_closed_form(scalar, mat2):
    assert membership(scalar, scalar.algebra.element(1.0), 1.0) == (0.5, 0.5)
    mu, nu = membership(mat2, mat2.algebra.unit(), 1.0)
    assert mu == pytest.approx(1 / (1 + np.sqrt(2)))
    assert membership(mat2, mat2.algebra.zero(), 0.3) == (1.0, 0.0)


def test_membership_errors(scalar, mat2):
    with pytest.raises(DomainError) as info:
        membership(scalar, scalar.algebra.unit(), 0.0)
    assert info.value.field == "t"
    with pytest.raises(StructuralError):
        membership(scalar, mat2.algebra.unit(), 1.0)


@settings(max_examples=300, deadline=None)
@given(nonneg, pos)
def test_degrees_sum_to_one_and_stay_in_range(n, t):
    mu, nu = induced_degrees(n, t)
    assert float(mu + nu) == 1.0
    assert 0.0 <= mu <= 1.0 and 0.0 <= nu <= 1.0


@settings(max_examples=300, deadline=None)
@given(nonneg, pos, st.floats(0.01, 0.99))
def test_ball_matches_crisp_radius(n, t, r):
    # the fuzzy open ball is exactly the crisp ball of radius t r / (1 - r)
    mu, nu = induced_degrees(n, t)
    rho = t * r / (1 - r)
    if abs(n - rho) > 1e-9 * max(rho, 1.0):
        assert (mu > 1 - r and nu < r) == (n < rho)


def test_ball_helpers(scalar):
    a = scalar.algebra
    ball = BallSpec(a.zero(), 0.5, 2.0)
    assert crisp_ball_radius(ball) == pytest.approx(2.0)
    assert in_open_ball(scalar, ball, a.element(1.9))
    assert not in_open_ball(scalar, ball, a.element(2.1))
    with pytest.raises(DomainError):
        BallSpec(a.zero(), 1.0, 1.0)
    with pytest.raises(DomainError):
        BallSpec(a.zero(), 0.5, -1.0)


@pytest.fixture(scope="module")
def matrix_report():
    return check_ifna_axioms(ifn("matrix:n=2"), 10_000, 7)


def test_matrix_model_axiom_pattern(matrix_report):
    status = {rec.axiom_id: rec.status for rec in matrix_report.axioms}
    assert list(status) == list(AXIOM_IDS)
    assert {k for k, v in status.items() if v != "pass"} == {"vi", "xii"}
    assert status["vi"] == status["xii"] == "fail"


@pytest.mark.parametrize("axiom", ["vi", "xii"])
def test_stored_witness_replays(matrix_report, axiom):
    w = matrix_report[axiom].witness
    lhs, rhs, violated = replay_witness(ifn("matrix:n=2"), axiom, w)
    assert violated
    assert lhs == pytest.approx(w["lhs"], abs=1e-15) and rhs == pytest.approx(w["rhs"], abs=1e-15)


def test_known_unbalanced_pair_is_the_witness(matrix_report):
    w = matrix_report["vi"].witness
    assert w["phase"] == "targeted"
    assert w["x"] == [[10.0, 0.0], [0.0, 10.0]] and w["y"] == [[0.001, 0.0], [0.0, 0.001]]


@pytest.mark.parametrize("axiom", ["vi", "xii"])
def test_targeted_search_budget(axiom):
    w, tried = targeted_counterexample_search(ifn("matrix:n=2"), axiom, 1000, 0)
    assert w is not None and tried <= 1000


def test_targeted_search_finds_nothing_for_additive_axiom():
    w, tried = targeted_counterexample_search(ifn("matrix:n=2"), "v", 500, 0)
    assert w is None and tried == 500


def test_nullprod_multiplicative_axioms_vacuous():
    rep = check_ifna_axioms(ifn("nullprod:m=4"), 2000, 0)
    assert rep["vi"].status == rep["xii"].status == "vacuous"
    assert rep.all_passed


@pytest.mark.parametrize("spec", ["scalar", "series:d=4"])
def test_other_models_run(spec):
    rep = check_ifna_axioms(ifn(spec), 2000, 1)
    assert rep["i"].passed and rep["iv"].passed and rep["vii"].passed


def test_non_idempotent_tnorm_fails_last_axiom():
    model = IFNormModel(ifn("scalar").algebra, TriangularNorm("product"))
    rec = check_ifna_axioms(model, 200, 0)["xiv"]
    assert rec.status == "fail" and rec.witness["a"] == 0.5
    assert replay_witness(model, "xiv", rec.witness)[2]


def test_report_is_deterministic():
    a = check_ifna_axioms(ifn("matrix:n=3"), 3000, 11).to_dict()
    b = check_ifna_axioms(ifn("matrix:n=3"), 3000, 11).to_dict()
    assert a == b


def test_sample_count_validated():
    with pytest.raises(DomainError):
        check_ifna_axioms(ifn("scalar"), 0)
