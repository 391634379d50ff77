import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ifn
from ifba.algebra import direct_inverse
from ifba.errors import Diverged, DomainError, StructuralError, UnsupportedOperation
from ifba.ifnorm import BallSpec
from ifba.inversion import (
    ContinuityProbeReport,
    closed_noninvertible_check,
    continuity_pair,
    inverse_via_neumann,
    invertible_ball_probe,
    inversion_continuity_probe,
    neumann_inverse,
    resolvent_inverse,
    singular_family,
    singular_sequence_check,
)


def test_scalar_half(scalar):
    r = neumann_inverse(scalar, scalar.algebra.element(0.5), tol=1e-8)
    assert r.approx_inverse.tolist() == pytest.approx(2.0, abs=1e-8)
    assert r.terms_used == 28
    assert r.residual <= 1e-8 and r.contractive


def test_theta_gives_unit_in_one_term(mat2):
    r = neumann_inverse(mat2, mat2.algebra.zero())
    assert r.approx_inverse == mat2.algebra.unit()
    assert r.terms_used == 1 and r.residual == 0.0


def test_nilpotent_is_exact(mat2):
    x = mat2.algebra.element([[0, 0.5], [0, 0]])
    r = neumann_inverse(mat2, x)
    assert r.approx_inverse.tolist() == [[1.0, 0.5], [0.0, 1.0]]
    assert r.terms_used == 2 and r.residual <= 1e-12


@pytest.mark.parametrize("n", [3, 5, 8])
def test_strictly_upper_triangular_terminates(n, rng):
    model = ifn(f"matrix:n={n}")
    x = model.algebra.element(np.triu(rng.uniform(-3, 3, (n, n)), 1))
    r = neumann_inverse(model, x)
    assert r.terms_used <= n and r.residual <= 1e-12


@pytest.mark.parametrize("x", [-0.5, -0.1, 0.1, 0.5, 0.9])
def test_scalar_closed_form(scalar, x):
    r = neumann_inverse(scalar, scalar.algebra.element(x), tol=1e-10)
    assert r.approx_inverse.tolist() == pytest.approx(1 / (1 - x), abs=1e-10 / (1 - abs(x)))


def test_divergence_carries_trace(scalar):
    with pytest.raises(Diverged) as info:
        neumann_inverse(scalar, scalar.algebra.element(1.5))
    assert len(info.value.trace) >= 8


def test_unit_norm_rotation_diverges(mat2):
    with pytest.raises(Diverged):
        neumann_inverse(mat2, mat2.algebra.element([[0.0, -1.0], [1.0, 0.0]]))


def test_max_terms_caps_the_sum(scalar):
    r = neumann_inverse(scalar, scalar.algebra.element(0.99), tol=1e-12, max_terms=50)
    assert r.terms_used == 50 and r.residual > 1e-3


def test_domain_errors(scalar):
    x = scalar.algebra.element(0.5)
    with pytest.raises(DomainError) as info:
        neumann_inverse(scalar, x, tol=0)
    assert info.value.field == "tol"
    with pytest.raises(DomainError) as info:
        resolvent_inverse(scalar, x, 0.0)
    assert info.value.field == "lambda"
    with pytest.raises(UnsupportedOperation):
        neumann_inverse(ifn("nullprod:m=2"), ifn("nullprod:m=2").algebra.zero())


def test_fuzzy_certificate(scalar):
    a = scalar.algebra
    r = neumann_inverse(scalar, a.element(0.5), ball=BallSpec(a.zero(), 0.5, 1.0))
    assert r.fuzzy_certificate["ball_member"] is True
    # a large-t ball admits the element although the series diverges
    with pytest.raises(Diverged):
        neumann_inverse(scalar, a.element(2.0), ball=BallSpec(a.zero(), 0.9, 10.0))
    with pytest.raises(DomainError):
        neumann_inverse(scalar, a.element(0.5), ball=BallSpec(a.unit(), 0.5, 1.0))


def test_certificate_is_reported_but_not_a_gate(scalar):
    a = scalar.algebra
    r = neumann_inverse(scalar, a.element(0.5), ball=BallSpec(a.zero(), 0.1, 1.0))
    assert r.fuzzy_certificate["ball_member"] is False
    assert r.approx_inverse.tolist() == pytest.approx(2.0)


def test_inverse_via_neumann_examples(scalar, mat2):
    assert inverse_via_neumann(scalar, scalar.algebra.element(0.8)).approx_inverse.tolist() == pytest.approx(1.25, abs=1e-8)
    r = inverse_via_neumann(mat2, mat2.algebra.unit())
    assert r.terms_used == 1 and r.approx_inverse == mat2.algebra.unit()
    r = inverse_via_neumann(mat2, mat2.algebra.element([[0.9, 0], [0, 1.1]]), tol=1e-12)
    np.testing.assert_allclose(r.approx_inverse.payload, np.diag([1 / 0.9, 1 / 1.1]), atol=1e-11)
    assert r.target == "x"


def test_resolvent_examples(scalar, mat2):
    a = scalar.algebra
    assert resolvent_inverse(scalar, a.element(0.5), 2.0).approx_inverse.tolist() == pytest.approx(2 / 3, abs=1e-8)
    assert resolvent_inverse(scalar, a.zero(), 3.0).approx_inverse.tolist() == pytest.approx(1 / 3)
    r = resolvent_inverse(mat2, mat2.algebra.element([[0, 1], [0, 0]]), 1.0)
    assert r.approx_inverse.tolist() == [[1.0, 1.0], [0.0, 1.0]]


@settings(max_examples=80, deadline=None)
@given(st.floats(-0.9, 0.9), st.floats(0.5, 5.0), st.sampled_from([-1.0, 1.0]))
def test_resolvent_scalar_grid(q, mag, sign):
    model = ifn("scalar")
    lam = sign * mag
    x = q * lam
    r = resolvent_inverse(model, model.algebra.element(x), lam, tol=1e-10)
    assert r.approx_inverse.tolist() == pytest.approx(1 / (lam - x), rel=1e-8)


@pytest.mark.parametrize("spec", ["matrix:n=2", "matrix:n=4", "series:d=6"])
def test_neumann_matches_oracle(spec, rng):
    model = ifn(spec)
    alg = model.algebra
    tol = 1e-10
    for _ in range(20):
        x = alg.random(rng, -1, 1)
        x = x * (rng.uniform(0.05, 0.9) / x.norm())
        r = neumann_inverse(model, x, tol=tol)
        assert r.residual <= 10 * tol
        exact = direct_inverse(alg.unit() - x)
        assert (r.approx_inverse - exact).norm() <= 100 * tol * exact.norm()
        lam = rng.uniform(1.5, 3.0)
        rr = resolvent_inverse(model, x, lam, tol=tol)
        ex = direct_inverse(lam * alg.unit() - x)
        assert (rr.approx_inverse - ex).norm() <= 100 * tol * ex.norm()


def test_identity_probe_radius(mat2):
    rep = invertible_ball_probe(mat2, mat2.algebra.unit(), 1.0, 500, 0)
    assert rep.r_star == pytest.approx(1 / (1 + np.sqrt(2)), abs=1e-12)
    assert rep.crisp_radius == pytest.approx(0.64881, abs=1e-5)
    assert rep.fail_count == 0 and rep.crisp_guarantee and not rep.exceeds_bound


def test_scalar_probe_radius(scalar):
    rep = invertible_ball_probe(scalar, scalar.algebra.unit(), 1.0, 300, 0)
    assert rep.r_star == pytest.approx(0.5) and rep.crisp_radius == pytest.approx(0.90476, abs=1e-5)
    assert rep.fail_count == 0


def test_adversarial_radius_is_flagged(scalar):
    rep = invertible_ball_probe(scalar, scalar.algebra.unit(), 1.0, 200, 0, r=0.9)
    assert rep.exceeds_bound and rep.crisp_radius == pytest.approx(9.0)
    assert rep.fail_count > 0
    ce = rep.counterexamples[0]
    assert ce["reason"] == "segment_crossing" and abs(ce["crossing_point"]) < 1e-12


def test_probe_requires_invertible_center(mat2):
    with pytest.raises(DomainError) as info:
        invertible_ball_probe(mat2, mat2.algebra.zero(), 1.0, 10, 0)
    assert info.value.field == "x0"


def test_probe_samples_lie_in_the_ball(mat2):
    rep = invertible_ball_probe(mat2, mat2.algebra.unit(), 1.0, 50, 1, r=0.99)
    for ce in rep.counterexamples:
        assert ce["distance"] < rep.crisp_radius


def test_closed_set_check():
    for spec in ("scalar", "matrix:n=2", "matrix:n=4", "series:d=3"):
        rep = closed_noninvertible_check(ifn(spec), 30, 0)
        assert rep["fail_count"] == 0 and rep["pass_count"] == 30


def test_singular_family_examples(mat2):
    m = mat2.algebra
    limit = m.element([[1, 0], [0, 0]])
    assert singular_sequence_check([limit] * 5, limit)["holds"]
    rank_one = [m.element([[1, 1 / n], [0, 0]]) for n in range(1, 20)]
    assert singular_sequence_check(rank_one, limit)["holds"]
    excluded = [m.element([[1, 0], [0, 1 / n]]) for n in range(1, 20)]
    res = singular_sequence_check(excluded, limit)
    assert not res["generator_contract_ok"] and res["limit_noninvertible"]


def test_singular_family_generator_contract(mat2, rng):
    z, terms = singular_family(ifn("matrix:n=3"), rng, 16)
    assert singular_sequence_check(terms, z)["generator_contract_ok"]


def test_continuity_pairs(scalar):
    a = scalar.algebra
    lhs, rhs, holds = continuity_pair(scalar, a.element(1.0), a.element(1.1), 1.0)
    assert lhs.mu == pytest.approx(0.91667, abs=1e-5) and rhs.mu == pytest.approx(0.71429, abs=1e-5) and holds
    lhs, rhs, holds = continuity_pair(scalar, a.element(0.01), a.element(0.02), 1.0)
    assert lhs.mu == pytest.approx(1 / 51) and not holds
    lhs, rhs, holds = continuity_pair(scalar, a.unit(), a.unit(), 1.0)
    assert (lhs, rhs, holds) == ((1.0, 0.0), (1.0, 0.0), True)


def test_continuity_probe_report(mat2):
    rep = inversion_continuity_probe(mat2, mat2.algebra.unit(), 1.0, 300, 4)
    assert rep.holds_count + rep.fails_count == 300
    assert rep.identity_case["holds"]
    text = json.dumps(rep.to_dict())
    back = ContinuityProbeReport.from_dict(json.loads(text), mat2)
    assert back.to_dict() == rep.to_dict()


def test_continuity_probe_near_singular_records_failures(scalar):
    rep = inversion_continuity_probe(scalar, scalar.algebra.element(0.01), 1.0, 100, 0)
    assert rep.fails_count > 0 and rep.counterexamples


def test_continuity_resample_exhaustion(monkeypatch, mat2):
    import ifba.inversion as inv

    monkeypatch.setattr(inv, "is_invertible", lambda x: x == mat2.algebra.unit())
    with pytest.raises(StructuralError):
        inv.inversion_continuity_probe(mat2, mat2.algebra.unit(), 1.0, 1, 0)
