import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ifn
from ifba.convergence import (
    alternating,
    builtin_families,
    constant,
    default_horizon,
    from_csv,
    from_elements,
    fuzzy_cauchy,
    fuzzy_converges,
    limit_formulation_check,
    partial_sums,
    perturbation,
    pointwise_product,
    powers,
    product_convergence_check,
    product_suite,
)
from ifba.errors import DomainError, StructuralError


def test_harmonic_threshold(scalar):
    a = scalar.algebra
    v = fuzzy_converges(scalar, perturbation(a.zero(), a.unit(), 1000), a.zero(), 0.1, 1.0)
    assert v.converged and v.n0 == 10
    # the trace brackets n0
    assert {n for n, _, _ in v.trace} >= {9, 10}


def test_constant_sequence_has_n0_one(mat2):
    x = mat2.algebra.element([[1, 2], [3, 4]])
    assert fuzzy_converges(mat2, constant(x, 50), x, 0.01, 0.5).n0 == 1


def test_alternating_never_settles(scalar):
    a = scalar.algebra
    seq = alternating(a.unit(), 1000)
    v = fuzzy_converges(scalar, seq, a.zero(), 0.4, 1.0)
    assert v.status == "not_within_horizon" and v.n0 is None
    assert not fuzzy_cauchy(scalar, seq, 0.4, 1.0).converged
    lc = limit_formulation_check(scalar, seq, a.zero(), [1.0])
    assert not lc.converges and lc.consistent


def test_partial_sums_are_cauchy(scalar):
    a = scalar.algebra
    v = fuzzy_cauchy(scalar, partial_sums(a.element(0.5), 1000), 0.1, 1.0)
    assert v.converged and v.n0 == 4 and v.p_max == 16


def test_limit_check_agrees_on_convergent(mat2):
    alg = mat2.algebra
    q = alg.element([[0.3, 0.1], [0.0, 0.2]])
    lc = limit_formulation_check(mat2, powers(q, 1000), alg.zero(), [0.1, 1.0, 10.0])
    assert lc.converges and lc.consistent
    assert len(lc.per_t) == 3


def test_domain_checks(scalar):
    a = scalar.algebra
    seq = constant(a.unit(), 10)
    with pytest.raises(DomainError):
        fuzzy_converges(scalar, seq, a.unit(), 1.0, 1.0)
    with pytest.raises(DomainError):
        fuzzy_converges(scalar, seq, a.unit(), 0.5, 0.0)
    with pytest.raises(DomainError):
        fuzzy_cauchy(scalar, seq, 0.5, 1.0, p_max=10)
    with pytest.raises(DomainError):
        limit_formulation_check(scalar, seq, a.unit(), [])
    with pytest.raises(DomainError):
        constant(a.unit(), 0)


def test_model_mismatch(scalar, mat2):
    seq = constant(mat2.algebra.unit(), 10)
    with pytest.raises(StructuralError):
        fuzzy_converges(scalar, seq, scalar.algebra.unit(), 0.5, 1.0)


def test_overflowing_sequence_is_not_convergent(scalar):
    a = scalar.algebra
    v = fuzzy_converges(scalar, powers(a.element(10.0), 400), a.zero(), 0.5, 1.0)
    assert not v.converged


def test_product_examples(scalar, mat2):
    a = scalar.algebra
    sx = perturbation(a.unit(), a.unit(), 1000)
    sy = perturbation(a.element(2.0), a.element(-1.0), 1000)
    rep = product_convergence_check(scalar, sx, a.unit(), sy, a.element(2.0), 0.1, 1.0)
    assert rep.both_converged and rep.product_verdict.converged and not rep.violation

    m = mat2.algebra
    A = m.element([[1.0, 2.0], [0.0, -1.0]])
    B = m.element([[0.0, 1.0], [1.0, 0.5]])
    rep = product_convergence_check(mat2, perturbation(m.unit(), A, 1000), m.unit(), constant(B, 1000), B, 0.1, 1.0)
    assert rep.product_verdict.converged


def test_product_requires_unital():
    model = ifn("nullprod:m=2")
    a = model.algebra
    with pytest.raises(DomainError):
        product_convergence_check(model, constant(a.zero(), 5), a.zero(), constant(a.zero(), 5), a.zero(), 0.5, 1.0)


@pytest.mark.parametrize("spec", ["scalar", "matrix:n=2", "matrix:n=4", "series:d=8"])
def test_product_suite_has_no_violations(spec):
    rows = product_suite(ifn(spec), seed=3)
    assert not [r for r in rows if r[2].violation]


@pytest.mark.parametrize("spec", ["scalar", "matrix:n=3", "series:d=4", "nullprod:m=3"])
def test_convergent_families_are_cauchy(spec):
    model = ifn(spec)
    for name, seq, lim in builtin_families(model.algebra, np.random.default_rng(0), 600):
        v = fuzzy_converges(model, seq, lim, 0.1, 1.0)
        if v.converged:
            assert fuzzy_cauchy(model, seq, 0.1, 1.0, 16).converged, name


def test_default_horizons():
    assert default_horizon(ifn("matrix:n=2").algebra) == 1000
    assert default_horizon(ifn("series:d=2").algebra) == 10_000


def test_sequence_indexing_and_csv(tmp_path, scalar):
    p = tmp_path / "s.csv"
    p.write_text("\n".join(str(1.0 / n) for n in range(1, 51)))
    seq = from_csv(scalar.algebra, p)
    assert len(seq) == 50 and seq[2].tolist() == 0.5
    with pytest.raises(IndexError):
        seq[0]
    assert seq.to_dict()["rule"] == "csv"


def test_pointwise_product(scalar):
    a = scalar.algebra
    s = pointwise_product(from_elements([a.element(2.0), a.element(3.0)]), from_elements([a.element(5.0), a.element(7.0)]))
    assert s.stack.tolist() == [10.0, 21.0]


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 0.9), st.floats(0.01, 0.9), st.floats(0.1, 10))
def test_larger_radius_never_needs_more_terms(r1, r2, t):
    model = ifn("scalar")
    a = model.algebra
    seq = perturbation(a.zero(), a.element(3.0), 2000)
    lo, hi = sorted((r1, r2))
    v_lo = fuzzy_converges(model, seq, a.zero(), lo, t)
    v_hi = fuzzy_converges(model, seq, a.zero(), hi, t)
    if v_lo.converged:
        assert v_hi.converged and v_hi.n0 <= v_lo.n0


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 0.95), st.floats(0.05, 20))
def test_verdict_matches_crisp_criterion(r, t):
    model = ifn("scalar")
    a = model.algebra
    seq = perturbation(a.zero(), a.unit(), 3000)
    v = fuzzy_converges(model, seq, a.zero(), r, t)
    rho = t * r / (1 - r)
    crisp = [n for n in range(1, 3001) if not (1.0 / n < rho)]
    expected = crisp[-1] + 1 if crisp else 1
    tie = any(abs(1.0 / n - rho) <= 1e-9 * rho for n in range(1, 3001))
    if expected <= 3000 and not tie:
        assert v.n0 == expected
