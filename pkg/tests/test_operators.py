import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergman.disk import mobius
from bergman.errors import FeasibilityError, QuadratureError
from bergman.operators import (
    TruncatedOperator,
    adjoint,
    apply,
    conjugate,
    cutoff,
    hankel_gram,
    hilbert_schmidt_norm,
    identity,
    mobius_unitary,
    operator_norm,
    product,
    read_matrix_csv,
    singular_values,
    toeplitz,
    toeplitz_expression,
    write_matrix_csv,
)
from bergman.quadrature import build_rule
from bergman.space import BergmanFunction
from bergman.symbols import (
    IndicatorAnnulus,
    IndicatorDisk,
    Monomial,
    Pointwise,
    Polynomial,
    Samples,
    SumOfProducts,
)

from conftest import disk_points


def test_toeplitz_examples():
    n = np.arange(65)
    T = toeplitz(Monomial(1, 1), 64).entries
    assert np.allclose(np.diag(T), (n + 1) / (n + 2), atol=1e-12)
    assert np.abs(T - np.diag(np.diag(T))).max() == 0
    Tb = toeplitz(Monomial(0, 1), 64).entries
    assert np.allclose(np.diag(Tb, 1), np.sqrt((n[:-1] + 1) / (n[:-1] + 2)), atol=1e-12)
    assert np.allclose(toeplitz(Monomial(0, 0), 10).entries, np.eye(11))
    assert np.allclose(np.diag(toeplitz(IndicatorDisk(0.5), 10).entries), 0.25 ** (np.arange(11) + 1))


def test_toeplitz_closed_form_matches_quadrature():
    u = Polynomial({(2, 1): 1.0, (0, 3): 0.5j, (1, 1): -2.0})
    closed = toeplitz(u, 20).entries
    quad = toeplitz(u, 20, rule=build_rule(40, 64)).entries
    assert np.abs(closed - quad).max() < 1e-13
    # non-tensor rule path: a pulled-back rule through the dense basis matrix
    from bergman.quadrature import mobius_pullback

    dense = toeplitz(Pointwise(u, u.bound), 12, rule=mobius_pullback(build_rule(96, 128), 0.3)).entries
    assert np.abs(dense - closed[:13, :13]).max() < 1e-10


def test_toeplitz_rejects_weak_rule():
    with pytest.raises(QuadratureError):
        toeplitz(Monomial(3, 0), 20, rule=build_rule(4, 8))


def test_pointwise_and_samples_agree():
    f = lambda w: np.exp(-np.abs(w) ** 2) * np.real(w)  # noqa: E731
    rule = build_rule(60, 100)
    A = toeplitz(Pointwise(f, 1.0), 24, rule=rule).entries
    B = toeplitz(Samples(f(rule.nodes), rule), 24).entries
    assert np.abs(A - B).max() < 1e-14
    assert np.abs(A - A.conj().T).max() < 1e-14


def test_hankel_gram_examples():
    n = np.arange(65)
    G = hankel_gram(Monomial(0, 1), 64).entries
    assert np.allclose(np.diag(G)[:49], 1 / ((n[:49] + 1) * (n[:49] + 2)), atol=1e-10)
    assert np.abs(G - np.diag(np.diag(G))).max() < 1e-14
    # analytic symbols have zero Hankel
    assert np.abs(hankel_gram(Monomial(2, 0), 32).entries).max() < 1e-14


def test_hankel_gram_psd_for_indicator():
    G = hankel_gram(IndicatorAnnulus(0.3, 0.7), 48).entries
    assert np.linalg.eigvalsh(G).min() > -1e-12


def test_product_margin_matches_large_truncation():
    A = toeplitz(Monomial(0, 1), 30)
    B = toeplitz(Monomial(1, 0), 30)
    P = product(A, B).entries
    big = (toeplitz(Monomial(0, 1), 60).entries @ toeplitz(Monomial(1, 0), 60).entries)[:31, :31]
    assert np.abs(P - big).max() < 1e-15
    naive = A.entries @ B.entries
    assert np.abs(naive - P).max() > 1e-3  # the block-edge defect that the margin removes


def test_truncated_operator_algebra():
    A = toeplitz(Monomial(1, 0), 8)
    B = identity(8)
    assert np.allclose((A + B).entries, A.entries + np.eye(9))
    assert np.allclose((2 * A - B).entries, 2 * A.entries - np.eye(9))
    assert np.allclose(A.H.entries, A.entries.conj().T)
    assert A.at_degree(16).degree == 16
    assert A.at_degree(4).degree == 4
    plain = TruncatedOperator(np.eye(3))
    assert plain.at_degree(1).degree == 1
    with pytest.raises(FeasibilityError):
        plain.at_degree(5)
    with pytest.raises(ValueError):
        TruncatedOperator(np.ones((2, 3)))


def test_apply_and_norms():
    A = toeplitz(Monomial(1, 0), 4)
    f = apply(A, BergmanFunction.basis(0, 4))
    assert np.allclose(f.coeffs, [0, np.sqrt(0.5), 0, 0, 0])
    with pytest.raises(ValueError):
        apply(A, BergmanFunction.basis(0, 3))
    assert abs(operator_norm(identity(5)) - 1) < 1e-15
    assert abs(hilbert_schmidt_norm(identity(3)) - 2) < 1e-15
    assert np.all(np.diff(singular_values(A)) <= 0)


def test_mobius_unitary_column0_and_involution():
    U = mobius_unitary(0.5, 128)
    n = np.arange(129)
    assert np.abs(U.entries[:, 0] + 0.75 * np.sqrt(n + 1) * 0.5**n).max() < 1e-10
    UU = product(U, U, degree=128).leading(64)
    assert np.abs(UU - np.eye(64)).max() < 1e-8


def test_mobius_unitary_quadrature_method_agrees():
    a = mobius_unitary(0.3 + 0.2j, 24).entries
    b = mobius_unitary(0.3 + 0.2j, 24, method="quadrature").entries
    assert np.abs(a - b).max() < 1e-10
    with pytest.raises(ValueError):
        mobius_unitary(0.3, 24, method="bogus")


def test_mobius_unitary_infeasible():
    with pytest.raises(FeasibilityError):
        mobius_unitary(0.99, 64)


def test_unitary_acts_by_composition():
    z = 0.35 - 0.2j
    U = mobius_unitary(z, 160)
    f = BergmanFunction.basis(2, 160)
    g = apply(U, f)
    from bergman.disk import mobius_derivative

    for w in (0.0, 0.2 + 0.1j, -0.3j):
        assert abs(g(w) - f(mobius(z, w)) * mobius_derivative(z, w)) < 1e-10


def test_conjugation_of_toeplitz():
    C = conjugate(toeplitz(Monomial(0, 1), 128), 0.4).leading(64)
    ref = toeplitz(Monomial(0, 1).compose(0.4), 128).leading(64)
    assert np.abs(C - ref).max() < 1e-6


def test_cutoff():
    S = identity(10)
    C = cutoff(S, 0.5)
    assert np.allclose(np.diag(C.entries), 0.25 ** (np.arange(11) + 1))
    with pytest.raises(ValueError):
        cutoff(S, 1.0)
    assert cutoff(S, 0.5).at_degree(20).degree == 20


def test_matrix_csv_roundtrip(tmp_path):
    A = toeplitz(Polynomial({(1, 0): 1 + 2j, (0, 2): 0.5}), 6)
    path = tmp_path / "m.csv"
    write_matrix_csv(A, path, comment="test")
    assert path.read_text().startswith("# test\nn,m,re,im\n")
    assert np.array_equal(read_matrix_csv(path).entries, A.entries)


def test_expression_builder_grows():
    e = SumOfProducts.single(Monomial(0, 1), Monomial(1, 0)) + SumOfProducts.single(Monomial(1, 1), coef=-1)
    S = toeplitz_expression(e, 16)
    # T_{conj w} T_w - T_{|w|^2} = -H*H of w... for analytic w the Hankel vanishes
    assert np.abs(S.entries).max() < 1e-14
    assert S.at_degree(40).degree == 40
    with pytest.raises(ValueError):
        toeplitz_expression(None, 4)


@settings(max_examples=25, deadline=None)
@given(disk_points(0.6), st.integers(0, 3), st.integers(0, 3))
def test_adjoint_commutes_with_conjugation(z, a, b):
    S = toeplitz(Monomial(a, b), 48)
    lhs = adjoint(conjugate(S, z)).leading(24)
    rhs = conjugate(adjoint(S), z).leading(24)
    assert np.abs(lhs - rhs).max() < 1e-10


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.0, 0.9))
def test_hankel_gram_is_psd(r, r1):
    u = IndicatorAnnulus(min(r1, r * 0.9), r)
    G = hankel_gram(u, 32).entries
    assert np.linalg.eigvalsh(G).min() > -1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 4), st.integers(0, 4))
def test_toeplitz_adjoint_is_conjugate_symbol(a, b):
    T = toeplitz(Monomial(a, b), 20).entries
    Tc = toeplitz(Monomial(b, a), 20).entries
    assert np.abs(T.conj().T - Tc).max() < 1e-15
