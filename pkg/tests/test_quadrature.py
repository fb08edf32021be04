import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergman.berezin import lemma4_integral
from bergman.disk import normalized_kernel
from bergman.quadrature import (
    adapted_rule,
    balanced_center,
    build_rule,
    build_singular_rule,
    integrate,
    mobius_pullback,
    require_exact,
    rule_for_degree,
)
from bergman.errors import QuadratureError


def test_small_rule_examples():
    rule = build_rule(8, 16)
    assert abs(integrate(lambda w: np.ones_like(w), rule) - 1) < 1e-15
    assert abs(integrate(lambda w: np.abs(w) ** 2, rule) - 0.5) < 1e-15
    assert abs(integrate(lambda w: w, rule)) < 1e-15
    assert rule.exact_degree == 15


def test_weights_positive_and_nodes_inside():
    for rule in (build_rule(5, 7), build_singular_rule(5.0, 40, 32)):
        assert np.all(rule.weights > 0)
        assert abs(rule.weights.sum() - 1) < 1e-14
    rule = build_rule(40, 64)
    assert np.all(np.abs(rule.nodes) < 1)


def test_rejects_bad_orders():
    with pytest.raises(ValueError):
        build_rule(0, 4)
    with pytest.raises(ValueError):
        build_rule(4, -1)
    with pytest.raises(ValueError):
        build_singular_rule(1.0, 10, 10)


def test_integrate_sample_mismatch():
    rule = build_rule(4, 4)
    with pytest.raises(ValueError):
        integrate(np.ones(3), rule)


def test_integrate_kernel_mass():
    rule = rule_for_degree(40, extra=40)
    assert rule.exact_degree >= 40
    assert abs(integrate(np.abs(normalized_kernel(0.5, rule.nodes)) ** 2, rule) - 1) < 1e-10


def test_singular_rule_radial_integral():
    rule = build_singular_rule(5.0, 64, 8)
    val = integrate(rule.one_minus_abs2() ** -0.6, rule)
    assert abs(val - 2.5) < 1e-6
    assert abs(integrate(np.ones(rule.nodes.size), rule) - 1) < 1e-14


def test_lemma4_origin_and_self_convergence():
    assert abs(lemma4_integral(0.0) - 2.5) < 1e-5
    a = lemma4_integral(0.0, build_singular_rule(5.0, 48, 64))
    b = lemma4_integral(0.0, build_singular_rule(5.0, 96, 128))
    assert abs(a - b) < 1e-5


def test_lemma4_frozen_value():
    # independent adaptive 2D quadrature at 50 digits gives 2.68650808909153
    assert abs(lemma4_integral(0.5) - 2.68650808909153) < 1e-9


def test_pullback_preserves_integrals():
    # the pulled-back Jacobian has a pole at 1/conj(a); near the boundary the
    # base rule must resolve it, so the order grows with |a|
    f = lambda w: np.abs(w) ** 2 + np.real(w**3)  # noqa: E731
    for a, R in ((0.3, 64), (0.8j, 64), (-0.95, 512)):
        pulled = mobius_pullback(build_rule(R, 2 * R), a)
        assert pulled.exact_degree == -1
        assert abs(integrate(f, pulled) - 0.5) < 1e-10
        assert np.allclose(pulled.one_minus_abs2(), 1 - np.abs(pulled.nodes) ** 2, atol=1e-14)


def test_balanced_center():
    assert balanced_center(0) == 0
    a = balanced_center(0.99j)
    assert abs(1 - abs(a) - 0.1) < 1e-12 and abs(a.real) < 1e-15
    assert adapted_rule(build_rule(4, 4), 0).center == 0


def test_require_exact():
    require_exact(build_rule(10, 20), 19)
    with pytest.raises(QuadratureError):
        require_exact(build_rule(10, 20), 20)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(1, 24), st.data())
def test_moment_exactness(R, M, data):
    rule = build_rule(R, M)
    d = rule.exact_degree
    a = data.draw(st.integers(0, d))
    b = data.draw(st.integers(0, d))
    expected = 1.0 / (a + 1) if a == b else 0.0
    assert abs(integrate(lambda w: w**a * np.conj(w) ** b, rule) - expected) < 1e-13


def test_order_doubling_smooth_symbols():
    fns = [lambda w: np.exp(np.real(w)), lambda w: 1 / (2 - w), lambda w: np.cos(np.abs(w) ** 2)]
    for f in fns:
        a = integrate(f, build_rule(24, 48))
        b = integrate(f, build_rule(48, 96))
        assert abs(a - b) < 1e-10
