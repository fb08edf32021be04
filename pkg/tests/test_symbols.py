import json

import numpy as np
import pytest

from bergman.errors import ConfigError
from bergman.operators import toeplitz
from bergman.quadrature import build_rule
from bergman.symbols import (
    ConjLacunary,
    Constant,
    IndicatorAnnulus,
    IndicatorDisk,
    Lacunary,
    Monomial,
    Polynomial,
    RadialTable,
    Samples,
    SumOfProducts,
    expression_from_json,
    poly_mul,
    symbol_from_json,
)


def test_polynomial_evaluation_and_bound():
    u = Polynomial({(1, 0): 2.0, (0, 2): -1j})
    w = 0.3 + 0.4j
    assert abs(u(w) - (2 * w - 1j * np.conj(w) ** 2)) < 1e-15
    assert u.bound == 3.0
    assert u.bandwidth == 2
    assert Monomial(2, 2).bandwidth == 0


def test_conj_and_abs2():
    u = Monomial(2, 1)
    w = np.array([0.1 + 0.2j, -0.5j])
    assert np.allclose(u.conj()(w), np.conj(u(w)))
    assert np.allclose(u.abs2()(w), np.abs(u(w)) ** 2)
    ind = IndicatorAnnulus(0.2, 0.6)
    assert np.allclose(ind.abs2()(w), np.abs(ind(w)) ** 2)


def test_lacunary_matches_monomials():
    w = np.array([0.9, 0.5j, -0.7 + 0.1j])
    direct = sum(w ** (2**n) for n in range(6))
    assert np.allclose(Lacunary(6)(w), direct, atol=1e-14)
    assert np.allclose(ConjLacunary(6)(w), np.conj(direct), atol=1e-14)
    assert Lacunary(6).bound == 6


def test_radial_values():
    assert IndicatorDisk(0.5)(0.4) == 1 and IndicatorDisk(0.5)(0.6) == 0
    a = IndicatorAnnulus(0.3, 0.6)
    assert a(0.2j) == 0 and a(0.45) == 1 and a(0.7) == 0
    t = RadialTable((0.2, 0.6), (1.0, 3.0))
    assert abs(t(0.4) - 2.0) < 1e-15
    assert t(0.1) == 1 and t(0.9) == 3
    assert t.bound == 3


def test_radial_diagonal_matches_quadrature():
    rule = build_rule(400, 8)
    for u in (IndicatorAnnulus(0.3, 0.6), RadialTable((0.1, 0.5, 0.9), (0.0, 2.0, -1.0))):
        closed = np.diag(toeplitz(u, 6).entries)
        r2 = np.abs(rule.nodes) ** 2
        for n in range(7):
            quad = (n + 1) * np.sum(rule.weights * u(rule.nodes) * r2**n)
            # piecewise symbols converge only algebraically under Gauss rules
            assert abs(closed[n] - quad) < 5e-3


def test_radial_table_linear_pieces_exact():
    u = RadialTable((0.0, 1.0), (0.0, 1.0))  # u = r
    n = np.arange(5)
    assert np.allclose(np.diag(toeplitz(u, 4).entries), 2 * (n + 1) / (2 * n + 3), atol=1e-14)


def test_poly_mul():
    p = poly_mul(Monomial(1, 0), Monomial(0, 1))
    assert p.monomials() == {(1, 1): 1.0}


@pytest.mark.parametrize(
    "desc",
    [
        {"type": "nope"},
        {"type": "monomial", "a": -1, "b": 0},
        {"type": "indicator_disk", "r": 1.5},
        {"type": "indicator_annulus", "r1": 0.6, "r2": 0.3},
        {"type": "radial_table", "r": [0.5, 0.2], "v": [1, 2]},
        {"type": "radial_table", "r": [0.5], "v": [1, 2]},
        {"type": "lacunary", "terms": 0},
        {"type": "monomial"},
        [1, 2],
    ],
)
def test_bad_symbol_json(desc):
    with pytest.raises(ConfigError):
        symbol_from_json(desc)


def test_symbol_json_roundtrip():
    doc = json.loads('{"type": "constant", "re": 2, "im": -1}')
    assert symbol_from_json(doc)(0.3) == 2 - 1j
    u = symbol_from_json({"type": "indicator_disk", "r": 0.5, "sup_bound": 2})
    assert u.bound == 2


def test_expression_json():
    doc = {
        "symbols": {"a": {"type": "monomial", "a": 1, "b": 0}, "b": {"type": "indicator_disk", "r": 0.5}},
        "sum": [{"coef": {"re": 2.0}, "product": ["a", "b"]}, {"coef": -1, "product": [{"type": "constant", "re": 1}]}],
    }
    e = expression_from_json(doc)
    assert len(e.terms) == 2 and e.terms[0].coef == 2 and e.terms[1].coef == -1
    assert len(expression_from_json({"type": "monomial", "a": 0, "b": 1}).terms) == 1
    with pytest.raises(ConfigError):
        expression_from_json({"sum": [{"product": ["zz"]}]})
    with pytest.raises(ConfigError):
        expression_from_json({"symbols": {}})
    with pytest.raises(ConfigError):
        expression_from_json({"sum": []})


def test_expression_adjoint_and_compose():
    e = SumOfProducts.single(Monomial(1, 0), IndicatorDisk(0.5), coef=2j)
    a = e.adjoint()
    assert a.terms[0].coef == -2j
    assert isinstance(a.terms[0].factors[1], Polynomial)
    c = e.compose(0.3)
    assert abs(c.terms[0].factors[0](0.0) - 0.3) < 1e-15


def test_samples_symbol():
    rule = build_rule(4, 4)
    s = Samples(np.ones(rule.nodes.size), rule)
    assert np.all(s(rule.nodes) == 1)
    with pytest.raises(ValueError):
        s(np.array([0.1]))
    with pytest.raises(ConfigError):
        Samples(np.ones(3), rule)


def test_unbounded_factor_rejected():
    from bergman.symbols import Pointwise

    with pytest.raises(ConfigError):
        SumOfProducts.single(Pointwise(lambda w: w, np.inf))


def test_constant_label():
    assert "2" in Constant(2.0).label
