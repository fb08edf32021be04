import numpy as np
import pytest

from bergman.berezin import berezin_operator
from bergman.disk import kernel_coefficients
from bergman.errors import ConfigError, DiskDomainError
from bergman.examples import (
    ALTERNATING,
    ClosedFormBerezin,
    alternating_unitary,
    closed_form_berezin,
    lacunary_projection,
    lacunary_series,
    little_bloch_distance,
    preset,
    preset_names,
    test_library,
)
from bergman.symbols import IndicatorDisk, Lacunary, Monomial, Polynomial

# 30-digit mpmath evaluations, frozen
LACUNARY_ORACLE = {
    0.25: 0.3977823279710719372,
    0.5: 0.52447891427436843603,
    0.81: 0.28992193147701118111,
    0.9: 0.15744770392900136218,
    0.99: 0.014886277229411951725,
    0.999: 0.0014506137855635900794,
    0.9999: 0.00014438268801238407938,
}
# sqrt((1 - t)^2 (-log(1 - t) - t) / t^2) at t = r^2
BLOCH_W_ORACLE = {0.5: 0.58235612134331373142, 0.9: 0.21635391787814892701, 0.99: 0.034796045904018846167}


def test_counterexample_matrices():
    L = lacunary_projection(20).entries
    assert np.flatnonzero(np.diag(L)).tolist() == [1, 2, 4, 8, 16]
    A = alternating_unitary(5).entries
    assert np.diag(A).real.tolist() == [1, -1, 1, -1, 1, -1]
    with pytest.raises(ConfigError):
        lacunary_projection(0)
    with pytest.raises(ConfigError):
        alternating_unitary(0)


@pytest.mark.parametrize("t", sorted(LACUNARY_ORACLE))
def test_lacunary_series_oracle(t):
    val, bound = lacunary_series(t)
    assert abs(val - LACUNARY_ORACLE[t]) <= 1e-15 * max(1.0, LACUNARY_ORACLE[t]) + bound
    assert abs(closed_form_berezin("lacunary", t) - val) == 0


def test_lacunary_series_edges():
    assert lacunary_series(0.0) == (0.0, 0.0)
    with pytest.raises(DiskDomainError):
        lacunary_series(1.0)
    with pytest.raises(DiskDomainError):
        closed_form_berezin("alternating", -0.1)
    with pytest.raises(ConfigError):
        ClosedFormBerezin("other")


def test_lacunary_decreasing_towards_boundary():
    vals = [closed_form_berezin("lacunary", t) for t in (0.9, 0.99, 0.999, 0.9999)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_closed_forms_match_matrices():
    A = alternating_unitary(256)
    L = lacunary_projection(512)
    for r in np.linspace(0.0, 0.8, 9):
        z = r * np.exp(0.7j)
        assert abs(berezin_operator(A, z) - closed_form_berezin(ALTERNATING, r * r)) < 1e-8
        assert abs(berezin_operator(L, z) - closed_form_berezin("lacunary", r * r)) < 1e-8


def test_projection_berezin_is_kernel_norm():
    L = lacunary_projection(512)
    for z in (0.3, 0.6j, -0.8):
        kz = kernel_coefficients(z, 512)
        assert abs(np.linalg.norm(L.entries @ kz) ** 2 - berezin_operator(L, z).real) < 1e-14


@pytest.mark.parametrize("r", sorted(BLOCH_W_ORACLE))
def test_little_bloch_oracle(r):
    for method in ("quadrature", "series", "hankel"):
        assert abs(little_bloch_distance(Monomial(1, 0), r, method=method) - BLOCH_W_ORACLE[r]) < 1e-8


def test_little_bloch_methods_agree_lacunary():
    f = Lacunary(8)
    for z in (0.5, 0.9j):
        q = little_bloch_distance(f, z)
        s = little_bloch_distance(f, z, method="series")
        h = little_bloch_distance(f, z, method="hankel")
        assert abs(q - s) < 1e-8 and abs(q - h) < 1e-7


def test_little_bloch_rejects_non_analytic():
    with pytest.raises(ConfigError):
        little_bloch_distance(Monomial(0, 1), 0.5)
    with pytest.raises(ConfigError):
        little_bloch_distance(IndicatorDisk(0.5), 0.5)
    with pytest.raises(ValueError):
        little_bloch_distance(Monomial(1, 0), 0.5, method="bogus")


def test_little_bloch_constant_is_zero():
    assert little_bloch_distance(Polynomial({(0, 0): 3.0}), 0.7) < 1e-15


def test_little_bloch_w_decreasing():
    vals = [little_bloch_distance(Monomial(1, 0), r) for r in (0.5, 0.7, 0.9, 0.95, 0.99)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 0.05


def test_little_bloch_lacunary_stays_away():
    vals = [little_bloch_distance(Lacunary(12), r) for r in np.linspace(0.9, 0.99, 10)]
    assert min(vals) >= 0.1


def test_library_entries():
    lib = test_library()
    names = [e.name for e in lib]
    assert names == preset_names() and len(set(names)) == len(names)
    assert {e.tag for e in lib} == {"compact", "non-compact"}
    outside = {e.name for e in lib if e.outside_hypothesis}
    assert outside == {"alternating", "lacunary"}
    for e in lib:
        S = e.operator(16)
        assert S.degree == 16 and e.provenance


def test_library_diagonals():
    n = np.arange(33)
    d = np.diag(preset("vanishing-weight").operator(32).entries)
    assert np.allclose(d, 2 / ((n + 2) * (n + 3)), atol=1e-14)
    d = np.diag(preset("hankel-wbar").operator(32).entries)
    assert np.allclose(d[:30], 1 / ((n[:30] + 1) * (n[:30] + 2)), atol=1e-14)
    d = np.diag(preset("shift-product").operator(32).entries)
    assert np.allclose(d[1:], n[1:] / (n[1:] + 1), atol=1e-14)


def test_unknown_preset():
    with pytest.raises(ConfigError):
        preset("nope")
