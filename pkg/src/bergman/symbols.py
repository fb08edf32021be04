"""Bounded symbols u on the disk and finite sums of Toeplitz products.

Three representations cover the supported families:

* polynomial symbols sum c_ab w^a conj(w)^b (constants, monomials, lacunary
  series and their conjugates), with closed-form Toeplitz matrices;
* radial symbols that are piecewise polynomial in r = |w| (indicators of disks
  and annuli, interpolated radial tables), with closed-form diagonal matrices;
* pointwise symbols (node samples, compositions with phi_z, arbitrary
  callables), which are only usable through a quadrature rule.
"""
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .disk import mobius
from .errors import ConfigError


class Symbol:
    """Interface shared by all symbols."""

    #: largest |a - b| among the monomial terms; 0 for radial symbols; None if unknown
    bandwidth = None

    def __call__(self, w):
        raise NotImplementedError

    @property
    def bound(self) -> float:
        """An upper bound for the essential supremum of |u|."""
        override = getattr(self, "sup_bound", None)
        return float(override) if override is not None else self._natural_bound()

    def _natural_bound(self) -> float:
        raise NotImplementedError

    def toeplitz_entries(self, degree):
        """Closed-form Toeplitz matrix on e_0..e_degree, or None when unavailable."""
        return None

    def conj(self) -> "Symbol":
        return Pointwise(lambda w, f=self: np.conj(f(w)), self.bound, f"conj({self.label})")

    def abs2(self) -> "Symbol":
        return Pointwise(lambda w, f=self: np.abs(f(w)) ** 2, self.bound ** 2, f"|{self.label}|^2")

    def compose(self, z) -> "Symbol":
        """u o phi_z."""
        z = complex(z)
        return Pointwise(lambda w, f=self: f(mobius(z, w)), self.bound, f"{self.label}∘φ({z:g})")

    @property
    def label(self) -> str:
        return type(self).__name__


# ---------------------------------------------------------------- polynomial


class PolynomialSymbol(Symbol):
    """sum over (a, b) of c_ab w^a conj(w)^b."""

    def monomials(self) -> dict:
        raise NotImplementedError

    @property
    def bandwidth(self):
        terms = self.monomials()
        return max((abs(a - b) for a, b in terms), default=0)

    @property
    def max_power(self):
        return max((max(a, b) for a, b in self.monomials()), default=0)

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        out = np.zeros(w.shape, dtype=complex)
        for (a, b), c in self.monomials().items():
            out += c * w**a * np.conj(w) ** b
        return out

    def _natural_bound(self):
        return float(sum(abs(c) for c in self.monomials().values()))

    def toeplitz_entries(self, degree):
        N = int(degree)
        out = np.zeros((N + 1, N + 1), dtype=complex)
        m = np.arange(N + 1)
        root = np.sqrt(m + 1.0)
        for (a, b), c in self.monomials().items():
            # <w^a conj(w)^b e_m, e_n> is nonzero only for n = m + a - b
            n = m + a - b
            ok = (n >= 0) & (n <= N)
            mm, nn = m[ok], n[ok]
            out[nn, mm] += c * root[mm] * root[nn] / (a + mm + 1.0)
        return out

    def conj(self):
        return Polynomial({(b, a): np.conj(c) for (a, b), c in self.monomials().items()}, self.bound)

    def abs2(self):
        return poly_mul(self, self.conj())


@dataclass(frozen=True)
class Polynomial(PolynomialSymbol):
    terms: dict
    sup_bound: float | None = None

    def monomials(self):
        return {k: complex(v) for k, v in self.terms.items() if v != 0}

    @property
    def label(self):
        return "poly(" + ", ".join(f"{c:g}·w^{a}w̄^{b}" for (a, b), c in sorted(self.terms.items())) + ")"


def poly_mul(u, v):
    terms: dict = {}
    for (a1, b1), c1 in u.monomials().items():
        for (a2, b2), c2 in v.monomials().items():
            key = (a1 + a2, b1 + b2)
            terms[key] = terms.get(key, 0) + c1 * c2
    return Polynomial(terms, u.bound * v.bound)


def poly_add(*symbols, coefs=None):
    coefs = coefs or [1.0] * len(symbols)
    terms: dict = {}
    for s, k in zip(symbols, coefs):
        for key, c in s.monomials().items():
            terms[key] = terms.get(key, 0) + k * c
    return Polynomial(terms)


@dataclass(frozen=True)
class Constant(PolynomialSymbol):
    value: complex
    sup_bound: float | None = None

    def monomials(self):
        return {(0, 0): complex(self.value)}

    @property
    def label(self):
        return f"{complex(self.value):g}"


@dataclass(frozen=True)
class Monomial(PolynomialSymbol):
    """w^a conj(w)^b."""

    a: int
    b: int
    sup_bound: float | None = None

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ConfigError("monomial exponents must be nonnegative")

    def monomials(self):
        return {(self.a, self.b): 1.0 + 0j}

    @property
    def label(self):
        return f"w^{self.a}w̄^{self.b}"


@dataclass(frozen=True)
class Lacunary(PolynomialSymbol):
    """sum_{n < terms} w^(2^n)."""

    terms: int
    sup_bound: float | None = None

    def __post_init__(self):
        if self.terms < 1:
            raise ConfigError("lacunary series needs at least one term")

    def monomials(self):
        return {(2**n, 0): 1.0 + 0j for n in range(self.terms)}

    def __call__(self, w):
        # repeated squaring: exact exponents without forming w**2048 from scratch
        p = np.asarray(w, dtype=complex).copy()
        out = np.zeros(p.shape, dtype=complex)
        for _ in range(self.terms):
            out += p
            p = p * p
        return out

    @property
    def label(self):
        return f"lacunary({self.terms})"


@dataclass(frozen=True)
class ConjLacunary(PolynomialSymbol):
    """sum_{n < terms} conj(w)^(2^n)."""

    terms: int
    sup_bound: float | None = None

    def monomials(self):
        return {(0, 2**n): 1.0 + 0j for n in range(self.terms)}

    def __call__(self, w):
        return np.conj(Lacunary(self.terms)(w))

    @property
    def label(self):
        return f"conj_lacunary({self.terms})"


# -------------------------------------------------------------------- radial


class RadialSymbol(Symbol):
    """Piecewise polynomial in r = |w| on the breakpoints 0 = r_0 < ... < r_k = 1.

    ``pieces()`` returns (breaks, coeffs) with coeffs[i, j] multiplying r**j on
    the i-th interval.
    """

    bandwidth = 0

    def pieces(self):
        raise NotImplementedError

    def __call__(self, w):
        breaks, coeffs = self.pieces()
        r = np.abs(np.asarray(w, dtype=complex))
        idx = np.clip(np.searchsorted(breaks, r, side="right") - 1, 0, len(coeffs) - 1)
        out = np.zeros(r.shape, dtype=complex)
        for j in range(coeffs.shape[1]):
            out += coeffs[idx, j] * r**j
        return out

    def _natural_bound(self):
        breaks, coeffs = self.pieces()
        best = 0.0
        for i in range(len(coeffs)):
            r = np.linspace(breaks[i], breaks[i + 1], 65)
            best = max(best, float(np.abs(np.polynomial.polynomial.polyval(r, coeffs[i])).max()))
        return best

    def toeplitz_entries(self, degree):
        return np.diag(self.radial_diagonal(degree)).astype(complex)

    def radial_diagonal(self, degree):
        """(n+1) * integral_0^1 u(sqrt(s)) s^n ds for n = 0..degree, in closed form."""
        breaks, coeffs = self.pieces()
        n = np.arange(int(degree) + 1, dtype=float)
        diag = np.zeros(n.size, dtype=complex)
        for i, c in enumerate(coeffs):
            lo, hi = breaks[i], breaks[i + 1]
            for j, cj in enumerate(c):
                if cj == 0:
                    continue
                k = 2.0 * n + 2.0 + j
                # (n+1) * int_lo^hi r^j 2 r^(2n+1) dr
                diag += cj * 2.0 * (n + 1.0) / k * (hi**k - lo**k)
        return diag

    def _with(self, coeffs):
        breaks, _ = self.pieces()
        return PiecewiseRadial(tuple(breaks), tuple(map(tuple, coeffs)))

    def conj(self):
        _, coeffs = self.pieces()
        return self._with(np.conj(coeffs))

    def abs2(self):
        breaks, coeffs = self.pieces()
        rows = [np.polynomial.polynomial.polymul(c, np.conj(c)) for c in coeffs]
        width = max(len(r) for r in rows)
        out = np.zeros((len(rows), width), dtype=complex)
        for i, r in enumerate(rows):
            out[i, : len(r)] = r
        return self._with(out)


@dataclass(frozen=True)
class PiecewiseRadial(RadialSymbol):
    breaks: tuple
    coeffs: tuple
    sup_bound: float | None = None

    def pieces(self):
        return np.asarray(self.breaks, dtype=float), np.asarray(self.coeffs, dtype=complex)


@dataclass(frozen=True)
class IndicatorDisk(RadialSymbol):
    """Indicator of the disk |w| < r."""

    r: float
    sup_bound: float | None = None

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise ConfigError("indicator radius must lie in (0, 1)")

    def pieces(self):
        return np.array([0.0, self.r, 1.0]), np.array([[1.0], [0.0]], dtype=complex)

    def radial_diagonal(self, degree):
        n = np.arange(int(degree) + 1)
        return (self.r ** (2.0 * n + 2.0)).astype(complex)

    @property
    def label(self):
        return f"1[|w|<{self.r:g}]"


@dataclass(frozen=True)
class IndicatorAnnulus(RadialSymbol):
    """Indicator of r1 < |w| < r2."""

    r1: float
    r2: float
    sup_bound: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.r1 < self.r2 <= 1.0:
            raise ConfigError("annulus radii must satisfy 0 <= r1 < r2 <= 1")

    def pieces(self):
        breaks = [0.0, self.r1, self.r2, 1.0]
        coeffs = [[0.0], [1.0], [0.0]]
        if self.r1 == 0.0:
            breaks, coeffs = breaks[1:], coeffs[1:]
        if self.r2 == 1.0:
            breaks, coeffs = breaks[:-1], coeffs[:-1]
        return np.array(breaks), np.array(coeffs, dtype=complex)

    @property
    def label(self):
        return f"1[{self.r1:g}<|w|<{self.r2:g}]"


@dataclass(frozen=True)
class RadialTable(RadialSymbol):
    """Linear interpolation in r of tabulated values, held constant beyond the table."""

    radii: tuple
    values: tuple
    sup_bound: float | None = None

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if r.ndim != 1 or r.size < 1 or r.size != len(self.values):
            raise ConfigError("radial table needs matching nonempty r and v lists")
        if np.any(np.diff(r) <= 0) or r[0] < 0 or r[-1] > 1:
            raise ConfigError("radial table radii must be strictly increasing in [0, 1]")

    def pieces(self):
        r = np.asarray(self.radii, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        breaks, coeffs = [0.0], []
        if r[0] > 0:
            breaks.append(r[0])
            coeffs.append([v[0], 0.0])
        for i in range(r.size - 1):
            slope = (v[i + 1] - v[i]) / (r[i + 1] - r[i])
            coeffs.append([v[i] - slope * r[i], slope])
            breaks.append(r[i + 1])
        if r[-1] < 1:
            coeffs.append([v[-1], 0.0])
            breaks.append(1.0)
        return np.array(breaks), np.array(coeffs, dtype=complex)

    def _natural_bound(self):
        return float(np.abs(np.asarray(self.values, dtype=complex)).max())

    @property
    def label(self):
        return f"radial_table({len(self.radii)})"


# ----------------------------------------------------------------- pointwise


@dataclass(frozen=True)
class Pointwise(Symbol):
    """A symbol known only through evaluation."""

    func: Callable
    sup_bound: float
    name: str = "u"

    def __call__(self, w):
        return np.asarray(self.func(np.asarray(w, dtype=complex)), dtype=complex)

    def _natural_bound(self):
        return float(self.sup_bound)

    @property
    def label(self):
        return self.name


@dataclass(frozen=True, eq=False)
class Samples(Symbol):
    """Values at the nodes of one specific quadrature rule."""

    values: np.ndarray
    rule: object
    sup_bound: float | None = None

    def __post_init__(self):
        if np.shape(self.values) != self.rule.nodes.shape:
            raise ConfigError("sample count does not match the rule's node count")

    def __call__(self, w):
        if w is self.rule.nodes or (np.shape(w) == self.rule.nodes.shape and np.array_equal(w, self.rule.nodes)):
            return np.asarray(self.values, dtype=complex)
        raise ValueError("sampled symbols can only be evaluated at their own rule nodes")

    def _natural_bound(self):
        return float(np.abs(self.values).max())

    def conj(self):
        return Samples(np.conj(self.values), self.rule, self.sup_bound)

    def abs2(self):
        return Samples(np.abs(self.values) ** 2 + 0j, self.rule, None)

    @property
    def label(self):
        return f"samples({np.size(self.values)})"


# ------------------------------------------------------------ sums of products


@dataclass(frozen=True)
class Term:
    coef: complex
    factors: tuple

    def __post_init__(self):
        if not self.factors:
            raise ConfigError("a product term needs at least one factor")


@dataclass(frozen=True)
class SumOfProducts:
    """sum_k coef_k * T_{u_k1} ... T_{u_kj}."""

    terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not self.terms:
            raise ConfigError("expression must contain at least one term")
        for t in self.terms:
            for f in t.factors:
                if not np.isfinite(f.bound):
                    raise ConfigError(f"factor {f.label} has no finite sup bound")

    @classmethod
    def single(cls, *factors, coef=1.0):
        return cls((Term(complex(coef), tuple(factors)),))

    def __add__(self, other):
        return SumOfProducts(self.terms + other.terms)

    def scaled(self, k):
        return SumOfProducts(tuple(Term(t.coef * k, t.factors) for t in self.terms))

    def adjoint(self):
        return SumOfProducts(
            tuple(Term(np.conj(t.coef), tuple(f.conj() for f in reversed(t.factors))) for t in self.terms)
        )

    def compose(self, z):
        """The expression with every symbol replaced by u o phi_z."""
        return SumOfProducts(tuple(Term(t.coef, tuple(f.compose(z) for f in t.factors)) for t in self.terms))

    @property
    def label(self):
        parts = []
        for t in self.terms:
            prod = "·".join(f"T[{f.label}]" for f in t.factors)
            parts.append(prod if t.coef == 1 else f"({t.coef:g})·{prod}")
        return " + ".join(parts)


# ----------------------------------------------------------------------- JSON


def symbol_from_json(desc):
    """Build a symbol from its JSON description (see the README for the schema)."""
    if not isinstance(desc, dict) or "type" not in desc:
        raise ConfigError(f"symbol description must be an object with a 'type' key: {desc!r}")
    kind = desc["type"]
    bound = desc.get("sup_bound")
    try:
        if kind == "constant":
            return Constant(complex(desc.get("re", 0.0), desc.get("im", 0.0)), bound)
        if kind == "monomial":
            return Monomial(int(desc["a"]), int(desc["b"]), bound)
        if kind == "indicator_disk":
            return IndicatorDisk(float(desc["r"]), bound)
        if kind == "indicator_annulus":
            return IndicatorAnnulus(float(desc["r1"]), float(desc["r2"]), bound)
        if kind == "lacunary":
            return Lacunary(int(desc["terms"]), bound)
        if kind == "conj_lacunary":
            return ConjLacunary(int(desc["terms"]), bound)
        if kind == "radial_table":
            return RadialTable(tuple(map(float, desc["r"])), tuple(map(float, desc["v"])), bound)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad {kind} symbol: {exc}") from exc
    raise ConfigError(f"unknown symbol type {kind!r}")


def expression_from_json(doc):
    """Parse {"symbols": {name: desc}, "sum": [{"coef": {"re", "im"}, "product": [names]}]}.

    A bare symbol description is accepted as the single-factor expression T_u.
    """
    if isinstance(doc, dict) and "type" in doc:
        return SumOfProducts.single(symbol_from_json(doc))
    if not isinstance(doc, dict) or "sum" not in doc:
        raise ConfigError("expression JSON needs a 'sum' list (or a bare symbol description)")
    table = {name: symbol_from_json(s) for name, s in doc.get("symbols", {}).items()}
    terms = []
    for item in doc["sum"]:
        coef = item.get("coef", {"re": 1.0})
        if isinstance(coef, (int, float)):
            c = complex(coef)
        else:
            c = complex(coef.get("re", 0.0), coef.get("im", 0.0))
        factors = []
        for ref in item.get("product", []):
            if isinstance(ref, dict):
                factors.append(symbol_from_json(ref))
            elif ref in table:
                factors.append(table[ref])
            else:
                raise ConfigError(f"unknown symbol name {ref!r}")
        terms.append(Term(c, tuple(factors)))
    return SumOfProducts(tuple(terms))
