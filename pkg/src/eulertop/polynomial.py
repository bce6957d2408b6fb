"""Sparse exact trivariate polynomials, polynomials in sqrt(h), and positive root isolation.

`Poly3` keeps exact :class:`fractions.Fraction` coefficients keyed by exponent
triples.  `SqrtPoly` holds float coefficients in the variable ``s = sqrt(|h|)``
and `positive_roots` isolates its roots on ``s > 0``.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "MAX_DEGREE",
    "Poly3",
    "SqrtPoly",
    "RootReport",
    "Root",
    "IdenticallyZeroError",
    "DegreeOverflowError",
    "PolynomialParseError",
    "as_fraction",
    "positive_roots",
    "descartes_bound",
]

MAX_DEGREE = 64
DEFAULT_NAMES = ("x1", "x2", "x3")

Exponent = tuple[int, int, int]


class DegreeOverflowError(ValueError):
    """Raised when a product would exceed the configured maximum degree."""


class PolynomialParseError(ValueError):
    pass


class IdenticallyZeroError(ValueError):
    """The polynomial handed to root isolation is identically zero.

    For a Melnikov function this means the first-order analysis is inconclusive.
    """


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions, decimal strings and floats to an exact Fraction.

    Floats go through their shortest repr, so ``0.1`` becomes ``1/10``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite coefficient {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, np.floating):
        return as_fraction(float(value))
    if isinstance(value, np.integer):
        return Fraction(int(value))
    raise TypeError(f"cannot convert {type(value).__name__} to Fraction")


def _grlex_key(e: Exponent):
    return (-sum(e), tuple(-k for k in e))


class Poly3:
    """Sparse polynomial in three variables with exact rational coefficients.

    Instances are immutable.  Zero coefficients are never stored.  Arithmetic
    raises :class:`DegreeOverflowError` past ``max_degree``.
    """

    __slots__ = ("_terms", "max_degree", "_float_terms")

    def __init__(self, terms: Mapping[Exponent, object] | None = None, max_degree: int = MAX_DEGREE):
        clean: dict[Exponent, Fraction] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(k) for k in exps)
            if len(exps) != 3 or min(exps) < 0:
                raise ValueError(f"bad exponent triple {exps!r}")
            c = as_fraction(coeff)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
                if not clean[exps]:
                    del clean[exps]
        self.max_degree = max_degree
        self._terms = clean
        self._float_terms = None
        if clean and self.degree > max_degree:
            raise DegreeOverflowError(f"degree {self.degree} exceeds maximum {max_degree}")

    # construction helpers

    @classmethod
    def constant(cls, value) -> "Poly3":
        return cls({(0, 0, 0): value})

    @classmethod
    def var(cls, index: int) -> "Poly3":
        e = [0, 0, 0]
        e[index] = 1
        return cls({tuple(e): 1})

    @classmethod
    def monomial(cls, i: int, j: int, k: int, coeff=1) -> "Poly3":
        return cls({(i, j, k): coeff})

    @classmethod
    def variables(cls) -> tuple["Poly3", "Poly3", "Poly3"]:
        return cls.var(0), cls.var(1), cls.var(2)

    # basic properties

    @property
    def terms(self) -> dict[Exponent, Fraction]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: _grlex_key(kv[0]))

    @property
    def degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def degree_in(self, variables: Sequence[int]) -> int:
        """Largest total degree over the given variable indices."""
        if not self._terms:
            return -1
        return max(sum(e[v] for v in variables) for e in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_homogeneous(self, weights: Sequence[int] = (1, 1, 1)) -> bool:
        degs = {sum(w * k for w, k in zip(weights, e)) for e in self._terms}
        return len(degs) <= 1

    def coeff(self, i: int, j: int, k: int) -> Fraction:
        return self._terms.get((i, j, k), Fraction(0))

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, Poly3):
            return self._terms == other._terms
        try:
            return self == Poly3.constant(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    # arithmetic

    def _coerce(self, other) -> "Poly3":
        if isinstance(other, Poly3):
            return other
        return Poly3.constant(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return Poly3(out, max(self.max_degree, other.max_degree))

    __radd__ = __add__

    def __neg__(self):
        return Poly3({e: -c for e, c in self._terms.items()}, self.max_degree)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        limit = max(self.max_degree, other.max_degree)
        if self._terms and other._terms and self.degree + other.degree > limit:
            raise DegreeOverflowError(
                f"product degree {self.degree + other.degree} exceeds maximum {limit}"
            )
        out: dict[Exponent, Fraction] = {}
        for (a1, a2, a3), ca in self._terms.items():
            for (b1, b2, b3), cb in other._terms.items():
                e = (a1 + b1, a2 + b2, a3 + b3)
                out[e] = out.get(e, Fraction(0)) + ca * cb
        return Poly3(out, limit)

    __rmul__ = __mul__

    def scale(self, factor) -> "Poly3":
        f = as_fraction(factor)
        return Poly3({e: c * f for e, c in self._terms.items()}, self.max_degree)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = Poly3.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def diff(self, index: int) -> "Poly3":
        out = {}
        for e, c in self._terms.items():
            if e[index]:
                ne = list(e)
                ne[index] -= 1
                out[tuple(ne)] = c * e[index]
        return Poly3(out, self.max_degree)

    def substitute(self, index: int, value) -> "Poly3":
        """Replace variable ``index`` by a constant or another Poly3."""
        value = self._coerce(value)
        powers: dict[int, Poly3] = {0: Poly3.constant(1)}
        out = Poly3(max_degree=self.max_degree)
        for e, c in self._terms.items():
            k = e[index]
            if k not in powers:
                powers[k] = value ** k
            rest = list(e)
            rest[index] = 0
            out = out + Poly3({tuple(rest): c}) * powers[k]
        return out

    def compose(self, p1, p2, p3) -> "Poly3":
        """Simultaneous substitution of all three variables."""
        subs = [self._coerce(p) for p in (p1, p2, p3)]
        cache: dict[tuple[int, int], Poly3] = {}

        def power(v, k):
            if (v, k) not in cache:
                cache[(v, k)] = subs[v] ** k
            return cache[(v, k)]

        out = Poly3(max_degree=self.max_degree)
        for (i, j, k), c in self._terms.items():
            out = out + (power(0, i) * power(1, j) * power(2, k)).scale(c)
        return out

    def divide_by_monomial(self, i: int, j: int, k: int) -> "Poly3":
        out = {}
        for e, c in self._terms.items():
            if e[0] < i or e[1] < j or e[2] < k:
                raise ValueError("monomial does not divide polynomial")
            out[(e[0] - i, e[1] - j, e[2] - k)] = c
        return Poly3(out, self.max_degree)

    def reduce_mod_sphere(self, c2) -> "Poly3":
        """Remainder modulo ``x1^2 + x2^2 + x3^2 - c2`` (x3^2 eliminated)."""
        c2 = as_fraction(c2)
        x1, x2, _ = Poly3.variables()
        sub = Poly3.constant(c2) - x1 * x1 - x2 * x2
        powers = {0: Poly3.constant(1)}
        out = Poly3(max_degree=self.max_degree)
        for (i, j, k), c in self._terms.items():
            q, r = divmod(k, 2)
            if q not in powers:
                powers[q] = sub ** q
            out = out + Poly3({(i, j, r): c}) * powers[q]
        return out

    # evaluation

    def __call__(self, x1, x2, x3):
        return self.eval((x1, x2, x3))

    def eval(self, point) -> float:
        """Float evaluation (exact Fractions in, exact Fraction out)."""
        a, b, c = point
        if all(isinstance(v, (int, Fraction)) for v in (a, b, c)):
            return sum((coef * Fraction(a) ** i * Fraction(b) ** j * Fraction(c) ** k
                        for (i, j, k), coef in self._terms.items()), Fraction(0))
        if self._float_terms is None:
            self._float_terms = [(float(coef), i, j, k) for (i, j, k), coef in self._terms.items()]
        total = 0.0
        for coef, i, j, k in self._float_terms:
            total += coef * a ** i * b ** j * c ** k
        return total

    def eval_array(self, x1, x2, x3) -> np.ndarray:
        x1, x2, x3 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x1, x2, x3)))
        out = np.zeros(x1.shape)
        for (i, j, k), coef in self._terms.items():
            out = out + float(coef) * x1 ** i * x2 ** j * x3 ** k
        return out

    # text form

    def to_str(self, names: Sequence[str] = DEFAULT_NAMES) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for n, (exps, coef) in enumerate(self.items()):
            sign = "-" if coef < 0 else "+"
            mag = abs(coef)
            factors = []
            for name, k in zip(names, exps):
                if k == 1:
                    factors.append(name)
                elif k > 1:
                    factors.append(f"{name}^{k}")
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            if n == 0:
                pieces.append(("-" if sign == "-" else "") + body)
            else:
                pieces.append(f" {sign} {body}")
        return "".join(pieces)

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Poly3({self.to_str()!r})"

    @classmethod
    def parse(cls, text: str, names: Sequence[str] = DEFAULT_NAMES) -> "Poly3":
        """Parse the canonical text form.

        Terms look like ``-3/2*x1^2*x3`` or ``3/2 x1^2 x3``; a bare number is a
        constant term.  ``names`` gives the three variable spellings.
        """
        return _parse(text, tuple(names))


_NUMBER = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?"


def _parse(text: str, names: tuple[str, ...]) -> Poly3:
    src = text.strip()
    if not src:
        raise PolynomialParseError("empty polynomial text")
    name_pat = "|".join(sorted((re.escape(n) for n in names), key=len, reverse=True))
    factor_re = re.compile(rf"\s*\*?\s*(?:({name_pat})(?:\s*\^\s*(\d+))?|({_NUMBER}))")
    pos = 0
    terms: dict[Exponent, Fraction] = {}
    first = True
    while pos < len(src):
        m = re.compile(r"\s*([+-])\s*").match(src, pos)
        sign = 1
        if m:
            sign = -1 if m.group(1) == "-" else 1
            pos = m.end()
        elif not first:
            raise PolynomialParseError(f"expected '+' or '-' at position {pos} in {text!r}")
        first = False
        coef = Fraction(sign)
        exps = [0, 0, 0]
        nfactors = 0
        while pos < len(src):
            fm = factor_re.match(src, pos)
            if not fm or fm.end() == pos:
                break
            if nfactors == 0 and fm.group(0).lstrip().startswith("*"):
                raise PolynomialParseError(f"dangling '*' at position {pos} in {text!r}")
            if fm.group(1):
                exps[names.index(fm.group(1))] += int(fm.group(2) or 1)
            else:
                coef *= Fraction(fm.group(3))
            nfactors += 1
            pos = fm.end()
        if nfactors == 0:
            raise PolynomialParseError(f"cannot parse term at position {pos} in {text!r}")
        key = tuple(exps)
        terms[key] = terms.get(key, Fraction(0)) + coef
        pos = len(src) - len(src[pos:].lstrip())
    return Poly3(terms)


# polynomials in s = sqrt(|h|)


def _parity_of(coeffs: Sequence[float]) -> str:
    nz = [k for k, c in enumerate(coeffs) if c != 0]
    if not nz:
        return "zero"
    if all(k % 2 for k in nz):
        return "odd"
    if all(k % 2 == 0 for k in nz):
        return "even"
    return "mixed"


@dataclass(frozen=True)
class SqrtPoly:
    """Polynomial ``sum coeffs[k] * s**k`` in ``s = sqrt(h)``."""

    coeffs: tuple[float, ...]
    parity: str = field(default="")

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        actual = _parity_of(coeffs)
        if self.parity and self.parity != actual:
            raise ValueError(f"parity flag {self.parity!r} inconsistent with coefficients ({actual})")
        object.__setattr__(self, "parity", actual)

    @property
    def degree(self) -> int:
        nz = [k for k, c in enumerate(self.coeffs) if c != 0]
        return nz[-1] if nz else -1

    def is_zero(self) -> bool:
        return self.parity == "zero"

    def __call__(self, s):
        return np.polynomial.polynomial.polyval(s, self.coeffs)

    def derivative(self) -> "SqrtPoly":
        return SqrtPoly(tuple(k * c for k, c in enumerate(self.coeffs))[1:] or (0.0,))

    def at_h(self, h):
        return self(np.sqrt(np.abs(h)))


@dataclass(frozen=True)
class Root:
    h: float
    s: float
    simple: bool
    derivative: float
    borderline: bool = False


@dataclass(frozen=True)
class RootReport:
    """Positive roots sorted ascending; ``h`` is ``s**2``."""

    roots: tuple[Root, ...]
    descartes_bound: int

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    @property
    def values(self) -> list[float]:
        return [r.h for r in self.roots]

    @property
    def simple_values(self) -> list[float]:
        return [r.h for r in self.roots if r.simple]


def descartes_bound(coeffs: Sequence[float]) -> int:
    """Sign variations of a coefficient sequence (zeros skipped)."""
    signs = [np.sign(c) for c in coeffs if c != 0]
    return int(sum(1 for a, b in zip(signs, signs[1:]) if a != b))


def _real_roots_in(poly: np.ndarray, lo: float, hi: float, depth: int = 0) -> list[tuple[float, bool]]:
    """Roots of ``poly`` (ascending coefficients) inside the open interval (lo, hi).

    Recursive isolation on the monotone pieces between critical points.  Each
    root carries a flag that is True when it was found as a critical point,
    i.e. a root of even multiplicity or a touching zero.
    """
    deg = len(poly) - 1
    if deg <= 0:
        return []
    if deg == 1:
        r = -poly[0] / poly[1]
        return [(r, False)] if lo < r < hi else []
    dpoly = np.polynomial.polynomial.polyder(poly)
    crit = [r for r, _ in _real_roots_in(dpoly, lo, hi, depth + 1)]
    knots = [lo] + sorted(crit) + [hi]

    def val(x):
        return np.polynomial.polynomial.polyval(x, poly)

    def scale(x):
        return np.polynomial.polynomial.polyval(abs(x), np.abs(poly))

    zero_tol = 1e-10
    found: list[tuple[float, bool]] = []
    touching = set()
    for k, x in enumerate(knots[1:-1], start=1):
        if abs(val(x)) <= zero_tol * scale(x):
            found.append((x, True))
            touching.add(k)
    for k in range(len(knots) - 1):
        a, b = knots[k], knots[k + 1]
        if k in touching or (k + 1) in touching:
            continue
        fa, fb = val(a), val(b)
        if fa == 0.0 or fb == 0.0:
            continue
        if np.sign(fa) != np.sign(fb):
            found.append((brentq(val, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500), False))
    return sorted(found)


def positive_roots(m: SqrtPoly, simple_tol: float = 1e-9) -> RootReport:
    """Isolate the roots of ``m(s)`` with ``s > 0`` and report them as ``h = s**2``.

    Even and odd polynomials are reduced to a polynomial in ``h`` first, which
    halves the degree.  Roots are bracketed between critical points, refined by
    Brent's method and polished with Newton steps.  A root is simple when
    ``|m'(s*)| > simple_tol * max|coeff|``; values within a factor 10 of the
    threshold are flagged ``borderline`` and a warning is emitted.
    """
    coeffs = np.array(m.coeffs, dtype=float)
    if not np.any(coeffs):
        raise IdenticallyZeroError("I(h) is identically zero; first-order method inconclusive")
    low = int(np.flatnonzero(coeffs)[0])
    reduced = coeffs[low:]
    reduced = reduced[: int(np.flatnonzero(reduced)[-1]) + 1]
    # in h when possible
    in_h = len(reduced) > 1 and not np.any(reduced[1::2])
    work = reduced[0::2] if in_h else reduced
    if len(work) <= 1:
        return RootReport((), descartes_bound(work))
    lead = work[-1]
    bound = 1.0 + float(np.max(np.abs(work[:-1] / lead)))
    cands = _real_roots_in(work, 0.0, bound * (1 + 1e-9))

    full = SqrtPoly(tuple(coeffs))
    dfull = full.derivative()
    big = float(np.max(np.abs(coeffs)))
    out = []
    for x, touching in cands:
        s = float(np.sqrt(x)) if in_h else float(x)
        if s <= 0:
            continue
        if not touching:
            for _ in range(3):
                d = dfull(s)
                if d == 0:
                    break
                step = full(s) / d
                if not np.isfinite(step) or abs(step) > 1e-6 * max(s, 1.0):
                    break
                s -= step
        deriv = float(dfull(s))
        simple = (not touching) and abs(deriv) > simple_tol * big
        borderline = (simple_tol * big / 10) < abs(deriv) < (simple_tol * big * 10)
        if borderline:
            warnings.warn(f"root h={s * s:.6g} is borderline for simplicity (|M'|={abs(deriv):.3g})")
        out.append(Root(h=s * s, s=s, simple=simple, derivative=abs(deriv), borderline=borderline))
    out.sort(key=lambda r: r.h)
    merged: list[Root] = []
    for r in out:
        if merged and abs(r.h - merged[-1].h) <= 1e-12 * max(1.0, r.h):
            continue
        merged.append(r)
    dbound = descartes_bound(work)
    if len(merged) > dbound:
        warnings.warn(f"root count {len(merged)} exceeds Descartes bound {dbound}")
    return RootReport(tuple(merged), dbound)


def poly_from_roots(roots: Iterable, leading=1) -> list[Fraction]:
    """Ascending coefficients of ``leading * prod(h - r)`` with exact arithmetic."""
    coeffs = [as_fraction(leading)]
    for r in roots:
        r = as_fraction(r)
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            nxt[k + 1] += c
            nxt[k] -= r * c
        coeffs = nxt
    return coeffs
