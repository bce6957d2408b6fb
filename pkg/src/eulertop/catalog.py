"""Named perturbation fields, parameter searches and random generators."""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .melnikov import (
    annulus_bounds,
    classify_level,
    count_bound_semisphere,
    trig_moment,
)
from .model import DegenerateTopError, InertiaParams
from .perturbation import CrossProductSpec, SemisphereSpec, TangentFieldSpec
from .polynomial import Poly3, as_fraction, poly_from_roots

__all__ = [
    "example1_field",
    "example2_field",
    "example1_root",
    "example2_root",
    "example1_mu3_limit",
    "example2_critical_radius",
    "search_example2_parameters",
    "random_params",
    "random_poly",
    "random_cross_product",
    "random_semisphere",
    "sharp_semisphere",
    "nontangent_control",
    "raw_field",
]


def example2_field(k=1) -> TangentFieldSpec:
    """Modified feedback-stabilisation field with gain ``k``.

    ``A = -x3 (k - x1 + x1 x3^2)``, ``B = x2 x3 (1 + x3^2)``,
    ``C = k x1 + x1^2 (x3^2 - 1) - x2^2 (1 + x3^2)``.
    """
    k = as_fraction(k)
    x1, x2, x3 = Poly3.variables()
    A = -x3 * (k - x1 + x1 * x3 * x3)
    B = x2 * x3 * (1 + x3 * x3)
    C = x1.scale(k) + x1 * x1 * (x3 * x3 - 1) - x2 * x2 * (1 + x3 * x3)
    return TangentFieldSpec(A, B, C)


def example1_field(lam1, lam2) -> TangentFieldSpec:
    """Field with ``P = lam1 x y^2 z`` and ``Q = lam2 x^2 y z`` in ``A = x3 P(x1, x2, x3^2)``.

    ``I(h)`` is ``lambda h^2 [alpha beta c^2 + (alpha - beta) h]``; its positive
    root does not depend on ``(lam1, lam2)``.
    """
    l1, l2 = as_fraction(lam1), as_fraction(lam2)
    x1, x2, x3 = Poly3.variables()
    A = (x1 * x2 * x2 * x3 ** 3).scale(l1)
    B = (x1 * x1 * x2 * x3 ** 3).scale(l2)
    C = (x1 * x1 * x2 * x2 * x3 * x3).scale(-(l1 + l2))
    return TangentFieldSpec(A, B, C)


def example1_root(params: InertiaParams, c) -> Fraction:
    al, be = params.alpha_q, params.beta_q
    return al * be * as_fraction(c) ** 2 / (be - al)


def example1_lambda(params: InertiaParams, lam1, lam2) -> float:
    al, be = params.alpha, params.beta
    return np.pi * (float(lam1) * be - float(lam2) * al) / (-al * be) ** 2.5


def example1_mu3_limit(params: InertiaParams) -> Fraction | None:
    """Upper limit on ``mu3`` below which the example-1 root meets the ``mu3`` bound (alpha > 0).

    ``None`` means any ``mu3 > 0`` works (``alpha + beta == 0``).
    """
    al, be = params.alpha_q, params.beta_q
    s = al + be
    if s == 0:
        return None
    if s > 0:
        return (be - al) / (be * s)
    return (be - al) / (al * s)


def example2_root(params: InertiaParams) -> Fraction:
    al, be = params.alpha_q, params.beta_q
    return 2 * al * be / (al + be)


def example2_critical_radius(params: InertiaParams) -> float:
    """``c* = 2 sqrt(beta / (alpha + beta))`` for ``alpha > 0``, ``alpha + beta < 0``."""
    al, be = params.alpha, params.beta
    return 2.0 * np.sqrt(be / (al + be))


def search_example2_parameters(margin: float = 0.15):
    """First grid point ``(params, c, k)`` whose example-2 root passes every admissibility check.

    The grid walks small rational moments and radii; a candidate is kept only
    if the cycle's ellipse stays at least ``margin * c`` away from the equator.
    """
    moments = [Fraction(n, 2) for n in range(1, 9)]
    radii = [Fraction(n, 4) for n in range(4, 41)]
    for mu1, mu2, mu3 in itertools.product(moments, repeat=3):
        try:
            params = InertiaParams(mu1, mu2, mu3)
        except DegenerateTopError:
            continue
        if params.alpha_q + params.beta_q == 0:
            continue
        h = float(example2_root(params))
        for c in radii:
            sign_ok, bound_ok, inside, _ = classify_level(h, params, c)
            if not (sign_ok and bound_ok and inside):
                continue
            lo, hi = annulus_bounds(params, c)
            edge = hi if params.orientation > 0 else lo
            # semiaxis ratio to c at the root vs. at the annulus edge
            if np.sqrt(h / edge) < 1 - margin:
                return params, c, Fraction(1, 10)
    raise RuntimeError("no admissible parameter set in the search grid")


# random generators


def random_params(rng: np.random.Generator, alpha_sign: int | None = None) -> InertiaParams:
    """Random rational moments of inertia with ``alpha * beta < 0``."""
    while True:
        mu = [Fraction(int(rng.integers(1, 25)), int(rng.integers(1, 9))) for _ in range(3)]
        try:
            p = InertiaParams(*mu)
        except DegenerateTopError:
            continue
        if alpha_sign is None or p.orientation == alpha_sign:
            return p


def _rand_coef(rng: np.random.Generator) -> Fraction:
    v = 0
    while v == 0:
        v = int(rng.integers(-9, 10))
    return Fraction(v, int(rng.integers(1, 6)))


def random_poly(rng: np.random.Generator, degree: int, density: float = 0.6,
                weights=(1, 1, 1), homogeneous: bool = False, x3_parity: int | None = None) -> Poly3:
    """Random polynomial of (weighted) degree ``degree``.

    ``x3_parity`` restricts the exponent of the third variable to be even (0)
    or odd (1).
    """
    w1, w2, w3 = weights
    terms = {}
    for i in range(degree + 1):
        for j in range(degree + 1):
            for k in range(degree + 1):
                d = w1 * i + w2 * j + w3 * k
                if d > degree or (homogeneous and d != degree):
                    continue
                if x3_parity is not None and k % 2 != x3_parity:
                    continue
                if rng.random() < density:
                    terms[(i, j, k)] = _rand_coef(rng)
    return Poly3(terms)


def random_cross_product(rng: np.random.Generator, m: int) -> CrossProductSpec:
    """Homogeneous degree-``m`` field ``x × (L, M, N)`` with ``A, B`` odd in ``x3``.

    ``L`` and ``M`` carry even powers of ``x3`` and ``N`` odd ones, so that
    ``A = x3 P(x1, x2, x3^2)`` and ``B = x3 Q(x1, x2, x3^2)``.
    """
    while True:
        L = random_poly(rng, m - 1, homogeneous=True, x3_parity=0)
        M = random_poly(rng, m - 1, homogeneous=True, x3_parity=0)
        N = random_poly(rng, m - 1, homogeneous=True, x3_parity=1)
        spec = CrossProductSpec(L, M, N)
        A, B, _ = spec.components()
        if A and B:
            return spec


def random_semisphere(rng: np.random.Generator, n: int, c=1) -> SemisphereSpec:
    """Semisphere data whose degree in ``(x1, x2)`` is exactly ``n``."""
    while True:
        P = _xy_degree_poly(rng, n)
        Q = _xy_degree_poly(rng, n)
        R = _xy_degree_poly(rng, max(n - 1, 0))
        if max(P.degree_in((0, 1)), Q.degree_in((0, 1))) == n:
            return SemisphereSpec(P, Q, R, c)


def _xy_degree_poly(rng: np.random.Generator, n: int, zdeg: int = 2, density: float = 0.5) -> Poly3:
    terms = {}
    for i in range(n + 1):
        for j in range(n + 1 - i):
            for k in range(zdeg + 1):
                if rng.random() < density:
                    terms[(i, j, k)] = _rand_coef(rng)
    return Poly3(terms)


def sharp_semisphere(n: int, params: InertiaParams, c=None) -> tuple[SemisphereSpec, list[Fraction]]:
    """Semisphere data of degree ``n`` whose ``I(h)`` has the maximal number of positive roots.

    The planted roots are ``|h| = j * h_max / (K + 1)`` for ``j = 1..K`` with
    ``K = count_bound_semisphere(n)``, placed inside the period annulus; they
    are returned as signed levels.  Only ``P = sum a_k x^(2k+1)`` is used, plus
    an ``x^n`` term when ``n`` is even so the degree is exactly ``n``.
    """
    c = as_fraction(c if c is not None else 1)
    K = count_bound_semisphere(n)
    al, be = params.alpha_q, params.beta_q
    b = 2 / abs(be)
    hmax = c * c / 2 * min(abs(al), abs(be))
    roots = [hmax * j / (K + 1) for j in range(1, K + 1)]
    # I = pi sqrt(ab) sum_k a_k b^k W(0, 2k+2) s^(2k+2): match prod(|h| - r)
    target = poly_from_roots(roots)
    terms = {}
    for k, e in enumerate(target):
        terms[(2 * k + 1, 0, 0)] = e / (b ** k * trig_moment(0, 2 * k + 2).rational)
    if n % 2 == 0:
        terms[(n, 0, 0)] = Fraction(1)
    P = Poly3(terms)
    sigma = params.orientation
    return SemisphereSpec(P, Poly3(), Poly3(), c), [sigma * r for r in roots]


def nontangent_control() -> tuple[Poly3, Poly3, Poly3]:
    """``(x1 x3, x2 x3, -x3^2)``: flux ``x3 (x1^2 + x2^2 - x3^2)`` is not zero, so spheres leak."""
    x1, x2, x3 = Poly3.variables()
    return x1 * x3, x2 * x3, -(x3 * x3)


def raw_field(params: InertiaParams, polys, epsilon: float):
    """Euler field plus ``epsilon * (A, B, C)`` with no tangency check."""
    from .model import euler_field

    A, B, C = polys

    def f(s):
        return euler_field(params, s) + epsilon * np.array([A.eval(s), B.eval(s), C.eval(s)])

    return f
