"""First-order Poincare-Pontryagin (Melnikov) function of the perturbed top.

On the chart of the upper hemisphere the unperturbed flow is a center with
ovals ``H(x, y) = (alpha y^2 - beta x^2) / 2 = h``.  With ``a = 2/|alpha|``,
``b = 2/|beta|`` and ``s = sqrt(|h|)`` these ellipses are

    x = sqrt(b) s cos(t),    y = sqrt(a) s sin(t),    t in [0, 2 pi),

traversed counterclockwise, and

    I(h) = oint P dy - Q dx
         = pi sqrt(a b) * sum_k r_k s^k

where every ``r_k`` is rational whenever the inputs are.  The sign of ``I``
depends on the orientation convention; its zeros do not.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.optimize import brentq

from .model import InertiaParams, level_to_energy
from .perturbation import PerturbedSystem, SemisphereSpec, split_x3_form
from .polynomial import (
    IdenticallyZeroError,
    Poly3,
    RootReport,
    SqrtPoly,
    as_fraction,
    positive_roots,
)

__all__ = [
    "TrigMoment",
    "MelnikovPoly",
    "LevelResult",
    "BifurcationReport",
    "StructureError",
    "QuadratureError",
    "trig_moment",
    "moment_table",
    "melnikov_semisphere",
    "melnikov_allspheres",
    "melnikov_quadrature",
    "annulus_bounds",
    "classify_level",
    "admissible_levels",
    "quadrature_levels",
    "analyze",
    "count_bound_semisphere",
]


class StructureError(ValueError):
    """Field is not of the form ``A = x3 P(x1,x2,x3^2)``, ``B = x3 Q(x1,x2,x3^2)``."""


class QuadratureError(RuntimeError):
    pass


# trigonometric moments


@dataclass(frozen=True)
class TrigMoment:
    """``int_0^{2pi} sin^i cos^j dt = rational * pi``."""

    i: int
    j: int
    rational: Fraction

    @property
    def value(self) -> float:
        return float(self.rational) * math.pi

    def __str__(self):
        r = self.rational
        if r == 0:
            return "0"
        num = "" if r.numerator == 1 else str(r.numerator)
        return f"{num}pi" + ("" if r.denominator == 1 else f"/{r.denominator}")


@lru_cache(maxsize=None)
def _moment_rational(i: int, j: int) -> Fraction:
    if i % 2 or j % 2:
        return Fraction(0)
    if i == 0 and j == 0:
        return Fraction(2)
    if i >= 2:
        return _moment_rational(i - 2, j) * Fraction(i - 1, i + j)
    return _moment_rational(i, j - 2) * Fraction(j - 1, i + j)


def trig_moment(i: int, j: int) -> TrigMoment:
    if i < 0 or j < 0:
        raise ValueError("moment orders must be non-negative")
    return TrigMoment(i, j, _moment_rational(i, j))


def moment_table(max_degree: int) -> list[TrigMoment]:
    return [trig_moment(i, d - i) for d in range(max_degree + 1) for i in range(d + 1)]


# closed form


def _line_integral(Pxy: Poly3, Qxy: Poly3, a: Fraction, b: Fraction) -> dict[int, Fraction]:
    """Rational coefficients ``r_k`` of ``oint P dy - Q dx = pi sqrt(ab) sum r_k s^k``.

    ``Pxy`` and ``Qxy`` must not depend on the third variable.
    """
    out: dict[int, Fraction] = {}

    def add(power: int, coef: Fraction, sin_pow: int, cos_pow: int, ea: int, eb: int):
        w = _moment_rational(sin_pow, cos_pow)
        if not w:
            return
        # a nonvanishing moment forces odd powers of sqrt(a) and sqrt(b)
        assert ea % 2 == 1 and eb % 2 == 1, (ea, eb)
        term = coef * w * a ** ((ea - 1) // 2) * b ** ((eb - 1) // 2)
        out[power] = out.get(power, Fraction(0)) + term

    for poly, is_p in ((Pxy, True), (Qxy, False)):
        for (i, j, k), coef in poly.terms.items():
            if k:
                raise ValueError("line integrand still depends on z")
            if is_p:
                # P dy, dy = sqrt(a) s cos dt
                add(i + j + 1, coef, j, i + 1, j + 1, i)
            else:
                # -Q dx, -dx = sqrt(b) s sin dt
                add(i + j + 1, coef, j + 1, i, j, i + 1)
    return {k: v for k, v in out.items() if v}


@dataclass(frozen=True)
class MelnikovPoly:
    """``I(h) = scale * sum rational[k] * s^k`` with ``s = sqrt(|h|)``.

    ``factor_power`` is 1 for the semisphere family (``I = sqrt(h) M_n``) and 2
    for the all-spheres family (``I = h M_{n-1}``); ``body`` holds the float
    coefficients of ``M = I / s^factor_power``.
    """

    rational: tuple[Fraction, ...]
    scale: float
    factor_power: int
    family: str
    params: InertiaParams
    c: Fraction
    degree: int
    body: SqrtPoly = field(init=False)

    def __post_init__(self):
        fp = self.factor_power
        if any(self.rational[:fp]):
            raise ValueError("low-order coefficients must vanish")
        coeffs = tuple(self.scale * float(r) for r in self.rational[fp:]) or (0.0,)
        object.__setattr__(self, "body", SqrtPoly(coeffs))

    @property
    def orientation(self) -> int:
        return self.params.orientation

    def is_zero(self) -> bool:
        return not any(self.rational)

    def __call__(self, h):
        h = np.asarray(h, dtype=float)
        if np.any(self.orientation * h < 0):
            raise ValueError("levels inside the disk have the sign of alpha")
        s = np.sqrt(np.abs(h))
        return self.scale * np.polynomial.polynomial.polyval(s, [float(r) for r in self.rational])

    def magnitude(self, h):
        """``scale * sum |r_k| s^k``: size of the terms that cancel near a root."""
        s = np.sqrt(np.abs(np.asarray(h, dtype=float)))
        return self.scale * np.polynomial.polynomial.polyval(s, [abs(float(r)) for r in self.rational])

    def h_rational(self) -> list[Fraction]:
        """Exact coefficients of ``I / scale`` as a polynomial in ``h`` (even powers of s only)."""
        if any(r for k, r in enumerate(self.rational) if k % 2):
            raise ValueError("I(h) has odd powers of sqrt(h); not a polynomial in h")
        sigma = self.orientation
        return [r * sigma ** (k // 2) for k, r in enumerate(self.rational) if k % 2 == 0]

    def h_coeffs(self) -> np.ndarray:
        return self.scale * np.array([float(r) for r in self.h_rational()])

    def roots(self) -> RootReport:
        return positive_roots(self.body)

    def signed_roots(self) -> list[tuple[float, bool]]:
        """Roots as signed levels ``h*`` with their simplicity flags."""
        return [(float(self.orientation * r.h), r.simple) for r in self.roots()]


def _ab(params: InertiaParams) -> tuple[Fraction, Fraction]:
    al, be = params.alpha_q, params.beta_q
    if al * be >= 0:
        raise ValueError("need alpha*beta < 0 for a center")
    return 2 / abs(al), 2 / abs(be)


def _make(coeffs: dict[int, Fraction], factor_power: int, family: str, params, c, degree) -> MelnikovPoly:
    a, b = _ab(params)
    top = max(coeffs, default=factor_power)
    rational = tuple(coeffs.get(k, Fraction(0)) for k in range(top + 1))
    scale = math.pi * math.sqrt(float(a * b))
    return MelnikovPoly(rational, scale, factor_power, family, params, as_fraction(c), degree)


def melnikov_semisphere(P: Poly3, Q: Poly3, params: InertiaParams, c) -> MelnikovPoly:
    """Closed-form ``I(h)`` for ``P, Q`` in ``(x, y, z)`` restricted to ``z = c^2``."""
    c = as_fraction(c)
    c2 = c * c
    Pxy = P.substitute(2, c2)
    Qxy = Q.substitute(2, c2)
    n = max(Pxy.degree_in((0, 1)), Qxy.degree_in((0, 1)), 0)
    coeffs = _line_integral(Pxy, Qxy, *_ab(params))
    return _make(coeffs, 1, "semisphere", params, c, n)


def melnikov_allspheres(A: Poly3, B: Poly3, params: InertiaParams, c) -> MelnikovPoly:
    """Closed-form ``I(h)`` for tangent fields with ``A = x3 P(x1,x2,x3^2)``, ``B = x3 Q(...)``.

    Other tangent fields raise :class:`StructureError`; use
    :func:`quadrature_levels` for those.
    """
    try:
        P = split_x3_form(A)
        Q = split_x3_form(B)
    except ValueError as exc:
        raise StructureError(f"{exc}; use the quadrature path") from exc
    c = as_fraction(c)
    x, y, _ = Poly3.variables()
    z = Poly3.constant(c * c) - x * x - y * y
    Pxy = P.substitute(2, z)
    Qxy = Q.substitute(2, z)
    n = max(P.degree, Q.degree, 0)
    coeffs = _line_integral(Pxy, Qxy, *_ab(params))
    return _make(coeffs, 2, "allspheres", params, c, n)


def count_bound_semisphere(n: int) -> int:
    """Largest number of positive roots of ``I(h)/sqrt(h)`` for degree ``n`` data."""
    return max((n - 1) // 2, 0)


# quadrature oracle


def _as_callable(f) -> Callable[[float, float, float], float]:
    if isinstance(f, Poly3):
        return lambda x1, x2, x3: f.eval((x1, x2, x3))
    return f


def melnikov_quadrature(A, B, params: InertiaParams, c, h: float,
                        epsabs: float = 1e-10, epsrel: float = 1e-12, limit: int = 200) -> float:
    """Adaptive quadrature of ``oint (A dy - B dx) / w`` with ``w = sqrt(c^2 - x^2 - y^2)``.

    ``A`` and ``B`` are Poly3 or callables of ``(x1, x2, x3)`` and are
    evaluated on the upper hemisphere ``x3 = w``.  The ellipse ``H = h`` must
    lie strictly inside the disk of radius ``c``.
    """
    A, B = _as_callable(A), _as_callable(B)
    al, be = params.alpha, params.beta
    c = float(c)
    if params.orientation * h <= 0:
        raise ValueError(f"level h={h} is not inside the period annulus (sign of alpha)")
    ax = math.sqrt(-2 * h / be)
    ay = math.sqrt(2 * h / al)
    if max(ax, ay) >= c:
        raise ValueError(f"ellipse H={h} (semiaxes {ax:.6g}, {ay:.6g}) leaves the disk of radius {c}")

    def integrand(t):
        ct, st = math.cos(t), math.sin(t)
        x, y = ax * ct, ay * st
        w = math.sqrt(c * c - x * x - y * y)
        dy = ay * ct
        dx = -ax * st
        return (A(x, y, w) * dy - B(x, y, w) * dx) / w

    # vertices of the ellipse, where w is smallest, as breakpoints
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(integrand, 0.0, 2 * math.pi, epsabs=epsabs, epsrel=epsrel, limit=limit,
                                  points=(0.5 * math.pi, math.pi, 1.5 * math.pi))
    if err > max(epsabs, epsrel * abs(val)) * 10:
        # cancellation leaves err at the roundoff floor of the integrand's size
        size, _ = integrate.quad(lambda t: abs(integrand(t)), 0.0, 2 * math.pi, epsrel=1e-6,
                                 limit=limit, points=(0.5 * math.pi, math.pi, 1.5 * math.pi))
        if err <= 1e-9 * size:
            return val
        raise QuadratureError(f"quadrature did not converge: estimate {val:.6g}, error {err:.3g}")
    return val


# admissibility


def annulus_bounds(params: InertiaParams, c) -> tuple[float, float]:
    """Open interval of levels ``h`` whose ellipse lies inside the disk of radius ``c``."""
    al, be = params.alpha, params.beta
    c2 = float(c) ** 2
    if al > 0:
        return 0.0, 0.5 * c2 * min(al, -be)
    return 0.5 * c2 * max(al, -be), 0.0


def printed_bound(params: InertiaParams, c) -> float:
    """Threshold on ``h*`` involving ``1/mu3``: upper bound if alpha > 0, lower bound otherwise."""
    al, be = params.alpha, params.beta
    c2 = float(c) ** 2
    inv3 = 1.0 / float(params.mu3)
    if al > 0:
        return 0.5 * c2 * (inv3 - max(-al, be))
    return 0.5 * c2 * (inv3 - min(-al, be))


def semiaxes(params: InertiaParams, h: float) -> tuple[float, float]:
    return math.sqrt(-2 * h / params.beta), math.sqrt(2 * h / params.alpha)


def classify_level(h: float, params: InertiaParams, c) -> tuple[bool, bool, bool, str]:
    """Return ``(sign_ok, bound_ok, inside_disk, reason)`` for a candidate level."""
    sigma = params.orientation
    sign_ok = sigma * h > 0
    pb = printed_bound(params, c)
    bound_ok = h < pb if sigma > 0 else h > pb
    lo, hi = annulus_bounds(params, c)
    inside = lo < h < hi
    if not sign_ok:
        reason = "alpha*h <= 0"
    elif not bound_ok:
        reason = "violates mu3 energy bound"
    elif not inside:
        reason = "ellipse leaves the hemisphere"
    else:
        reason = "ok"
    return sign_ok, bound_ok, inside, reason


@dataclass(frozen=True)
class LevelResult:
    h_star: float
    h_bar: float
    admissible: bool
    simple: bool
    reason: str
    bound_ok: bool
    inside: bool
    semiaxes: tuple[float, float] | None


@dataclass
class BifurcationReport:
    params: InertiaParams
    c: float
    method: str
    levels: list[LevelResult]
    melnikov: MelnikovPoly | None = None
    inconclusive: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def admissible(self) -> list[LevelResult]:
        return [lv for lv in self.levels if lv.admissible]

    @property
    def predicted(self) -> list[LevelResult]:
        """Admissible simple roots: the levels where a hyperbolic cycle is expected."""
        return [lv for lv in self.levels if lv.admissible and lv.simple]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["h_star", "h_bar", "admissible", "simple", "reason"])
        for lv in self.levels:
            w.writerow([repr(lv.h_star), repr(lv.h_bar), int(lv.admissible), int(lv.simple), lv.reason])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"top: {self.params}", f"sphere radius c = {self.c:g}", f"method: {self.method}"]
        lines += [f"note: {n}" for n in self.notes]
        if self.inconclusive:
            lines.append("I(h) is identically zero: first-order method inconclusive")
            return "\n".join(lines) + "\n"
        if self.melnikov is not None:
            m = self.melnikov
            lines.append(f"I(h) = {m.scale:.12g} * sum r_k s^k, s = sqrt(|h|), r = "
                         + ", ".join(f"{k}:{r}" for k, r in enumerate(m.rational) if r))
        lo, hi = annulus_bounds(self.params, self.c)
        lines.append(f"period annulus: {lo:.12g} < h < {hi:.12g}")
        if not self.levels:
            lines.append("no positive roots")
        for lv in self.levels:
            ax = "" if lv.semiaxes is None else f" semiaxes=({lv.semiaxes[0]:.6g}, {lv.semiaxes[1]:.6g})"
            lines.append(
                f"h*={lv.h_star:.12g} h_bar={lv.h_bar:.12g} simple={lv.simple} "
                f"admissible={lv.admissible} ({lv.reason}){ax}"
            )
        return "\n".join(lines) + "\n"


def _level_results(roots: Sequence[tuple[float, bool]], params, c) -> list[LevelResult]:
    out = []
    for h, simple in roots:
        sign_ok, bound_ok, inside, reason = classify_level(h, params, c)
        out.append(LevelResult(
            h_star=h,
            h_bar=level_to_energy(params, h, c),
            admissible=sign_ok and bound_ok and inside,
            simple=simple,
            reason=reason,
            bound_ok=sign_ok and bound_ok,
            inside=inside,
            semiaxes=semiaxes(params, h) if sign_ok else None,
        ))
    return out


def admissible_levels(m: MelnikovPoly) -> BifurcationReport:
    """Turn the roots of ``I`` into predicted levels with admissibility reasons."""
    if m.is_zero():
        return BifurcationReport(m.params, float(m.c), f"closed form ({m.family})", [], m, inconclusive=True)
    roots = m.signed_roots()
    return BifurcationReport(m.params, float(m.c), f"closed form ({m.family})",
                             _level_results(roots, m.params, m.c), m)


def quadrature_levels(A, B, params: InertiaParams, c, n_grid: int = 400,
                      zero_tol: float = 1e-11) -> BifurcationReport:
    """Root bracketing of the quadrature ``I(h)/h`` over the period annulus."""
    lo, hi = annulus_bounds(params, c)
    span = hi - lo
    hs = np.linspace(lo + span * 1e-4, hi - span * 1e-4, n_grid)

    def g(h):
        return melnikov_quadrature(A, B, params, c, h, epsabs=1e-13) / h

    vals = np.array([g(h) for h in hs])
    scale = float(np.max(np.abs(vals)))
    if scale <= zero_tol:
        return BifurcationReport(params, float(c), "quadrature", [], None, inconclusive=True)
    roots = []
    for k in range(len(hs) - 1):
        if np.sign(vals[k]) != np.sign(vals[k + 1]):
            r = brentq(g, hs[k], hs[k + 1], xtol=1e-14 * max(1.0, abs(hs[k])))
            d = (g(r + 1e-6 * span) - g(r - 1e-6 * span)) / (2e-6 * span)
            roots.append((r, abs(d) * span > 1e-7 * scale))
    return BifurcationReport(params, float(c), "quadrature", _level_results(roots, params, c), None)


def melnikov_for(sys: PerturbedSystem, c=None) -> MelnikovPoly:
    """Closed form for a perturbed system; ``c`` is fixed by semisphere specs."""
    spec = sys.spec
    if isinstance(spec, SemisphereSpec):
        if c is not None and as_fraction(c) != spec.c:
            raise ValueError("semisphere specs carry their own radius c")
        return melnikov_semisphere(spec.P, spec.Q, sys.params, spec.c)
    if c is None:
        c = sys.c
    if c is None:
        raise ValueError("all-spheres perturbations need a sphere radius c")
    A, B = spec.ab_polynomials()
    return melnikov_allspheres(A, B, sys.params, c)


def analyze(sys: PerturbedSystem, c=None) -> BifurcationReport:
    """Closed form when available, quadrature bracketing otherwise."""
    if c is None:
        c = sys.radius
    try:
        m = melnikov_for(sys, c)
    except StructureError as exc:
        A, B = sys.spec.ab_polynomials()
        rep = quadrature_levels(A, B, sys.params, c)
        rep.notes.append(str(exc))
        return rep
    try:
        return admissible_levels(m)
    except IdenticallyZeroError:
        return BifurcationReport(m.params, float(m.c), f"closed form ({m.family})", [], m, inconclusive=True)
