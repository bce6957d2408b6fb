"""Casimir-compatible polynomial perturbations of the Euler top.

Three kinds of perturbation are supported:

``SemisphereSpec``
    ``A = x3 P(x1,x2,D)``, ``B = x3 Q(x1,x2,D)``,
    ``C = (D - c^2)/(2 x3) R(x1,x2,D) - x1 P - x2 Q`` with ``D = |x|^2``.
    Only the sphere of radius ``c`` (minus its equator) is invariant.
``TangentFieldSpec``
    Arbitrary polynomial ``(A, B, C)`` with ``x1 A + x2 B + x3 C == 0``; every
    sphere is invariant.
``CrossProductSpec``
    ``(A, B, C) = x × (L, M, N)``, which is tangent by construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Union

import numpy as np

from .model import InertiaParams, euler_field
from .polynomial import Poly3, as_fraction

__all__ = [
    "SEMISPHERE_NAMES",
    "DomainError",
    "TangencyError",
    "SpecError",
    "SemisphereSpec",
    "TangentFieldSpec",
    "CrossProductSpec",
    "PerturbedSystem",
    "build_semisphere",
    "build_cross_product",
    "tangency_residual",
    "sphere_polynomial",
    "split_x3_form",
    "perturbed_field",
    "spec_to_dict",
    "system_from_dict",
    "system_to_dict",
    "load_spec",
    "dump_spec",
]

SEMISPHERE_NAMES = ("x1", "x2", "z")
X3_FLOOR = 1e-12


class DomainError(ValueError):
    pass


class TangencyError(ValueError):
    """The field does not satisfy ``x1 A + x2 B + x3 C == 0``."""


class SpecError(ValueError):
    """Malformed perturbation spec."""


def sphere_polynomial() -> Poly3:
    x1, x2, x3 = Poly3.variables()
    return x1 * x1 + x2 * x2 + x3 * x3


def tangency_residual(A: Poly3, B: Poly3, C: Poly3) -> Poly3:
    """``x1 A + x2 B + x3 C`` computed exactly; zero iff every sphere is invariant."""
    x1, x2, x3 = Poly3.variables()
    return x1 * A + x2 * B + x3 * C


def split_x3_form(A: Poly3) -> Poly3:
    """Return ``P(x, y, z)`` with ``A = x3 * P(x1, x2, x3**2)``.

    Raises ValueError if some monomial of ``A`` has an even power of ``x3``.
    """
    out = {}
    for (i, j, k), coef in A.terms.items():
        if k % 2 == 0:
            raise ValueError(
                f"monomial x1^{i} x2^{j} x3^{k} has an even power of x3; "
                "A is not of the form x3*P(x1, x2, x3^2)"
            )
        out[(i, j, (k - 1) // 2)] = coef
    return Poly3(out)


@dataclass(frozen=True)
class SemisphereSpec:
    """Perturbation preserving the single sphere ``D = c^2``.

    ``P, Q, R`` are polynomials in ``(x1, x2, z)``; the third slot is evaluated
    at ``z = D(x)``.
    """

    P: Poly3
    Q: Poly3
    R: Poly3
    c: Fraction
    x3_floor: float = X3_FLOOR
    kind = "semisphere"

    def __post_init__(self):
        c = as_fraction(self.c)
        if c <= 0:
            raise SpecError("sphere radius c must be positive")
        object.__setattr__(self, "c", c)

    @property
    def c2(self) -> Fraction:
        return self.c * self.c

    def field(self, s) -> np.ndarray:
        x1, x2, x3 = s
        if x3 == 0:
            raise DomainError("semisphere perturbation is undefined on x3 = 0")
        D = x1 * x1 + x2 * x2 + x3 * x3
        p = self.P.eval((x1, x2, D))
        q = self.Q.eval((x1, x2, D))
        offset = D - float(self.c2)
        if self.R and offset != 0.0:
            if abs(x3) < self.x3_floor:
                raise DomainError(f"|x3|={abs(x3):.3g} below floor {self.x3_floor:g} off the sphere")
            corr = offset / (2.0 * x3) * self.R.eval((x1, x2, D))
        else:
            corr = 0.0
        return np.array([x3 * p, x3 * q, corr - x1 * p - x2 * q])

    def hatted(self) -> tuple[Poly3, Poly3, Poly3]:
        """``P, Q, R`` with ``z`` replaced by ``x1^2 + x2^2 + x3^2``."""
        D = sphere_polynomial()
        return tuple(poly.substitute(2, D) for poly in (self.P, self.Q, self.R))

    def ab_polynomials(self) -> tuple[Poly3, Poly3]:
        Ph, Qh, _ = self.hatted()
        x3 = Poly3.var(2)
        return x3 * Ph, x3 * Qh

    def x3_times_c(self) -> Poly3:
        """``x3 * C`` as a polynomial (``C`` itself is rational in ``x3``)."""
        Ph, Qh, Rh = self.hatted()
        x1, x2, x3 = Poly3.variables()
        return (sphere_polynomial() - self.c2) * Rh.scale(Fraction(1, 2)) - x3 * (x1 * Ph + x2 * Qh)

    def flux(self) -> Poly3:
        """``x1 A + x2 B + x3 C``; vanishes on the preserved sphere."""
        A, B = self.ab_polynomials()
        x1, x2, _ = Poly3.variables()
        return x1 * A + x2 * B + self.x3_times_c()


@dataclass(frozen=True)
class TangentFieldSpec:
    """Polynomial field tangent to every sphere; tangency is checked exactly."""

    A: Poly3
    B: Poly3
    C: Poly3
    kind = "tangent"

    def __post_init__(self):
        res = tangency_residual(self.A, self.B, self.C)
        if not res.is_zero():
            raise TangencyError(f"x1*A + x2*B + x3*C = {res} is not identically zero")

    def field(self, s) -> np.ndarray:
        return np.array([self.A.eval(s), self.B.eval(s), self.C.eval(s)])

    def components(self) -> tuple[Poly3, Poly3, Poly3]:
        return self.A, self.B, self.C

    def ab_polynomials(self) -> tuple[Poly3, Poly3]:
        return self.A, self.B


@dataclass(frozen=True)
class CrossProductSpec:
    """``(A, B, C) = (x3 M - x2 N, x1 N - x3 L, x2 L - x1 M)``."""

    L: Poly3
    M: Poly3
    N: Poly3
    kind = "cross_product"
    _tangent: TangentFieldSpec = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_tangent", build_cross_product(self.L, self.M, self.N))

    def field(self, s) -> np.ndarray:
        return self._tangent.field(s)

    def components(self) -> tuple[Poly3, Poly3, Poly3]:
        return self._tangent.components()

    def ab_polynomials(self) -> tuple[Poly3, Poly3]:
        return self._tangent.A, self._tangent.B

    def as_tangent(self) -> TangentFieldSpec:
        return self._tangent


Spec = Union[SemisphereSpec, TangentFieldSpec, CrossProductSpec]


def build_semisphere(P: Poly3, Q: Poly3, R: Poly3, c) -> SemisphereSpec:
    return SemisphereSpec(P, Q, R, c)


def build_cross_product(L: Poly3, M: Poly3, N: Poly3) -> TangentFieldSpec:
    x1, x2, x3 = Poly3.variables()
    return TangentFieldSpec(x3 * M - x2 * N, x1 * N - x3 * L, x2 * L - x1 * M)


@dataclass(frozen=True)
class PerturbedSystem:
    """Euler top plus ``epsilon`` times a Casimir-compatible perturbation."""

    params: InertiaParams
    spec: Spec
    epsilon: float = 0.0
    c: Fraction | None = None  # analysis radius for all-spheres kinds

    def __post_init__(self):
        if self.c is not None:
            c = as_fraction(self.c)
            if c <= 0:
                raise SpecError("sphere radius c must be positive")
            if self.spec.kind == "semisphere" and c != self.spec.c:
                raise SpecError("a semisphere spec carries its own radius")
            object.__setattr__(self, "c", c)

    @property
    def kind(self) -> str:
        return self.spec.kind

    @property
    def radius(self) -> Fraction | None:
        """Intrinsic radius for semisphere specs, else the optional analysis radius."""
        return self.spec.c if self.kind == "semisphere" else self.c

    def with_epsilon(self, epsilon: float) -> "PerturbedSystem":
        return PerturbedSystem(self.params, self.spec, epsilon, self.c)

    def perturbation(self, s) -> np.ndarray:
        return self.spec.field(s)

    def field(self, s) -> np.ndarray:
        base = euler_field(self.params, s)
        if self.epsilon == 0.0:
            if self.kind == "semisphere" and s[2] == 0:
                raise DomainError("semisphere perturbation is undefined on x3 = 0")
            return base
        return base + self.epsilon * self.spec.field(s)

    def rhs(self, t, u):
        return self.field(u)


def perturbed_field(sys: PerturbedSystem, s) -> np.ndarray:
    return sys.field(s)


# spec files


def _num_out(q: Fraction):
    return int(q) if q.denominator == 1 else str(q)


def spec_to_dict(spec: Spec) -> dict:
    if spec.kind == "semisphere":
        return {
            "kind": "semisphere",
            "P": spec.P.to_str(SEMISPHERE_NAMES),
            "Q": spec.Q.to_str(SEMISPHERE_NAMES),
            "R": spec.R.to_str(SEMISPHERE_NAMES),
            "c": _num_out(spec.c),
        }
    if spec.kind == "tangent":
        return {"kind": "tangent", "A": str(spec.A), "B": str(spec.B), "C": str(spec.C)}
    return {"kind": "cross_product", "L": str(spec.L), "M": str(spec.M), "N": str(spec.N)}


def system_to_dict(sys: PerturbedSystem) -> dict:
    out = spec_to_dict(sys.spec)
    out["params"] = {"mu": [_num_out(m) for m in sys.params.mu]}
    out["epsilon"] = sys.epsilon
    if sys.kind != "semisphere" and sys.c is not None:
        out["c"] = _num_out(sys.c)
    return out


def _poly(d: dict, key: str, names=("x1", "x2", "x3")) -> Poly3:
    if key not in d:
        raise SpecError(f"missing polynomial {key!r}")
    try:
        return Poly3.parse(str(d[key]), names)
    except ValueError as exc:
        raise SpecError(f"polynomial {key!r}: {exc}") from exc


def system_from_dict(d: dict) -> PerturbedSystem:
    kind = d.get("kind")
    try:
        mu = d["params"]["mu"]
        if len(mu) != 3:
            raise SpecError("params.mu needs three moments of inertia")
        params = InertiaParams(*[as_fraction(m) for m in mu])
    except (KeyError, TypeError) as exc:
        raise SpecError(f"bad params block: {exc}") from exc
    except ValueError as exc:
        raise SpecError(str(exc)) from exc
    eps = float(d.get("epsilon", 0.0))
    if kind == "semisphere":
        if "c" not in d:
            raise SpecError("semisphere spec needs the sphere radius 'c'")
        spec = SemisphereSpec(
            _poly(d, "P", SEMISPHERE_NAMES), _poly(d, "Q", SEMISPHERE_NAMES),
            _poly(d, "R", SEMISPHERE_NAMES), as_fraction(d["c"]),
        )
    elif kind in ("tangent", "cross_product"):
        spec = _all_spheres_spec(d, kind)
        c = d.get("c")
        try:
            return PerturbedSystem(params, spec, eps, None if c is None else as_fraction(c))
        except ValueError as exc:
            raise SpecError(f"bad radius c: {exc}") from exc
    else:
        raise SpecError(f"unknown perturbation kind {kind!r}")
    return PerturbedSystem(params, spec, eps)


def _all_spheres_spec(d: dict, kind: str):
    if kind == "tangent":
        try:
            spec = TangentFieldSpec(_poly(d, "A"), _poly(d, "B"), _poly(d, "C"))
        except TangencyError as exc:
            raise SpecError(str(exc)) from exc
        return spec
    return CrossProductSpec(_poly(d, "L"), _poly(d, "M"), _poly(d, "N"))


def load_spec(path) -> PerturbedSystem:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON ({exc})") from exc
    return system_from_dict(data)


def dump_spec(sys: PerturbedSystem, path=None) -> str:
    text = json.dumps(system_to_dict(sys), indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
