"""The free Euler top: parameters, vector field, first integrals and the polar chart."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .polynomial import as_fraction

__all__ = [
    "InertiaParams",
    "ChartPoint",
    "DegenerateTopError",
    "ChartDomainError",
    "euler_field",
    "hamiltonian",
    "casimir",
    "structure_matrix",
    "grad_hamiltonian",
    "chart_forward",
    "chart_inverse",
    "reduced_hamiltonian",
    "level_to_energy",
    "energy_to_level",
    "invariant_close",
]


class DegenerateTopError(ValueError):
    """alpha * beta >= 0: the north pole is not a center (e.g. a symmetric top)."""


class ChartDomainError(ValueError):
    pass


@dataclass(frozen=True)
class InertiaParams:
    """Principal moments of inertia, stored exactly.

    ``alpha, beta, gamma`` are the Euler coefficients
    ``(mu2-mu3)/(mu2 mu3)``, ``(mu3-mu1)/(mu1 mu3)``, ``(mu1-mu2)/(mu1 mu2)``.
    Construction rejects non-positive moments, and (unless ``require_center`` is
    False) tops with ``alpha * beta >= 0``.
    """

    mu1: Fraction
    mu2: Fraction
    mu3: Fraction
    require_center: bool = True

    def __post_init__(self):
        for name in ("mu1", "mu2", "mu3"):
            v = as_fraction(getattr(self, name))
            if v <= 0:
                raise ValueError(f"{name} must be positive, got {v}")
            object.__setattr__(self, name, v)
        if self.require_center:
            ab = self.alpha_q * self.beta_q
            if ab == 0:
                raise DegenerateTopError(
                    "alpha*beta = 0 (symmetric top about a transverse axis); no center on the sphere"
                )
            if ab > 0:
                raise DegenerateTopError("alpha*beta > 0: the pole x3 is a saddle, not a center")

    @classmethod
    def from_alpha_beta(cls, alpha, beta, mu3=None, require_center: bool = True) -> "InertiaParams":
        """Recover moments of inertia from ``(alpha, beta)`` and a choice of ``mu3``.

        Positivity needs ``1/mu3 > alpha`` and ``1/mu3 > -beta``; when ``mu3`` is
        omitted the value ``1 / (2 max(alpha, -beta, 1/2))`` is used.
        """
        a, b = as_fraction(alpha), as_fraction(beta)
        if mu3 is None:
            mu3 = 1 / (2 * max(a, -b, Fraction(1, 2)))
        m3 = as_fraction(mu3)
        inv3 = 1 / m3
        inv2 = inv3 - a
        inv1 = b + inv3
        if inv1 <= 0 or inv2 <= 0:
            raise ValueError(f"mu3={m3} too large for alpha={a}, beta={b}: need 1/mu3 > max(alpha, -beta)")
        return cls(1 / inv1, 1 / inv2, m3, require_center=require_center)

    def with_mu3(self, mu3) -> "InertiaParams":
        return InertiaParams(self.mu1, self.mu2, mu3, self.require_center)

    @property
    def mu(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.mu1, self.mu2, self.mu3)

    @property
    def alpha_q(self) -> Fraction:
        return (self.mu2 - self.mu3) / (self.mu2 * self.mu3)

    @property
    def beta_q(self) -> Fraction:
        return (self.mu3 - self.mu1) / (self.mu1 * self.mu3)

    @property
    def gamma_q(self) -> Fraction:
        return (self.mu1 - self.mu2) / (self.mu1 * self.mu2)

    @property
    def alpha(self) -> float:
        return float(self.alpha_q)

    @property
    def beta(self) -> float:
        return float(self.beta_q)

    @property
    def gamma(self) -> float:
        return float(self.gamma_q)

    @property
    def orientation(self) -> int:
        """Sign of alpha; levels of the reduced Hamiltonian inside the disk have this sign."""
        return 1 if self.alpha_q > 0 else -1

    def __str__(self):
        return f"mu=({self.mu1}, {self.mu2}, {self.mu3}) alpha={self.alpha_q} beta={self.beta_q} gamma={self.gamma_q}"


@dataclass(frozen=True)
class ChartPoint:
    x: float
    y: float
    z: float
    c: float


def euler_field(p: InertiaParams, s) -> np.ndarray:
    x1, x2, x3 = s
    return np.array([p.alpha * x2 * x3, p.beta * x1 * x3, p.gamma * x1 * x2])


def hamiltonian(p: InertiaParams, s) -> float:
    x1, x2, x3 = s
    return 0.5 * (x1 * x1 / float(p.mu1) + x2 * x2 / float(p.mu2) + x3 * x3 / float(p.mu3))


def grad_hamiltonian(p: InertiaParams, s) -> np.ndarray:
    x1, x2, x3 = s
    return np.array([x1 / float(p.mu1), x2 / float(p.mu2), x3 / float(p.mu3)])


def casimir(s) -> float:
    x1, x2, x3 = s
    return x1 * x1 + x2 * x2 + x3 * x3


def structure_matrix(s) -> np.ndarray:
    """Lie-Poisson structure matrix at ``s``: rank 2 away from the origin, zero at it."""
    x1, x2, x3 = s
    return np.array([
        [0.0, -x3, x2],
        [x3, 0.0, -x1],
        [-x2, x1, 0.0],
    ], dtype=float)


def chart_forward(s, c: float) -> ChartPoint:
    x1, x2, x3 = s
    if not x3 > 0:
        raise ChartDomainError(f"chart is defined on x3 > 0, got x3={x3}")
    return ChartPoint(float(x1), float(x2), float(casimir(s)), float(c))


def chart_inverse(cp: ChartPoint) -> np.ndarray:
    r2 = cp.x * cp.x + cp.y * cp.y
    if not r2 < cp.z:
        raise ChartDomainError(f"x^2+y^2={r2} is not below z={cp.z}")
    return np.array([cp.x, cp.y, np.sqrt(cp.z - r2)])


def reduced_hamiltonian(p: InertiaParams, x, y):
    """Planar Hamiltonian ``(alpha y^2 - beta x^2) / 2`` of the chart."""
    return 0.5 * (p.alpha * y * y - p.beta * x * x)


def level_to_energy(p: InertiaParams, h, c) -> float:
    """Energy of the top on the orbit over the ellipse ``H = h`` of the sphere of radius ``c``."""
    return float(c) ** 2 / (2 * float(p.mu3)) - h


def energy_to_level(p: InertiaParams, energy, c) -> float:
    return float(c) ** 2 / (2 * float(p.mu3)) - energy


def invariant_close(a, b, rtol: float = 1e-13, floor: float = 1e-15) -> bool:
    """Relative comparison with an absolute floor for near-zero values."""
    a, b = float(a), float(b)
    return abs(a - b) <= max(rtol * max(abs(a), abs(b)), floor)
