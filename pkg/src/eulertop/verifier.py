"""Numerical confirmation of predicted limit cycles.

Cycle hunting runs on the chart of the upper hemisphere with the time
rescaling ``d tau = sqrt(c^2 - x^2 - y^2) dt``, which leaves orbits unchanged:

    x' = alpha y + eps A(x, y, w) / w,    y' = beta x + eps B(x, y, w) / w,

with ``w = sqrt(c^2 - x^2 - y^2)``.  The Poincare section is
``{y = 0, x > 0}``; periods are reported in rescaled time.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .model import casimir, hamiltonian, reduced_hamiltonian
from .perturbation import PerturbedSystem

__all__ = [
    "IntegratorConfig",
    "IntegrationError",
    "CycleNotFound",
    "Trajectory",
    "CycleResult",
    "PlanarReduction",
    "integrate",
    "return_map",
    "displacement_scan",
    "count_cycles",
    "find_cycle",
    "casimir_drift",
    "invariant_drift",
    "close_cycle_3d",
    "trajectory_csv",
    "verification_csv",
]


class IntegrationError(RuntimeError):
    pass


class CycleNotFound(RuntimeError):
    pass


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = np.inf
    max_steps: int = 200_000
    method: str = "DOP853"

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("tolerances must be positive")


@dataclass
class Trajectory:
    t: np.ndarray
    y: np.ndarray
    sol: object = None

    def __call__(self, t):
        return self.sol(t)


def _solve(rhs, t_span, u0, cfg: IntegratorConfig, events=None, dense=False):
    # max_steps is enforced through a minimal mean step length
    sol = solve_ivp(rhs, t_span, np.asarray(u0, dtype=float), method=cfg.method, rtol=cfg.rtol,
                    atol=cfg.atol, max_step=cfg.max_step, events=events, dense_output=dense)
    if sol.status == -1:
        raise IntegrationError(sol.message)
    if len(sol.t) > cfg.max_steps:
        raise IntegrationError(f"more than {cfg.max_steps} steps")
    return sol


def integrate(field_fn, s0, t_end: float, cfg: IntegratorConfig = IntegratorConfig(),
              n_samples: int = 1001) -> Trajectory:
    """Adaptive Runge-Kutta integration sampled on a uniform grid via dense output."""
    sol = _solve(lambda t, u: field_fn(u), (0.0, t_end), s0, cfg, dense=True)
    ts = np.linspace(0.0, t_end, n_samples)
    return Trajectory(ts, sol.sol(ts), sol.sol)


def invariant_drift(sys: PerturbedSystem, s0, t_end: float, cfg: IntegratorConfig = IntegratorConfig(),
                    n_samples: int = 4001) -> tuple[float, float]:
    """Worst deviation of (energy, Casimir) from their initial values."""
    tr = integrate(sys.field, s0, t_end, cfg, n_samples)
    H = np.array([hamiltonian(sys.params, u) for u in tr.y.T])
    D = np.sum(tr.y ** 2, axis=0)
    return float(np.max(np.abs(H - H[0]))), float(np.max(np.abs(D - D[0])))


def casimir_drift(sys: PerturbedSystem, s0, t_end: float, cfg: IntegratorConfig = IntegratorConfig(),
                  n_samples: int = 4001) -> float:
    """``max |D(x(t)) - D(s0)|`` along the full three-dimensional flow."""
    tr = integrate(sys.field, s0, t_end, cfg, n_samples)
    D = np.sum(tr.y ** 2, axis=0)
    return float(np.max(np.abs(D - casimir(s0))))


class PlanarReduction:
    """Time-rescaled flow on the disk of radius ``c`` (image of the upper hemisphere)."""

    def __init__(self, sys: PerturbedSystem, c):
        self.sys = sys
        self.c = float(c)
        self.alpha = sys.params.alpha
        self.beta = sys.params.beta
        self.period0 = 2 * math.pi / math.sqrt(-self.alpha * self.beta)

    def rhs(self, t, u):
        x, y = u
        w2 = self.c * self.c - x * x - y * y
        if w2 <= 0:
            raise IntegrationError(f"orbit left the disk at ({x:.6g}, {y:.6g})")
        fx, fy = self.alpha * y, self.beta * x
        eps = self.sys.epsilon
        if eps:
            w = math.sqrt(w2)
            A, B, _ = self.sys.perturbation((x, y, w))
            fx += eps * A / w
            fy += eps * B / w
        return [fx, fy]

    def level(self, x) -> float:
        return reduced_hamiltonian(self.sys.params, x, 0.0)

    def section_point(self, h) -> float:
        """Section coordinate of the ellipse ``H = h``."""
        return math.sqrt(-2 * h / self.beta)

    def x_max(self) -> float:
        """Largest section coordinate whose unperturbed ellipse stays in the disk."""
        return self.c * min(1.0, math.sqrt(abs(self.alpha / self.beta)))


def _section_event(direction):
    def ev(t, u):
        return u[1]
    ev.terminal = True
    ev.direction = direction
    return ev


def _escape_event(c):
    def ev(t, u):
        return c * c * (1 - 1e-12) - u[0] ** 2 - u[1] ** 2
    ev.terminal = True
    ev.direction = -1
    return ev


def return_map(sys: PerturbedSystem, c, x0: float, cfg: IntegratorConfig = IntegratorConfig(),
               max_periods: float = 20.0) -> tuple[float, float]:
    """Next crossing of ``{y = 0, x > 0}`` starting from ``(x0, 0)``.

    Returns ``(x1, transit_time)`` with the time in rescaled units.  The half
    turn through ``x < 0`` is located first so the start point is never
    mistaken for a crossing.
    """
    red = sys if isinstance(sys, PlanarReduction) else PlanarReduction(sys, c)
    if not 0 < x0 < red.c:
        raise ValueError(f"x0={x0} not on the section inside the disk")
    # on the section y' = beta x: the orbit leaves downward when beta < 0
    down = -1 if red.beta < 0 else 1
    t_max = max_periods * red.period0
    u = np.array([x0, 0.0])
    t_total = 0.0
    for direction in (-down, down):
        sol = _solve(red.rhs, (0.0, t_max), u, cfg, events=[_section_event(direction), _escape_event(red.c)])
        if sol.t_events[1].size:
            raise IntegrationError("orbit escapes the disk")
        if not sol.t_events[0].size:
            raise IntegrationError(f"no section crossing within t={t_max:.3g}")
        u = sol.y_events[0][0].copy()
        u[1] = 0.0
        t_total += sol.t_events[0][0]
    if u[0] <= 0:
        raise IntegrationError("crossing on the wrong half of the section")
    return float(u[0]), float(t_total)


def displacement_scan(sys: PerturbedSystem, c, xs, cfg: IntegratorConfig = IntegratorConfig()) -> np.ndarray:
    """Displacement ``d(x) = P(x) - x`` of the return map at each section point."""
    red = PlanarReduction(sys, c)
    return np.array([return_map(red, c, float(x), cfg)[0] - float(x) for x in xs])


@dataclass
class CycleResult:
    x_star: float
    period: float
    h_num: float
    rho: float
    classification: str
    epsilon: float
    iterations: int
    converged: bool = True
    noise: float = 0.0
    period_units: str = "rescaled"
    history: list = field(default_factory=list)


def find_cycle(sys: PerturbedSystem, c, h_guess: float, cfg: IntegratorConfig | None = None,
               max_iter: int = 50, fd_step: float = 1e-6) -> CycleResult:
    """Locate the fixed point of the return map near the level ``h_guess``.

    Secant iteration on the displacement, started from the section point of
    ``H = h_guess``.  The return-map derivative ``rho`` is a central difference
    with step ``fd_step * c``.
    """
    if cfg is None:
        cfg = IntegratorConfig(rtol=1e-12, atol=1e-14)
    red = PlanarReduction(sys, c)
    cc = red.c
    x0 = red.section_point(h_guess)
    if not 0 < x0 < cc:
        raise ValueError(f"level {h_guess} does not meet the section inside the disk")

    def d(x):
        return return_map(red, c, x, cfg)[0] - x

    noise_floor = 1e3 * cfg.rtol * cc
    probes = [x for x in (0.9 * x0, x0, min(1.1 * x0, 0.5 * (x0 + cc))) if 0 < x < cc]
    dp = [d(x) for x in probes]
    if max(abs(v) for v in dp) < noise_floor:
        raise CycleNotFound("continuum of fixed points: the return map is the identity near this level")

    xa, xb = x0, probes[-1] if probes[-1] != x0 else probes[0]
    da, db = dp[1], d(xb)
    history = [(xa, da), (xb, db)]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        if db == da:
            break
        xn = xb - db * (xb - xa) / (db - da)
        if not 0 < xn < cc:
            raise CycleNotFound(f"secant step left the section ({xn:.6g})")
        xa, da = xb, db
        xb, db = xn, d(xn)
        history.append((xb, db))
        if abs(xb - xa) < 1e-13 * cc or abs(db) < 1e-14 * cc:
            converged = True
            break
    if not converged:
        raise CycleNotFound(f"no convergence in {max_iter} iterations (last |d|={abs(db):.3g})")
    if xb < 1e-8 * cc:
        raise CycleNotFound("iteration collapsed onto the center")

    x_star = xb
    step = fd_step * cc
    p_plus = return_map(red, c, x_star + step, cfg)[0]
    p_minus = return_map(red, c, x_star - step, cfg)[0]
    rho = (p_plus - p_minus) / (2 * step)
    p2p = return_map(red, c, x_star + 2 * step, cfg)[0]
    p2m = return_map(red, c, x_star - 2 * step, cfg)[0]
    rho2 = (p2p - p2m) / (4 * step)
    noise = abs(rho - rho2) + cfg.rtol * cc / step
    _, period = return_map(red, c, x_star, cfg)
    if abs(rho - 1) < 10 * noise:
        cls = "unresolved"
    elif rho < 1:
        cls = "attracting"
    else:
        cls = "repelling"
    return CycleResult(x_star=x_star, period=period, h_num=red.level(x_star), rho=rho,
                       classification=cls, epsilon=sys.epsilon, iterations=it, noise=noise,
                       history=history)


def count_cycles(sys: PerturbedSystem, c, n: int = 60, cfg: IntegratorConfig | None = None,
                 margin: float = 0.02) -> list[float]:
    """Approximate section coordinates of cycles from sign changes of the displacement."""
    cfg = cfg or IntegratorConfig(rtol=1e-11, atol=1e-13)
    red = PlanarReduction(sys, c)
    lo, hi = red.c * margin, red.x_max() * (1 - margin)
    xs = np.linspace(lo, hi, n)
    ds = displacement_scan(sys, c, xs, cfg)
    out = []
    for k in range(n - 1):
        if np.sign(ds[k]) != np.sign(ds[k + 1]):
            out.append(float(xs[k] - ds[k] * (xs[k + 1] - xs[k]) / (ds[k + 1] - ds[k])))
    return out


def close_cycle_3d(sys: PerturbedSystem, c, cycle: CycleResult,
                   cfg: IntegratorConfig | None = None) -> float:
    """Integrate the 3D field from the lifted cycle point for one turn; return the miss distance."""
    cfg = cfg or IntegratorConfig(rtol=1e-12, atol=1e-14)
    c = float(c)
    x = cycle.x_star
    u0 = np.array([x, 0.0, math.sqrt(c * c - x * x)])
    beta = sys.params.beta
    down = -1 if beta < 0 else 1
    # physical time: the rescaled period stretched by at most 1/w_min
    t_max = 20 * cycle.period / max(math.sqrt(max(c * c - x * x, 0.0)), 1e-3)
    u = u0
    for direction in (-down, down):
        sol = _solve(sys.rhs, (0.0, t_max), u, cfg, events=[_section_event_3d(direction)])
        if not sol.t_events[0].size:
            raise IntegrationError("3D orbit did not return to the section")
        u = sol.y_events[0][0].copy()
    return float(np.linalg.norm(u - u0))


def _section_event_3d(direction):
    def ev(t, u):
        return u[1]
    ev.terminal = True
    ev.direction = direction
    return ev


def trajectory_csv(sys: PerturbedSystem, tr: Trajectory) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "x1", "x2", "x3", "H", "D"])
    for t, u in zip(tr.t, tr.y.T):
        w.writerow([repr(float(t)), *(repr(float(v)) for v in u),
                    repr(hamiltonian(sys.params, u)), repr(casimir(u))])
    return buf.getvalue()


def verification_csv(rows: list[dict]) -> str:
    cols = ["h_star", "h_num", "rho", "epsilon", "converged", "classification", "casimir_drift", "status"]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: r.get(k, "") for k in cols})
    return buf.getvalue()
