"""Command-line front end.

Exit codes: 0 success, 1 a reproduced claim did not hold, 2 inconclusive
(``I(h)`` identically zero), 3 invalid spec or arguments, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import catalog
from .melnikov import (
    BifurcationReport,
    QuadratureError,
    analyze,
    melnikov_allspheres,
    moment_table,
)
from .model import InertiaParams
from .perturbation import PerturbedSystem, SpecError, load_spec
from .polynomial import as_fraction
from .verifier import (
    CycleNotFound,
    IntegrationError,
    IntegratorConfig,
    casimir_drift,
    find_cycle,
    integrate,
    trajectory_csv,
    verification_csv,
)

log = logging.getLogger("eulertop")

EXIT_OK, EXIT_CLAIM, EXIT_INCONCLUSIVE, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3, 4
OUT_ENV = "EULERTOP_OUT"
EXAMPLES = ("example1", "example2", "corollary-m3", "corollary-m4", "corollary-m5",
            "corollary-m6", "corollary-m7")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    spec: Path | None = None
    out: Path | None = None
    c: Fraction | None = None
    mu3: Fraction | None = None
    epsilons: list[float] = field(default_factory=lambda: [1e-3, 5e-4, 2.5e-4])
    rtol: float = 1e-12
    atol: float = 1e-14
    fmt: str = "text"
    max_degree: int = 8
    name: str | None = None
    seed: int = 0

    def apply(self, sys_: PerturbedSystem) -> tuple[PerturbedSystem, Fraction]:
        """Apply overrides to a loaded system; return it with the analysis radius."""
        if sys_.kind == "semisphere":
            if self.c is not None:
                raise UsageError("--c cannot override the intrinsic radius of a semisphere spec")
            c = sys_.spec.c
        else:
            c = self.c if self.c is not None else (sys_.c if sys_.c is not None else Fraction(1))
        if self.mu3 is not None:
            try:
                sys_ = PerturbedSystem(sys_.params.with_mu3(self.mu3), sys_.spec, sys_.epsilon, sys_.c)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
        return sys_, c

    @property
    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(rtol=self.rtol, atol=self.atol)


def _emit(cfg: RunConfig, name: str, text: str, stream=None):
    stream = stream or sys.stdout
    stream.write(text)
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        (cfg.out / name).write_text(text)


def _report_out(cfg: RunConfig, rep: BifurcationReport, stem: str = "report"):
    if cfg.fmt == "csv":
        _emit(cfg, f"{stem}.csv", rep.to_csv())
    else:
        _emit(cfg, f"{stem}.txt", rep.to_text())
        if cfg.out is not None:
            (cfg.out / f"{stem}.csv").write_text(rep.to_csv())


def cmd_analyze(cfg: RunConfig) -> int:
    sys_, c = cfg.apply(load_spec(cfg.spec))
    rep = analyze(sys_, c)
    _report_out(cfg, rep)
    return EXIT_INCONCLUSIVE if rep.inconclusive else EXIT_OK


def verify_rows(sys_: PerturbedSystem, c, rep: BifurcationReport, epsilons, icfg: IntegratorConfig,
                drift_time: float = 100.0, dump_dir: Path | None = None) -> list[dict]:
    rows = []
    for lv in rep.levels:
        if not lv.admissible or not lv.simple:
            why = "admissibility" if not lv.admissible else "non-simple root"
            rows.append({"h_star": lv.h_star, "status": f"skipped: {why}", "converged": 0})
            continue
        for eps in epsilons:
            row = {"h_star": lv.h_star, "epsilon": eps}
            pert = sys_.with_epsilon(eps)
            try:
                cyc = find_cycle(pert, c, lv.h_star, icfg)
                row.update(h_num=cyc.h_num, rho=cyc.rho, converged=1,
                           classification=cyc.classification, status="ok")
                if dump_dir is not None:
                    x = cyc.x_star
                    s0 = np.array([x, 0.0, np.sqrt(float(c) ** 2 - x * x)])
                    tr = integrate(pert.field, s0, 3 * cyc.period / np.sqrt(float(c) ** 2 - x * x), icfg)
                    dump_dir.mkdir(parents=True, exist_ok=True)
                    (dump_dir / f"trajectory_h{lv.h_star:.6g}_eps{eps:g}.csv").write_text(
                        trajectory_csv(pert, tr))
            except (CycleNotFound, IntegrationError, ValueError) as exc:
                row.update(converged=0, status=f"failed: {exc}")
            if sys_.kind != "semisphere":
                try:
                    x = np.sqrt(-2 * lv.h_star / sys_.params.beta)
                    s0 = np.array([x, 0.0, np.sqrt(float(c) ** 2 - x * x)])
                    row["casimir_drift"] = casimir_drift(pert, s0, drift_time, icfg)
                except IntegrationError as exc:
                    row["casimir_drift"] = f"failed: {exc}"
            rows.append(row)
    return rows


def cmd_verify(cfg: RunConfig) -> int:
    sys_, c = cfg.apply(load_spec(cfg.spec))
    rep = analyze(sys_, c)
    if rep.inconclusive:
        _emit(cfg, "report.txt", rep.to_text())
        return EXIT_INCONCLUSIVE
    dump = cfg.out / "trajectories" if cfg.out is not None else None
    rows = verify_rows(sys_, c, rep, cfg.epsilons, cfg.integrator, dump_dir=dump)
    _emit(cfg, "verification.csv", verification_csv(rows))
    if any(r.get("status", "").startswith("failed") for r in rows):
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_moments(cfg: RunConfig) -> int:
    lines = []
    if cfg.fmt == "csv":
        lines.append("i,j,rational_times_pi,value")
        for m in moment_table(cfg.max_degree):
            lines.append(f"{m.i},{m.j},{m.rational},{m.value!r}")
    else:
        for m in moment_table(cfg.max_degree):
            lines.append(f"W({m.i},{m.j}) = {m}")
    _emit(cfg, "moments." + ("csv" if cfg.fmt == "csv" else "txt"), "\n".join(lines) + "\n")
    return EXIT_OK


def _example1(cfg: RunConfig) -> int:
    params = InertiaParams(Fraction(1, 2), Fraction(1, 3), Fraction(1, 5))
    c = Fraction(1)
    limit = catalog.example1_mu3_limit(params)
    header = [f"# example1: {params}, c={c}",
              f"# mu3 pinned to {params.mu3}; mu3 rule limit = {limit}"]
    spec = catalog.example1_field(1, 2)
    rep = analyze(PerturbedSystem(params, spec), c)
    expected = float(catalog.example1_root(params, c))
    ok = len(rep.levels) == 1 and abs(rep.levels[0].h_star - expected) <= 1e-10 * abs(expected)
    header.append(f"# expected h* = alpha beta c^2/(beta - alpha) = {expected!r}: {'reproduced' if ok else 'MISMATCH'}")
    _emit(cfg, "example1.txt", "\n".join(header) + "\n" + rep.to_text())
    return EXIT_OK if ok else EXIT_CLAIM


def _example2(cfg: RunConfig) -> int:
    params, c, k = catalog.search_example2_parameters()
    spec = catalog.example2_field(k)
    sys_ = PerturbedSystem(params, spec)
    m = melnikov_allspheres(spec.A, spec.B, params, c)
    hc = m.h_rational()
    al, be = params.alpha_q, params.beta_q
    # I/h = lambda (-2 alpha beta + (alpha + beta) h)
    shape_ok = len(hc) == 3 and hc[0] == 0 and hc[1] * (al + be) == hc[2] * (-2 * al * be)
    lines = [f"# example2: {params}, c={c}, k={k} (first admissible grid point)",
             f"# I(h)/h linear with root 2 alpha beta/(alpha+beta) = {catalog.example2_root(params)}: "
             + ("reproduced" if shape_ok else "MISMATCH")]
    if al > 0 and al + be < 0:
        lines.append(f"# alpha>0, alpha+beta<0: admissible iff c > c* = {catalog.example2_critical_radius(params):.12g}")
    elif al > 0:
        lines.append("# alpha>0, alpha+beta>0: root has the wrong sign, no cycle for any c")
    else:
        lines.append("# alpha<0: root sign matches; c chosen so the ellipse stays inside the hemisphere")
    rep = analyze(sys_, c)
    rows = verify_rows(sys_, c, rep, cfg.epsilons, cfg.integrator)
    _emit(cfg, "example2.txt", "\n".join(lines) + "\n" + rep.to_text() + verification_csv(rows))
    return EXIT_OK if shape_ok else EXIT_CLAIM


def _corollary(cfg: RunConfig, m: int) -> int:
    rng = np.random.default_rng(cfg.seed)
    lines = [f"# corollary m={m}"]
    ok = True
    if m == 7:
        params = catalog.random_params(rng, alpha_sign=1)
        c = Fraction(1)
        lines.append(f"# {params}, c={c}; field A = lam1 x1 x2^2 x3^3, B = lam2 x1^2 x2 x3^3")
        roots = []
        for _ in range(5):
            l1, l2 = (Fraction(int(rng.integers(-9, 10)) or 1, int(rng.integers(1, 5))) for _ in range(2))
            if l1 * params.beta_q == l2 * params.alpha_q:
                continue
            mp = melnikov_allspheres(*catalog.example1_field(l1, l2).ab_polynomials(), params, c)
            r = mp.signed_roots()
            roots.append(r[0][0] if r else None)
            lines.append(f"lambda1={l1} lambda2={l2}: roots {[float(h) for h, _ in r]}")
        expected = float(catalog.example1_root(params, c))
        ok = all(r is not None and abs(r - expected) <= 1e-10 * abs(expected) for r in roots)
        lines.append(f"expected alpha beta c^2/(beta-alpha) = {expected!r}: {'field independent' if ok else 'MISMATCH'}")
    else:
        for trial in range(5):
            params = catalog.random_params(rng)
            spec = catalog.random_cross_product(rng, m)
            A, B, _ = spec.components()
            mp = melnikov_allspheres(A, B, params, 1)
            if m in (3, 5):
                good = mp.is_zero()
                lines.append(f"trial {trial}: I identically zero: {good}")
            else:
                k = {4: 1, 6: 2}[m]
                nroots = 0 if mp.is_zero() else len(mp.roots())
                good = len(mp.h_rational()) - 2 <= k and nroots <= k
                lines.append(f"trial {trial}: deg M = {len(mp.h_rational()) - 2}, positive roots {nroots} (<= {k})")
            ok &= good
    _emit(cfg, f"corollary-m{m}.txt", "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_CLAIM


def cmd_example(cfg: RunConfig) -> int:
    if cfg.name == "example1":
        return _example1(cfg)
    if cfg.name == "example2":
        return _example2(cfg)
    return _corollary(cfg, int(cfg.name.rsplit("m", 1)[1]))


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad epsilon list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=None,
                        help=f"output directory (default: ${OUT_ENV} if set)")
    common.add_argument("--format", dest="fmt", choices=("csv", "text"), default="text")
    common.add_argument("--rtol", type=float, default=1e-12)
    common.add_argument("--atol", type=float, default=1e-14)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="eulertop", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", required=True)
    for name in ("analyze", "verify"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--spec", type=Path, required=True)
        sp.add_argument("--c", type=as_fraction, default=None, help="sphere radius (all-spheres kinds)")
        sp.add_argument("--mu3", type=as_fraction, default=None)
        if name == "verify":
            sp.add_argument("--epsilon", type=_float_list, default=[1e-3, 5e-4, 2.5e-4])
    sp = sub.add_parser("moments", parents=[common])
    sp.add_argument("max_degree", type=int)
    sp = sub.add_parser("example", parents=[common])
    sp.add_argument("name", choices=EXAMPLES)
    sp.add_argument("--epsilon", type=_float_list, default=[1e-2, 5e-3, 2.5e-3])
    sp.add_argument("--seed", type=int, default=0)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    out = args.out if args.out is not None else (Path(os.environ[OUT_ENV]) if os.environ.get(OUT_ENV) else None)
    cfg = RunConfig(subcommand=args.subcommand, out=out, rtol=args.rtol, atol=args.atol, fmt=args.fmt)
    for attr in ("spec", "c", "mu3", "max_degree", "name", "seed"):
        if hasattr(args, attr):
            setattr(cfg, attr, getattr(args, attr))
    if hasattr(args, "epsilon"):
        cfg.epsilons = args.epsilon
    handlers = {"analyze": cmd_analyze, "verify": cmd_verify, "moments": cmd_moments, "example": cmd_example}
    try:
        return handlers[cfg.subcommand](cfg)
    except (SpecError, UsageError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (IntegrationError, QuadratureError, CycleNotFound) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
