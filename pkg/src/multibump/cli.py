"""Batch command-line front end.

Subcommands map one-to-one onto the library stages: profile solves, analytic
constants, direct-quadrature energies, expansion fits, reduced critical
points, scaling sweeps, residual norms, and the verification suite.  Every
run writes its artifacts plus a manifest into the output directory; all
floats are printed with 17 significant digits and nothing nondeterministic
(timestamps, wall times) enters an artifact, so rerunning a subcommand with
the same config and seed reproduces every byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys

import numpy as np
from dataclasses import dataclass, fields, replace
from functools import lru_cache
from pathlib import Path

from . import __version__
from .acceptance import ALL_CHECKS, FAST_CHECKS, run_checks
from .coupling import CouplingParams, InadmissibleCoupling, analytic_constants
from .energy import QuadratureError, builtin_potential, energy_direct
from .expansion import (
    ExpansionConstants,
    FitError,
    PotParams,
    Provenance,
    fit_expansion_constants,
)
from .field import AnsatzField, residual_norm
from .geometry import (
    segregated_config,
    sign_changing_config,
    synchronized_config,
)
from .ground_state import GroundStateError, save_profile, solve_ground_state
from .reduced import (
    NoCriticalPoint,
    SolverError,
    scaling_sweep,
    solve_contraction,
    solve_newton,
    solve_segregated,
    window_center,
)

_FAMILIES = ("synchronized", "segregated", "sign-changing")
_SOLVERS = ("newton", "contraction")
_FORMS = ("a4", "f1")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_ACCEPTANCE = 3


class ConfigError(Exception):
    """Config file rejected; the message carries line numbers when known."""


@dataclass(frozen=True)
class RunConfig:
    mu1: float = 1.0
    mu2: float = 1.0
    beta: float = 0.0
    a: float = 1.0
    m: float = 2.0
    b: float = 1.0
    n: float = 2.0
    family: str = "synchronized"
    k: int = 8
    k_list: tuple[int, ...] | None = None
    r: float = 10.0
    h: float = 0.5
    rho: float | None = None
    r_grid: tuple[float, ...] | None = None
    h_grid: tuple[float, ...] | None = None
    rho_grid: tuple[float, ...] | None = None
    refinement: int = 1
    tol: float = 1e-10
    max_iter: int = 200
    solver: str = "newton"
    form: str = "a4"
    initial_r: float | None = None
    initial_h: float | None = None
    initial_rho: float | None = None
    constants_from: str | None = None
    checks: str = "fast"
    seed: int = 0
    out: str = "out"


def _parse_int(raw: str) -> int:
    return int(raw, 10)


def _parse_float(raw: str) -> float:
    return float(raw)


def _parse_int_list(raw: str) -> tuple[int, ...]:
    return tuple(int(p.strip(), 10) for p in raw.split(",") if p.strip())


def _parse_float_list(raw: str) -> tuple[float, ...]:
    return tuple(float(p.strip()) for p in raw.split(",") if p.strip())


def _parse_str(raw: str) -> str:
    return raw


# key -> value parser; the RunConfig defaults are the documented defaults
_KEY_PARSERS = {
    "mu1": _parse_float, "mu2": _parse_float, "beta": _parse_float,
    "a": _parse_float, "m": _parse_float, "b": _parse_float, "n": _parse_float,
    "family": _parse_str,
    "k": _parse_int, "k_list": _parse_int_list,
    "r": _parse_float, "h": _parse_float, "rho": _parse_float,
    "r_grid": _parse_float_list, "h_grid": _parse_float_list,
    "rho_grid": _parse_float_list,
    "refinement": _parse_int, "tol": _parse_float, "max_iter": _parse_int,
    "solver": _parse_str, "form": _parse_str,
    "initial_r": _parse_float, "initial_h": _parse_float,
    "initial_rho": _parse_float,
    "constants_from": _parse_str,
    "checks": _parse_str,
    "seed": _parse_int,
    "out": _parse_str,
}


def _validate(cfg: RunConfig) -> RunConfig:
    def bad(constraint: str, value):
        raise ConfigError(f"constraint {constraint} violated (got {value})")

    if not cfg.m > 1.0:
        bad("m > 1", f"m = {cfg.m:.17g}")
    if not cfg.n > 1.0:
        bad("n > 1", f"n = {cfg.n:.17g}")
    if not cfg.a > -1.0:
        bad("a > -1", f"a = {cfg.a:.17g}")
    if not cfg.b > -1.0:
        bad("b > -1", f"b = {cfg.b:.17g}")
    if not cfg.tol > 0.0:
        bad("tol > 0", f"tol = {cfg.tol:.17g}")
    if cfg.max_iter < 1:
        bad("max_iter >= 1", f"max_iter = {cfg.max_iter}")
    if cfg.refinement not in (0, 1, 2):
        bad("refinement in {0, 1, 2}", f"refinement = {cfg.refinement}")
    if cfg.k < 2:
        bad("k >= 2", f"k = {cfg.k}")
    for kk in cfg.k_list or ():
        if kk < 2:
            bad("k >= 2", f"k_list entry {kk}")
    if cfg.family not in _FAMILIES:
        bad(f"family in {_FAMILIES}", f"family = {cfg.family!r}")
    if cfg.family == "segregated" and (cfg.rho is None or cfg.rho <= 0):
        bad("segregated family needs rho > 0", f"rho = {cfg.rho}")
    if cfg.family == "sign-changing" and (cfg.k % 2 or cfg.k < 4):
        bad("sign-changing family needs even k >= 4", f"k = {cfg.k}")
    if not cfg.r > 0:
        bad("r > 0", f"r = {cfg.r:.17g}")
    if not (0.0 < cfg.h < 1.0):
        bad("0 < h < 1", f"h = {cfg.h:.17g}")
    for name, grid, lo, hi in (("r_grid", cfg.r_grid, 0.0, math.inf),
                               ("h_grid", cfg.h_grid, 0.0, 1.0),
                               ("rho_grid", cfg.rho_grid, 0.0, math.inf)):
        for v in grid or ():
            if not (lo < v < hi):
                bad(f"{name} entries in ({lo:g}, {hi:g})", f"{v:.17g}")
    if cfg.solver not in _SOLVERS:
        bad(f"solver in {_SOLVERS}", f"solver = {cfg.solver!r}")
    if cfg.form not in _FORMS:
        bad(f"form in {_FORMS}", f"form = {cfg.form!r}")
    if cfg.seed < 0:
        bad("seed >= 0", f"seed = {cfg.seed}")
    if cfg.checks not in ("fast", "all"):
        unknown = [p.strip() for p in cfg.checks.split(",")
                   if p.strip() and p.strip() not in ALL_CHECKS]
        if unknown:
            bad("checks in {fast, all} or known check names",
                f"unknown: {', '.join(unknown)}")
    try:
        CouplingParams.create(cfg.mu1, cfg.mu2, cfg.beta)
    except InadmissibleCoupling as exc:
        raise ConfigError(f"inadmissible coupling: {exc}") from exc
    return cfg


def parse_config(text: str) -> RunConfig:
    """Line-oriented `key = value` with `#` comments; strict keys."""
    values: dict[str, object] = {}
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, rawval = line.partition("=")
        key, rawval = key.strip(), rawval.strip()
        if key not in _KEY_PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(
                f"duplicate key {key!r} on lines {seen[key]} and {lineno}")
        seen[key] = lineno
        if not rawval:
            raise ConfigError(f"line {lineno}: empty value for key {key!r}")
        try:
            values[key] = _KEY_PARSERS[key](rawval)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    return _validate(RunConfig(**values))


def _render_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"non-finite float {x!r} cannot enter a JSON artifact")
    return f"{x:.17g}"


def _render_json(obj, indent: int = 0) -> str:
    """Deterministic JSON: sorted keys, 17-significant-digit floats."""
    if isinstance(obj, np.generic):
        obj = obj.item()
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(
            f'{pad}  {json.dumps(str(key))}: {_render_json(val, indent + 1)}'
            for key, val in sorted(obj.items()))
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        inner = ",\n".join(f"{pad}  {_render_json(v, indent + 1)}" for v in obj)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _render_float(obj)
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def _write_json(path: Path, obj) -> None:
    path.write_text(_render_json(obj) + "\n")


def _config_hash(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


class _Run:
    """One subcommand invocation: config, output directory, artifact log."""

    def __init__(self, cfg: RunConfig, cfg_hash: str, outdir: Path):
        self.cfg = cfg
        self.hash = cfg_hash
        self.outdir = outdir
        self.artifacts: list[str] = []
        outdir.mkdir(parents=True, exist_ok=True)

    def json_artifact(self, name: str, payload: dict) -> None:
        payload = dict(payload)
        payload["config_sha256"] = self.hash
        _write_json(self.outdir / name, payload)
        self.artifacts.append(name)

    def text_artifact(self, name: str, text: str) -> None:
        (self.outdir / name).write_text(text)
        self.artifacts.append(name)

    def manifest(self, subcommand: str) -> None:
        import scipy
        _write_json(self.outdir / "manifest.json", {
            "subcommand": subcommand,
            "config_sha256": self.hash,
            "seed": self.cfg.seed,
            "tolerances": {
                "tol": self.cfg.tol,
                "max_iter": self.cfg.max_iter,
                "refinement": self.cfg.refinement,
            },
            "versions": {
                "multibump": __version__,
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "python": ".".join(str(v) for v in sys.version_info[:3]),
            },
            "artifacts": sorted(self.artifacts),
        })


@lru_cache(maxsize=8)
def _cached_profile(mu: float):
    return solve_ground_state(mu)


def _profile(run: _Run, mu: float):
    return _cached_profile(float(mu))


def _coupling(cfg: RunConfig) -> CouplingParams:
    return CouplingParams.create(cfg.mu1, cfg.mu2, cfg.beta)


def _build_field(run: _Run) -> AnsatzField:
    cfg = run.cfg
    cpl = _coupling(cfg)
    if cfg.family == "synchronized":
        conf = synchronized_config(cfg.k, cfg.r, cfg.h)
        return AnsatzField(conf, cpl, _profile(run, 1.0))
    if cfg.family == "sign-changing":
        conf = sign_changing_config(cfg.k // 2, cfg.r, cfg.h)
        return AnsatzField(conf, cpl, _profile(run, 1.0))
    conf = segregated_config(cfg.k, cfg.r, cfg.rho, cfg.h)
    return AnsatzField(conf, cpl, _profile(run, cfg.mu1),
                       profile2=_profile(run, cfg.mu2))


def _potentials(cfg: RunConfig):
    return builtin_potential(cfg.a, cfg.m), builtin_potential(cfg.b, cfg.n)


def _constants(run: _Run) -> tuple[ExpansionConstants, str]:
    """Expansion constants for reduce/sweep: fitted artifact or analytic."""
    cfg = run.cfg
    if cfg.constants_from:
        path = Path(cfg.constants_from)
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read constants_from {path}: {exc}") from exc
        if data.get("config_sha256") != run.hash:
            raise ArtifactMismatch(
                f"{path} was produced under config hash "
                f"{data.get('config_sha256')}, live config hash is {run.hash}")
        cdict = data["constants"]
        numeric = {f.name: cdict[f.name] for f in fields(ExpansionConstants)
                   if f.name != "provenance" and f.name in cdict}
        c = ExpansionConstants(provenance=Provenance(cdict["provenance"]),
                               **numeric)
        return c, f"artifact:{path.name}"
    prof = _profile(run, 1.0)
    cpl = _coupling(cfg)
    a0, a1c, a2c = analytic_constants(cpl, prof)
    kappa = prof.tail_amplitude * prof.interaction_base
    ring = 0.25 * (cpl.alpha**2 + cpl.gamma**2) * kappa
    # segregated counterparts: each species rides its own unit-amplitude
    # profile, so the per-species pair coefficient is kappa_i / 2
    p1 = _profile(run, cfg.mu1)
    p2 = _profile(run, cfg.mu2)
    kap1 = p1.tail_amplitude * p1.interaction_base
    kap2 = p2.tail_amplitude * p2.interaction_base
    c = ExpansionConstants(
        A0=a0, A1=a1c[0], A2=a2c[0], C_beta=ring, D_beta=ring,
        B0=0.25 * (p1.mass4 + p2.mass4),
        B1=cfg.a * p1.mass2, B2=cfg.b * p2.mass2,
        C1=0.5 * kap1, D1=0.5 * kap1,
        C2=0.5 * kap2, D2=0.5 * kap2)
    return c, "analytic"


class ArtifactMismatch(Exception):
    """A consumed artifact's embedded config hash differs from the live one."""


def _cmd_ground_state(run: _Run) -> int:
    cfg = run.cfg
    mus = sorted({cfg.mu1, cfg.mu2})
    summaries = []
    for mu in mus:
        prof = _profile(run, mu)
        stem = f"ground_state_mu{_render_float(mu)}"
        save_profile(prof, run.outdir / f"{stem}.csv", config_hash=run.hash)
        run.artifacts.append(f"{stem}.csv")
        run.artifacts.append(f"{stem}.json")  # save_profile sidecar
        summaries.append({
            "mu": mu,
            "w0": float(prof.values[0]),
            "tail_amplitude": prof.tail_amplitude,
            "tail_cutoff": prof.tail_cutoff,
            "mass2": prof.mass2,
            "mass4": prof.mass4,
            "interaction_base": prof.interaction_base,
            "fitted_tail_rate": prof.fitted_tail_rate,
            "csv": f"{stem}.csv",
        })
    run.json_artifact("ground_state.json", {"profiles": summaries})
    print(f"solved {len(mus)} ground state(s): mu = "
          + ", ".join(_render_float(m) for m in mus))
    return EXIT_OK


def _cmd_constants(run: _Run) -> int:
    cfg = run.cfg
    cpl = _coupling(cfg)
    prof = _profile(run, 1.0)
    a0, a1c, a2c = analytic_constants(cpl, prof)
    kappa = prof.tail_amplitude * prof.interaction_base
    run.json_artifact("constants.json", {
        "mu1": cfg.mu1, "mu2": cfg.mu2, "beta": cfg.beta,
        "alpha": cpl.alpha, "gamma": cpl.gamma,
        "window_class": cpl.window_class.value,
        "caveat": cpl.caveat,
        "mass2": prof.mass2, "mass4": prof.mass4,
        "interaction_base": prof.interaction_base,
        "tail_amplitude": prof.tail_amplitude,
        "kappa": kappa,
        "A0_analytic": a0,
        "A1_candidates": {"full": a1c[0], "half": a1c[1]},
        "A2_candidates": {"full": a2c[0], "half": a2c[1]},
    })
    print(f"alpha {_render_float(cpl.alpha)} gamma {_render_float(cpl.gamma)} "
          f"window {cpl.window_class.value} kappa {_render_float(kappa)}")
    return EXIT_OK


def _refuse_large_k(k: int) -> None:
    if 2 * k > 16:
        raise ConfigError(
            f"direct quadrature handles at most 16 bumps per species "
            f"(2k = {2 * k}); use the `fit` subcommand and the expansion "
            f"for larger rings")


def _cmd_energy(run: _Run) -> int:
    cfg = run.cfg
    _refuse_large_k(cfg.k)
    potP, potQ = _potentials(cfg)
    field = _build_field(run)
    e = energy_direct(field, potP, potQ, refinement=cfg.refinement)
    payload = e.as_dict()
    if e.total:
        payload["relative_error"] = e.error_estimate / abs(e.total)
    payload["configuration"] = json.loads(field.config.to_json())
    run.json_artifact("energy.json", payload)
    print(f"total {_render_float(e.total)} +/- {_render_float(e.error_estimate)}")
    return EXIT_OK


def _cmd_fit(run: _Run) -> int:
    cfg = run.cfg
    # two fixed ring sizes: varying k is what separates the constant
    # column from the ring-interaction column in the design matrix, and
    # keeping both small keeps the quadrature samples affordable.  k_list
    # belongs to `sweep`, so one config can feed both ends of the pipeline.
    ks = (4, 6)
    rs = cfg.r_grid or (8.0, 10.0, 12.0)
    hs = cfg.h_grid or (0.45, 0.6)
    potP, potQ = _potentials(cfg)
    pot = PotParams(a=cfg.a, m=cfg.m, b=cfg.b, n=cfg.n)
    cpl = _coupling(cfg)
    prof = _profile(run, 1.0)
    samples = []
    lines = ["k,r,h,energy,error_estimate"]
    for kk in ks:
        for h in hs:
            for r in rs:
                field = AnsatzField(synchronized_config(kk, r, h), cpl, prof)
                e = energy_direct(field, potP, potQ, refinement=cfg.refinement)
                samples.append((kk, r, h, e.total))
                lines.append(f"{kk},{_render_float(r)},{_render_float(h)},"
                             f"{_render_float(e.total)},"
                             f"{_render_float(e.error_estimate)}")
    c = fit_expansion_constants(samples, pot, coupling=cpl, profile=prof)
    run.text_artifact("fit_samples.csv",
                      f"# config_sha256 = {run.hash}\n" + "\n".join(lines) + "\n")
    run.json_artifact("fit.json", {
        "constants": c.as_dict(),
        "potential": {"a": cfg.a, "m": cfg.m, "b": cfg.b, "n": cfg.n},
        "sample_count": len(samples),
    })
    print(f"fit over {len(samples)} samples: A0 {_render_float(c.A0)} "
          f"combined {_render_float(c.combined_power_coeff)} "
          f"C_beta {_render_float(c.C_beta)} D_beta {_render_float(c.D_beta)} "
          f"adjudication {c.a1_adjudication!r}")
    return EXIT_OK


def _point_payload(point) -> dict:
    return {
        "r_star": point.r_star,
        "h_star": point.h_star,
        "rho_star": point.rho_star,
        "grad_norm": point.grad_norm,
        "iterations": point.iterations,
        "in_window": point.in_window,
        "curvature": point.curvature.value,
    }


def _cmd_reduce(run: _Run) -> int:
    cfg = run.cfg
    c, source = _constants(run)
    center = window_center(cfg.k, cfg.m)
    init_r = cfg.initial_r if cfg.initial_r is not None else center[0]
    # the asymptotic h center pi (m+2) / (m k) leaves (0, 1) for small k
    init_h = cfg.initial_h if cfg.initial_h is not None else min(center[1], 0.9)
    if cfg.family == "segregated":
        init_rho = cfg.initial_rho if cfg.initial_rho is not None else init_r
        point = solve_segregated(c, cfg.m, cfg.n, cfg.k,
                                 (init_r, init_rho, init_h),
                                 tol=cfg.tol, max_iter=cfg.max_iter)
    elif cfg.solver == "newton":
        point = solve_newton(c, cfg.m, cfg.k, (init_r, init_h), form=cfg.form,
                             tol=cfg.tol, max_iter=cfg.max_iter)
    else:
        point = solve_contraction(c, cfg.m, cfg.k, initial=(init_r, init_h),
                                  form=cfg.form, tol=cfg.tol,
                                  max_iter=cfg.max_iter)
    payload = _point_payload(point)
    payload.update({"k": cfg.k, "solver": cfg.solver, "form": cfg.form,
                    "constants_source": source})
    run.json_artifact("reduce.json", payload)
    print(f"r* {_render_float(point.r_star)} h* {_render_float(point.h_star)} "
          f"({point.curvature.value}, in_window {point.in_window})")
    return EXIT_OK


def _render_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return _render_float(value)
    return str(value)


def _cmd_sweep(run: _Run) -> int:
    cfg = run.cfg
    c, source = _constants(run)
    ks = cfg.k_list or (cfg.k,)
    rows = scaling_sweep(c, cfg.m, list(ks), solver=cfg.solver, form=cfg.form)
    header = "k,r_star,h_star,rho_star,grad_norm,iters,in_window,curvature"
    lines = [f"# config_sha256 = {run.hash}", header]
    for row in rows:
        cells = [str(row["k"])]
        for col in ("r_star", "h_star", "rho_star", "grad_norm", "iters",
                    "in_window"):
            cells.append(_render_cell(row[col]))
        cells.append(f"failed: {row['error']}" if row["error"]
                     else _render_cell(row["curvature"]))
        lines.append(",".join(cells))
    run.text_artifact("sweep.csv", "\n".join(lines) + "\n")
    run.json_artifact("sweep.json", {"rows": rows, "constants_source": source})
    solved = sum(1 for row in rows if not row["error"])
    print(f"sweep over k = {list(ks)}: {solved}/{len(rows)} solved")
    return EXIT_OK


def _cmd_residual(run: _Run) -> int:
    cfg = run.cfg
    potP, potQ = _potentials(cfg)
    field = _build_field(run)
    rn = residual_norm(field, potP, potQ, level=cfg.refinement)
    run.json_artifact("residual.json", {
        "ell_u": rn.ell_u, "ell_v": rn.ell_v, "total": rn.total,
        "error_estimate": rn.error_estimate,
        "configuration": json.loads(field.config.to_json()),
    })
    print(f"residual total {_render_float(rn.total)} "
          f"+/- {_render_float(rn.error_estimate)}")
    return EXIT_OK


def _cmd_verify(run: _Run) -> int:
    cfg = run.cfg
    if cfg.constants_from:
        _constants(run)  # enforces the artifact hash match
    if cfg.checks == "fast":
        names = list(FAST_CHECKS)
    elif cfg.checks == "all":
        names = list(ALL_CHECKS)
    else:
        names = [p.strip() for p in cfg.checks.split(",") if p.strip()]
    results = run_checks(names, seed=cfg.seed)
    for res in results:
        print(f"{'PASS' if res.passed else 'FAIL'} {res.name}: {res.detail}")
    run.json_artifact("verify.json", {
        "checks": [{"name": r.name, "passed": r.passed, "detail": r.detail}
                   for r in results],
        "all_passed": all(r.passed for r in results),
    })
    run.manifest("verify")
    return EXIT_OK if all(r.passed for r in results) else EXIT_ACCEPTANCE


_COMMANDS = {
    "ground-state": _cmd_ground_state,
    "constants": _cmd_constants,
    "energy": _cmd_energy,
    "fit": _cmd_fit,
    "reduce": _cmd_reduce,
    "sweep": _cmd_sweep,
    "residual": _cmd_residual,
    "verify": _cmd_verify,
}

_CONFIG_HELP = """\
config file format: one `key = value` per line, `#` starts a comment,
unknown and duplicate keys are rejected.  Keys and defaults:

  mu1 = 1.0            self-interaction of species one (> 0)
  mu2 = 1.0            self-interaction of species two (> 0)
  beta = 0.0           coupling; must lie in the admissible range
  a = 1.0, m = 2.0     potential P = 1 + a/(1 + r^m); needs a > -1, m > 1
  b = 1.0, n = 2.0     potential Q = 1 + b/(1 + r^n); needs b > -1, n > 1
  family = synchronized    synchronized | segregated | sign-changing
  k = 8                bumps per ring (k >= 2; sign-changing: even, >= 4)
  k_list =             k values for sweep (falls back to k); fit always
                       samples k = 4 and 6
  r = 10.0, h = 0.5    sphere radius and height fraction (0 < h < 1)
  rho =                second-species radius (segregated only)
  r_grid, h_grid =     comma-separated fit grids (defaults 8,10,12 / 0.45,0.6)
  rho_grid =           reserved for segregated fit grids
  refinement = 1       quadrature level 0 | 1 | 2
  tol = 1e-10          solver tolerance (> 0)
  max_iter = 200       solver iteration cap (>= 1)
  solver = newton      newton | contraction
  form = a4            reduced gradient form: a4 | f1
  initial_r, initial_h, initial_rho =   solver start (default: window center)
  constants_from =     path to a fit.json to reuse (config hash must match)
  checks = fast        verify scope: fast | all | comma-separated check names
  seed = 0             RNG seed for randomized checks (--seed overrides)
  out = out            output directory (--out overrides)

exit codes: 0 success, 1 usage/config error, 2 numerical failure,
3 verification failure (failed check or artifact hash mismatch).
"""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multibump",
        description="Multi-bump energy laboratory for coupled cubic "
                    "Schrodinger systems on R^3.",
        epilog=_CONFIG_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "ground-state": "solve the radial profiles and tabulate them",
        "constants": "amplitudes, moments, and analytic expansion constants",
        "energy": "direct quadrature of one configuration's energy",
        "fit": "fit expansion constants against direct energies on a grid",
        "reduce": "solve the reduced critical-point system",
        "sweep": "scaling sweep of the reduced solution over k",
        "residual": "strong-form residual norms of the ansatz",
        "verify": "run the verification checks",
    }
    for name, desc in descriptions.items():
        p = sub.add_parser(name, help=desc, description=desc,
                           epilog=_CONFIG_HELP,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", required=True, help="path to the config file")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--seed", type=int, help="RNG seed (overrides config)")
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; the documented usage code is 1
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    try:
        raw = Path(args.config).read_bytes()
    except OSError as exc:
        print(f"config error: cannot read {args.config}: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        cfg = parse_config(raw.decode("utf-8"))
    except UnicodeDecodeError as exc:
        print(f"config error: not UTF-8: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.seed is not None:
        if args.seed < 0:
            print("config error: constraint seed >= 0 violated", file=sys.stderr)
            return EXIT_USAGE
        cfg = replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = replace(cfg, out=args.out)

    run = _Run(cfg, _config_hash(raw), Path(cfg.out))
    try:
        code = _COMMANDS[args.command](run)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArtifactMismatch as exc:
        print(f"verification error: {exc}", file=sys.stderr)
        return EXIT_ACCEPTANCE
    except (GroundStateError, QuadratureError, FitError, SolverError,
            NoCriticalPoint, InadmissibleCoupling, ValueError) as exc:
        print(f"numerical failure in {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if args.command != "verify":
        run.manifest(args.command)
    return code


if __name__ == "__main__":
    sys.exit(main())
