"""Command-line driver: single solves, (M, N) sweeps, self-verification.

Configuration is a flat ``key = value`` text file plus command-line
overrides; the wall coefficients may be given either directly as
``alpha``/``beta`` or through the boundary-viscosity pair
``nu_b_bar``/``delta`` (mixing the two styles is rejected).  All outputs
are plain CSV with 12 significant digits and are byte-identical across
reruns of the same configuration.

Subcommands
-----------
solve      one configuration; writes ``pressure_<tag>.csv``, appends a row
           to ``results.csv`` and writes ``run_<tag>.log``.
sweep      all (N, M) pairs of the sweep lists; per N writes
           ``pressure_N<val>.csv`` (one pressure column per M) and
           ``results_N<val>.csv`` (M, W/W0, F, cf/cf0) plus ``sweep.log``.
potential  vertical potential profile for one M; writes ``psi_M<val>.csv``.
verify     oracle and invariant cross-checks, one PASS/FAIL line each.

``MICROLUB_WORKERS`` overrides the sweep worker count.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import oracles
from .fem1d import (
    TridiagonalSystem,
    VerticalGrid,
    assemble_advected_laplacian,
    l2_norm,
    solve_tridiagonal,
    vz_norm,
)
from .metrics import BearingReport, make_report
from .model import BearingGeometry, ModelParams
from .scheme import (
    HorizontalGrid,
    StabilityWarning,
    solve,
    solve_potential,
    stability_constant_from_values,
)

_FLOAT_KEYS = ("N", "R_c", "nu_b_bar", "delta", "alpha", "beta", "s1", "M",
               "slope_m", "tol")
_INT_KEYS = ("n1", "nZ", "max_iter", "workers")
_LIST_KEYS = ("M_sweep", "N_sweep")
_STR_KEYS = ("init", "outdir")


def _fmt(value: float) -> str:
    return f"{value:.12g}"


@dataclass
class RunConfig:
    """Resolved run configuration (defaults reproduce the reference sweeps)."""

    N: float = 0.1
    R_c: float = 0.01
    nu_b_bar: float | None = 0.1
    delta: float | None = 0.01
    alpha: float | None = None
    beta: float | None = None
    s1: float = 1.0
    M: float = 0.0
    slope_m: float = -0.5
    n1: int = 200
    nZ: int = 400
    tol: float = 1e-8
    max_iter: int = 500
    init: str = "couette"
    outdir: str = "."
    M_sweep: tuple = (0.0, 0.5, 1.0)
    N_sweep: tuple = (0.1, 0.2, 0.3)
    workers: int | None = None

    def validate(self):
        if not self.M_sweep or not self.N_sweep:
            raise ValueError("sweep lists must be non-empty")
        for M in (*self.M_sweep, self.M):
            if not 0.0 <= M < 2.0:
                raise ValueError(f"every M must lie in [0, 2), got {M}")
        for N in (*self.N_sweep, self.N):
            if not 0.0 < N < 1.0:
                raise ValueError(f"every N must lie in (0, 1), got {N}")
        if self.init not in ("couette", "zero"):
            raise ValueError(f"init must be 'couette' or 'zero', got {self.init!r}")
        if (self.alpha is None) != (self.beta is None):
            raise ValueError("alpha and beta must be given together")

    def make_params(self, N: float | None = None, M: float | None = None) -> ModelParams:
        N = self.N if N is None else N
        M = self.M if M is None else M
        if self.alpha is not None:
            return ModelParams(N=N, R_c=self.R_c, alpha=self.alpha,
                               beta=self.beta, s1=self.s1, M=M)
        return ModelParams.from_boundary_viscosity(
            N=N, R_c=self.R_c, nu_b_bar=self.nu_b_bar, delta=self.delta,
            s1=self.s1, M=M)

    def geometry(self) -> BearingGeometry:
        return BearingGeometry(slope_m=self.slope_m)

    def grids(self) -> tuple[HorizontalGrid, VerticalGrid]:
        return HorizontalGrid(self.n1), VerticalGrid(self.nZ)

    def worker_count(self) -> int:
        env = os.environ.get("MICROLUB_WORKERS")
        if env:
            return max(1, int(env))
        if self.workers is not None:
            return max(1, self.workers)
        return min(4, os.cpu_count() or 1)


def parse_config_file(path) -> dict:
    """Read a flat ``key = value`` file; '#' starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _coerce(key: str, value):
    if isinstance(value, str):
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _INT_KEYS:
            return int(value)
        if key in _LIST_KEYS:
            return tuple(float(v) for v in value.split(",") if v.strip())
        if key in _STR_KEYS:
            return value
        raise ValueError(f"unknown configuration key {key!r}")
    return value


def build_config(*sources: dict) -> RunConfig:
    """Merge config-file and command-line sources (later sources win)."""
    merged = {}
    for source in sources:
        for key, value in source.items():
            if value is None:
                continue
            if key not in {f.name for f in fields(RunConfig)}:
                raise ValueError(f"unknown configuration key {key!r}")
            merged[key] = _coerce(key, value)
    wall_direct = {"alpha", "beta"} & merged.keys()
    wall_viscosity = {"nu_b_bar", "delta"} & merged.keys()
    if wall_direct and wall_viscosity:
        raise ValueError(
            "give the wall coefficients either as alpha/beta or as "
            "nu_b_bar/delta, not both"
        )
    if wall_direct:
        merged.setdefault("alpha", None)
        merged.setdefault("beta", None)
        merged["nu_b_bar"] = None
        merged["delta"] = None
    config = RunConfig(**merged)
    config.validate()
    return config


def _params_header(params: ModelParams) -> list[str]:
    derived = params.derived
    return [
        f"N = {_fmt(params.N)}",
        f"R_c = {_fmt(params.R_c)}",
        f"alpha = {_fmt(params.alpha)}",
        f"beta = {_fmt(params.beta)}",
        f"nu_b_bar = {_fmt(derived.nu_b_bar)}",
        f"delta = {_fmt(derived.delta) if math.isfinite(derived.delta) else 'inf'}",
        f"s1 = {_fmt(params.s1)}",
        f"M = {_fmt(params.M)}",
    ]


def _write_lines(path: Path, lines: list[str]):
    path.write_text("\n".join(lines) + "\n")


def _run_log_lines(tag: str, params: ModelParams, config: RunConfig, result) -> list[str]:
    stab = result.stability
    lines = [f"run {tag}"]
    lines += _params_header(params)
    lines += [
        f"slope_m = {_fmt(config.slope_m)}",
        f"n1 = {config.n1}",
        f"nZ = {config.nZ}",
        f"tol = {_fmt(config.tol)}",
        f"init = {config.init}",
        "stability: C = {}, C(1+beta) = {}, satisfied = {}".format(
            _fmt(stab.C), _fmt(stab.condition_value), stab.satisfied),
        f"converged = {result.converged} after {result.iterations} iterations",
        "iteration trace (update norm, flux divergence):",
    ]
    lines += [
        f"  {i + 1:4d}  {_fmt(du)}  {_fmt(fd)}"
        for i, (du, fd) in enumerate(zip(result.update_norms, result.flux_div_max))
    ]
    return lines


def run_single(config: RunConfig) -> tuple[BearingReport, int]:
    """Solve one configuration and write its artifacts."""
    params = config.make_params()
    geometry = config.geometry()
    hgrid, vgrid = config.grids()
    result = solve(params, geometry, hgrid, vgrid, init=config.init,
                   tol=config.tol, max_iter=config.max_iter)
    report = make_report(result, params, geometry, hgrid, vgrid)

    outdir = Path(config.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    tag = f"M{params.M:g}_N{params.N:g}"

    rows = ["x1,p"]
    rows += [f"{_fmt(x)},{_fmt(p)}" for x, p in report.pressure_profile]
    _write_lines(outdir / f"pressure_{tag}.csv", rows)

    results_path = outdir / "results.csv"
    header = ("N,R_c,alpha,beta,nu_b_bar,delta,s1,slope_m,M,n1,nZ,tol,"
              "iterations,converged,max_p,W,F,c_f,C,C_times_1_plus_beta,stable")
    derived = params.derived
    row = ",".join([
        _fmt(params.N), _fmt(params.R_c), _fmt(params.alpha), _fmt(params.beta),
        _fmt(derived.nu_b_bar),
        _fmt(derived.delta) if math.isfinite(derived.delta) else "inf",
        _fmt(params.s1), _fmt(config.slope_m), _fmt(params.M),
        str(config.n1), str(config.nZ), _fmt(config.tol),
        str(report.iterations), str(report.converged),
        _fmt(float(np.max(report.p))), _fmt(report.W), _fmt(report.F),
        _fmt(report.c_f), _fmt(report.stability.C),
        _fmt(report.stability.condition_value), str(report.stability.satisfied),
    ])
    if not results_path.exists():
        results_path.write_text(header + "\n")
    with results_path.open("a") as handle:
        handle.write(row + "\n")

    _write_lines(outdir / f"run_{tag}.log", _run_log_lines(tag, params, config, result))

    status = 0 if report.converged else 1
    print(f"{tag}: converged={report.converged} iterations={report.iterations} "
          f"max_p={_fmt(float(np.max(report.p)))} W={_fmt(report.W)} "
          f"F={_fmt(report.F)} c_f={_fmt(report.c_f)}")
    if not report.converged:
        stab = report.stability
        print(f"stability report: C = {_fmt(stab.C)}, "
              f"C(1+beta) = {_fmt(stab.condition_value)}, satisfied = {stab.satisfied}")
    return report, status


def _sweep_cell(config: RunConfig, N: float, M: float):
    params = config.make_params(N=N, M=M)
    geometry = config.geometry()
    hgrid, vgrid = config.grids()
    result = solve(params, geometry, hgrid, vgrid, init=config.init,
                   tol=config.tol, max_iter=config.max_iter)
    return params, result, make_report(result, params, geometry, hgrid, vgrid)


def run_sweep(config: RunConfig) -> int:
    """Run the (N, M) sweep; baselines at M = 0 are added when missing."""
    outdir = Path(config.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    n_values = sorted(set(config.N_sweep))
    m_values = sorted(set(config.M_sweep) | {0.0})
    cells = [(N, M) for N in n_values for M in m_values]

    results: dict[tuple[float, float], object] = {}
    with ThreadPoolExecutor(max_workers=config.worker_count()) as pool:
        futures = {pool.submit(_sweep_cell, config, N, M): (N, M) for N, M in cells}
        for future, key in futures.items():
            try:
                results[key] = future.result()
            except Exception as err:  # record and continue with the sweep
                results[key] = err

    log = ["sweep over N = {} and M = {}".format(
        ",".join(_fmt(N) for N in n_values), ",".join(_fmt(M) for M in m_values))]
    log += [f"n1 = {config.n1}", f"nZ = {config.nZ}", f"tol = {_fmt(config.tol)}"]
    all_ok = True

    for N in n_values:
        good = {M: results[(N, M)] for M in m_values
                if not isinstance(results[(N, M)], Exception)}
        for M in m_values:
            cell = results[(N, M)]
            if isinstance(cell, Exception):
                log.append(f"cell N={_fmt(N)} M={_fmt(M)}: FAILED ({cell})")
                all_ok = False
            else:
                _, result, report = cell
                stab = result.stability
                log.append(
                    f"cell N={_fmt(N)} M={_fmt(M)}: converged={result.converged} "
                    f"iterations={result.iterations} W={_fmt(report.W)} "
                    f"F={_fmt(report.F)} c_f={_fmt(report.c_f)} "
                    f"C={_fmt(stab.C)} C(1+beta)={_fmt(stab.condition_value)} "
                    f"stable={stab.satisfied}")
                if not result.converged:
                    all_ok = False
        if not good:
            continue

        hgrid, _ = config.grids()
        header = "x1," + ",".join(f"p_M={M:g}" for M in good)
        columns = [hgrid.nodes] + [good[M][2].p for M in good]
        rows = [header] + [
            ",".join(_fmt(c[i]) for c in columns) for i in range(hgrid.n_nodes)
        ]
        _write_lines(outdir / f"pressure_N{N:g}.csv", rows)

        baseline = good.get(0.0, (None, None, None))[2]
        rows = ["M,W_rel,F,cf_rel"]
        for M, (_, _, report) in good.items():
            if baseline is not None and baseline.W != 0.0 and baseline.c_f != 0.0:
                w_rel, cf_rel = report.W / baseline.W, report.c_f / baseline.c_f
            else:
                w_rel = cf_rel = float("nan")
            rows.append(f"{_fmt(M)},{_fmt(w_rel)},{_fmt(report.F)},{_fmt(cf_rel)}")
        _write_lines(outdir / f"results_N{N:g}.csv", rows)

    _write_lines(outdir / "sweep.log", log)
    print("\n".join(log))
    return 0 if all_ok else 1


def run_potential(config: RunConfig) -> int:
    """Write the vertical potential profile for the configured M."""
    outdir = Path(config.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    vgrid = VerticalGrid(config.nZ)
    potential = solve_potential(config.M, vgrid)
    rows = ["Z,psi"]
    rows += [f"{_fmt(z)},{_fmt(v)}"
             for z, v in zip(vgrid.nodes, potential.psi.values)]
    _write_lines(outdir / f"psi_M{config.M:g}.csv", rows)
    print(f"psi_M{config.M:g}.csv written, psi_bar = {_fmt(potential.psi_bar)}")
    return 0


def _verify_checks(config: RunConfig):
    """Yield (name, passed, detail) for every oracle/invariant cross-check."""
    rng = np.random.default_rng(20240817)
    vgrid = VerticalGrid(max(config.nZ, 50))

    pot = solve_potential(0.0, vgrid)
    Z = vgrid.nodes
    err = float(np.max(np.abs(pot.psi.values - 0.5 * (1.0 - Z**2))))
    err_bar = abs(pot.psi_bar - 1.0 / 3.0)
    bound = 5.0 * vgrid.h**2
    yield ("potential-closed-form", err <= bound and err_bar <= bound,
           f"max_err={err:.2e} psi_bar_err={err_bar:.2e} bound={bound:.2e}")

    vg400 = VerticalGrid(400)
    worst = 0.0
    for M in (0.5, 1.0):
        oracle = oracles.psi_ode_oracle(M, steps=50 * (vg400.nZ + 1))
        fem = solve_potential(M, vg400)
        worst = max(worst, float(np.max(np.abs(fem.psi.values - oracle.psi[::50]))))
    yield ("potential-vs-ode-oracle", worst <= 1e-6, f"max_err={worst:.2e} tol=1e-06")

    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(3, 60))
        sub = rng.normal(size=n)
        sup = rng.normal(size=n)
        diag = 3.0 + np.abs(sub) + np.abs(sup) + rng.random(size=n)
        sub[0] = sup[-1] = 0.0
        system = TridiagonalSystem(sub, diag, sup, rng.normal(size=n))
        x = solve_tridiagonal(system)
        x_ref = oracles.dense_solve(oracles.DenseSystem.from_tridiagonal(system))
        scale = max(1.0, float(np.max(np.abs(x_ref))))
        worst = max(worst, float(np.max(np.abs(x - x_ref))) / scale)
    yield ("tridiagonal-vs-dense", worst <= 1e-10, f"max_rel_err={worst:.2e} tol=1e-10")

    vg = VerticalGrid(80)
    margin_ok = True
    detail = []
    for M in (0.0, 0.5, 1.0, 1.9):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)  # M = 1.9 probe is deliberate
            system = assemble_advected_laplacian(M, vg)
        worst_margin = np.inf
        for _ in range(500):
            phi = np.append(rng.normal(size=vg.n_unknowns), 0.0)
            grad2 = vz_norm(phi, vg) ** 2
            quad = float(phi[:-1] @ (system.diag * phi[:-1])
                         + phi[1:-1] @ (system.sub[1:] * phi[:-2])
                         + phi[:-2] @ (system.sup[:-1] * phi[1:-1]))
            margin_ok &= quad >= (1.0 - M / 2.0) * grad2 - 1e-10 * grad2
            margin_ok &= l2_norm(phi, vg) ** 2 <= grad2 + 1e-10 * grad2
            margin_ok &= phi[0] ** 2 <= grad2 + 1e-10 * grad2
            worst_margin = min(worst_margin, quad / grad2 - (1.0 - M / 2.0))
        detail.append(f"M={M:g}:margin={worst_margin:+.2e}")
    yield ("coercivity-poincare-trace", bool(margin_ok), " ".join(detail))

    params = config.make_params()
    geometry = config.geometry()
    hgrid, vgrid = config.grids()
    result = solve(params, geometry, hgrid, vgrid, init=config.init,
                   tol=config.tol, max_iter=config.max_iter)
    flux_ok = bool(np.all(result.flux_div_max <= 1e-9))
    yield ("constraint-invariant", result.converged and flux_ok,
           f"converged={result.converged} max_flux_div={result.flux_div_max.max():.2e} tol=1e-09")
    bound_ok = bool(np.all(result.u_norms <= result.bound_rhs * (1.0 + 1e-12)))
    yield ("a-priori-bound", bound_ok,
           f"max u_norm/bound={float(np.max(result.u_norms / result.bound_rhs)):.6f}")

    params0 = config.make_params(M=0.0)
    result0 = solve(params0, geometry, hgrid, vgrid, init=config.init,
                    tol=config.tol, max_iter=config.max_iter)
    reference = oracles.m0_reference(params0, geometry, hgrid)
    err = float(np.max(np.abs(result0.state.p - reference.p)))
    yield ("m0-cross-validation", err <= 1e-4, f"max_err={err:.2e} tol=1e-04")

    N, alpha = params.N, params.alpha
    by_hand = (math.sqrt(2.0) * 2.0 * N**2 * (2.0 * N**2 + 2.0 / alpha)
               * (1.0 + math.sqrt(2.0) * math.sqrt(3.0)))
    report = stability_constant_from_values(
        N, alpha, params.beta, 0.0, 1.0, 1.0, 1.0 / math.sqrt(3.0), 1.0 / 3.0)
    err = abs(report.C - by_hand)
    yield ("stability-formula", err <= 1e-12, f"err={err:.2e} tol=1e-12")


def run_verify(config: RunConfig) -> int:
    failures = 0
    for name, passed, detail in _verify_checks(config):
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
        failures += 0 if passed else 1
    print(f"verify: {failures} failure(s)")
    return 0 if failures == 0 else 1


def _add_common_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="key = value configuration file")
    for key in _FLOAT_KEYS:
        parser.add_argument(f"--{key}", type=float, default=None)
    for key in _INT_KEYS:
        parser.add_argument(f"--{key}", type=int, default=None)
    parser.add_argument("--init", choices=("couette", "zero"), default=None)
    parser.add_argument("--outdir", default=None)
    parser.add_argument("--M-sweep", dest="M_sweep", default=None,
                        help="comma-separated roughness coefficients")
    parser.add_argument("--N-sweep", dest="N_sweep", default=None,
                        help="comma-separated coupling numbers")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    file_values = parse_config_file(args.config) if args.config else {}
    keys = {f.name for f in fields(RunConfig)}
    overrides = {k: v for k, v in vars(args).items() if k in keys and v is not None}
    return build_config(file_values, overrides)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="microlub",
        description="micropolar slider-bearing lubrication solver",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("solve", "run one configuration"),
        ("sweep", "run the (N, M) sweep and write figure tables"),
        ("potential", "write the vertical potential profile for one M"),
        ("verify", "run oracle and invariant cross-checks"),
    ):
        _add_common_arguments(sub.add_parser(name, help=help_text))

    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
    except (ValueError, OSError) as err:
        parser.error(str(err))

    warnings.filterwarnings("ignore", category=StabilityWarning)
    if args.command == "solve":
        _, status = run_single(config)
        return status
    if args.command == "sweep":
        return run_sweep(config)
    if args.command == "potential":
        return run_potential(config)
    return run_verify(config)


if __name__ == "__main__":
    sys.exit(main())
