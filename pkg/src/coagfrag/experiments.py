"""Scenario runs, the six built-in parameter sets, and convergence studies.

A scenario bundles everything needed for one reproducible run: kernel
specs, rate laws, truncation size, initial data, solver settings and the
report norm.  ``run_scenario`` persists three files per run directory:

* ``trajectory.csv`` -- header ``t,u_1,...,u_N``, one row per output time,
  decimal text with 17 significant digits,
* ``moments.csv``    -- header ``t,m0,m1,m2,m3,mass_flux,growth_leakage``,
* ``report.json``    -- coefficient-condition report, the echoed scenario
  config, solver statistics and wall time.

Runs are deterministic: fixed iteration order, no randomness, so repeated
runs of one scenario produce bit-identical CSV output.

``convergence_study`` solves one scenario family at several truncation
sizes plus a larger reference size, embeds the small solutions by zero
padding, and reports the sup-over-grid weighted-norm errors against the
reference (self-convergence in place of the unknown exact solution).
Independent runs execute concurrently; ``COAGFRAG_THREADS`` caps the
thread count (0 or unset picks a default).
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._backend import BACKEND
from .analysis import NormSpec, check_conditions, weighted_norm
from .integrator import IntegrationError, SolverConfig, Trajectory, integrate
from .kernels import CoagulationKernelSpec, FragmentationKernelSpec, RateLaws
from .model import TruncatedSystem

__all__ = [
    "BlockInitial",
    "ExplicitInitial",
    "ScenarioConfig",
    "ConvergenceResult",
    "builtin_example",
    "initial_state",
    "build_system",
    "scenario_output_grid",
    "run_scenario",
    "convergence_study",
    "write_convergence_csv",
]


@dataclass(frozen=True)
class BlockInitial:
    """Constant density ``value`` on sizes ``lo..hi``, zero elsewhere."""

    lo: int
    hi: int
    value: float

    def __post_init__(self):
        if not (1 <= self.lo <= self.hi):
            raise ValueError("block initial data requires 1 <= lo <= hi")
        if not (math.isfinite(self.value) and self.value >= 0.0):
            raise ValueError("block initial value must be finite and >= 0")

    def max_support(self) -> int:
        return self.hi


@dataclass(frozen=True)
class ExplicitInitial:
    """Explicit densities for sizes ``1..len(values)``; zero-padded above."""

    values: tuple[float, ...]

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("explicit initial data must be finite")

    def max_support(self) -> int:
        support = [i + 1 for i, v in enumerate(self.values) if v != 0.0]
        return max(support) if support else 1


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    N: int
    frag: FragmentationKernelSpec
    coag: CoagulationKernelSpec
    laws: RateLaws
    initial: BlockInitial | ExplicitInitial
    t_end: float
    solver: SolverConfig = SolverConfig()
    norm: NormSpec = NormSpec(p=1.0)
    output_grid_points: int = 101

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be >= 2")
        if not (math.isfinite(self.t_end) and self.t_end > 0.0):
            raise ValueError("t_end must be finite and > 0")
        if self.output_grid_points < 2:
            raise ValueError("output_grid_points must be >= 2")
        if self.initial.max_support() > self.N:
            raise ValueError("initial data extends beyond the truncation size N")


def initial_state(initial, N: int) -> np.ndarray:
    """Materialise initial data as a length-``N`` state vector."""
    u0 = np.zeros(N)
    if isinstance(initial, BlockInitial):
        if initial.hi > N:
            raise ValueError("block initial data extends beyond N")
        u0[initial.lo - 1 : initial.hi] = initial.value
        return u0
    values = np.asarray(initial.values, dtype=np.float64)
    if values.size > N:
        if np.any(values[N:] != 0.0):
            raise ValueError("explicit initial data has support beyond N")
        values = values[:N]
    u0[: values.size] = values
    return u0


def builtin_example(example_id: int) -> ScenarioConfig:
    """The six reference parameter sets driving the published simulations.

    1 and 2 are pure coagulation-fragmentation (conservative); 3 and 4 add
    growth, decay and sedimentation; 5 and 6 drop growth and rely on strong
    sedimentation.  Odd/even pairs use the uniform-binary/brownian-like and
    power-law/product kernel combinations respectively.
    """
    if example_id not in range(1, 7):
        raise ValueError("example id must be in 1..6")
    binary = FragmentationKernelSpec("binary")
    powerlaw = FragmentationKernelSpec("powerlaw", sigma=0.1)
    brownian = CoagulationKernelSpec("brownian_like", k1=5e-3)
    product = CoagulationKernelSpec("product", k2=5e-3, k3=1.0)
    laws = {
        1: RateLaws(a=1.0, frag_exp=1.0),
        2: RateLaws(a=1.0, frag_exp=2.5),
        3: RateLaws(g=1.0, growth_exp=1.0, d=1.0, s=1.0, a=1.0, frag_exp=1.0),
        4: RateLaws(g=1.0, growth_exp=2.5, d=1.0, s=1.0, a=1.0, frag_exp=2.5),
        5: RateLaws(d=1.0, s=1.0, sed_exp=1.0, a=1.0, frag_exp=1.0),
        6: RateLaws(d=1.0, s=1.0, sed_exp=2.5, a=1.0, frag_exp=2.5),
    }[example_id]
    use_product = example_id % 2 == 0
    return ScenarioConfig(
        name=f"example{example_id}",
        N=200,
        frag=powerlaw if use_product else binary,
        coag=product if use_product else brownian,
        laws=laws,
        initial=BlockInitial(lo=5, hi=20, value=10.0),
        t_end=1.0,
        solver=SolverConfig(),
        norm=NormSpec(p=2.0 if example_id <= 4 else 1.0),
        output_grid_points=101,
    )


def build_system(cfg: ScenarioConfig) -> TruncatedSystem:
    return TruncatedSystem(cfg.N, cfg.frag, cfg.coag, cfg.laws)


def scenario_output_grid(cfg: ScenarioConfig) -> np.ndarray:
    return np.linspace(0.0, cfg.t_end, cfg.output_grid_points)


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _write_trajectory_csv(path: Path, traj: Trajectory, N: int):
    with open(path, "w", newline="") as fh:
        fh.write("t," + ",".join(f"u_{i}" for i in range(1, N + 1)) + "\n")
        for t, state in zip(traj.times, traj.states):
            fh.write(_fmt(t) + "," + ",".join(_fmt(v) for v in state) + "\n")


def _write_moments_csv(path: Path, traj: Trajectory):
    with open(path, "w", newline="") as fh:
        fh.write("t,m0,m1,m2,m3,mass_flux,growth_leakage\n")
        for k, t in enumerate(traj.times):
            row = [
                t,
                traj.moments[0][k],
                traj.moments[1][k],
                traj.moments[2][k],
                traj.moments[3][k],
                traj.mass_flux[k],
                traj.growth_leakage[k],
            ]
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def run_scenario(cfg: ScenarioConfig, out_dir) -> Trajectory:
    """Run one scenario and persist its outputs into ``out_dir``.

    A failed coefficient check is reported, not fatal; an integrator abort
    is re-raised after the partial outputs are written and flagged in
    ``report.json``.
    """
    from .config import scenario_to_dict  # local import to avoid a cycle

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = check_conditions(cfg.frag, cfg.coag, cfg.laws, p=max(1.0, cfg.norm.p))
    sys_ = build_system(cfg)
    u0 = initial_state(cfg.initial, cfg.N)
    grid = scenario_output_grid(cfg)

    start = time.perf_counter()
    failure = None
    try:
        traj = integrate(sys_, u0, (0.0, cfg.t_end), cfg.solver, grid)
    except IntegrationError as exc:
        failure = exc
        traj = exc.trajectory
    wall = time.perf_counter() - start

    _write_trajectory_csv(out / "trajectory.csv", traj, cfg.N)
    _write_moments_csv(out / "moments.csv", traj)
    doc = {
        "config": scenario_to_dict(cfg),
        "conditions": report.to_dict(),
        "stats": traj.stats.to_dict(),
        "wall_time_s": wall,
        "completed": traj.completed,
        "error": None if failure is None else str(failure),
        "backend": BACKEND,
    }
    with open(out / "report.json", "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    if failure is not None:
        raise failure
    return traj


@dataclass
class ConvergenceResult:
    """Self-convergence errors of increasing truncation sizes.

    ``errors[k]`` is the sup over the common output grid of the weighted
    norm of ``embed(u^(sizes[k])) - u^(reference)``; ``empirical_orders``
    holds the log2 ratios of consecutive errors.
    """

    sizes: list[int]
    reference_size: int
    errors: list[float]
    empirical_orders: list[float]


def _thread_cap(n_jobs: int) -> int:
    env = os.environ.get("COAGFRAG_THREADS", "").strip()
    cap = int(env) if env else 0
    if cap <= 0:
        cap = min(4, os.cpu_count() or 1)
    return max(1, min(cap, n_jobs))


def convergence_study(
    base: ScenarioConfig,
    sizes,
    reference_size: int,
    norm: NormSpec,
) -> ConvergenceResult:
    """Measure truncation self-convergence of the ``base`` scenario family."""
    sizes = [int(n) for n in sizes]
    if not sizes:
        raise ValueError("sizes must be non-empty")
    if any(n2 <= n1 for n1, n2 in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    if sizes[0] < 2:
        raise ValueError("sizes must be >= 2")
    if sizes[-1] >= reference_size:
        raise ValueError("all sizes must be smaller than the reference size")
    if base.initial.max_support() > min(sizes):
        raise ValueError(
            "initial data must be supported within the smallest truncation size"
        )

    grid = scenario_output_grid(base)
    all_sizes = sizes + [reference_size]

    def solve(n: int) -> np.ndarray:
        sys_n = TruncatedSystem(n, base.frag, base.coag, base.laws)
        traj = integrate(sys_n, initial_state(base.initial, n), (0.0, base.t_end), base.solver, grid)
        return traj.states

    with ThreadPoolExecutor(max_workers=_thread_cap(len(all_sizes))) as pool:
        solutions = list(pool.map(solve, all_sizes))
    reference = solutions[-1]

    errors = []
    for n, states in zip(sizes, solutions[:-1]):
        padded = np.zeros_like(reference)
        padded[:, :n] = states
        errs = [
            weighted_norm(padded[k] - reference[k], norm, base.laws)
            for k in range(len(grid))
        ]
        errors.append(max(errs))
    orders = [
        math.log2(e0 / e1) if e1 > 0.0 and e0 > 0.0 else math.nan
        for e0, e1 in zip(errors, errors[1:])
    ]
    return ConvergenceResult(
        sizes=sizes, reference_size=int(reference_size), errors=errors, empirical_orders=orders
    )


def write_convergence_csv(result: ConvergenceResult, path):
    with open(path, "w", newline="") as fh:
        fh.write("N,error,empirical_order\n")
        for k, (n, err) in enumerate(zip(result.sizes, result.errors)):
            order = math.nan if k == 0 else result.empirical_orders[k - 1]
            fh.write(f"{n},{_fmt(err)},{_fmt(order)}\n")
