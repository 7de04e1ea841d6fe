"""Time integration of the truncated system.

Two methods behind one entry point:

``implicit_adaptive``
    A one-step singly-diagonally-implicit Runge-Kutta scheme: three
    implicit stages sharing one diagonal coefficient; third order,
    stiffly accurate and L-stable, with an embedded second-order companion
    supplying the error estimate.  A single LU factorisation of
    ``I - h*d*J`` serves all stages and is reused across steps until the
    step size drifts by more than a factor of two or Newton convergence
    degrades.  This is the production method; the stiffness of the loss
    rates at sizes near the truncation cut (``theta_N ~ a*N**frag_exp``)
    rules out explicit integrators at realistic tolerances.

``explicit_reference``
    The classical four-stage, fourth-order explicit Runge-Kutta method with
    a fixed step.  Slow but simple; it exists to cross-validate the
    implicit path and is used as the in-repo oracle by the tests.

Both methods preserve linear invariants up to the nonlinear-solver residual,
so total mass is conserved to far better than the local error tolerance
whenever the model itself conserves it.

Steps that would take any component below ``-atol`` are rejected and
retried with a smaller step; components in ``[-atol, 0)`` are accepted
untouched, since projecting them away would silently break the mass
accounting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .analysis import NormSpec, weighted_norm
from .model import TruncatedSystem

__all__ = [
    "SolverConfig",
    "SolverStats",
    "Trajectory",
    "IntegrationError",
    "integrate",
    "explicit_reference_step",
]

# Three-stage SDIRK tableau, third order, stiffly accurate and L-stable
# (the diagonal is the root of x^3 - 3x^2 + 3x/2 - 1/6 in (0, 1)):
#   c = (g, (1+g)/2, 1)
#   A = ((g, 0, 0), ((1-g)/2, g, 0), (b1, b2, g)),  b = the last row
# The embedded second-order companion is bhat = (1 - bh2, bh2, 0) with
# bh2 = (1-2g)/(1-g); the difference b - bhat works out to g*(1, -2, 1),
# so the error estimate is a second difference of the stage slopes.  The
# step advances the third-order solution while the controller holds the
# embedded difference below tolerance.
_D = 0.435866521508458999416019451193567
_A21 = (1.0 - _D) / 2.0
_B1 = (0.5 - _D - ((4.0 / 3.0 - 6.0 * _D + 4.0 * _D * _D) / (1.0 - _D * _D)) * (1.0 + _D) / 2.0) / _D
_B2 = (4.0 / 3.0 - 6.0 * _D + 4.0 * _D * _D) / (1.0 - _D * _D)

METHODS = ("implicit_adaptive", "explicit_reference")


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and controls for :func:`integrate`.

    ``h_init``, ``h_min`` and ``h_max`` default to ``1e-6``, ``1e-13`` and
    ``1.0`` times the span of the integration interval.  ``newton_tol`` is
    dimensionless: the Newton increment must fall below ``newton_tol``
    measured in the same weighted norm that controls the local error.
    """

    rtol: float = 1e-8
    atol: float = 1e-10
    h_init: float | None = None
    h_min: float | None = None
    h_max: float | None = None
    max_steps: int = 1_000_000
    method: str = "implicit_adaptive"
    newton_tol: float = 1e-6
    newton_max_iters: int = 12

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not (self.rtol > 0.0 and self.atol > 0.0):
            raise ValueError("rtol and atol must be > 0")
        if self.newton_max_iters < 1:
            raise ValueError("newton_max_iters must be >= 1")
        for name in ("h_init", "h_min", "h_max"):
            value = getattr(self, name)
            if value is not None and not value > 0.0:
                raise ValueError(f"{name} must be > 0")

    def resolve_steps(self, span: float) -> tuple[float, float, float]:
        h_init = self.h_init if self.h_init is not None else 1e-6 * span
        h_min = self.h_min if self.h_min is not None else 1e-13 * span
        h_max = self.h_max if self.h_max is not None else span
        if not (0.0 < h_min <= h_init <= h_max):
            raise ValueError("step bounds must satisfy 0 < h_min <= h_init <= h_max")
        return h_init, h_min, h_max


@dataclass
class SolverStats:
    steps_accepted: int = 0
    steps_rejected_error: int = 0
    steps_rejected_negative: int = 0
    newton_iterations: int = 0
    jacobian_evaluations: int = 0
    lu_factorizations: int = 0
    rhs_evaluations: int = 0

    def to_dict(self) -> dict:
        return {
            "steps_accepted": self.steps_accepted,
            "steps_rejected_error": self.steps_rejected_error,
            "steps_rejected_negative": self.steps_rejected_negative,
            "newton_iterations": self.newton_iterations,
            "jacobian_evaluations": self.jacobian_evaluations,
            "lu_factorizations": self.lu_factorizations,
            "rhs_evaluations": self.rhs_evaluations,
        }


@dataclass
class Trajectory:
    """Solution samples on the output grid plus per-time diagnostics.

    ``moments[k]`` holds the moments of order ``k`` (0..3) recomputed from
    the stored states through :func:`coagfrag.analysis.weighted_norm`.
    ``completed`` is False when the integration aborted; the rows up to the
    failure are retained.
    """

    times: np.ndarray
    states: np.ndarray
    moments: dict[int, np.ndarray]
    mass_flux: np.ndarray
    growth_leakage: np.ndarray
    stats: SolverStats
    completed: bool = True
    message: str = ""

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


class IntegrationError(RuntimeError):
    """Integration aborted; ``trajectory`` carries the partial output."""

    def __init__(self, message: str, trajectory: Trajectory):
        super().__init__(message)
        self.trajectory = trajectory


def _validate_grid(t0: float, t1: float, output_grid) -> np.ndarray:
    grid = np.asarray(output_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("output_grid must be a non-empty 1-d array")
    if np.any(np.diff(grid) <= 0.0):
        raise ValueError("output_grid must be strictly increasing")
    if grid[0] < t0 or grid[-1] > t1:
        raise ValueError("output_grid must lie inside [t0, t1]")
    if grid[0] > t0:
        grid = np.concatenate([[t0], grid])
    return grid


def _hermite(u0, f0, u1, f1, h, tau):
    """Cubic Hermite interpolant between step endpoints at fraction tau."""
    t2 = tau * tau
    t3 = t2 * tau
    return (
        (2.0 * t3 - 3.0 * t2 + 1.0) * u0
        + (t3 - 2.0 * t2 + tau) * h * f0
        + (-2.0 * t3 + 3.0 * t2) * u1
        + (t3 - t2) * h * f1
    )


def explicit_reference_step(sys: TruncatedSystem, u, h: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step of size ``h``."""
    if not h > 0.0:
        raise ValueError("step size must be > 0")
    k1 = sys.rhs(u)
    k2 = sys.rhs(u + 0.5 * h * k1)
    k3 = sys.rhs(u + 0.5 * h * k2)
    k4 = sys.rhs(u + h * k3)
    return u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class _Recorder:
    """Accumulates grid samples and assembles the Trajectory."""

    def __init__(self, sys: TruncatedSystem, grid: np.ndarray, stats: SolverStats):
        self.sys = sys
        self.grid = grid
        self.stats = stats
        self.k = 0
        self.times: list[float] = []
        self.states: list[np.ndarray] = []

    def record(self, t: float, u: np.ndarray):
        self.times.append(t)
        self.states.append(np.array(u))
        self.k += 1

    def pending(self) -> bool:
        return self.k < self.grid.size

    def next_time(self) -> float:
        return float(self.grid[self.k])

    def finish(self, completed: bool, message: str) -> Trajectory:
        states = (
            np.array(self.states) if self.states else np.zeros((0, self.sys.N))
        )
        times = np.array(self.times)
        moments = {
            p: np.array(
                [weighted_norm(u, NormSpec(float(p), 0.0), self.sys.laws) for u in states]
            )
            for p in range(4)
        }
        flux = np.array([self.sys.mass_flux(u) for u in states])
        leak = np.array([self.sys.growth_leakage(u) for u in states])
        return Trajectory(
            times=times,
            states=states,
            moments=moments,
            mass_flux=flux,
            growth_leakage=leak,
            stats=self.stats,
            completed=completed,
            message=message,
        )


def integrate(
    sys: TruncatedSystem,
    u0,
    t_span: tuple[float, float],
    cfg: SolverConfig,
    output_grid,
) -> Trajectory:
    """Integrate ``du/dt = rhs(u)`` over ``t_span``, sampling ``output_grid``.

    Raises :class:`IntegrationError` (with the partial trajectory attached)
    on step-size underflow, repeated Newton failure, non-finite states or
    step-budget exhaustion.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t0 < t1:
        raise ValueError("t_span must satisfy t0 < t1")
    u0 = np.ascontiguousarray(u0, dtype=np.float64)
    if u0.shape != (sys.N,):
        raise ValueError(f"initial state has shape {u0.shape}, expected ({sys.N},)")
    if not np.all(np.isfinite(u0)):
        raise ValueError("initial state must be finite")
    grid = _validate_grid(t0, t1, output_grid)

    if cfg.method == "explicit_reference":
        return _integrate_explicit(sys, u0, t0, t1, cfg, grid)
    return _integrate_implicit(sys, u0, t0, t1, cfg, grid)


def _integrate_explicit(sys, u0, t0, t1, cfg, grid) -> Trajectory:
    h_fixed, _, _ = cfg.resolve_steps(t1 - t0)
    stats = SolverStats()
    rec = _Recorder(sys, grid, stats)
    t, u = t0, u0.copy()
    if rec.pending() and rec.next_time() == t0:
        rec.record(t0, u)
    eps = 1e-14 * (t1 - t0)
    while rec.pending():
        target = rec.next_time()
        while target - t > eps:
            if stats.steps_accepted >= cfg.max_steps:
                return _abort(rec, "maximum number of steps exceeded", t)
            h = min(h_fixed, target - t)
            u = explicit_reference_step(sys, u, h)
            stats.rhs_evaluations += 4
            stats.steps_accepted += 1
            t += h
            if not np.all(np.isfinite(u)):
                return _abort(rec, f"non-finite state at t={t:.6g}", t)
        rec.record(target, u)
        t = target
    return rec.finish(True, "")


def _abort(rec: _Recorder, message: str, t: float) -> Trajectory:
    traj = rec.finish(False, message)
    raise IntegrationError(f"{message} (t={t:.6g})", traj)


class _NewtonFailure(Exception):
    pass


def _integrate_implicit(sys, u0, t0, t1, cfg, grid) -> Trajectory:
    h, h_min, h_max = cfg.resolve_steps(t1 - t0)
    stats = SolverStats()
    rec = _Recorder(sys, grid, stats)
    t = t0
    u = u0.copy()
    if rec.pending() and rec.next_time() == t0:
        rec.record(t0, u)

    f = sys.rhs(u)
    stats.rhs_evaluations += 1
    identity = np.eye(sys.N)
    lu = None
    lu_h = None
    jac_stale = True
    eps_end = 1e-14 * (t1 - t0)
    attempts = 0

    def rebuild(h_now: float):
        nonlocal lu, lu_h, jac_stale
        jac = sys.jacobian(u)
        stats.jacobian_evaluations += 1
        lu = lu_factor(identity - (h_now * _D) * jac, check_finite=False)
        stats.lu_factorizations += 1
        lu_h = h_now
        jac_stale = False

    def newton(const: np.ndarray, pred: np.ndarray, scale: np.ndarray):
        """Solve y = const + h*D*rhs(y); returns the iterate and its rhs.

        Convergence is checked before applying the correction, so the
        returned pair (y, rhs(y)) is exactly consistent; the skipped final
        correction is below ``newton_tol * scale`` by construction.
        """
        y = pred.copy()
        prev_norm = None
        for it in range(cfg.newton_max_iters):
            fy = sys.rhs(y)
            stats.rhs_evaluations += 1
            residual = y - (h * _D) * fy - const
            if not np.all(np.isfinite(residual)):
                raise _NewtonFailure
            delta = lu_solve(lu, residual, overwrite_b=True, check_finite=False)
            stats.newton_iterations += 1
            norm = float(np.max(np.abs(delta) / scale))
            if norm <= cfg.newton_tol:
                return y, fy, it + 1
            if prev_norm is not None and norm > 0.9 * prev_norm and it >= 1:
                raise _NewtonFailure
            prev_norm = norm
            y -= delta
        raise _NewtonFailure

    while rec.pending():
        if attempts >= cfg.max_steps:
            return _abort(rec, "maximum number of steps exceeded", t)
        if t1 - t <= eps_end:
            # interval exhausted but grid points remain (roundoff), flush them
            while rec.pending():
                rec.record(rec.next_time(), u)
            break
        h = min(h, h_max, t1 - t)
        if h < h_min and t1 - t > h_min:
            return _abort(rec, f"step size underflow (h={h:.3g} < h_min={h_min:.3g})", t)
        if lu is None or jac_stale or abs(math.log2(h / lu_h)) > 1.0:
            rebuild(h)
        attempts += 1
        scale = cfg.atol + cfg.rtol * np.abs(u)

        try:
            y1, f1, it1 = newton(u, u + (h * _D) * f, scale)
            y2, f2, it2 = newton(
                u + (h * _A21) * f1, u + ((1.0 + _D) / (2.0 * _D)) * (y1 - u), scale
            )
            y_new, f_new, it3 = newton(u + h * (_B1 * f1 + _B2 * f2), 2.0 * y2 - y1, scale)
        except _NewtonFailure:
            if jac_stale:
                rebuild(h)
            else:
                h = max(0.25 * h, h_min)
                jac_stale = True
            continue

        if it1 + it2 + it3 > 1.5 * cfg.newton_max_iters:
            jac_stale = True

        est = (_D * h) * (f1 - 2.0 * f2 + f_new)
        est = lu_solve(lu, est, overwrite_b=True, check_finite=False)  # damp in the stiff limit
        err_scale = cfg.atol + cfg.rtol * np.maximum(np.abs(u), np.abs(y_new))
        err = float(np.max(np.abs(est) / err_scale))
        if not math.isfinite(err):
            stats.steps_rejected_error += 1
            h = max(0.25 * h, h_min)
            jac_stale = True
            continue

        if err > 1.0:
            stats.steps_rejected_error += 1
            h = h * min(0.5, max(0.1, 0.9 * err ** (-1.0 / 3.0)))
            continue
        if float(np.min(y_new)) < -cfg.atol:
            stats.steps_rejected_negative += 1
            h = 0.5 * h
            continue

        # accepted: sample grid points inside (t, t+h]
        t_new = t + h
        while rec.pending() and rec.next_time() <= t_new + eps_end:
            target = rec.next_time()
            tau = min(1.0, max(0.0, (target - t) / h))
            rec.record(target, _hermite(u, f, y_new, f_new, h, tau))
        stats.steps_accepted += 1
        u, f, t = y_new, f_new, t_new
        h = h * min(5.0, max(0.2, 0.9 * err ** (-1.0 / 3.0) if err > 0.0 else 5.0))

    return rec.finish(True, "")
