"""The truncated evolution system of the first ``N`` cluster sizes.

States are plain float64 arrays of length ``N`` with ``u[m]`` the number
density of ``(m+1)``-clusters.  Physically meaningful states are
non-negative; the adaptive integrator may hand in transient entries down to
``-atol``, which every operation here accepts verbatim (no clipping).

The right-hand side combines
* birth-and-death transport ``g[i-1]*u[i-1] - theta_i*u_i + d[i+1]*u[i+1]``
  with the closure ``u_0 = u_{N+1} = 0``,
* fragmentation gain ``sum_{j>i} a_j b[i,j] u_j``,
* binary coagulation gain/loss, and
* a quadratic penalty on the last row that restores exact mass conservation
  of the truncated coagulation operator.

Growth out of the top size ``N`` is a genuine loss of the retained system;
``growth_leakage`` reports that flux (``N * g_N * u_N``) separately so
truncation error stays observable.

The dense tables make a single right-hand-side evaluation O(N^2), which is
fine for the intended truncation sizes (memory limits dense Jacobians to a
few thousand sizes).
"""

from __future__ import annotations

import math

import numpy as np

from ._backend import BACKEND, core
from .kernels import (
    CoagulationKernelSpec,
    FragmentationKernelSpec,
    RateLaws,
    coag_rate,
    frag_column,
    rate_table,
)

__all__ = ["TruncatedSystem", "BACKEND"]


class TruncatedSystem:
    """Precomputed kernel/rate tables plus the evaluable dynamics.

    Immutable after construction; safe to share across threads.  Tables are
    filled through the pointwise kernel operations, so both views of the
    coefficients agree exactly.
    """

    def __init__(
        self,
        N: int,
        frag: FragmentationKernelSpec,
        coag: CoagulationKernelSpec,
        laws: RateLaws,
    ):
        if N < 2:
            raise ValueError("truncation size N must be >= 2")
        self.N = int(N)
        self.frag = frag
        self.coag = coag
        self.laws = laws
        self.rates = rate_table(laws, N)

        b = np.zeros((N, N))
        mass_defect = np.zeros(N)
        for j in range(2, N + 1):
            col = frag_column(frag, j)
            b[: j - 1, j - 1] = col
            daughters = np.arange(1.0, j)
            mass_defect[j - 1] = math.fsum(daughters * col) - j

        k = np.zeros((N, N))
        for i in range(1, N + 1):
            for j in range(i, N + 1):
                k[i - 1, j - 1] = coag_rate(coag, i, j)
                k[j - 1, i - 1] = k[i - 1, j - 1]

        frag_gain = b * self.rates.a[None, :N]

        jlin = frag_gain.copy()
        idx = np.arange(N)
        jlin[idx, idx] -= self.rates.theta[:N]
        jlin[idx[1:], idx[:-1]] += self.rates.g[: N - 1]
        jlin[idx[:-1], idx[1:]] += self.rates.d[1:N]

        for arr in (b, k, frag_gain, jlin, mass_defect):
            arr.setflags(write=False)
        self.b = b
        self.k = k
        self.frag_gain = frag_gain
        self.linear_jacobian = jlin
        self.mass_defect = mass_defect
        self._g = self.rates.g[:N]
        self._d = self.rates.d[:N]
        self._s = self.rates.s[:N]
        self._a = self.rates.a[:N]
        self._theta = self.rates.theta[:N]

    def _check_state(self, u) -> np.ndarray:
        u = np.ascontiguousarray(u, dtype=np.float64)
        if u.shape != (self.N,):
            raise ValueError(f"state vector has shape {u.shape}, expected ({self.N},)")
        return u

    def rhs(self, u) -> np.ndarray:
        """Time derivative du/dt at state ``u``."""
        u = self._check_state(u)
        out = np.empty(self.N)
        core.rhs_core(u, self._g, self._d, self._theta, self.frag_gain, self.k, out)
        return out

    def jacobian(self, u) -> np.ndarray:
        """Dense analytic Jacobian d(rhs)/du at state ``u``."""
        u = self._check_state(u)
        out = np.empty((self.N, self.N))
        core.jacobian_core(u, self.linear_jacobian, self.k, out)
        return out

    def mass_flux(self, u) -> float:
        """d/dt of the total mass ``sum_i i*u_i``, by compensated accumulation.

        Evaluated by a dedicated cancellation-aware reorganisation of
        ``sum_i i * rhs_i`` rather than by summing :meth:`rhs`, so the exact
        conservation of the coagulation operator survives rounding.
        """
        u = self._check_state(u)
        return float(
            core.mass_flux_core(u, self._g, self._d, self._s, self._a, self.mass_defect)
        )

    def growth_leakage(self, u) -> float:
        """Mass per unit time pushed past the truncation size by growth."""
        u = self._check_state(u)
        return float(self.N * self.rates.g[self.N - 1] * u[self.N - 1])

    def __repr__(self):  # pragma: no cover - debugging aid
        return (
            f"TruncatedSystem(N={self.N}, frag={self.frag.kind}, "
            f"coag={self.coag.kind}, backend={BACKEND})"
        )
