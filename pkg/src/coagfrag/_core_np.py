"""Pure NumPy implementation of the hot kernels.

Fallback backend used when the compiled extension is unavailable (or when
``COAGFRAG_BACKEND=numpy`` forces it).  All functions share one calling
convention with :mod:`coagfrag._core_cy`:

* ``u``         -- state, length ``N`` (``u[m]`` is the density of size ``m+1``),
* ``g, d, theta, s, a`` -- per-size rates for sizes ``1..N`` (index ``size-1``),
* ``frag_gain`` -- ``a_j * b[i, j]`` as a strictly upper triangular matrix,
* ``k``         -- dense symmetric coagulation table,
* ``mass_defect`` -- per-column ``sum_i i*b[i, j] - j`` of the stored table.

The quadratic penalty on the last row keeps the truncated coagulation
operator mass conserving; it is reorganised as suffix sums so the whole
right-hand side stays one O(N^2) pass.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

BACKEND_NAME = "numpy"


@lru_cache(maxsize=8)
def _pair_sizes(n: int) -> np.ndarray:
    # flat target indices of the coagulation convolution: pair (l0, j0)
    # produces size index l0 + j0 + 1
    i0 = np.arange(n)
    return (i0[:, None] + i0[None, :] + 1).ravel()


def _penalty_suffix(k: np.ndarray, u: np.ndarray) -> np.ndarray:
    """T[j0] = sum over sizes n >= N+1-j of k[n, j] * u[n]."""
    n = u.shape[0]
    suf = np.cumsum((k * u[:, None])[::-1], axis=0)[::-1]
    j0 = np.arange(n)
    return suf[n - 1 - j0, j0]


def rhs_core(u, g, d, theta, frag_gain, k, out):
    """Time derivative of the truncated system, written into ``out``."""
    n = u.shape[0]
    du = -theta * u
    du[1:] += g[:-1] * u[:-1]
    du[:-1] += d[1:] * u[1:]
    du += frag_gain @ u
    # coagulation gain: anti-diagonal sums of k * outer(u, u)
    w = (k * np.outer(u, u)).ravel()
    conv = np.bincount(_pair_sizes(n), weights=w, minlength=2 * n)
    du += 0.5 * conv[:n]
    du -= u * (k @ u)
    t = _penalty_suffix(k, u)
    j0 = np.arange(n)
    du[n - 1] += np.sum((j0 + 1.0) * u * t) / n
    out[:] = du


def jacobian_core(u, jlin, k, out):
    """Dense Jacobian of the right-hand side, written into ``out``."""
    n = u.shape[0]
    out[:] = jlin
    idx = np.arange(n)
    out[idx, idx] -= k @ u
    out -= u[:, None] * k
    # coagulation gain derivative: k[i-m, m] * u[i-m]
    l0 = idx[:, None] - idx[None, :] - 1
    lc = np.clip(l0, 0, n - 1)
    out += np.where(l0 >= 0, k[lc, idx[None, :]] * u[lc], 0.0)
    # penalty row
    t = _penalty_suffix(k, u)
    suf = np.cumsum((k * ((idx + 1.0) * u)[None, :])[:, ::-1], axis=1)[:, ::-1]
    r = suf[idx, n - 1 - idx]
    out[n - 1] += ((idx + 1.0) * t + r) / n


def mass_flux_core(u, g, d, s, a, mass_defect):
    """Rate of change of the total mass ``sum_i i * u_i``.

    Accumulates the exactly reorganised flux: coagulation (gain, loss and
    penalty together) cancels identically and is omitted; the fragmentation
    term collapses to the stored per-column mass defect of the daughter
    table.  ``math.fsum`` keeps the remaining cancellations exact.
    """
    n = u.shape[0]
    sizes = np.arange(1.0, n + 1.0)
    terms = np.concatenate(
        [
            g[:-1] * u[:-1],
            [-n * g[-1] * u[-1]],
            -d * u,
            -sizes * s * u,
            a * u * mass_defect,
        ]
    )
    return math.fsum(terms)
