"""Fragmentation kernels, coagulation kernels and power-law transport rates.

Cluster sizes are positive integers; an ``i``-cluster is an aggregate of
``i`` monomers.  The quantities provided here are

* ``b[i, j]``   -- mean number of ``i``-fragments produced when a ``j``-cluster
  breaks up (daughter distribution),
* ``k[i, j]``   -- rate at which ``i``- and ``j``-clusters merge,
* ``g_i, d_i, s_i, a_i`` -- growth, decay, sedimentation and fragmentation
  rates, all pure power laws in the cluster size except for the fixed
  exceptions ``d_1 = a_1 = 0``.

Everything is pure and immutable after construction, so kernel objects and
precomputed tables can be shared freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

FRAG_KINDS = ("binary", "powerlaw")
COAG_KINDS = ("brownian_like", "product")

#: Largest parent size for which the power-law normalisation is evaluated in
#: double precision without overflow concerns (see ``_powerlaw_norm``).
MAX_PARENT_SIZE = 10_000


@dataclass(frozen=True)
class FragmentationKernelSpec:
    """Daughter-distribution family for cluster breakup.

    ``binary`` distributes fragments uniformly (``b = 2/(j-1)``); ``powerlaw``
    weights a daughter of size ``i`` by ``i**sigma * (j-i)**sigma`` and
    normalises so that the fragments of a ``j``-cluster carry total mass
    ``j``.  ``sigma`` is only meaningful for ``powerlaw`` and must be > -1
    for the normalisation sum to behave.
    """

    kind: str
    sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in FRAG_KINDS:
            raise ValueError(f"unknown fragmentation kernel kind {self.kind!r}")
        if self.kind == "powerlaw" and not self.sigma > -1.0:
            raise ValueError("powerlaw fragmentation kernel requires sigma > -1")


@dataclass(frozen=True)
class CoagulationKernelSpec:
    """Symmetric, unbounded coagulation kernel family.

    ``brownian_like`` is ``k1 * (i**(1/3) + j**(1/3))**(7/3)`` and grows like
    ``max(i, j)**(7/9)``; ``product`` is ``k2 * (i + k3) * (j + k3)`` and
    grows like ``max(i, j)**2``.
    """

    kind: str
    k1: float = 0.0
    k2: float = 0.0
    k3: float = 0.0

    def __post_init__(self):
        if self.kind not in COAG_KINDS:
            raise ValueError(f"unknown coagulation kernel kind {self.kind!r}")
        for name in ("k1", "k2", "k3"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0.0):
                raise ValueError(f"coagulation coefficient {name} must be finite and >= 0")

    def degree(self) -> float:
        """Asymptotic growth exponent of ``k[i, j]`` in ``max(i, j)``."""
        if self.kind == "brownian_like":
            return 0.0 if self.k1 == 0.0 else 7.0 / 9.0
        return 0.0 if self.k2 == 0.0 else 2.0


@dataclass(frozen=True)
class RateLaws:
    """Power-law coefficients of the linear transport/loss processes.

    The pointwise rates are ``g_i = g*i**growth_exp`` (growth),
    ``d_i = d*i**decay_exp`` (decay), ``s_i = s*i**sed_exp`` (sedimentation)
    and ``a_i = a*i**frag_exp`` (fragmentation) for ``i >= 2``, with the
    exceptions ``d_1 = a_1 = 0``.  ``theta_i = a_i + g_i + d_i + s_i`` is the
    total linear loss rate.
    """

    g: float = 0.0
    growth_exp: float = 0.0
    d: float = 0.0
    decay_exp: float = 0.0
    s: float = 0.0
    sed_exp: float = 0.0
    a: float = 0.0
    frag_exp: float = 0.0

    def __post_init__(self):
        for name in ("g", "d", "s", "a"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0.0):
                raise ValueError(f"rate coefficient {name} must be finite and >= 0")
        for name in ("growth_exp", "decay_exp", "sed_exp", "frag_exp"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"rate exponent {name} must be finite")

    def growth(self, i):
        i = np.asarray(i, dtype=np.float64)
        return self.g * i**self.growth_exp

    def decay(self, i):
        i = np.asarray(i, dtype=np.float64)
        return np.where(i == 1.0, 0.0, self.d * i**self.decay_exp)

    def sedimentation(self, i):
        i = np.asarray(i, dtype=np.float64)
        return self.s * i**self.sed_exp

    def fragmentation(self, i):
        i = np.asarray(i, dtype=np.float64)
        return np.where(i == 1.0, 0.0, self.a * i**self.frag_exp)

    def total_loss(self, i):
        """theta_i, the summed loss rate of all four linear processes."""
        return self.fragmentation(i) + self.growth(i) + self.decay(i) + self.sedimentation(i)


@dataclass(frozen=True)
class RateTable:
    """Dense per-size rates for sizes ``1..N+1`` (index ``size - 1``).

    Size ``N+1`` never feeds the truncated right-hand side (the state above
    the cut is identically zero) but is kept for the boundary-leakage
    diagnostics.
    """

    N: int
    g: np.ndarray
    d: np.ndarray
    s: np.ndarray
    a: np.ndarray
    theta: np.ndarray


@lru_cache(maxsize=None)
def _powerlaw_norm(sigma: float, j: int) -> float:
    """Normalisation ``(1/j) * sum_{i<j} i**(1+sigma) * (j-i)**sigma``.

    Direct O(j) summation, cached per parent size.  Double precision is
    ample for ``j <= MAX_PARENT_SIZE``; beyond that the summands start to
    probe the exponent range for large ``sigma``.
    """
    i = np.arange(1.0, j)
    return float(np.sum(i ** (1.0 + sigma) * (j - i) ** sigma) / j)


def frag_column(spec: FragmentationKernelSpec, j: int) -> np.ndarray:
    """All daughter weights ``b[1, j], ..., b[j-1, j]`` of a ``j``-cluster."""
    if j < 2:
        return np.zeros(0)
    if spec.kind == "binary":
        return np.full(j - 1, 2.0 / (j - 1.0))
    i = np.arange(1.0, j)
    return i**spec.sigma * (j - i) ** spec.sigma / _powerlaw_norm(spec.sigma, j)


def frag_daughter(spec: FragmentationKernelSpec, i: int, j: int) -> float:
    """Mean number of ``i``-fragments from the breakup of a ``j``-cluster."""
    if i < 1 or j < 2:
        raise ValueError("fragment size must be >= 1 and parent size >= 2")
    if i >= j:
        return 0.0
    return float(frag_column(spec, j)[i - 1])


def coag_rate(spec: CoagulationKernelSpec, i: int, j: int) -> float:
    """Merge rate ``k[i, j]`` of an ``i``- and a ``j``-cluster.

    The arithmetic is grouped so that the result is bit-identical under
    argument exchange.
    """
    if i < 1 or j < 1:
        raise ValueError("cluster sizes must be >= 1")
    if spec.kind == "brownian_like":
        radii = float(i) ** (1.0 / 3.0) + float(j) ** (1.0 / 3.0)
        return spec.k1 * radii ** (7.0 / 3.0)
    return spec.k2 * ((i + spec.k3) * (j + spec.k3))


def rate_table(laws: RateLaws, N: int) -> RateTable:
    """Precompute all transport/loss rates for sizes ``1..N+1``."""
    if N < 1:
        raise ValueError("truncation size N must be >= 1")
    sizes = np.arange(1.0, N + 2.0)
    g = laws.g * sizes**laws.growth_exp
    d = laws.d * sizes**laws.decay_exp
    s = laws.s * sizes**laws.sed_exp
    a = laws.a * sizes**laws.frag_exp
    d[0] = 0.0
    a[0] = 0.0
    theta = a + g + d + s
    for arr in (g, d, s, a, theta):
        arr.setflags(write=False)
    return RateTable(N=N, g=g, d=d, s=s, a=a, theta=theta)
