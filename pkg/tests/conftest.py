"""Shared fixtures and independent oracle implementations.

The oracles deliberately avoid the production code paths: plain Python
loops over the pointwise kernel operations, so table precomputation, the
compiled core and the vectorised fallback are all checked against them.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from coagfrag import (
    CoagulationKernelSpec,
    FragmentationKernelSpec,
    RateLaws,
    coag_rate,
    frag_daughter,
)


def laws_rate(laws: RateLaws, name: str, i: int) -> float:
    """Pointwise rate with the size-1 exceptions, scalar arithmetic only."""
    if name == "g":
        return laws.g * float(i) ** laws.growth_exp if i >= 1 else 0.0
    if name == "d":
        return 0.0 if i == 1 else laws.d * float(i) ** laws.decay_exp
    if name == "s":
        return laws.s * float(i) ** laws.sed_exp
    if name == "a":
        return 0.0 if i == 1 else laws.a * float(i) ** laws.frag_exp
    raise KeyError(name)


def laws_theta(laws: RateLaws, i: int) -> float:
    return sum(laws_rate(laws, n, i) for n in "gdsa")


def naive_rhs(N, frag, coag, laws, u):
    """Brute-force right-hand side of the truncated system (triple loops)."""
    du = []
    for i in range(1, N + 1):
        acc = -laws_theta(laws, i) * u[i - 1]
        if i >= 2:
            acc += laws_rate(laws, "g", i - 1) * u[i - 2]
        if i + 1 <= N:
            acc += laws_rate(laws, "d", i + 1) * u[i]
        for j in range(i + 1, N + 1):
            acc += laws_rate(laws, "a", j) * frag_daughter(frag, i, j) * u[j - 1]
        for j in range(1, i):
            acc += 0.5 * coag_rate(coag, i - j, j) * u[i - j - 1] * u[j - 1]
        for j in range(1, N + 1):
            acc -= coag_rate(coag, i, j) * u[i - 1] * u[j - 1]
        du.append(acc)
    penalty = 0.0
    for j in range(1, N + 1):
        for n in range(N + 1 - j, N + 1):
            penalty += j * coag_rate(coag, n, j) * u[n - 1] * u[j - 1]
    du[N - 1] += penalty / N
    return np.array(du)


def fd_jacobian(sys_, u):
    """Central finite differences with the spec's step 1e-6*(1+|u_j|)."""
    n = sys_.N
    jac = np.zeros((n, n))
    for j in range(n):
        h = 1e-6 * (1.0 + abs(u[j]))
        up, um = u.copy(), u.copy()
        up[j] += h
        um[j] -= h
        jac[:, j] = (sys_.rhs(up) - sys_.rhs(um)) / (2.0 * h)
    return jac


def hand_mass_flux(N, frag, coag, laws, u):
    """sum_i i * rhs_i via the brute-force rhs and exact summation."""
    du = naive_rhs(N, frag, coag, laws, u)
    return math.fsum(i * du[i - 1] for i in range(1, N + 1))


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


@pytest.fixture(scope="session")
def kernel_pairs():
    """The two kernel families used throughout the published examples."""
    return [
        (FragmentationKernelSpec("binary"), CoagulationKernelSpec("brownian_like", k1=5e-3)),
        (
            FragmentationKernelSpec("powerlaw", sigma=0.1),
            CoagulationKernelSpec("product", k2=5e-3, k3=1.0),
        ),
    ]
