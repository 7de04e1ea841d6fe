"""Moment diagnostics and well-posedness checks on the coefficients.

The solvability theory for the full (untruncated) model rests on a handful
of coefficient conditions:

* fragmentation dominance -- ``liminf (a_i/theta_i) * phi_i(p) > 0`` for
  some moment order ``p > 1``, together with the exponent inequality
  ``max(growth_exp, decay_exp, sed_exp) <= frag_exp``;
* sedimentation dominance (the ``p = 1`` route) --
  ``liminf (s_i + (d_i - g_i)/i) / theta_i > 0`` with
  ``max(decay_exp, frag_exp) <= sed_exp``;
* a coagulation growth bound ``k[i,j] <= kappa*((1+theta_i)^w + (1+theta_j)^w)``
  for some ``w`` in (0, 1);
* a mass growth rate ``omega1 >= (g_i - d_i)/i - s_i`` for all ``i``, which
  gives the exponential bound ``m1(t) <= exp(omega1*t) * m1(0)``.

The liminf quantities are asymptotic statements; :func:`check_conditions`
estimates them by sampling up to ``i_max`` and, because all rates are pure
power laws, additionally evaluates the exact limits from the exponents.
Both numbers are reported.  A finite sweep cannot certify a liminf, so the
verdicts are evidence, not proof; the tail beyond ``i_max`` is covered only
by the closed-form limits.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import beta as _beta_fn

from .kernels import (
    CoagulationKernelSpec,
    FragmentationKernelSpec,
    RateLaws,
    frag_column,
)

__all__ = [
    "NormSpec",
    "ConditionCheck",
    "CoagulationBound",
    "Omega1",
    "ConditionReport",
    "delta_p",
    "phi",
    "phi_limit",
    "weighted_norm",
    "check_conditions",
]

_POSITIVE_TOL = 1e-12


@dataclass(frozen=True)
class NormSpec:
    """Weighted moment norm ``sum_i i**p * (1 + theta_i)**weight_exp * |u_i|``.

    ``weight_exp = 0`` gives the plain moment of order ``p`` (``p = 1`` is
    the total mass, ``p = 0`` the particle count).
    """

    p: float
    weight_exp: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.p) and self.p >= 0.0):
            raise ValueError("moment order p must be finite and >= 0")
        if not (0.0 <= self.weight_exp < 1.0):
            raise ValueError("weight_exp must lie in [0, 1)")


def delta_p(frag: FragmentationKernelSpec, i: int, p: float) -> float:
    """Fragmentation mass-moment defect ``i**p - sum_{j<i} j**p * b[j, i]``."""
    if i < 2:
        raise ValueError("the defect is defined for parent sizes i >= 2")
    daughters = np.arange(1.0, i)
    return float(i**p - np.sum(daughters**p * frag_column(frag, i)))


def phi(frag: FragmentationKernelSpec, i: int, p: float) -> float:
    """Normalised defect ``delta_p / i**p``; lies in (0, 1) for ``p > 1``."""
    if not p > 1.0:
        raise ValueError("phi requires p > 1 (it vanishes identically at p = 1)")
    return delta_p(frag, i, p) / float(i) ** p


def phi_limit(frag: FragmentationKernelSpec, p: float) -> float:
    """Exact large-size limit of ``phi_i(p)`` for the built-in kernels."""
    if frag.kind == "binary":
        return (p - 1.0) / (p + 1.0)
    s = frag.sigma
    return 1.0 - _beta_fn(p + s + 1.0, s + 1.0) / _beta_fn(s + 2.0, s + 1.0)


def weighted_norm(u, spec: NormSpec, laws: RateLaws) -> float:
    """Norm of a state (or state difference) under ``spec``.

    Absolute values are taken entrywise, so slightly negative integrator
    output is measured by magnitude.
    """
    u = np.asarray(u, dtype=np.float64)
    sizes = np.arange(1.0, u.shape[0] + 1.0)
    weights = sizes**spec.p
    if spec.weight_exp != 0.0:
        weights = weights * (1.0 + laws.total_loss(sizes)) ** spec.weight_exp
    return float(np.sum(weights * np.abs(u)))


# --------------------------------------------------------------------------
# closed-form limits of power-law expressions


def _power_sum_limit(terms) -> float:
    """Limit as ``i -> inf`` of ``sum_k c_k * i**e_k``."""
    combined: dict[float, float] = {}
    for c, e in terms:
        if c != 0.0:
            combined[e] = combined.get(e, 0.0) + c
    live = [(e, c) for e, c in combined.items() if c != 0.0]
    if not live:
        return 0.0
    e_top, c_top = max(live)
    if e_top > 0.0:
        return math.inf if c_top > 0.0 else -math.inf
    if e_top == 0.0:
        return c_top
    return 0.0


def _power_ratio_limit(num_terms, den_terms) -> float | None:
    """Limit of a ratio of two power sums; ``None`` when undefined."""

    def _top(terms):
        combined: dict[float, float] = {}
        for c, e in terms:
            if c != 0.0:
                combined[e] = combined.get(e, 0.0) + c
        live = [(e, c) for e, c in combined.items() if c != 0.0]
        return max(live) if live else None

    num, den = _top(num_terms), _top(den_terms)
    if den is None:
        return None
    if num is None:
        return 0.0
    (e_n, c_n), (e_d, c_d) = num, den
    if e_n < e_d:
        return 0.0
    if e_n == e_d:
        return c_n / c_d
    return math.copysign(math.inf, c_n / c_d)


def _theta_terms(laws: RateLaws):
    return [
        (laws.a, laws.frag_exp),
        (laws.g, laws.growth_exp),
        (laws.d, laws.decay_exp),
        (laws.s, laws.sed_exp),
    ]


def theta_degree(laws: RateLaws) -> float:
    """Asymptotic growth exponent of ``theta_i`` (``-inf`` when theta = 0)."""
    active = [e for c, e in _theta_terms(laws) if c > 0.0]
    return max(active) if active else -math.inf


# --------------------------------------------------------------------------
# report types


@dataclass
class ConditionCheck:
    passed: bool
    exponent_check: bool
    liminf_sampled: float
    liminf_limit: float | None
    detail: str


@dataclass
class CoagulationBound:
    feasible: bool
    weight_exp: float | None
    kappa: float | None
    kernel_degree: float
    theta_degree: float | None
    detail: str


@dataclass
class Omega1:
    finite: bool
    value: float | None
    argmax_i: float | None


@dataclass
class ConditionReport:
    """Pass/fail evidence for every hypothesis of the solvability theory."""

    p: float
    i_max: int
    frag_dominance: ConditionCheck
    sed_dominance: ConditionCheck
    coag_bound: CoagulationBound
    omega1: Omega1
    messages: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        """JSON-ready form; field names are part of the CLI contract."""
        return asdict(self)


# --------------------------------------------------------------------------
# the checker


def _sample_sizes(i_max: int) -> np.ndarray:
    dense = np.arange(2, min(i_max, 64) + 1)
    sparse = np.unique(np.geomspace(64, i_max, 40).round().astype(int))
    return np.unique(np.concatenate([dense, sparse[sparse <= i_max]]))


def _kernel_values(coag: CoagulationKernelSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if coag.kind == "brownian_like":
        return coag.k1 * (x ** (1.0 / 3.0) + y ** (1.0 / 3.0)) ** (7.0 / 3.0)
    return coag.k2 * ((x + coag.k3) * (y + coag.k3))


def _coag_bound(coag: CoagulationKernelSpec, laws: RateLaws, i_max: int) -> CoagulationBound:
    rho = coag.degree()
    t_deg = theta_degree(laws)
    if rho == 0.0:
        return CoagulationBound(
            feasible=True,
            weight_exp=0.0,
            kappa=0.0,
            kernel_degree=rho,
            theta_degree=None if t_deg == -math.inf else t_deg,
            detail="coagulation kernel vanishes identically; bound holds trivially",
        )
    if t_deg <= 0.0 or not math.isfinite(t_deg):
        return CoagulationBound(
            feasible=False,
            weight_exp=None,
            kappa=None,
            kernel_degree=rho,
            theta_degree=None if t_deg == -math.inf else t_deg,
            detail="theta is bounded, so no weight in (0, 1) can dominate an unbounded kernel",
        )
    w_min = rho / t_deg
    if w_min >= 1.0:
        return CoagulationBound(
            feasible=False,
            weight_exp=None,
            kappa=None,
            kernel_degree=rho,
            theta_degree=t_deg,
            detail=f"kernel degree {rho:g} requires weight >= {w_min:g}, outside (0, 1)",
        )
    # witness kappa: sampled sup of the ratio at the minimal weight
    grid = np.unique(np.geomspace(1.0, float(i_max), 48).round())
    probes = np.array([1e6, 1e9, 1e12])
    xs = np.concatenate([grid, probes])
    x, y = np.meshgrid(xs, xs)
    theta_x = laws.total_loss(x)
    theta_y = laws.total_loss(y)
    ratio = _kernel_values(coag, x, y) / ((1.0 + theta_x) ** w_min + (1.0 + theta_y) ** w_min)
    kappa = float(np.max(ratio))
    return CoagulationBound(
        feasible=True,
        weight_exp=w_min,
        kappa=kappa,
        kernel_degree=rho,
        theta_degree=t_deg,
        detail="kappa is a sampled witness at the minimal feasible weight",
    )


def _omega1(laws: RateLaws, i_max: int) -> Omega1:
    # (g_i - d_i)/i - s_i, with the d_1 = 0 exception at i = 1
    sizes = np.unique(
        np.concatenate(
            [
                np.arange(1.0, min(i_max, 4096) + 1.0),
                np.geomspace(2.0, float(i_max), 64).round(),
                np.geomspace(float(i_max), float(i_max) ** 2, 33).round(),
            ]
        )
    )
    values = (laws.growth(sizes) - laws.decay(sizes)) / sizes - laws.sedimentation(sizes)
    k = int(np.argmax(values))
    sampled_max, argmax_i = float(values[k]), float(sizes[k])
    limit = _power_sum_limit(
        [
            (laws.g, laws.growth_exp - 1.0),
            (-laws.d, laws.decay_exp - 1.0),
            (-laws.s, laws.sed_exp),
        ]
    )
    if limit == math.inf:
        return Omega1(finite=False, value=None, argmax_i=None)
    value = sampled_max if limit == -math.inf else max(sampled_max, limit)
    return Omega1(finite=True, value=value, argmax_i=argmax_i)


def check_conditions(
    frag: FragmentationKernelSpec,
    coag: CoagulationKernelSpec,
    laws: RateLaws,
    p: float,
    i_max: int = 2000,
) -> ConditionReport:
    """Evaluate every coefficient hypothesis at moment order ``p``.

    Liminf quantities are sampled up to ``i_max`` (tail estimate: minimum
    over the top quarter of the sampled range) and compared against their
    closed-form power-law limits.
    """
    if p < 1.0:
        raise ValueError("moment order p must be >= 1")
    if i_max < 100:
        raise ValueError("i_max must be >= 100 for a meaningful tail estimate")

    messages: list[str] = []
    sizes = _sample_sizes(i_max)
    theta = laws.total_loss(sizes)
    frag_rates = laws.fragmentation(sizes)
    tail = sizes >= max(sizes[-1] // 4, 2)

    with np.errstate(invalid="ignore", divide="ignore"):
        # fragmentation dominance, condition for analyticity at order p
        phi_vals = np.array(
            [delta_p(frag, int(i), p) / float(i) ** p for i in sizes]
        )
        frag_ratio = np.where(theta > 0.0, frag_rates / theta, 0.0)
        frag_quant = frag_ratio * phi_vals
        frag_sampled = float(np.min(frag_quant[tail]))
        ratio_limit = _power_ratio_limit([(laws.a, laws.frag_exp)], _theta_terms(laws))
        frag_limit = None if ratio_limit is None else ratio_limit * phi_limit(frag, max(p, 1.0))

        # sedimentation dominance, the p = 1 route
        sed_quant = np.where(
            theta > 0.0,
            (laws.sedimentation(sizes) + (laws.decay(sizes) - laws.growth(sizes)) / sizes)
            / theta,
            0.0,
        )
        sed_sampled = float(np.min(sed_quant[tail]))
        sed_limit = _power_ratio_limit(
            [
                (laws.s, laws.sed_exp),
                (laws.d, laws.decay_exp - 1.0),
                (-laws.g, laws.growth_exp - 1.0),
            ],
            _theta_terms(laws),
        )

    active = {name: getattr(laws, name) > 0.0 for name in ("g", "d", "s", "a")}
    transport_exps = [
        e
        for name, e in (("g", laws.growth_exp), ("d", laws.decay_exp), ("s", laws.sed_exp))
        if active[name]
    ]
    frag_exp_ok = active["a"] and all(e <= laws.frag_exp for e in transport_exps)
    if p <= 1.0:
        messages.append("fragmentation dominance applies to moment orders p > 1 only")
    competing = [e for name, e in (("d", laws.decay_exp), ("a", laws.frag_exp)) if active[name]]
    sed_exp_ok = active["s"] and all(e <= laws.sed_exp for e in competing)

    frag_pass = (
        p > 1.0
        and frag_exp_ok
        and frag_sampled > _POSITIVE_TOL
        and (frag_limit is None or frag_limit > _POSITIVE_TOL)
    )
    sed_pass = (
        sed_exp_ok
        and sed_sampled > _POSITIVE_TOL
        and (sed_limit is None or sed_limit > _POSITIVE_TOL)
    )

    frag_check = ConditionCheck(
        passed=bool(frag_pass),
        exponent_check=bool(frag_exp_ok),
        liminf_sampled=frag_sampled,
        liminf_limit=frag_limit,
        detail=(
            "liminf of (a_i/theta_i) * phi_i(p); sampled tail minimum plus the "
            "exact power-law limit"
        ),
    )
    sed_check = ConditionCheck(
        passed=bool(sed_pass),
        exponent_check=bool(sed_exp_ok),
        liminf_sampled=sed_sampled,
        liminf_limit=sed_limit,
        detail="liminf of (s_i + (d_i - g_i)/i) / theta_i",
    )
    bound = _coag_bound(coag, laws, i_max)
    omega1 = _omega1(laws, i_max)

    if not frag_pass and not sed_pass:
        messages.append(
            "neither fragmentation nor sedimentation dominance holds; "
            "global well-posedness is not guaranteed for these coefficients"
        )
    if not bound.feasible:
        messages.append("no admissible coagulation growth bound: " + bound.detail)
    if not omega1.finite:
        messages.append(
            "the mass growth rate is unbounded over cluster sizes "
            "(growth outruns decay and sedimentation); "
            "exponential mass estimates are unavailable"
        )

    return ConditionReport(
        p=p,
        i_max=i_max,
        frag_dominance=frag_check,
        sed_dominance=sed_check,
        coag_bound=bound,
        omega1=omega1,
        messages=messages,
    )
