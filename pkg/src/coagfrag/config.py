"""JSON scenario configuration: parsing, echoing and dotted-path overrides.

One JSON document drives a run, with sections

* ``run``     -- ``name``, ``N``, ``t_end``, ``output_grid_points``
* ``model``   -- the rate-law coefficients and exponents
* ``kernels`` -- ``fragmentation`` (kind, sigma) and ``coagulation``
  (kind, k1/k2/k3)
* ``initial`` -- ``{"kind": "block", lo, hi, value}`` or
  ``{"kind": "explicit", "values": [...]}``
* ``solver``  -- tolerances, step bounds, method, Newton controls
* ``norm``    -- report norm ``p`` and ``weight_exp``

Overrides are repeatable ``path=value`` pairs with dotted paths into the
document (``solver.rtol=1e-6``).  Convenience aliases map onto the scenario
field names: ``laws.*`` for ``model.*``, ``frag.*`` / ``coag.*`` for the
kernel subsections, and bare ``N`` / ``t_end`` / ``name`` /
``output_grid_points`` for the ``run`` section.  Values parse as JSON
scalars, falling back to plain strings.
"""

from __future__ import annotations

import json
from pathlib import Path

from .analysis import NormSpec
from .experiments import BlockInitial, ExplicitInitial, ScenarioConfig
from .integrator import SolverConfig
from .kernels import CoagulationKernelSpec, FragmentationKernelSpec, RateLaws

__all__ = [
    "ConfigError",
    "scenario_to_dict",
    "scenario_from_dict",
    "apply_overrides",
    "load_scenario",
]

_ALIASES = {
    "laws": ("model",),
    "frag": ("kernels", "fragmentation"),
    "coag": ("kernels", "coagulation"),
    "N": ("run", "N"),
    "t_end": ("run", "t_end"),
    "name": ("run", "name"),
    "output_grid_points": ("run", "output_grid_points"),
}

_MODEL_FIELDS = (
    "g",
    "growth_exp",
    "d",
    "decay_exp",
    "s",
    "sed_exp",
    "a",
    "frag_exp",
)


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def scenario_to_dict(cfg: ScenarioConfig) -> dict:
    """Echo a scenario as the canonical JSON document."""
    if isinstance(cfg.initial, BlockInitial):
        initial = {
            "kind": "block",
            "lo": cfg.initial.lo,
            "hi": cfg.initial.hi,
            "value": cfg.initial.value,
        }
    else:
        initial = {"kind": "explicit", "values": list(cfg.initial.values)}
    frag: dict = {"kind": cfg.frag.kind}
    if cfg.frag.kind == "powerlaw":
        frag["sigma"] = cfg.frag.sigma
    coag: dict = {"kind": cfg.coag.kind}
    if cfg.coag.kind == "brownian_like":
        coag["k1"] = cfg.coag.k1
    else:
        coag["k2"] = cfg.coag.k2
        coag["k3"] = cfg.coag.k3
    return {
        "run": {
            "name": cfg.name,
            "N": cfg.N,
            "t_end": cfg.t_end,
            "output_grid_points": cfg.output_grid_points,
        },
        "model": {name: getattr(cfg.laws, name) for name in _MODEL_FIELDS},
        "kernels": {"fragmentation": frag, "coagulation": coag},
        "initial": initial,
        "solver": {
            "method": cfg.solver.method,
            "rtol": cfg.solver.rtol,
            "atol": cfg.solver.atol,
            "h_init": cfg.solver.h_init,
            "h_min": cfg.solver.h_min,
            "h_max": cfg.solver.h_max,
            "max_steps": cfg.solver.max_steps,
            "newton_tol": cfg.solver.newton_tol,
            "newton_max_iters": cfg.solver.newton_max_iters,
        },
        "norm": {"p": cfg.norm.p, "weight_exp": cfg.norm.weight_exp},
    }


def _section(doc: dict, name: str) -> dict:
    value = doc.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(name, "must be a JSON object")
    return dict(value)


def _build(field: str, factory, kwargs: dict):
    try:
        return factory(**kwargs)
    except TypeError as exc:
        raise ConfigError(field, f"unknown or missing key ({exc})") from exc
    except ValueError as exc:
        raise ConfigError(field, str(exc)) from exc


def scenario_from_dict(doc: dict) -> ScenarioConfig:
    """Parse and validate the canonical document into a ScenarioConfig."""
    run = _section(doc, "run")
    model = _section(doc, "model")
    kernels = _section(doc, "kernels")
    initial_doc = _section(doc, "initial")
    solver_doc = _section(doc, "solver")
    norm_doc = _section(doc, "norm")

    unknown = set(doc) - {"run", "model", "kernels", "initial", "solver", "norm"}
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown top-level section")

    laws = _build("model", RateLaws, model)
    frag = _build(
        "kernels.fragmentation", FragmentationKernelSpec, dict(kernels.get("fragmentation", {}))
    )
    coag = _build(
        "kernels.coagulation", CoagulationKernelSpec, dict(kernels.get("coagulation", {}))
    )

    kind = initial_doc.pop("kind", None)
    if kind == "block":
        initial = _build("initial", BlockInitial, initial_doc)
    elif kind == "explicit":
        values = initial_doc.pop("values", None)
        if values is None:
            raise ConfigError("initial.values", "explicit initial data requires values")
        if initial_doc:
            raise ConfigError("initial", f"unknown keys {sorted(initial_doc)}")
        initial = _build("initial", ExplicitInitial, {"values": tuple(float(v) for v in values)})
    else:
        raise ConfigError("initial.kind", "must be 'block' or 'explicit'")

    solver = _build("solver", SolverConfig, solver_doc)
    norm = _build("norm", NormSpec, norm_doc) if norm_doc else NormSpec(p=1.0)

    for key in ("N", "t_end"):
        if key not in run:
            raise ConfigError(f"run.{key}", "required")
    return _build(
        "run",
        ScenarioConfig,
        {
            "name": str(run.get("name", "scenario")),
            "N": int(run["N"]),
            "frag": frag,
            "coag": coag,
            "laws": laws,
            "initial": initial,
            "t_end": float(run["t_end"]),
            "solver": solver,
            "norm": norm,
            "output_grid_points": int(run.get("output_grid_points", 101)),
        },
    )


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(doc: dict, overrides) -> dict:
    """Apply ``path=value`` pairs to a (copied) config document."""
    doc = json.loads(json.dumps(doc))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(item, "override must have the form path=value")
        path_text, _, value_text = item.partition("=")
        parts = path_text.strip().split(".")
        if parts[0] in _ALIASES:
            parts = list(_ALIASES[parts[0]]) + parts[1:]
        node = doc
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(path_text, "path traverses a non-object entry")
        node[parts[-1]] = _parse_value(value_text.strip())
    return doc


def load_scenario(path, overrides=()) -> ScenarioConfig:
    """Load a scenario JSON file and apply CLI overrides."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError("config", f"file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON in {Path(path).name}: {exc}")
    if not isinstance(doc, dict):
        raise ConfigError("config", "top level must be a JSON object")
    if overrides:
        doc = apply_overrides(doc, overrides)
    return scenario_from_dict(doc)
