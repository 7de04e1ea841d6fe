"""Panel rendering for simulation runs.

Five panels mirror the standard figure layout: the cluster-count surface
``u_n(t)``, the mass-distribution surface ``n*u_n(t)``, the total particle
count ``m0``, the total mass ``m1`` and the higher moments ``m2``/``m3``
as one combined panel.

Surfaces default to a logarithmic colour scale (densities span many
decades); moment panels are linear time series.  ``color_scale="linear"``
overrides the surfaces.  SVG output is deterministic: a fixed hash salt
and stripped date metadata make re-renders byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.colors import LogNorm
import numpy as np

from .data import RunData, RunDataError, load_run

PANELS = ("counts", "mass_dist", "m0", "m1", "m23")
FORMATS = ("png", "svg")

plt.rcParams["svg.hashsalt"] = "coagfrag-plots"


@dataclass(frozen=True)
class FigureRequest:
    run_dir: Path
    panels: tuple[str, ...] = PANELS
    crop_n: int | None = None
    format: str = "png"
    out_dir: Path = field(default_factory=Path.cwd)
    color_scale: str = "log"

    def __post_init__(self):
        unknown = set(self.panels) - set(PANELS)
        if unknown:
            raise ValueError(f"unknown panels: {sorted(unknown)}")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")
        if self.crop_n is not None and self.crop_n < 1:
            raise ValueError("crop_n must be >= 1")
        if self.color_scale not in ("log", "linear"):
            raise ValueError("color_scale must be 'log' or 'linear'")


def _surface(data: RunData, values: np.ndarray, title: str, crop_n, color_scale: str):
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    n_max = data.states.shape[1] if crop_n is None else min(crop_n, data.states.shape[1])
    z = values[:, :n_max]
    edges_n = np.arange(0.5, n_max + 1.0)
    dt = np.diff(data.times)
    edges_t = np.concatenate(
        [
            [data.times[0] - (dt[0] / 2 if dt.size else 0.5)],
            (data.times[:-1] + data.times[1:]) / 2.0,
            [data.times[-1] + (dt[-1] / 2 if dt.size else 0.5)],
        ]
    )
    if color_scale == "log":
        positive = z[z > 0.0]
        if positive.size:
            vmax = float(positive.max())
            vmin = max(float(positive.min()), vmax * 1e-12)
            norm = LogNorm(vmin=vmin, vmax=vmax)
            masked = np.ma.masked_less_equal(z, 0.0)
        else:
            norm, masked = None, z
    else:
        norm, masked = None, z
    mesh = ax.pcolormesh(edges_n, edges_t, masked, norm=norm, cmap="viridis", rasterized=False)
    fig.colorbar(mesh, ax=ax)
    ax.set_xlabel("cluster size n")
    ax.set_ylabel("time t")
    ax.set_title(title)
    ax.set_xlim(0.5, n_max + 0.5)
    return fig


def _series(data: RunData, columns, labels, title: str):
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for column, label in zip(columns, labels):
        ax.plot(data.times, data.moments[:, column], label=label)
    ax.set_xlabel("time t")
    ax.set_title(title)
    if len(columns) > 1:
        ax.legend()
    return fig


def build_panel(data: RunData, panel: str, crop_n=None, color_scale: str = "log"):
    """Build one panel figure (callers own closing it)."""
    if panel == "counts":
        return _surface(data, data.states, "number of clusters u_n(t)", crop_n, color_scale)
    if panel == "mass_dist":
        return _surface(
            data, data.states * data.sizes[None, :], "mass distribution n*u_n(t)", crop_n, color_scale
        )
    if panel == "m0":
        return _series(data, [0], ["m0"], "total number of particles")
    if panel == "m1":
        return _series(data, [1], ["m1"], "total mass")
    if panel == "m23":
        return _series(data, [2, 3], ["m2", "m3"], "higher order moments")
    raise ValueError(f"unknown panel {panel!r}")


def render(req: FigureRequest) -> list[Path]:
    """Render every requested panel; returns the written file paths.

    The run directory is only read.  All inputs are loaded and validated
    before the first output file is created, so a bad run directory never
    leaves partial figures behind.
    """
    data = load_run(req.run_dir)
    out_dir = Path(req.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for panel in req.panels:
        fig = build_panel(data, panel, req.crop_n, req.color_scale)
        path = out_dir / f"{panel}.{req.format}"
        fig.savefig(path, metadata={"Date": None} if req.format == "svg" else None)
        plt.close(fig)
        written.append(path)
    return written
