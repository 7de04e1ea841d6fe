"""Loading and validation of simulation run directories.

A run directory must contain ``trajectory.csv`` (header ``t,u_1,...,u_N``)
and ``moments.csv`` (header ``t,m0,m1,m2,m3,mass_flux,growth_leakage``).
Validation is strict and fails with the offending file name and line
number, before any output is produced.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class RunDataError(Exception):
    """Malformed or missing run data; message carries file and line."""


@dataclass(frozen=True)
class RunData:
    times: np.ndarray      # (n_t,)
    states: np.ndarray     # (n_t, N)
    moments: np.ndarray    # (n_t, 4) columns m0..m3
    mass_flux: np.ndarray
    growth_leakage: np.ndarray

    @property
    def sizes(self) -> np.ndarray:
        return np.arange(1.0, self.states.shape[1] + 1.0)


def _read_table(path: Path, expected_prefix: list[str] | None) -> tuple[list[str], np.ndarray]:
    if not path.is_file():
        raise RunDataError(f"{path}: file not found")
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise RunDataError(f"{path} line 1: empty file") from None
        if expected_prefix and header[: len(expected_prefix)] != expected_prefix:
            raise RunDataError(
                f"{path} line 1: expected header starting with {','.join(expected_prefix)}"
            )
        width = len(header)
        for lineno, row in enumerate(reader, start=2):
            if len(row) != width:
                raise RunDataError(
                    f"{path} line {lineno}: {len(row)} columns, expected {width}"
                )
            try:
                rows.append([float(tok) for tok in row])
            except ValueError as exc:
                raise RunDataError(f"{path} line {lineno}: {exc}") from None
    if not rows:
        raise RunDataError(f"{path} line 2: no data rows")
    return header, np.array(rows)


def load_run(run_dir) -> RunData:
    """Read and cross-validate both CSV files of a run directory."""
    run_dir = Path(run_dir)
    if not run_dir.is_dir():
        raise RunDataError(f"{run_dir}: not a directory")
    theader, table = _read_table(run_dir / "trajectory.csv", ["t"])
    if len(theader) < 2 or theader[1] != "u_1":
        raise RunDataError(f"{run_dir / 'trajectory.csv'} line 1: expected columns t,u_1,...")
    mheader, mtable = _read_table(
        run_dir / "moments.csv",
        ["t", "m0", "m1", "m2", "m3", "mass_flux", "growth_leakage"],
    )
    if mtable.shape[0] != table.shape[0]:
        raise RunDataError(
            f"{run_dir / 'moments.csv'} line {mtable.shape[0] + 1}: "
            f"{mtable.shape[0]} data rows, trajectory.csv has {table.shape[0]}"
        )
    return RunData(
        times=table[:, 0],
        states=table[:, 1:],
        moments=mtable[:, 1:5],
        mass_flux=mtable[:, 5],
        growth_leakage=mtable[:, 6],
    )
