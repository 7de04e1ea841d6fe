import numpy as np
import pytest


def write_run(run_dir, n_times=9, n_sizes=12):
    """Synthesise a consistent pair of run CSVs."""
    run_dir.mkdir(parents=True, exist_ok=True)
    times = np.linspace(0.0, 1.0, n_times)
    sizes = np.arange(1.0, n_sizes + 1.0)
    states = np.exp(-0.3 * sizes)[None, :] * (1.0 + times)[:, None]
    states[0, -3:] = 0.0  # exercise masked zeros on the log colour scale
    with open(run_dir / "trajectory.csv", "w") as fh:
        fh.write("t," + ",".join(f"u_{i}" for i in range(1, n_sizes + 1)) + "\n")
        for t, row in zip(times, states):
            fh.write(",".join(f"{v:.17g}" for v in [t, *row]) + "\n")
    moments = np.stack(
        [
            states.sum(axis=1),
            states @ sizes,
            states @ sizes**2,
            states @ sizes**3,
        ],
        axis=1,
    )
    with open(run_dir / "moments.csv", "w") as fh:
        fh.write("t,m0,m1,m2,m3,mass_flux,growth_leakage\n")
        for t, row in zip(times, moments):
            fh.write(",".join(f"{v:.17g}" for v in [t, *row, 0.0, 0.0]) + "\n")
    return run_dir


@pytest.fixture
def run_dir(tmp_path):
    return write_run(tmp_path / "run")
