"""End-to-end: render every panel for the built-in examples 1 and 5.

Consumes the simulation package only through its command line and CSV
outputs.  Skipped when the ``coagfrag`` CLI is not installed.
"""

import shutil
import subprocess

import pytest

from coagfrag_plots.cli import main

needs_sim = pytest.mark.skipif(
    shutil.which("coagfrag") is None, reason="coagfrag CLI not installed"
)


@pytest.fixture(scope="module")
def example_runs(tmp_path_factory):
    runs = {}
    for example_id in ("1", "5"):
        out = tmp_path_factory.mktemp(f"ex{example_id}")
        subprocess.run(
            ["coagfrag", "example", example_id, "--out", str(out), "-q"],
            check=True,
        )
        runs[example_id] = out
    return runs


@needs_sim
def test_criterion_10_examples_render(example_runs, tmp_path, capsys):
    for example_id, run_dir in example_runs.items():
        out = tmp_path / f"figs{example_id}"
        assert main([str(run_dir), "--out", str(out)]) == 0
        files = sorted(p.name for p in out.iterdir())
        assert files == ["counts.png", "m0.png", "m1.png", "m23.png", "mass_dist.png"]
        assert all((out / name).stat().st_size > 0 for name in files)
        # cropped mass-distribution view of the small-size window
        crop = tmp_path / f"crop{example_id}"
        code = main(
            [str(run_dir), "--panels", "mass_dist", "--crop-n", "80", "--out", str(crop)]
        )
        assert code == 0
        assert (crop / "mass_dist.png").stat().st_size > 0
    print("\nACCEPTANCE 10: PASS (all panels for examples 1 and 5, with crop)")
