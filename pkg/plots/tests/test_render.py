import numpy as np
import pytest

from coagfrag_plots import FigureRequest, RunDataError, build_panel, load_run, render


class TestLoadRun:
    def test_loads_synthetic_run(self, run_dir):
        data = load_run(run_dir)
        assert data.states.shape == (9, 12)
        assert data.moments.shape == (9, 4)
        assert np.all(np.diff(data.times) > 0.0)

    def test_missing_directory(self, tmp_path):
        with pytest.raises(RunDataError, match="not a directory"):
            load_run(tmp_path / "nope")

    def test_missing_moments_file(self, run_dir):
        (run_dir / "moments.csv").unlink()
        with pytest.raises(RunDataError, match="moments.csv"):
            load_run(run_dir)

    def test_ragged_row_names_file_and_line(self, run_dir):
        path = run_dir / "trajectory.csv"
        lines = path.read_text().splitlines()
        lines[3] = lines[3] + ",99"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(RunDataError, match=r"trajectory\.csv line 4"):
            load_run(run_dir)

    def test_non_numeric_cell(self, run_dir):
        path = run_dir / "moments.csv"
        text = path.read_text().replace("\n0.125,", "\nzap,", 1)
        path.write_text(text)
        with pytest.raises(RunDataError, match=r"moments\.csv line"):
            load_run(run_dir)


class TestRender:
    def test_all_panels_written(self, run_dir, tmp_path):
        out = tmp_path / "figs"
        written = render(FigureRequest(run_dir=run_dir, out_dir=out))
        assert len(written) == 5
        names = {p.name for p in written}
        assert names == {"counts.png", "mass_dist.png", "m0.png", "m1.png", "m23.png"}
        for path in written:
            assert path.stat().st_size > 0

    def test_crop_limits_size_axis(self, run_dir):
        data = load_run(run_dir)
        fig = build_panel(data, "mass_dist", crop_n=8)
        try:
            assert fig.axes[0].get_xlim()[1] <= 8.5
        finally:
            import matplotlib.pyplot as plt

            plt.close(fig)

    def test_read_only_on_run_dir(self, run_dir, tmp_path):
        before = {p.name: p.read_bytes() for p in run_dir.iterdir()}
        render(FigureRequest(run_dir=run_dir, out_dir=tmp_path / "o"))
        after = {p.name: p.read_bytes() for p in run_dir.iterdir()}
        assert before == after

    def test_svg_rerender_byte_identical(self, run_dir, tmp_path):
        req_a = FigureRequest(run_dir=run_dir, out_dir=tmp_path / "a", format="svg")
        req_b = FigureRequest(run_dir=run_dir, out_dir=tmp_path / "b", format="svg")
        for pa, pb in zip(render(req_a), render(req_b)):
            assert pa.read_bytes() == pb.read_bytes()

    def test_no_partial_output_on_bad_input(self, run_dir, tmp_path):
        (run_dir / "moments.csv").unlink()
        out = tmp_path / "figs"
        with pytest.raises(RunDataError):
            render(FigureRequest(run_dir=run_dir, out_dir=out))
        assert not out.exists()

    def test_linear_scale_option(self, run_dir, tmp_path):
        written = render(
            FigureRequest(
                run_dir=run_dir, panels=("counts",), out_dir=tmp_path, color_scale="linear"
            )
        )
        assert written[0].stat().st_size > 0

    def test_invalid_request(self, run_dir):
        with pytest.raises(ValueError):
            FigureRequest(run_dir=run_dir, panels=("bogus",))
        with pytest.raises(ValueError):
            FigureRequest(run_dir=run_dir, format="pdf")
        with pytest.raises(ValueError):
            FigureRequest(run_dir=run_dir, crop_n=0)
