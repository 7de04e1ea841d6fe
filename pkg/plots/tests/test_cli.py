from coagfrag_plots.cli import main


class TestCli:
    def test_happy_path(self, run_dir, tmp_path, capsys):
        out = tmp_path / "figs"
        assert main([str(run_dir), "--out", str(out)]) == 0
        assert len(list(out.iterdir())) == 5
        assert "counts.png" in capsys.readouterr().out

    def test_panel_subset_and_crop(self, run_dir, tmp_path):
        out = tmp_path / "figs"
        code = main(
            [
                str(run_dir),
                "--panels",
                "mass_dist",
                "--crop-n",
                "8",
                "--format",
                "svg",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        assert (out / "mass_dist.svg").stat().st_size > 0
        assert not (out / "counts.svg").exists()

    def test_empty_run_dir_fails_cleanly(self, tmp_path, capsys):
        empty = tmp_path / "empty"
        empty.mkdir()
        out = tmp_path / "figs"
        assert main([str(empty), "--out", str(out)]) == 1
        assert "trajectory.csv" in capsys.readouterr().err
        assert not out.exists()

    def test_ragged_csv_reports_location(self, run_dir, tmp_path, capsys):
        path = run_dir / "moments.csv"
        lines = path.read_text().splitlines()
        lines[2] = lines[2].rsplit(",", 1)[0]
        path.write_text("\n".join(lines) + "\n")
        assert main([str(run_dir), "--out", str(tmp_path / "f")]) == 1
        err = capsys.readouterr().err
        assert "moments.csv line 3" in err
