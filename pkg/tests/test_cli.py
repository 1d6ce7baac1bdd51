import csv
import subprocess
import sys

import pytest

from anetf.cli import main
from anetf.scenario import dumps, load_scenario


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestTf:
    def test_fig3_control_row(self, tmp_path):
        out = tmp_path / "tf.csv"
        assert main(["tf", "--scenario", "fig3_beta05", "--sensor", "1", "--grid", "4096", "--out", str(out)]) == 0
        data = rows(out)
        assert len(data) == 4096
        (row,) = [r for r in data if float(r["f"]) == 0.25]
        assert float(row["mag"]) == pytest.approx(0.5, abs=1e-3)
        assert row["flag"] == "control"

    def test_sensor_out_of_range(self, capsys):
        assert main(["tf", "--scenario", "fig3_beta05", "--sensor", "2"]) == 2
        assert "exceeds" in capsys.readouterr().err

    def test_radius_bounds(self):
        assert main(["tf", "--scenario", "fig2", "--radius", "0.01"]) == 2

    def test_stdout(self, capsys):
        assert main(["tf", "--scenario", "fig2", "--grid", "16"]) == 0
        assert len(capsys.readouterr().out.splitlines()) == 17


class TestSim:
    def test_zero_steps_is_usage_error(self):
        assert main(["sim", "--scenario", "fig2", "--steps", "0"]) == 2

    def test_writes_trace(self, tmp_path, capsys):
        out = tmp_path / "t.csv"
        assert main(["sim", "--scenario", "fig5", "--steps", "20000", "--trace-decimation", "100",
                     "--strategy", "multiple", "--out", str(out)]) == 0
        data = rows(out)
        assert len(data) == 200 and list(data[0]) == ["n", "d_1", "d_2", "e_1", "e_2"]
        assert "sensor 1 f=0.05" in capsys.readouterr().out

    def test_divergence_exit_one(self, tmp_path):
        sc = load_scenario("fig2").with_mu(50.0)
        path = tmp_path / "bad.yaml"
        path.write_text(dumps(sc))
        assert main(["sim", "--scenario", str(path), "--steps", "1000", "--out", str(tmp_path / "t.csv")]) == 1


class TestOtherCommands:
    def test_poles(self, tmp_path):
        out = tmp_path / "p.csv"
        assert main(["poles", "--scenario", "fig3_beta05", "--out", str(out)]) == 0
        (row,) = rows(out)
        assert row["sensor"] == "1" and float(row["tone_f"]) == pytest.approx(0.25)
        assert 0 < float(row["radius"]) < 1 and row["flag"] == ""

    def test_gfunc(self, tmp_path):
        out = tmp_path / "g.csv"
        assert main(["gfunc", "--scenario", "fig2", "--grid", "64", "--out", str(out)]) == 0
        data = rows(out)
        assert len(data) == 64 and list(data[0]) == ["f", "mag"]
        peak = max(data, key=lambda r: float(r["mag"]) if r["mag"] != "nan" else -1)
        assert float(peak["f"]) == pytest.approx(0.125, abs=1 / 128)

    def test_gfunc_index_range(self):
        assert main(["gfunc", "--scenario", "fig2", "--j", "2"]) == 2


class TestVerify:
    def test_fig3_all(self, tmp_path):
        out = tmp_path / "r.csv"
        assert main(["verify", "--scenario", "fig3_beta05", "--suite", "all", "--steps", "60000",
                     "--out", str(out)]) == 0
        assert {r["status"] for r in rows(out)} <= {"pass", "skip"}

    def test_fig5_all(self, capsys):
        assert main(["verify", "--scenario", "fig5", "--suite", "all"]) == 0, capsys.readouterr().out

    def test_probe_suite_identity(self, capsys):
        assert main(["verify", "--scenario", "single_identity", "--suite", "probe", "--probe-freq", "0.35"]) == 0
        assert "[PASS] probe" in capsys.readouterr().out


class TestUsage:
    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["bogus"],
            ["tf", "--scenario", "fig2", "--unknown-flag"],
            ["sim", "--scenario", "fig2", "--steps", "ten"],
            ["verify", "--scenario", "fig2", "--suite", "nope"],
            ["tf", "--scenario", "no_such_scenario"],
        ],
    )
    def test_exit_two(self, argv, capsys):
        assert main(argv) == 2
        assert "usage" in capsys.readouterr().err

    def test_invalid_scenario_file(self, tmp_path, capsys):
        p = tmp_path / "s.yaml"
        p.write_text("dimensions: {actuators: 1, sensors: 1, tones: 1}\ntones: [0.7]\n")
        assert main(["poles", "--scenario", str(p)]) == 2
        assert "tones[0]" in capsys.readouterr().err

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "anetf", "sim", "--scenario", "fig2", "--steps", "0"],
                              capture_output=True, text=True)
        assert proc.returncode == 2
