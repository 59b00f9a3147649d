import json

import numpy as np
import pytest

from subplanck.cli import StateSpec, main


def read_csv(path):
    header = {}
    rows = []
    for line in open(path):
        line = line.strip()
        if line.startswith("#"):
            key, _, val = line[2:].partition("=")
            header[key] = val
        elif line:
            rows.append([float(v) for v in line.split(",")])
    return header, np.array(rows)


class TestStateSpec:
    def test_parse_roundtrip(self):
        spec = StateSpec.parse("compass:a=2.5")
        assert spec.kind == "compass" and spec.params["a"] == 2.5

    def test_unknown_kind_and_param(self):
        with pytest.raises(Exception):
            StateSpec.parse("qubit:n=1")
        with pytest.raises(Exception):
            StateSpec.parse("number:m=1")

    def test_integer_coercion(self):
        spec = StateSpec.parse("random:dim=30,seed=4")
        assert spec.params == {"dim": 30, "seed": 4}


class TestFidelityCurveCommand:
    def test_coherent_closed_column(self, tmp_path):
        out = tmp_path / "c.csv"
        rc = main([
            "fidelity-curve", "--state", "coherent:nu1=1,nu2=0",
            "--t-min", "0", "--t-max", "2", "--t-steps", "21",
            "--out", str(out),
        ])
        assert rc == 0
        header, rows = read_csv(out)
        assert header["columns"] == "t,F_closed,F_quadrature,abs_diff"
        ts = rows[:, 0]
        assert np.allclose(rows[:, 1], 1 / (1 + ts / 2), atol=1e-15)
        assert np.max(rows[:, 3]) < 1e-9

    def test_single_point_at_zero(self, tmp_path):
        out = tmp_path / "z.csv"
        rc = main([
            "fidelity-curve", "--state", "number:n=2",
            "--t-min", "0", "--t-max", "2", "--t-steps", "1",
            "--out", str(out),
        ])
        assert rc == 0
        _, rows = read_csv(out)
        assert rows[0, 1] == 1.0 and rows[0, 2] == 1.0

    def test_compass_large_a_near_lower_bound(self, tmp_path):
        out = tmp_path / "cp.csv"
        a = 5 / np.sqrt(2)
        rc = main([
            "fidelity-curve", "--state", f"compass:a={a}",
            "--t-min", "0.5", "--t-max", "2", "--t-steps", "7",
            "--out", str(out),
        ])
        assert rc == 0
        _, rows = read_csv(out)
        lower = 1 / (4 * (1 + rows[:, 0] / 2))
        assert np.max(np.abs(rows[:, 2] - lower)) < 0.01

    def test_validation_exit_code(self, tmp_path):
        rc = main([
            "fidelity-curve", "--state", "nosuch:x=1",
            "--out", str(tmp_path / "x.csv"),
        ])
        assert rc == 2
        rc = main([
            "fidelity-curve", "--state", "coherent:nu1=0,nu2=0",
            "--t-min", "2", "--t-max", "1", "--out", str(tmp_path / "y.csv"),
        ])
        assert rc == 2


class TestScalesCommand:
    def test_number_state(self, tmp_path, capsys):
        rc = main(["scales", "--state", "number:n=12"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["fine_scale"] == pytest.approx(0.2)
        assert doc["extent"] == pytest.approx(10.0)

    def test_coherent_baseline(self, capsys):
        main(["scales", "--state", "coherent:nu1=0,nu2=0"])
        doc = json.loads(capsys.readouterr().out)
        assert doc["fine_scale"] == pytest.approx(1.0)
        assert doc["extent"] == pytest.approx(2.0)

    def test_random_ensemble_scale(self, capsys):
        import warnings

        vals = []
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for seed in range(20):
                main(["scales", "--state", f"random:dim=100,seed={seed}"])
                vals.append(json.loads(capsys.readouterr().out)["fine_scale"])
        assert 0.09 <= np.mean(vals) <= 0.11


class TestGridCommand:
    def test_wigner_scaling_and_plot_script(self, tmp_path):
        out = tmp_path / "w.csv"
        rc = main([
            "grid", "--state", "coherent:nu1=0,nu2=0", "--function", "wigner",
            "--grid-res", "33", "--grid-extent", "4", "--out", str(out),
        ])
        assert rc == 0
        header, rows = read_csv(out)
        assert header["scaling"] == "(pi/2) W"
        assert rows[:, 2].max() == pytest.approx(1.0, abs=1e-10)  # (pi/2)(2/pi)
        assert (tmp_path / "w.csv.plot.py").exists()

    def test_husimi_nonnegative(self, tmp_path):
        out = tmp_path / "q.csv"
        main([
            "grid", "--state", "number:n=1", "--function", "husimi",
            "--grid-res", "17", "--out", str(out),
        ])
        _, rows = read_csv(out)
        assert np.all(rows[:, 2] >= -1e-14)
        assert rows[:, 2].max() <= 1.0 + 1e-12  # pi * (1/pi)

    def test_compass_checkerboard_period(self, tmp_path):
        # peak-spacing estimator on the central interference pattern
        out = tmp_path / "cb.csv"
        a = 5 / np.sqrt(2)
        main([
            "grid", "--state", f"compass:a={a}", "--function", "wigner",
            "--grid-res", "257", "--grid-extent", "3.0", "--out", str(out),
        ])
        _, rows = read_csv(out)
        v = rows[:, 2].reshape(257, 257)
        mid = v[:, 128]
        axis = np.linspace(-3, 3, 257)
        # maxima of the central checkerboard repeat every pi * ell
        peaks = [i for i in range(1, 256) if mid[i] > mid[i - 1] and mid[i] > mid[i + 1]]
        spacing = np.mean(np.diff(axis[peaks]))
        ell_est = spacing / np.pi
        assert abs(ell_est - 0.2) / 0.2 < 0.2


class TestTeleportMCCommand:
    def test_summary_and_trajectories(self, tmp_path):
        out = tmp_path / "mc.csv"
        rc = main([
            "teleport-mc", "--state", "coherent:nu1=1,nu2=0", "--t", "1.0",
            "--samples", "300", "--seed", "3", "--out", str(out),
        ])
        assert rc == 0
        header, rows = read_csv(out)
        assert rows.shape == (300, 4)
        summary = json.loads(open(str(out) + ".summary.json").read())
        se = summary["stderr"]
        assert abs(summary["mean_conditional_fidelity"] - 2 / 3) < 3.5 * se
        assert summary["l1_distance_to_average_channel"] < 0.2

    def test_deterministic_with_seed(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            main([
                "teleport-mc", "--state", "coherent:nu1=0,nu2=0", "--t", "2.0",
                "--samples", "1", "--seed", "11", "--out", str(out),
            ])
        assert a.read_bytes() == b.read_bytes()


class TestRandomAverageCommand:
    def test_formula_within_errors(self, tmp_path):
        out = tmp_path / "ra.csv"
        rc = main([
            "random-average", "--dim", "6", "--samples", "60",
            "--t-min", "0.4", "--t-max", "2.0", "--t-steps", "3",
            "--seed", "5", "--out", str(out),
        ])
        assert rc == 0
        _, rows = read_csv(out)
        for t, formula, mean, se in rows:
            assert abs(mean - formula) < 4 * se


class TestEvolveCommand:
    def test_short_run_outputs(self, tmp_path):
        prefix = str(tmp_path / "run")
        rc = main([
            "evolve", "--t-final", "0.2", "--dt", "0.0005",
            "--t-steps", "4", "--out-prefix", prefix,
        ])
        assert rc == 0
        summary = json.loads(open(prefix + "_summary.json").read())
        assert abs(summary["norm_drift"]) < 1e-8
        assert summary["leakage"] < 1e-3
        header, rows = read_csv(prefix + "_fidelity.csv")
        assert rows.shape[1] == 4

    def test_fock_state_roundtrip(self, tmp_path):
        from subplanck.cli import read_state_csv

        prefix = str(tmp_path / "rt")
        main([
            "evolve", "--t-final", "0.1", "--dt", "0.0005",
            "--t-steps", "3", "--out-prefix", prefix,
        ])
        state = read_state_csv(prefix + "_fock_state.csv")
        assert np.sum(np.abs(state.coeffs) ** 2) == pytest.approx(1.0, abs=1e-12)

    def test_snapshot_stride(self, tmp_path):
        prefix = str(tmp_path / "snap")
        rc = main([
            "evolve", "--t-final", "0.02", "--dt", "0.0005",
            "--grid-points", "512", "--grid-min", "-24", "--grid-max", "24",
            "--t-steps", "3", "--snapshot-stride", "20", "--out-prefix", prefix,
        ])
        assert rc == 0
        header, rows = read_csv(prefix + "_snapshots.csv")
        taus = np.unique(rows[:, 0])
        assert len(taus) == 2  # 40 steps at stride 20
        assert rows.shape == (2 * 512, 4)

    def test_zero_steps_echoes_initial(self, tmp_path):
        prefix = str(tmp_path / "zero")
        rc = main([
            "evolve", "--t-final", "0", "--dt", "0.001",
            "--t-steps", "3", "--out-prefix", prefix,
        ])
        assert rc == 0
        _, rows = read_csv(prefix + "_final_wavefunction.csv")
        x = rows[:, 0]
        psi2 = rows[:, 1] ** 2 + rows[:, 2] ** 2
        assert x[np.argmax(psi2)] == pytest.approx(-8.0, abs=0.05)


class TestManifest:
    def test_rerun_bit_exact(self, tmp_path):
        out1, out2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
        argv = ["fidelity-curve", "--state", "squeezed:u=0.5",
                "--t-min", "0", "--t-max", "1", "--t-steps", "5"]
        main(argv + ["--out", str(out1)])
        main(argv + ["--out", str(out2)])
        assert out1.read_bytes() == out2.read_bytes()
        manifest = json.loads(open(str(out1) + ".manifest.json").read())
        assert manifest["command"] == "fidelity-curve"
        assert manifest["config"]["state"] == "squeezed:u=0.5"

    def test_config_file_replay(self, tmp_path):
        out1, out3 = tmp_path / "r1.csv", tmp_path / "r3.csv"
        main(["fidelity-curve", "--state", "squeezed:u=0.5",
              "--t-min", "0", "--t-max", "1", "--t-steps", "5",
              "--out", str(out1)])
        rc = main(["fidelity-curve", "--config", str(out1) + ".manifest.json",
                   "--out", str(out3)])
        assert rc == 0
        assert out1.read_bytes() == out3.read_bytes()
