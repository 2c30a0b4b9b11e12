import json

import numpy as np
import pytest

from sparsecity.cli import main
from sparsecity.manifest import ExperimentManifest, format_cell, parse_config


class TestManifest:
    def test_round_trip(self):
        manifest = ExperimentManifest("rip", {"m": 32, "s": 2, "grid_m": [32, 64]})
        rebuilt = ExperimentManifest.from_dict(
            json.loads(json.dumps(manifest.to_dict()))
        )
        assert rebuilt.to_dict() == manifest.to_dict()

    def test_hash_covers_params(self):
        a = ExperimentManifest("rip", {"m": 32})
        b = ExperimentManifest("rip", {"m": 64})
        assert a.content_hash != b.content_hash

    def test_tampering_detected(self):
        record = ExperimentManifest("gen", {"m": 8}).to_dict()
        record["params"]["m"] = 16
        with pytest.raises(ValueError):
            ExperimentManifest.from_dict(record)

    def test_format_cell(self):
        assert format_cell(True) == "true"
        assert format_cell(np.float64(0.5)) == "0.5"
        assert format_cell(np.int64(3)) == "3"
        assert format_cell(0.1) == "0.1"

    def test_parse_config(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("m = 32\n# a comment\nsolver = omp\n\nn=8\n")
        assert parse_config(cfg) == {"m": "32", "solver": "omp", "n": "8"}
        bad = tmp_path / "bad.cfg"
        bad.write_text("just words\n")
        with pytest.raises(ValueError):
            parse_config(bad)


class TestGen:
    def test_writes_manifest_and_dense(self, tmp_path):
        out = tmp_path / "gen.json"
        dense = tmp_path / "gen.csv"
        code = main(
            ["gen", "--m", "8", "--n", "4", "--b", "2", "--seed", "5",
             "--out", str(out), "--dense", str(dense)]
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["matrix"]["m"] == 8
        assert doc["manifest"]["content_hash"]
        lines = dense.read_text().splitlines()
        assert lines[0] == f"# manifest_hash={doc['manifest']['content_hash']}"
        assert len(lines) == 1 + 8
        assert len(lines[1].split(",")) == 8

    def test_dimension_error_exits_2(self, tmp_path):
        assert main(["gen", "--m", "7", "--n", "4", "--b", "2",
                     "--out", str(tmp_path / "x.json")]) == 2

    def test_paper_scale_manifest(self, tmp_path):
        out = tmp_path / "big.json"
        code = main(["gen", "--m", "1024", "--n", "64", "--b", "320", "--seed", "7",
                     "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert (doc["matrix"]["m"], doc["matrix"]["n"] * doc["matrix"]["b"]) == (1024, 20480)

    def test_same_seed_same_bytes(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        argv = ["gen", "--m", "8", "--n", "4", "--b", "2", "--seed", "5"]
        main(argv + ["--out", str(a)])
        main(argv + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_manifest_file_reconstructs_the_dense_dump(self, tmp_path):
        """A consumer can rebuild the matrix from the persisted record alone:
        the dense CSV dump must match the reconstruction entry for entry."""
        from sparsecity.ensemble import SparseCityMatrix

        out, dense = tmp_path / "gen.json", tmp_path / "dense.csv"
        main(["gen", "--m", "16", "--n", "8", "--b", "2", "--seed", "31",
              "--out", str(out), "--dense", str(dense)])
        doc = json.loads(out.read_text())
        rebuilt = SparseCityMatrix.from_manifest_dict(doc["matrix"])
        rows = [
            [float(v) for v in line.split(",")]
            for line in dense.read_text().splitlines()[1:]
        ]
        assert np.array_equal(np.array(rows), rebuilt.to_dense())


class TestRip:
    def test_exact_report(self, tmp_path):
        out = tmp_path / "r.json"
        code = main(["rip", "--mode", "exact", "--m", "16", "--n", "4", "--b", "2",
                     "--seed", "3", "--s", "2", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["report"]["method"] == "exact"
        assert doc["report"]["s"] == 2
        assert not doc["report"]["in_theorem_regime"]  # 16 > 4*2

    def test_degenerate_s_zero_row(self, tmp_path):
        out = tmp_path / "s0.csv"
        code = main(["rip", "--mode", "scan", "--m", "16", "--n", "4", "--b", "4",
                     "--s", "0", "--trials", "2", "--seed", "1", "--no-plot",
                     "--out", str(out)])
        assert code == 0
        header, row = out.read_text().splitlines()
        assert "degenerate" in header
        assert ",true," in row

    def test_budget_exits_3(self, tmp_path):
        code = main(["rip", "--mode", "exact", "--m", "64", "--n", "64", "--b", "8",
                     "--s", "5", "--out", str(tmp_path / "x.json")])
        assert code == 3

    def test_scan_csv_and_figure(self, tmp_path):
        out = tmp_path / "scan.csv"
        code = main(["rip", "--mode", "scan", "--m", "32", "--grid-m", "32,64",
                     "--n", "8", "--b", "4", "--s", "2", "--trials", "3",
                     "--seed", "9", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0].split(",") == [
            "m", "n", "b", "s", "trials", "mean_value", "std_value",
            "bound_proxy", "method", "degenerate", "manifest_hash",
        ]
        assert len(lines) == 3
        assert (tmp_path / "scan.png").exists()

    def test_mc_mode(self, tmp_path):
        out = tmp_path / "mc.json"
        code = main(["rip", "--mode", "mc", "--m", "16", "--n", "8", "--b", "4",
                     "--seed", "2", "--s", "2", "--supports", "50", "--out", str(out)])
        assert code == 0
        assert json.loads(out.read_text())["report"]["method"] == "monte_carlo"


class TestRecoverAndPhase:
    def test_recover_success(self, tmp_path):
        out = tmp_path / "rec.json"
        code = main(["recover", "--m", "32", "--n", "16", "--b", "4", "--seed", "2",
                     "--s", "3", "--solver", "omp", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["result"]["success"] is True
        assert len(doc["result"]["x_hat"]) == 64

    def test_recover_nonconvergence_exits_4_but_writes(self, tmp_path):
        out = tmp_path / "rec.json"
        # a 14-sparse target at m = 16 is far past the recoverable regime, so
        # the thresholded iteration reliably diverges: exit 4, file written
        code = main(["recover", "--m", "16", "--n", "8", "--b", "2", "--seed", "2",
                     "--s", "14", "--solver", "iht", "--out", str(out)])
        assert code == 4
        doc = json.loads(out.read_text())
        assert doc["result"]["converged"] is False

    def test_phase_table(self, tmp_path):
        out = tmp_path / "phase.csv"
        code = main(["phase", "--m", "32", "--n", "16", "--b", "2", "--s-grid", "1,2",
                     "--trials", "4", "--solver", "omp", "--seed", "4", "--no-plot",
                     "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 3
        assert lines[1].startswith("1,4,")


class TestEmbedAndBaseline:
    def test_distortion_report(self, tmp_path):
        out = tmp_path / "d.json"
        code = main(["embed", "--report", "distortion", "--m", "32", "--n", "16",
                     "--b", "8", "--points", "6", "--seed", "6", "--no-plot",
                     "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["pairs_evaluated"] == 15

    def test_src_report(self, tmp_path):
        out = tmp_path / "src.json"
        code = main(["embed", "--report", "src", "--classes", "3", "--ambient", "64",
                     "--subspace", "3", "--samples", "6", "--trials", "6",
                     "--ratio", "4", "--seed", "8", "--no-plot", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["compression_ratio"] == 4.0
        assert 0.0 <= doc["accuracy"] <= 1.0

    def test_demodulator_manifest(self, tmp_path):
        out = tmp_path / "dm.json"
        code = main(["baseline", "--kind", "random_demodulator", "--W", "12", "--R", "3",
                     "--seed", "1", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["matrix"]["W"] == 12
        assert "column_norm_stats" in doc

    def test_baseline_with_rip(self, tmp_path):
        out = tmp_path / "bh.json"
        code = main(["baseline", "--kind", "subsampled_hadamard", "--m", "16",
                     "--N", "64", "--seed", "1", "--rip-s", "2", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["rip"]["value"] < 1.0

    def test_missing_args_exit_2(self, tmp_path):
        assert main(["baseline", "--kind", "random_demodulator",
                     "--out", str(tmp_path / "x.json")]) == 2


class TestConfigFile:
    def test_defaults_and_override(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("m = 16\nn = 4\nb = 2\ns = 2\nmode = exact\nseed = 3\n")
        out1 = tmp_path / "one.json"
        assert main(["rip", "--config", str(cfg), "--out", str(out1)]) == 0
        out2 = tmp_path / "two.json"
        assert main(["rip", "--config", str(cfg), "--s", "1", "--out", str(out2)]) == 0
        assert json.loads(out1.read_text())["report"]["s"] == 2
        assert json.loads(out2.read_text())["report"]["s"] == 1

    def test_unknown_key_exits_2(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("warp_factor = 9\n")
        assert main(["rip", "--config", str(cfg), "--mode", "exact", "--m", "8",
                     "--n", "4", "--b", "2", "--s", "1",
                     "--out", str(tmp_path / "x.json")]) == 2


class TestDeterminism:
    def test_scan_rerun_and_threads_byte_identical(self, tmp_path):
        argv = ["rip", "--mode", "scan", "--m", "32", "--grid-m", "32,64", "--n", "8",
                "--b", "4", "--s", "2", "--trials", "4", "--seed", "9", "--no-plot"]
        paths = [tmp_path / name for name in ("a.csv", "b.csv", "c.csv")]
        main(argv + ["--out", str(paths[0]), "--threads", "1"])
        main(argv + ["--out", str(paths[1]), "--threads", "4"])
        main(argv + ["--out", str(paths[2]), "--threads", "1"])
        blobs = [p.read_bytes() for p in paths]
        assert blobs[0] == blobs[1] == blobs[2]

    def test_src_threads_byte_identical(self, tmp_path):
        argv = ["embed", "--report", "src", "--classes", "3", "--ambient", "64",
                "--subspace", "3", "--samples", "6", "--trials", "9", "--ratio", "4",
                "--seed", "8", "--no-plot"]
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(argv + ["--out", str(a), "--threads", "1"])
        main(argv + ["--out", str(b), "--threads", "4"])
        assert a.read_bytes() == b.read_bytes()
