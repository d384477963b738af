import csv
import io
import json
import os
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from stochquant.cli import main
from stochquant.pipeline import decode_indexed_png, load_image
from stochquant.report import load_schema, strip_timing

from conftest import few_color_image, save_png, smooth_image


@pytest.fixture
def smooth_png(tmp_path, rng):
    return save_png(tmp_path / "smooth.png", smooth_image(rng, 32, 40))


@pytest.fixture
def four_color_png(tmp_path, rng):
    return save_png(tmp_path / "four.png", few_color_image(rng, 4, (12, 10)))


def cluster_png(path, rng):
    lo = np.clip(0.1 * 255 + rng.uniform(-5, 5, (20, 20, 3)), 0, 255)
    hi = np.clip(0.9 * 255 + rng.uniform(-5, 5, (20, 20, 3)), 0, 255)
    return save_png(path, np.hstack([lo, hi]).round())


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCompress:
    def test_four_colors_lossless(self, tmp_path, four_color_png, capsys):
        rep = tmp_path / "rep.json"
        code, _, _ = run(["compress", "--input", four_color_png, "--colors", "4", "--rho", "0.001", "--r", "3",
                          "--seed", "42", "--out", str(tmp_path / "o.png"), "--report", str(rep)], capsys)
        assert code == 0
        report = json.loads(rep.read_text())
        jsonschema.validate(report, load_schema("report"))
        assert report["mse"] == 0.0 and report["transport_value"] == 0.0
        colors = {"#{:02x}{:02x}{:02x}".format(*c) for c in np.unique(load_image(four_color_png).flat(), axis=0)}
        assert set(report["palette_hex"]) == colors and len(report["palette_hex"]) == 4

    def test_report_contents(self, tmp_path, smooth_png, capsys):
        out = tmp_path / "o.png"
        code, stdout, _ = run(["compress", "--input", smooth_png, "--colors", "5", "--iters", "3000",
                               "--trace-every", "1000", "--out", str(out)], capsys)
        assert code == 0
        report = json.loads(stdout)
        jsonschema.validate(report, load_schema("report"))
        assert report["hyperparameters"] == {"rho": 0.001, "r": 3.0, "seed": 42, "iters": 3000,
                                             "seeding": "d-squared", "trace_every": 1000}
        assert [t["iteration"] for t in report["trace"]] == [0, 1000, 2000, 3000]
        assert report["compressed_bytes"] == out.stat().st_size
        assert report["original_bytes"] == os.path.getsize(smooth_png)
        assert (report["width"], report["height"]) == (40, 32)
        # hex fidelity: the written palette is the reported palette
        stored = decode_indexed_png(out).palette
        assert ["#{:02x}{:02x}{:02x}".format(*c) for c in stored.tolist()] == report["palette_hex"]
        # mse equals the r=2 objective over 3 on the stored palette
        assert report["mse"] >= 0

    def test_deterministic(self, tmp_path, smooth_png, capsys):
        outs = []
        for name in ("a", "b"):
            argv = ["compress", "--input", smooth_png, "--colors", "6", "--iters", "20000", "--seeding", "uniform",
                    "--out", str(tmp_path / f"{name}.png"), "--report", str(tmp_path / f"{name}.json")]
            assert run(argv, capsys)[0] == 0
            outs.append(((tmp_path / f"{name}.png").read_bytes(),
                         strip_timing(json.loads((tmp_path / f"{name}.json").read_text()))))
        assert outs[0] == outs[1]

    def test_fewer_colors_than_requested(self, tmp_path, four_color_png, capsys):
        code, stdout, _ = run(["compress", "--input", four_color_png, "--colors", "9"], capsys)
        report = json.loads(stdout)
        assert code == 0 and report["K"] == 4 and report["requested_K"] == 9 and report["mse"] == 0.0

    def test_strict_degenerate_exit_4(self, four_color_png, capsys):
        code, _, err = run(["compress", "--input", four_color_png, "--colors", "9", "--strict"], capsys)
        assert code == 4 and "distinct colors" in err

    def test_missing_input_exit_3(self, tmp_path, capsys):
        code, _, err = run(["compress", "--input", str(tmp_path / "none.png")], capsys)
        assert code == 3 and "none.png" in err

    def test_unwritable_output_exit_3(self, tmp_path, smooth_png, capsys):
        code, _, _ = run(["compress", "--input", smooth_png, "--iters", "10",
                          "--out", str(tmp_path / "no" / "o.png")], capsys)
        assert code == 3

    @pytest.mark.parametrize(
        "extra",
        [["--colors", "0"], ["--colors", "300"], ["--colors", "4,8"], ["--rho", "0"], ["--rho", "abc"],
         ["--r", "1.5"], ["--iters", "0"], ["--seed", "-3"], ["--seeding", "median"], ["--trace-every", "-1"]],
    )
    def test_usage_exit_2(self, smooth_png, extra, capsys):
        code, _, _ = run(["compress", "--input", smooth_png, *extra], capsys)
        assert code == 2

    def test_no_command_exit_2(self, capsys):
        assert run([], capsys)[0] == 2
        assert run(["compress"], capsys)[0] == 2


class TestBenchmark:
    def test_csv(self, tmp_path, smooth_png, four_color_png, capsys):
        code, stdout, _ = run(["benchmark", "--inputs", smooth_png, four_color_png, "--colors", "2,4,8",
                               "--iters", "2000", "--format", "csv"], capsys)
        assert code == 0
        rows = list(csv.reader(io.StringIO(stdout)))
        assert rows[0] == ["K", "smooth.png", "four.png"]
        assert [r[0] for r in rows[1:]] == ["2", "4", "8"]
        smooth = [float(r[1]) for r in rows[1:]]
        assert smooth[0] >= smooth[1] >= smooth[2]
        assert float(rows[2][2]) == 0.0 and float(rows[3][2]) == 0.0

    def test_json_schema_and_reports(self, tmp_path, smooth_png, capsys):
        reports = tmp_path / "reps"
        code, stdout, _ = run(["benchmark", "--inputs", smooth_png, "--colors", "3,6", "--iters", "1000",
                               "--format", "json", "--report", str(reports)], capsys)
        assert code == 0
        table = json.loads(stdout)
        jsonschema.validate(table, load_schema("benchmark"))
        files = sorted(p.name for p in reports.iterdir())
        assert files == ["000_smooth_K3.json", "000_smooth_K6.json"]
        for f in reports.iterdir():
            jsonschema.validate(json.loads(f.read_text()), load_schema("report"))

    def test_markdown(self, smooth_png, capsys):
        code, stdout, _ = run(["benchmark", "--inputs", smooth_png, "--colors", "4", "--iters", "500"], capsys)
        assert code == 0
        assert "| K | smooth.png |" in stdout and "| 4 | " in stdout

    def test_default_colors_match_table(self, smooth_png, capsys):
        code, stdout, _ = run(["benchmark", "--inputs", smooth_png, "--iters", "200", "--format", "json"], capsys)
        assert json.loads(stdout)["colors"] == [4, 8, 12, 24, 36]

    def test_jobs_do_not_change_results(self, tmp_path, smooth_png, four_color_png, capsys):
        argv = ["benchmark", "--inputs", smooth_png, four_color_png, "--colors", "3,5", "--iters", "3000",
                "--format", "csv"]
        serial = run(argv, capsys)[1]
        parallel = run([*argv, "--jobs", "2"], capsys)[1]
        again = run(argv, capsys)[1]
        assert serial == parallel == again

    def test_partial_failure(self, tmp_path, smooth_png, capsys):
        code, stdout, _ = run(["benchmark", "--inputs", smooth_png, str(tmp_path / "gone.png"), "--colors", "2",
                               "--iters", "100", "--format", "json"], capsys)
        table = json.loads(stdout)
        assert code == 0 and "error" in table["cells"][0][1] and "mse" in table["cells"][0][0]

    def test_all_fail(self, tmp_path, capsys):
        code, _, _ = run(["benchmark", "--inputs", str(tmp_path / "gone.png"), "--colors", "2"], capsys)
        assert code == 3

    def test_empty_inputs(self, capsys):
        assert run(["benchmark", "--inputs"], capsys)[0] == 2
        assert run(["benchmark"], capsys)[0] == 2


class TestBaseline:
    def test_lossless(self, four_color_png, capsys):
        code, stdout, _ = run(["baseline", "--input", four_color_png, "--colors", "4"], capsys)
        result = json.loads(stdout)
        assert code == 0
        jsonschema.validate(result, load_schema("baseline"))
        assert result["sq"]["mse"] == 0.0 and result["lloyd"]["mse"] == 0.0

    def test_two_clusters(self, tmp_path, rng, capsys):
        path = cluster_png(tmp_path / "c.png", rng)
        code, stdout, _ = run(["baseline", "--input", path, "--colors", "2", "--iters", "100000"], capsys)
        result = json.loads(stdout)
        assert code == 0
        px = load_image(path).pixels / 255.0
        centroids = [px[:, :20].reshape(-1, 3).mean(axis=0), px[:, 20:].reshape(-1, 3).mean(axis=0)]
        for method in ("sq", "lloyd"):
            pal = np.array([[int(h[i:i + 2], 16) / 255 for i in (1, 3, 5)] for h in result[method]["palette_hex"]])
            for c in centroids:
                assert min(np.linalg.norm(pal - c, axis=1)) < 0.05
        assert result["speed_ratio"] is None or result["speed_ratio"] > 0
        assert result["sq"]["wall_time_ms"] >= 0 and result["lloyd"]["wall_time_ms"] >= 0

    def test_missing(self, tmp_path, capsys):
        assert run(["baseline", "--input", str(tmp_path / "x.png")], capsys)[0] == 3


def test_backends_agree_end_to_end(tmp_path, smooth_png):
    """Forcing the pure-Python kernels reproduces the compiled run byte for byte."""
    pytest.importorskip("stochquant._kernels")
    outputs = []
    for pure in ("0", "1"):
        env = dict(os.environ, STOCHQUANT_PURE_PYTHON=pure)
        out, rep = tmp_path / f"o{pure}.png", tmp_path / f"r{pure}.json"
        subprocess.run([sys.executable, "-m", "stochquant", "compress", "--input", smooth_png, "--colors", "5",
                        "--iters", "20000", "--out", str(out), "--report", str(rep)], check=True, env=env)
        outputs.append((out.read_bytes(), strip_timing(json.loads(rep.read_text()))))
    assert outputs[0] == outputs[1]


def test_report_metrics(four_color_png):
    from stochquant.optimizer import QuantizerConfig
    from stochquant.runner import compress_image

    report, _ = compress_image(four_color_png, QuantizerConfig(K=4))
    m = report.metrics
    assert (m.mse, m.transport_value, m.palette_size_after, m.distinct_colors_before) == (0.0, 0.0, 4, 4)
    assert m.compressed_bytes == report.compressed_bytes
