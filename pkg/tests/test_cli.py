import json
import time

import pytest

from stylebench.archive import new_archive, read_archive, write_archive
from stylebench.cli import main, parse_size
from stylebench.errors import UsageError
from stylebench.image import load_image, save_image

from conftest import CONTENT_PNG, STYLE_PNG
from helpers import reference_mean_experiments


def make_extreme_pair(tmp_path):
    from stylebench.image import RasterImage

    zeros = tmp_path / "zeros.png"
    maxed = tmp_path / "maxed.png"
    save_image(RasterImage(2, 2, 1, bytes([0] * 4)), zeros)
    save_image(RasterImage(2, 2, 1, bytes([255] * 4)), maxed)
    return zeros, maxed


def test_parse_size():
    assert parse_size("640x480") == (640, 480)
    with pytest.raises(UsageError):
        parse_size("640by480")


class TestGenerate:
    def test_mock_is_deterministic(self, tmp_path, capsys):
        out_a = tmp_path / "a.png"
        out_b = tmp_path / "b.png"
        args = ["generate", "--mock", "--seed", "7", "--prompt", "baroque hall",
                "--size", "32x32"]
        assert main(args + ["--out", str(out_a)]) == 0
        assert main(args + ["--out", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_missing_prompt_is_usage_error(self, tmp_path, capsys):
        assert main(["generate", "--out", str(tmp_path / "x.png")]) == 2
        assert "--prompt" in capsys.readouterr().err

    def test_live_without_credential_fails(self, tmp_path, capsys, monkeypatch):
        monkeypatch.delenv("STYLEBENCH_API_KEY", raising=False)
        code = main(
            ["generate", "--prompt", "p", "--out", str(tmp_path / "x.png")]
        )
        assert code == 1
        assert "STYLEBENCH_API_KEY" in capsys.readouterr().err

    def test_json_output(self, tmp_path, capsys):
        out = tmp_path / "s.png"
        code = main(
            ["generate", "--mock", "--prompt", "p", "--size", "16x16",
             "--out", str(out), "--json"]
        )
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["source_kind"] == "mock"
        assert doc["acquisition_time"] >= 0.0
        assert (doc["width"], doc["height"]) == (16, 16)


class TestStylize:
    def test_statistical_identity_chain(self, tmp_path, capsys):
        out = tmp_path / "out.png"
        code = main(
            ["stylize", "--content", str(CONTENT_PNG), "--style", str(CONTENT_PNG),
             "--out", str(out)]
        )
        assert code == 0
        code = main(["evaluate", str(CONTENT_PNG), str(out), "--json"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert doc["ssim"] == pytest.approx(1.0, abs=1e-6)

    def test_unknown_backend_is_usage_error(self, tmp_path, capsys):
        code = main(
            ["stylize", "--content", str(CONTENT_PNG), "--style", str(STYLE_PNG),
             "--out", str(tmp_path / "x.png"), "--backend", "neural"]
        )
        assert code == 2
        err = capsys.readouterr().err
        assert "statistical" in err and "external" in err

    def test_external_echo_backend(self, tmp_path, echo_backend_cmd):
        out = tmp_path / "out.png"
        code = main(
            ["stylize", "--content", str(CONTENT_PNG), "--style", str(STYLE_PNG),
             "--backend", "external", "--backend-cmd", echo_backend_cmd,
             "--out", str(out)]
        )
        assert code == 0
        assert load_image(out) == load_image(CONTENT_PNG)


class TestEvaluate:
    def test_identical_files(self, capsys):
        assert main(["evaluate", str(CONTENT_PNG), str(CONTENT_PNG)]) == 0
        out = capsys.readouterr().out
        assert "ssim (global): 1.000000" in out
        assert "psnr: inf" in out

    def test_extreme_fixtures(self, tmp_path, capsys):
        zeros, maxed = make_extreme_pair(tmp_path)
        assert main(["evaluate", str(zeros), str(maxed), "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["mse"] == 65025.0
        assert doc["psnr"] == pytest.approx(0.0, abs=1e-12)

    def test_differing_sizes_warn_but_measure(self, capsys):
        code = main(["evaluate", str(CONTENT_PNG), str(STYLE_PNG), "--json"])
        assert code == 0
        captured = capsys.readouterr()
        assert "resizing reference" in captured.err
        doc = json.loads(captured.out)
        assert doc["reference_resized"] is True
        assert -1.0 <= doc["ssim"] <= 1.0

    def test_windowed_variant(self, capsys):
        assert main(["evaluate", str(CONTENT_PNG), str(CONTENT_PNG), "--windowed"]) == 0
        assert "ssim (windowed): 1.000000" in capsys.readouterr().out

    def test_missing_file_is_runtime_error(self, tmp_path, capsys):
        assert main(["evaluate", str(tmp_path / "a.png"), str(CONTENT_PNG)]) == 1
        assert "error" in capsys.readouterr().err


class TestBench:
    def test_mock_smoke(self, tmp_path, capsys):
        out = tmp_path / "runs.json"
        start = time.perf_counter()
        code = main(
            ["bench", "--mock", "--trials", "2", "--content", str(CONTENT_PNG),
             "--prompt", "baroque hall", "--style-file", str(STYLE_PNG),
             "--out", str(out)]
        )
        elapsed = time.perf_counter() - start
        assert code == 0
        assert elapsed < 10.0
        archive = read_archive(out)
        assert len(archive.experiments) == 2
        assert all(len(e.runs) == 2 for e in archive.experiments)
        text = capsys.readouterr().out
        assert "Aggregate comparison" in text
        assert "archive written" in text

    def test_zero_trials_usage_error(self, tmp_path, capsys):
        code = main(
            ["bench", "--mock", "--trials", "0", "--content", str(CONTENT_PNG),
             "--prompt", "p", "--out", str(tmp_path / "x.json")]
        )
        assert code == 2
        assert "trials" in capsys.readouterr().err

    def test_no_arm_flags_usage_error(self, tmp_path, capsys):
        code = main(
            ["bench", "--content", str(CONTENT_PNG), "--out", str(tmp_path / "x.json")]
        )
        assert code == 2
        assert "style-file" in capsys.readouterr().err

    def test_rerun_same_seeds_identical_metrics(self, tmp_path):
        args = ["bench", "--mock", "--trials", "2", "--content", str(CONTENT_PNG),
                "--prompt", "baroque hall", "--seed", "11"]
        out_a = tmp_path / "a.json"
        out_b = tmp_path / "b.json"
        assert main(args + ["--out", str(out_a)]) == 0
        assert main(args + ["--out", str(out_b)]) == 0
        a = read_archive(out_a)
        b = read_archive(out_b)
        metrics_a = [(r.metrics.ssim, r.metrics.psnr, r.metrics.mse, r.style_image_digest)
                     for r in a.experiments[0].runs]
        metrics_b = [(r.metrics.ssim, r.metrics.psnr, r.metrics.mse, r.style_image_digest)
                     for r in b.experiments[0].runs]
        assert metrics_a == metrics_b

    def test_single_arm_json_output(self, tmp_path, capsys):
        out = tmp_path / "runs.json"
        code = main(
            ["bench", "--mock", "--trials", "1", "--content", str(CONTENT_PNG),
             "--prompt", "p", "--out", str(out), "--json"]
        )
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["archive_path"] == str(out)
        assert len(doc["experiments"]) == 1

    def test_config_file_supplies_flags(self, tmp_path):
        config = tmp_path / "bench.cfg"
        config.write_text(
            "\n".join(
                [
                    "# bench settings",
                    "mock = true",
                    f"style_file = {STYLE_PNG}",
                    "prompt = configured prompt",
                    "trials = 1",
                    f"out = {tmp_path / 'cfg-runs.json'}",
                ]
            )
        )
        code = main(["bench", "--content", str(CONTENT_PNG), "--config", str(config)])
        assert code == 0
        archive = read_archive(tmp_path / "cfg-runs.json")
        assert len(archive.experiments) == 2
        snapshot = archive.experiments[0].config_snapshot
        assert snapshot["source"]["prompt"] == "configured prompt"

    def test_flags_beat_config(self, tmp_path):
        config = tmp_path / "bench.cfg"
        config.write_text("trials = 3\n")
        out = tmp_path / "runs.json"
        code = main(
            ["bench", "--mock", "--trials", "1", "--content", str(CONTENT_PNG),
             "--prompt", "p", "--config", str(config), "--out", str(out)]
        )
        assert code == 0
        archive = read_archive(out)
        assert len(archive.experiments[0].runs) == 1


class TestReport:
    def test_reference_fixture_renders_means(self, tmp_path, capsys):
        path = tmp_path / "reference.json"
        write_archive(new_archive(reference_mean_experiments()), path)
        assert main(["report", str(path)]) == 0
        text = capsys.readouterr().out
        for value in ("0.64", "0.37", "8.66", "6.59", "18.62", "20.67"):
            assert value in text
        assert "**20.67**" in text  # bold-max per the highest-value convention
        assert "-2.05" in text

    def test_empty_archive_errors(self, tmp_path, capsys):
        path = tmp_path / "empty.json"
        write_archive(new_archive([]), path)
        assert main(["report", str(path)]) == 1
        assert "no experiments" in capsys.readouterr().err

    def test_csv_and_json_formats(self, tmp_path, capsys):
        path = tmp_path / "reference.json"
        write_archive(new_archive(reference_mean_experiments()), path)
        assert main(["report", str(path), "--format", "json"]) == 0
        json_doc = json.loads(capsys.readouterr().out)
        assert main(["report", str(path), "--format", "csv"]) == 0
        csv_text = capsys.readouterr().out
        assert csv_text.startswith("table,row,column,value")
        agg = next(t for t in json_doc["tables"] if t["key"] == "aggregate")
        assert agg["rows"][0][3] == 18.62

    def test_global_json_flag_forces_json(self, tmp_path, capsys):
        path = tmp_path / "reference.json"
        write_archive(new_archive(reference_mean_experiments()), path)
        assert main(["report", str(path), "--json"]) == 0
        json.loads(capsys.readouterr().out)  # parses

    def test_missing_archive_is_runtime_error(self, tmp_path, capsys):
        assert main(["report", str(tmp_path / "none.json")]) == 1


class TestExitContract:
    def test_unknown_subcommand(self, capsys):
        assert main(["frobnicate"]) == 2

    def test_json_single_document_with_diagnostics_on_stderr(self, capsys):
        code = main(["evaluate", str(CONTENT_PNG), str(STYLE_PNG), "--json", "--verbose"])
        assert code == 0
        captured = capsys.readouterr()
        json.loads(captured.out)  # exactly one parseable document
        assert "resizing" in captured.err
