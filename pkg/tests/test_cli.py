import json

import numpy as np
import pytest
from PIL import Image

from purecolor.cli import main
from purecolor.generate import read_manifest


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGenCommand:
    def test_gen_writes_dataset(self, tmp_path, capsys):
        code, out, _ = run_cli(
            capsys, "gen", "--out", str(tmp_path / "d"), "--seed", "7",
            "--counts", "5,2,1,2,1,1",
        )
        assert code == 0
        summary = json.loads(out)
        assert summary["per_variation"] == {
            "var1": 5, "var2": 8, "var3": 6, "var4": 2, "var5": 2, "var6": 2,
        }
        entries = read_manifest(tmp_path / "d" / "manifest.jsonl")
        assert all((tmp_path / "d" / e["image"]).exists() for e in entries)

    def test_gen_deterministic_trees(self, tmp_path, capsys):
        for sub in ("a", "b"):
            code, *_ = run_cli(
                capsys, "gen", "--out", str(tmp_path / sub), "--seed", "7",
                "--counts", "4,1,1,1,1,1",
            )
            assert code == 0
        ma = (tmp_path / "a" / "manifest.jsonl").read_bytes()
        mb = (tmp_path / "b" / "manifest.jsonl").read_bytes()
        assert ma == mb
        for e in read_manifest(tmp_path / "a" / "manifest.jsonl"):
            assert (tmp_path / "a" / e["image"]).read_bytes() == (
                tmp_path / "b" / e["image"]
            ).read_bytes()


class TestSplitCommand:
    def test_stratified(self, tmp_path, capsys):
        run_cli(capsys, "gen", "--out", str(tmp_path / "d"), "--counts", "20,2,1,2,2,2")
        code, out, _ = run_cli(
            capsys, "split", "--manifest", str(tmp_path / "d" / "manifest.jsonl"),
            "--out", str(tmp_path / "tagged.jsonl"), "--mode", "stratified",
        )
        assert code == 0
        tagged = read_manifest(tmp_path / "tagged.jsonl")
        assert all("split" in e for e in tagged)

    def test_hue_split(self, tmp_path, capsys):
        run_cli(capsys, "gen", "--out", str(tmp_path / "d"), "--counts", "20,0,0,0,0,0")
        code, out, _ = run_cli(
            capsys, "split", "--manifest", str(tmp_path / "d" / "manifest.jsonl"),
            "--out", str(tmp_path / "tagged.jsonl"), "--mode", "hue1",
        )
        assert code == 0
        tagged = read_manifest(tmp_path / "tagged.jsonl")
        assert all("gen_split" in e for e in tagged)


class TestEvalCommand:
    def test_eval_gt_is_zero(self, tmp_path, capsys):
        run_cli(capsys, "gen", "--out", str(tmp_path / "d"), "--counts", "4,1,1,1,1,1")
        code, out, _ = run_cli(
            capsys, "eval",
            "--manifest", str(tmp_path / "d" / "manifest.jsonl"),
            "--images", str(tmp_path / "d" / "gt"),
            "--report", str(tmp_path / "r"),
            "--model-tag", "oracle",
        )
        assert code == 0
        assert json.loads(out)["coverage"] == 1.0
        csv_lines = (tmp_path / "r" / "report.csv").read_text().strip().split("\n")
        header = csv_lines[0].split(",")
        for row in csv_lines[1:]:
            cells = dict(zip(header, row.split(",")))
            assert float(cells["pre_mean"]) == 0.0
            assert float(cells["pur_mean"]) == 0.0


class TestProbeCommand:
    def test_probe_with_oracle_images(self, tmp_path, capsys):
        from purecolor.generate import render_ground_truth
        from purecolor.harness import PROBE_FAMILIES

        root = tmp_path / "img"
        root.mkdir()
        for case in PROBE_FAMILIES["spatial"].cases:
            img = render_ground_truth(list(case.regions), 256)
            Image.fromarray(img, "RGB").save(root / f"probe-{case.name}.png")
        code, out, _ = run_cli(
            capsys, "probe", "--family", "spatial",
            "--images", str(root), "--report", str(tmp_path / "probe.json"),
        )
        assert code == 0
        report = json.loads((tmp_path / "probe.json").read_text())
        assert len(report["cases"]) == 3


class TestMetricsCommand:
    def test_set_overrides_reach_metric_params(self, tmp_path, capsys):
        img = np.full((64, 64, 3), 77, dtype=np.uint8)
        path = tmp_path / "img.png"
        Image.fromarray(img, "RGB").save(path)
        code, out, _ = run_cli(
            capsys, "metrics", "--image", str(path),
            "--set", "canny.sigma=2.5", "--set", "fft.cutoff=0.4",
        )
        assert code == 0
        assert json.loads(out)["image"]["ced"] == 0.0
        code, _, err = run_cli(
            capsys, "metrics", "--image", str(path), "--set", "canny.sigma=-1"
        )
        assert code == 1
        assert "sigma" in json.loads(err)["message"]

    def test_pair(self, capsys):
        code, out, _ = run_cli(capsys, "metrics", "--pair", "#9966CC", "#000000")
        assert code == 0
        data = json.loads(out)
        raw = data["pair"]["raw"]
        assert set(raw) == {"rgb_ed", "rgb_rm", "lab_00", "lab_hue", "lab_hyab", "lab_ch"}
        expected = np.sqrt(153.0 ** 2 + 102.0 ** 2 + 204.0 ** 2)
        assert raw["rgb_ed"] == pytest.approx(float(expected), abs=1e-9)
        assert 0.0 <= data["pair"]["pre_mean"] <= 1.0

    def test_image_purity(self, tmp_path, capsys):
        img = np.full((64, 64, 3), (153, 102, 204), dtype=np.uint8)
        path = tmp_path / "img.png"
        Image.fromarray(img, "RGB").save(path)
        code, out, _ = run_cli(
            capsys, "metrics", "--image", str(path), "--target", "#9966CC"
        )
        assert code == 0
        data = json.loads(out)
        assert data["image"]["sd"] == 0.0
        assert data["image"]["ced"] == 0.0
        assert data["image"]["hf"] == 0.0
        assert data["image"]["pre_mean"] == 0.0


class TestErrorHandling:
    def test_missing_source_is_machine_readable(self, tmp_path, capsys):
        (tmp_path / "m.jsonl").write_text("")
        code, out, err = run_cli(
            capsys, "eval", "--manifest", str(tmp_path / "m.jsonl"),
            "--report", str(tmp_path / "r"),
        )
        assert code == 1
        payload = json.loads(err)
        assert "error" in payload and "message" in payload

    def test_bad_hex_pair(self, capsys):
        code, _, err = run_cli(capsys, "metrics", "--pair", "#99x6CC", "#000000")
        assert code == 1
        assert json.loads(err)["error"] == "HexError"
