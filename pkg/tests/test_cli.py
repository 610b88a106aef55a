from __future__ import annotations

import csv
import json
import time

import numpy as np
import pytest

from app import main
from controllers.dataset_controller import DatasetController
from controllers.errors import UnmatchedFilesError
from controllers.imageio import downsample, load_image
from controllers.metric import back_projection_error
from tests.conftest import add_noise, smooth_hr

METRIC_FLAGS = ["--scale", "4", "--patch-size", "5", "--stride", "1",
                "--n-groups", "4", "--min-group-samples", "10"]


def _rows(path):
    with open(path, encoding="utf-8", newline="") as f:
        lines = f.read().splitlines()
    assert lines[0].startswith("# manifest: {")
    return list(csv.reader(lines[1:]))


@pytest.fixture
def dataset(rng, write_dirs):
    hr = {f"img{i:02d}": smooth_hr(rng, 16, 16, 4) for i in range(4)}
    noisy = {k: add_noise(rng, v, 12) for k, v in hr.items()}
    lr = {k: downsample(v, 4, "bicubic") for k, v in hr.items()}
    return write_dirs({"hr": hr, "sr": hr, "noisy": noisy, "lr": lr})


def test_evaluate_identity_prints_zero(dataset, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["evaluate", "--hr-dir", str(dataset["hr"]), "--sr-dir", str(dataset["sr"]),
                 "--lr-dir", str(dataset["lr"]), "--out-dir", str(out), *METRIC_FLAGS])
    assert code == 0
    assert capsys.readouterr().out.strip() == "0.0"

    doc = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert doc["aggregate"] == 0.0
    assert doc["manifest"]["subcommand"] == "evaluate"
    assert doc["manifest"]["inputs"]["images"] == ["img00", "img01", "img02", "img03"]
    rows = _rows(out / "report.csv")
    assert rows[0] == ["group", "gt_count", "gen_count", "distance"]
    assert len(rows) - 1 == len(doc["per_group"])


@pytest.mark.parametrize("distance", ["wasserstein", "tv", "js", "kl"])
def test_evaluate_identity_on_twenty_images(rng, write_dirs, tmp_path, capsys, distance):
    hr = {f"img{i:02d}": smooth_hr(rng, 16, 16, 4) for i in range(20)}
    dirs = write_dirs({"hr": hr})
    out = tmp_path / "out"
    start = time.monotonic()
    assert main(["evaluate", "--hr-dir", str(dirs["hr"]), "--sr-dir", str(dirs["hr"]),
                 "--distance", distance, "--threads", "1", "--out-dir", str(out), *METRIC_FLAGS]) == 0
    assert time.monotonic() - start < 10.0
    doc = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert len(doc["manifest"]["inputs"]["images"]) == 20
    if distance == "kl":
        assert 0.0 <= doc["aggregate"] <= 1e-9
    else:
        assert doc["aggregate"] == 0.0
    assert float(capsys.readouterr().out) == doc["aggregate"]


def test_evaluate_without_lr_dir_synthesizes_lr(dataset, tmp_path, capsys):
    code = main(["evaluate", "--hr-dir", str(dataset["hr"]), "--sr-dir", str(dataset["noisy"]),
                 "--out-dir", str(tmp_path / "o"), "--grouping-out", "grouping.json", *METRIC_FLAGS])
    assert code == 0
    assert float(capsys.readouterr().out) > 0
    grouping = json.loads((tmp_path / "o" / "grouping.json").read_text(encoding="utf-8"))
    assert grouping["k"] == 4
    assert sum(grouping["group_sizes"]) == 4 * 12 * 12


def test_evaluate_missing_file_names_the_stem(dataset, tmp_path, capsys):
    (dataset["sr"] / "img02.png").unlink()
    code = main(["evaluate", "--hr-dir", str(dataset["hr"]), "--sr-dir", str(dataset["sr"]),
                 "--out-dir", str(tmp_path / "o"), *METRIC_FLAGS])
    assert code == 2
    assert "img02" in capsys.readouterr().err


def test_unmatched_stems_error_record(dataset):
    (dataset["sr"] / "img01.png").unlink()
    with pytest.raises(UnmatchedFilesError) as exc:
        DatasetController().match_stems([dataset["hr"], dataset["sr"]])
    record = exc.value.as_dict()
    assert record["code"] == "unmatched_files"
    assert record["missing"] == [f"img01 (missing in {dataset['sr']})"]


def test_evaluate_requires_directories(tmp_path):
    assert main(["evaluate", "--out-dir", str(tmp_path)]) == 2


def test_evaluate_is_byte_identical_across_threads(dataset, tmp_path):
    outs = []
    for threads in ("1", "4"):
        out = tmp_path / f"t{threads}"
        assert main(["evaluate", "--hr-dir", str(dataset["hr"]), "--sr-dir", str(dataset["noisy"]),
                     "--out-dir", str(out), "--threads", threads, "--seed", "5", *METRIC_FLAGS]) == 0
        outs.append(out)
    for name in ("report.json", "report.csv"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_config_file_and_flag_precedence(dataset, tmp_path):
    cfg = tmp_path / "run.conf"
    cfg.write_text(
        "# evaluation settings\n"
        "scale = 4\npatch-size = 5\nstride = 1\n"
        "n_groups = 2\nmin-group-samples = 10\n"
        "per-image = false\n",
        encoding="utf-8",
    )
    out = tmp_path / "o"
    assert main(["evaluate", "--config", str(cfg), "--hr-dir", str(dataset["hr"]),
                 "--sr-dir", str(dataset["noisy"]), "--out-dir", str(out)]) == 0
    assert json.loads((out / "report.json").read_text(encoding="utf-8"))["n_groups"] == 2

    assert main(["evaluate", "--config", str(cfg), "--n-groups", "3", "--hr-dir", str(dataset["hr"]),
                 "--sr-dir", str(dataset["noisy"]), "--out-dir", str(out)]) == 0
    assert json.loads((out / "report.json").read_text(encoding="utf-8"))["n_groups"] == 3


def test_config_file_unknown_key(dataset, tmp_path):
    cfg = tmp_path / "bad.conf"
    cfg.write_text("n_gruops = 2\n", encoding="utf-8")
    assert main(["evaluate", "--config", str(cfg), "--hr-dir", str(dataset["hr"]),
                 "--sr-dir", str(dataset["sr"]), "--out-dir", str(tmp_path)]) == 2


def test_backproject_box_pair_is_zero(tmp_path, write_dirs, box_pair, capsys):
    lr, sr = box_pair
    # an image may itself be called "mean"
    dirs = write_dirs({"lr": {"mean": lr}, "sr": {"mean": sr}})
    out = tmp_path / "o"
    assert main(["backproject", "--sr-dir", str(dirs["sr"]), "--lr-dir", str(dirs["lr"]),
                 "--kernel", "box", "--out-dir", str(out)]) == 0
    assert capsys.readouterr().out.strip() == "0.0"
    rows = _rows(out / "backproject.csv")
    assert rows == [["kind", "image", "rmse"], ["image", "mean", "0"], ["mean", "", "0"]]


def test_backproject_matches_library(dataset, tmp_path, capsys):
    assert main(["backproject", "--sr-dir", str(dataset["noisy"]), "--lr-dir", str(dataset["lr"]),
                 "--out-dir", str(tmp_path)]) == 0
    printed = float(capsys.readouterr().out)
    expected = [
        back_projection_error(load_image(dataset["noisy"] / f"img{i:02d}.png"),
                              load_image(dataset["lr"] / f"img{i:02d}.png"), 4, "bicubic")
        for i in range(4)
    ]
    assert printed == pytest.approx(sum(expected) / 4, rel=1e-12)


def test_backproject_dimension_mismatch(tmp_path, write_dirs, box_pair):
    lr, sr = box_pair
    dirs = write_dirs({"lr": {"a": lr}, "sr": {"a": sr}})
    assert main(["backproject", "--sr-dir", str(dirs["sr"]), "--lr-dir", str(dirs["lr"]),
                 "--scale", "2", "--out-dir", str(tmp_path)]) == 2


def _write_votes(path, pairs):
    path.write_text("winner,loser\n" + "".join(f"{w},{l}\n" for w, l in pairs), encoding="utf-8")


def test_rate_writes_ranked_csv(tmp_path, capsys):
    votes = tmp_path / "votes.csv"
    _write_votes(votes, [("A", "B")] * 10 + [("B", "C")] * 10 + [("A", "C")] * 5)
    outs = []
    for threads in ("1", "4"):
        out = tmp_path / f"t{threads}"
        assert main(["rate", "--votes", str(votes), "--shuffles", "20", "--seed", "3",
                     "--threads", threads, "--out-dir", str(out)]) == 0
        outs.append(out / "ratings.csv")
    rows = _rows(outs[0])
    assert rows[0] == ["rank", "method", "rating", "deviation", "lower_bound"]
    assert [r[1] for r in rows[1:]] == ["A", "B", "C"]
    assert outs[0].read_bytes() == outs[1].read_bytes()
    assert capsys.readouterr().out.splitlines()[0].split("\t")[1] == "A"


def test_rate_empty_votes(tmp_path):
    votes = tmp_path / "votes.csv"
    votes.write_text("winner,loser\n", encoding="utf-8")
    assert main(["rate", "--votes", str(votes), "--out-dir", str(tmp_path)]) == 2


def test_correlate_rows_and_svg(tmp_path, rng, capsys):
    scores = tmp_path / "scores.csv"
    metric = [float(x) for x in rng.uniform(0, 10, size=10)]
    lines = ["method,metric,glicko"] + [f"m{i},{m!r},{1500 - 20 * m!r}" for i, m in enumerate(metric)]
    scores.write_text("\n".join(lines) + "\n", encoding="utf-8")
    out = tmp_path / "o"
    assert main(["correlate", "--scores", str(scores), "--svg", "--out-dir", str(out)]) == 0
    rows = _rows(out / "correlation.csv")
    assert len(rows) == 1 + 1 + 10
    summary = rows[1]
    assert summary[2] == "" and float(summary[5]) == pytest.approx(-1.0)
    svg = (out / "metric_vs_glicko.svg").read_text(encoding="utf-8")
    assert "<!-- manifest:" in svg
    assert capsys.readouterr().out.startswith("metric\tglicko\t")


def test_correlate_rejects_partial_backproj_column(tmp_path, capsys):
    scores = tmp_path / "scores.csv"
    scores.write_text("method,metric,glicko,backproj\na,1,1500,2.5\nb,2,1480,\nc,3,1460,3.0\n", encoding="utf-8")
    assert main(["correlate", "--scores", str(scores), "--out-dir", str(tmp_path)]) == 2
    assert "backproj" in capsys.readouterr().err


def test_loss_identity_and_gradient(tmp_path, capsys):
    gen = tmp_path / "gen.csv"
    gt = tmp_path / "gt.csv"
    gen.write_text("value\n1\n3\n", encoding="utf-8")
    gt.write_text("value\n3\n1\n", encoding="utf-8")
    assert main(["loss", "--gen", str(gen), "--gt", str(gen), "--out-dir", str(tmp_path)]) == 0
    assert capsys.readouterr().out.strip() == "0.0"

    gt.write_text("value\n2\n4\n", encoding="utf-8")
    assert main(["loss", "--gen", str(gen), "--gt", str(gt), "--grad-out", "grad.csv",
                 "--out-dir", str(tmp_path)]) == 0
    assert capsys.readouterr().out.strip() == "2.0"
    assert _rows(tmp_path / "grad.csv") == [["index", "gradient"], ["0", "-2"], ["1", "-2"]]


def test_loss_gradient_with_unequal_lengths(tmp_path, capsys):
    gen = tmp_path / "gen.csv"
    gt = tmp_path / "gt.csv"
    gen.write_text("value\n1\n3\n5\n", encoding="utf-8")
    gt.write_text("value\n2\n4\n", encoding="utf-8")
    assert main(["loss", "--gen", str(gen), "--gt", str(gt), "--grad-out", "grad.csv",
                 "--out-dir", str(tmp_path)]) == 0
    # gt resampled to [2, 3, 4]
    assert float(capsys.readouterr().out) == pytest.approx(2.0)
    assert _rows(tmp_path / "grad.csv") == [["index", "gradient"], ["0", "-2"], ["1", "0"], ["2", "2"]]


def test_loss_grouped(tmp_path, capsys):
    gen = tmp_path / "gen.csv"
    gt = tmp_path / "gt.csv"
    gen.write_text("value,group\n10,0\n20,1\n", encoding="utf-8")
    gt.write_text("value,group\n20,0\n10,1\n", encoding="utf-8")
    assert main(["loss", "--gen", str(gen), "--gt", str(gt), "--out-dir", str(tmp_path)]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(100.0)


def test_sweep_distance_on_identical_images(dataset, tmp_path):
    out = tmp_path / "o"
    assert main(["sweep", "--vary", "distance", "--hr-dir", str(dataset["hr"]),
                 "--sr-dir", str(dataset["sr"]), "--out-dir", str(out), *METRIC_FLAGS]) == 0
    rows = _rows(out / "sweep.csv")
    assert rows[0] == ["parameter", "value", "aggregate", "variance", "groups_used", "dropped_groups", "error"]
    assert [r[1] for r in rows[1:]] == ["wasserstein", "tv", "js"]
    assert all(float(r[2]) == 0.0 for r in rows[1:])


def test_sweep_records_failures_as_rows(dataset, tmp_path):
    out = tmp_path / "o"
    assert main(["sweep", "--vary", "r", "--values", "5,31", "--hr-dir", str(dataset["hr"]),
                 "--sr-dir", str(dataset["noisy"]), "--out-dir", str(out), *METRIC_FLAGS]) == 0
    rows = _rows(out / "sweep.csv")[1:]
    assert len(rows) == 2
    assert float(rows[0][2]) > 0 and rows[0][6] == ""
    # 16x16 LR images cannot hold a 31x31 patch
    assert rows[1][2] == "" and rows[1][6]


def test_sweep_nsamples(dataset, tmp_path):
    out = tmp_path / "o"
    assert main(["sweep", "--vary", "nsamples", "--values", "20,40", "--repetitions", "3",
                 "--hr-dir", str(dataset["hr"]), "--sr-dir", str(dataset["noisy"]),
                 "--out-dir", str(out), *METRIC_FLAGS]) == 0
    rows = _rows(out / "sweep.csv")[1:]
    assert [r[1] for r in rows] == ["20", "40"]
    assert all(float(r[3]) >= 0 for r in rows)


def test_region(tmp_path, capsys):
    from controllers.imageio import save_image
    from models.image_model import GrayImage

    a = np.full((60, 60), 90, dtype=np.uint8)
    b = a.copy()
    b[10:30, 30:50] = 200
    save_image(GrayImage(a), tmp_path / "a.png")
    save_image(GrayImage(b), tmp_path / "b.png")
    assert main(["region", "--images", str(tmp_path / "a.png"), str(tmp_path / "b.png"),
                 "--region", "20", "--out-dir", str(tmp_path)]) == 0
    assert capsys.readouterr().out.split() == ["10", "30"]
    assert json.loads((tmp_path / "region.json").read_text(encoding="utf-8"))["col"] == 30


def test_usage_errors():
    assert main([]) == 2
    assert main(["evaluate", "--patch-size", "4"]) == 2
    assert main(["--version"]) == 0
