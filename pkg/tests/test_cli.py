"""End-to-end command-line behavior: files, banners, determinism, exit codes."""

import json

import pytest

from uavrelay.cli import main
from uavrelay.config import SimConfig, parse_config_text
from uavrelay.trajectory import read_jsonl

TINY = ["--n-ues", "3", "--lambdas", "3,5,4", "--frames", "2",
        "--events-per-frame", "40", "--frame-packets-per-ue", "30",
        "--sectors", "12", "--runs", "1", "--seed", "4242"]


@pytest.fixture(scope="module")
def tiny_artifacts(tmp_path_factory):
    """One simulate + train pass shared by the read-only CLI tests."""
    root = tmp_path_factory.mktemp("cli")
    data = root / "data.jsonl"
    metrics = root / "metrics.csv"
    model = root / "model.json"
    history = root / "history.csv"
    rc = main(["simulate", *TINY,
               "--out-trajectories", str(data), "--out-metrics", str(metrics)])
    assert rc == 0
    rc = main(["train", "--data", str(data), "--model-out", str(model),
               "--history-out", str(history), "--epochs", "2", "--batch-size", "32"])
    assert rc == 0
    return {"root": root, "data": data, "metrics": metrics,
            "model": model, "history": history}


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def test_simulate_record_count_is_runs_frames_events(tmp_path):
    out = tmp_path / "one.jsonl"
    rc = main(["simulate", "--runs", "1", "--frames", "1", "--events-per-frame", "1",
               "--out-trajectories", str(out)])
    assert rc == 0
    assert len(read_jsonl(out)) == 1


def test_simulate_banner_reproduces_the_run(tmp_path, capsys):
    out1 = tmp_path / "a.jsonl"
    rc = main(["simulate", *TINY, "--mu-s", "2.5", "--out-trajectories", str(out1)])
    assert rc == 0
    banner = capsys.readouterr().out
    # config lines are "key = value"; summary lines use "key: value"
    config_lines = [l for l in banner.splitlines() if " = " in l]
    cfg_file = tmp_path / "echo.cfg"
    cfg_file.write_text("\n".join(config_lines) + "\n")
    # the echoed banner alone must rebuild the identical run
    out2 = tmp_path / "b.jsonl"
    rc = main(["simulate", "--config", str(cfg_file), "--out-trajectories", str(out2)])
    assert rc == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_simulate_same_seed_twice_identical_files(tmp_path):
    outs = []
    for name in ("x", "y"):
        t = tmp_path / f"{name}.jsonl"
        m = tmp_path / f"{name}.csv"
        assert main(["simulate", *TINY, "--out-trajectories", str(t),
                     "--out-metrics", str(m)]) == 0
        outs.append((t.read_bytes(), m.read_bytes()))
    assert outs[0] == outs[1]


def test_simulate_workers_do_not_change_output(tmp_path):
    args = ["simulate", *TINY, "--runs", "3"]
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert main([*args, "--out-trajectories", str(a), "--workers", "1"]) == 0
    assert main([*args, "--out-trajectories", str(b), "--workers", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_rejects_bad_flag_value():
    assert main(["simulate", "--mu-s", "-1"]) == 2
    assert main(["simulate", "--mu-s", "soon"]) == 2
    assert main(["simulate", "--lambdas", "3,5"]) == 2  # wrong length for 5 UEs


def test_simulate_model_policy_runs(tiny_artifacts, tmp_path):
    out = tmp_path / "clone.jsonl"
    rc = main(["simulate", *TINY, "--policy", "model",
               "--model", str(tiny_artifacts["model"]),
               "--out-trajectories", str(out)])
    assert rc == 0
    recs = read_jsonl(out)
    assert len(recs) == 80
    assert all(r.source == "clone" for r in recs)


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------


def test_train_history_rows_match_epochs(tiny_artifacts):
    lines = tiny_artifacts["history"].read_text().splitlines()
    assert lines[0] == "epoch,train_loss,train_acc,val_loss,val_acc"
    assert len(lines) == 1 + 2  # header + one row per epoch


def test_train_is_deterministic(tiny_artifacts, tmp_path):
    again = tmp_path / "model2.json"
    rc = main(["train", "--data", str(tiny_artifacts["data"]),
               "--model-out", str(again), "--epochs", "2", "--batch-size", "32"])
    assert rc == 0
    assert again.read_bytes() == tiny_artifacts["model"].read_bytes()


def test_train_missing_data_is_data_error(tmp_path):
    rc = main(["train", "--data", str(tmp_path / "nope.jsonl"),
               "--model-out", str(tmp_path / "m.json")])
    assert rc == 3


# ---------------------------------------------------------------------------
# evaluate
# ---------------------------------------------------------------------------


def test_evaluate_prints_and_writes_reports(tiny_artifacts, tmp_path, capsys):
    rep = tmp_path / "eval.csv"
    conf = tmp_path / "confusion.csv"
    rc = main(["evaluate", "--model", str(tiny_artifacts["model"]),
               "--data", str(tiny_artifacts["data"]),
               "--report-out", str(rep), "--confusion-out", str(conf)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "teacher-forcing accuracy:" in out
    header, row = rep.read_text().splitlines()
    assert header == "accuracy,mean_loss,n"
    assert row.endswith(",80")
    grid = conf.read_text().splitlines()
    assert len(grid) == 1 + 3
    total = sum(int(v) for line in grid[1:] for v in line.split(",")[1:])
    assert total == 80


def test_evaluate_missing_model_is_data_error(tiny_artifacts, tmp_path):
    rc = main(["evaluate", "--model", str(tmp_path / "ghost.json"),
               "--data", str(tiny_artifacts["data"])])
    assert rc == 3


def test_evaluate_threshold_failure_exits_4(tiny_artifacts, tmp_path):
    # two contradictory labels for one state cap accuracy at 0.5
    base = json.loads(read_jsonl(tiny_artifacts["data"])[0].to_json())
    conflict = tmp_path / "conflict.jsonl"
    rows = []
    for a1 in (0, 1):
        obj = dict(base)
        obj["a1"] = a1
        rows.append(json.dumps(obj))
    conflict.write_text("\n".join(rows) + "\n")
    rc = main(["evaluate", "--model", str(tiny_artifacts["model"]),
               "--data", str(conflict), "--min-accuracy", "1.0"])
    assert rc == 4


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------


def test_compare_emits_matched_seed_rows(tiny_artifacts, tmp_path, capsys):
    out = tmp_path / "compare.csv"
    rc = main(["compare", *TINY, "--model", str(tiny_artifacts["model"]),
               "--n-seeds", "2", "--out", str(out)])
    assert rc == 0
    text = capsys.readouterr().out
    assert "expert" in text and "model" in text
    lines = out.read_text().splitlines()
    # header + 2 seeds x 2 policies x 2 frames
    assert len(lines) == 1 + 8
    assert sum(1 for l in lines if l.startswith("expert,")) == 4
    assert sum(1 for l in lines if l.startswith("model,")) == 4


def test_compare_expert_rows_equal_simulate_metrics(tiny_artifacts, tmp_path):
    # stream isolation: the expert's rows do not depend on the clone's runs
    out = tmp_path / "compare.csv"
    sim = tmp_path / "solo.csv"
    assert main(["compare", *TINY, "--model", str(tiny_artifacts["model"]),
                 "--n-seeds", "1", "--out", str(out)]) == 0
    assert main(["simulate", *TINY, "--policy", "expert",
                 "--out-metrics", str(sim)]) == 0
    compare_rows = [l.split(",")[2:] for l in out.read_text().splitlines()[1:]
                    if l.startswith("expert,")]
    solo_rows = [l.split(",")[2:] for l in sim.read_text().splitlines()[1:]]
    assert compare_rows == solo_rows


# ---------------------------------------------------------------------------
# shift
# ---------------------------------------------------------------------------


def test_shift_no_change_control_drop_is_zero(tiny_artifacts, tmp_path, capsys):
    rc = main(["shift", *TINY, "--model", str(tiny_artifacts["model"]),
               "--new-lambdas", "3,5,4", "--eval-runs", "1", "--n-seeds", "1"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "accuracy drop: +0.0000" in out


def test_shift_reports_shifted_accuracy(tiny_artifacts, tmp_path, capsys):
    out = tmp_path / "shifted.csv"
    rc = main(["shift", *TINY, "--model", str(tiny_artifacts["model"]),
               "--new-lambdas", "4,6,5", "--eval-runs", "1", "--n-seeds", "1",
               "--out", str(out)])
    assert rc == 0
    text = capsys.readouterr().out
    assert "matched-rate accuracy:" in text
    assert "shifted-rate accuracy:" in text
    assert out.exists()


def test_shift_wrong_length_lambdas_is_config_error(tiny_artifacts):
    rc = main(["shift", *TINY, "--model", str(tiny_artifacts["model"]),
               "--new-lambdas", "4,6"])
    assert rc == 2


def test_shift_min_drop_threshold_exits_4(tiny_artifacts):
    rc = main(["shift", *TINY, "--model", str(tiny_artifacts["model"]),
               "--new-lambdas", "3,5,4", "--eval-runs", "1", "--n-seeds", "1",
               "--min-drop", "0.05"])
    assert rc == 4


# ---------------------------------------------------------------------------
# config file handling
# ---------------------------------------------------------------------------


def test_cli_flags_override_config_file(tmp_path, capsys):
    cfg_file = tmp_path / "base.cfg"
    cfg_file.write_text("n_ues = 3\nlambdas = 3, 5, 4\nframes = 2\nseed = 1\n"
                        "events_per_frame = 10\nframe_packets_per_ue = 5\nsectors = 12\n")
    rc = main(["simulate", "--config", str(cfg_file), "--seed", "9",
               "--runs", "1"])
    assert rc == 0
    banner = capsys.readouterr().out
    parsed = parse_config_text(
        "\n".join(l for l in banner.splitlines() if "=" in l), "<banner>")
    assert parsed["seed"] == "9"
    assert parsed["n_ues"] == "3"


def test_missing_config_file_is_config_error(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "none.cfg")]) == 2
