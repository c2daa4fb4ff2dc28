"""Training loop, data validation and the training CLI."""

import json
import math

import pytest
from fastapi.testclient import TestClient

from bioee_service.app import create_app
from bioee_service.checkpoint import load_checkpoint
from bioee_service.train import TrainingConfig, TrainingDataError, main, read_instances, train


def _role_rows(n=10):
    rows = []
    for i in range(n):
        if i % 2 == 0:
            tokens = ["gene", "#", "binds", "@", "gene", "$"]
            label = "Theme"
        else:
            tokens = ["gene", "#", "expression", "@", "gene", "."]
            label = "None"
        rows.append({
            "kind": "role",
            "id": f"r{i}",
            "doc_id": "d0",
            "sentence_index": 0,
            "trigger_id": "T9",
            "filler_id": f"T{i}",
            "trigger_span": [0, 4],
            "filler_span": [6, 10],
            "tokens": tokens,
            "label": label,
        })
    return rows


def _tag_rows(n=6):
    rows = []
    for i in range(n):
        tokens = ["gene", "expression", "of", "gene", "."]
        labels = ["O", "B-Gene_expression", "O", "O", "O"]
        rows.append({
            "kind": "tag",
            "id": f"t{i}",
            "doc_id": "d0",
            "sentence_index": i,
            "tokens": tokens,
            "spans": [[0, 4], [5, 15], [16, 18], [19, 23], [23, 24]],
            "labels": labels,
        })
    return rows


def _write_jsonl(path, rows):
    path.write_text("".join(json.dumps(r) + "\n" for r in rows))
    return path


@pytest.fixture(scope="module")
def smoke_result(base_encoder, tmp_path_factory):
    work = tmp_path_factory.mktemp("smoke")
    train_file = _write_jsonl(work / "train.jsonl", _role_rows(10))
    cfg = TrainingConfig(
        task="role",
        train_file=train_file,
        out_dir=work / "ckpt",
        base_model=str(base_encoder),
        learning_rate=5e-3,
        batch_size=2,
        epochs=1,
        max_seq_len=48,
        seed=3,
    )
    return train(cfg)


def test_smoke_run_produces_checkpoint(smoke_result):
    out = smoke_result.out_dir
    assert (out / "task.json").is_file()
    assert (out / "model.safetensors").is_file()
    assert load_checkpoint(out).task == "role"


def test_smoke_run_loss_decreases(smoke_result):
    losses = smoke_result.step_losses
    assert len(losses) == 5
    assert all(math.isfinite(l) for l in losses)
    assert losses[-1] < losses[0]


def test_trained_checkpoint_serves(smoke_result):
    app = create_app({"role": smoke_result.out_dir})
    resp = TestClient(app).post("/v1/role", json={
        "instances": [{"id": "q", "tokens": ["gene", "#", "binds", "@", "gene", "$"]}]
    })
    assert resp.status_code == 200
    probs = resp.json()["results"][0]["probs"]
    assert len(probs) == 3
    assert abs(sum(probs) - 1.0) <= 1e-6


def test_dev_file_selects_best_epoch(base_encoder, tmp_path):
    train_file = _write_jsonl(tmp_path / "train.jsonl", _role_rows(8))
    dev_file = _write_jsonl(tmp_path / "dev.jsonl", _role_rows(4))
    cfg = TrainingConfig(
        task="role",
        train_file=train_file,
        out_dir=tmp_path / "ckpt",
        base_model=str(base_encoder),
        dev_file=dev_file,
        learning_rate=5e-3,
        batch_size=4,
        epochs=3,
        max_seq_len=48,
        seed=5,
    )
    result = train(cfg)
    assert len(result.dev_losses) == 3
    assert result.best_epoch == result.dev_losses.index(min(result.dev_losses)) + 1
    assert load_checkpoint(cfg.out_dir).task == "role"


def test_empty_training_file_leaves_no_checkpoint(base_encoder, tmp_path):
    train_file = tmp_path / "empty.jsonl"
    train_file.write_text("")
    cfg = TrainingConfig(
        task="role",
        train_file=train_file,
        out_dir=tmp_path / "ckpt",
        base_model=str(base_encoder),
        epochs=1,
    )
    with pytest.raises(TrainingDataError, match="no training instances"):
        train(cfg)
    assert not (tmp_path / "ckpt").exists()


def test_invalid_json_reports_line_number(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text(json.dumps(_role_rows(1)[0]) + "\n{oops\n")
    with pytest.raises(TrainingDataError, match=r":2: invalid JSON"):
        read_instances(path, "role")


def test_label_length_mismatch_reports_line_number(tmp_path):
    row = _tag_rows(1)[0]
    row["labels"] = row["labels"][:-1]
    path = _write_jsonl(tmp_path / "bad.jsonl", [row])
    with pytest.raises(TrainingDataError, match=r":1: labels"):
        read_instances(path, "tag")


def test_unknown_label_rejected(tmp_path):
    row = _role_rows(1)[0]
    row["label"] = "Agent"
    path = _write_jsonl(tmp_path / "bad.jsonl", [row])
    with pytest.raises(TrainingDataError, match=r":1: unknown label 'Agent'"):
        read_instances(path, "role")


def test_kind_mismatch_rejected(tmp_path):
    path = _write_jsonl(tmp_path / "roles.jsonl", _role_rows(2))
    with pytest.raises(TrainingDataError, match="does not match task"):
        read_instances(path, "candidate")


def test_cli_trains_tag_checkpoint(base_encoder, tmp_path, capsys):
    train_file = _write_jsonl(tmp_path / "tags.jsonl", _tag_rows(6))
    out = tmp_path / "ckpt"
    code = main([
        "--task", "tag",
        "--train", str(train_file),
        "--out", str(out),
        "--base", str(base_encoder),
        "--epochs", "1",
        "--batch-size", "3",
        "--lr", "1e-3",
        "--max-seq-len", "48",
    ])
    assert code == 0
    assert "saved checkpoint" in capsys.readouterr().out
    loaded = load_checkpoint(out)
    assert loaded.task == "tag"
    resp = TestClient(create_app({"tag": out})).post("/v1/tag", json={
        "instances": [{"id": "x", "tokens": ["gene", "expression", "of", "gene", "."]}]
    })
    assert len(resp.json()["results"][0]["labels"]) == 5


def test_cli_empty_file_is_data_error(base_encoder, tmp_path, capsys):
    train_file = tmp_path / "empty.jsonl"
    train_file.write_text("")
    code = main([
        "--task", "role",
        "--train", str(train_file),
        "--out", str(tmp_path / "ckpt"),
        "--base", str(base_encoder),
    ])
    assert code == 2
    assert "no training instances" in capsys.readouterr().err
    assert not (tmp_path / "ckpt").exists()


def test_cli_missing_base_is_usage_error(tmp_path):
    assert main(["--task", "role", "--train", "x.jsonl", "--out", str(tmp_path)]) == 1


def test_cli_missing_train_file_is_data_error(base_encoder, tmp_path, capsys):
    code = main([
        "--task", "role",
        "--train", str(tmp_path / "absent.jsonl"),
        "--out", str(tmp_path / "ckpt"),
        "--base", str(base_encoder),
    ])
    assert code == 2
    assert "absent.jsonl" in capsys.readouterr().err


def test_max_seq_len_beyond_encoder_positions(base_encoder, tmp_path):
    train_file = _write_jsonl(tmp_path / "train.jsonl", _role_rows(2))
    cfg = TrainingConfig(
        task="role",
        train_file=train_file,
        out_dir=tmp_path / "ckpt",
        base_model=str(base_encoder),
        epochs=1,
        max_seq_len=512,
    )
    with pytest.raises(ValueError, match="exceeds the encoder"):
        train(cfg)
