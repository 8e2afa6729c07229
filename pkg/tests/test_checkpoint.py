import json

import pytest

from isorank.checkpoint import SNAPSHOT_VERSION, Snapshot, config_hash, run_chunks, split
from isorank.errors import ScanInterrupted, SnapshotMismatch


def square_sum(chunk):
    return {"s": sum(x * x for x in chunk)}


def test_split():
    assert split(list(range(7)), 3) == [[0, 1, 2], [3, 4, 5], [6]]


def test_config_hash_canonical():
    assert config_hash({"a": 1, "b": [2]}) == config_hash({"b": [2], "a": 1})


def test_resume_equals_uninterrupted(tmp_path):
    chunks = split(list(range(100)), 7)
    ref = run_chunks(square_sum, chunks, kind="t", config={"n": 100})
    snap = tmp_path / "s.snap"
    for _ in range(3):
        try:
            run_chunks(square_sum, chunks, kind="t", config={"n": 100}, snapshot_path=snap, stop_after=4)
        except ScanInterrupted as exc:
            assert exc.done < exc.total
    out = run_chunks(square_sum, chunks, kind="t", config={"n": 100}, snapshot_path=snap, workers=2)
    assert out == ref
    data = json.loads(snap.read_text())
    assert data["format"] == "isorank-snapshot" and data["version"] == SNAPSHOT_VERSION
    assert data["n_chunks"] == len(chunks) == len(data["completed"])


def test_mismatched_snapshot(tmp_path):
    chunks = split(list(range(10)), 3)
    snap = tmp_path / "s.snap"
    run_chunks(square_sum, chunks, kind="t", config={"n": 10}, snapshot_path=snap)
    with pytest.raises(SnapshotMismatch):
        run_chunks(square_sum, chunks, kind="t", config={"n": 11}, snapshot_path=snap)
    with pytest.raises(SnapshotMismatch):
        run_chunks(square_sum, chunks, kind="u", config={"n": 10}, snapshot_path=snap)


def test_future_version_rejected(tmp_path):
    snap = tmp_path / "s.snap"
    s = Snapshot(str(snap), "t", {}, 1)
    s.save()
    data = json.loads(snap.read_text())
    data["version"] = SNAPSHOT_VERSION + 1
    snap.write_text(json.dumps(data))
    with pytest.raises(SnapshotMismatch):
        Snapshot(str(snap), "t", {}, 1).load()


def test_unknown_keys_ignored(tmp_path):
    snap = tmp_path / "s.snap"
    s = Snapshot(str(snap), "t", {}, 2)
    s.completed = {0: {"s": 1}}
    s.save()
    data = json.loads(snap.read_text())
    data["note"] = "added by a newer writer"
    snap.write_text(json.dumps(data))
    assert Snapshot(str(snap), "t", {}, 2).load() == 1
