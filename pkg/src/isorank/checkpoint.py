"""Chunked, resumable scan execution.

A scan is split into a fixed list of chunks that depends only on its
configuration, never on the worker count. Finished chunk results are kept in
a snapshot file so an interrupted scan can continue where it stopped; since
results are merged in chunk order, the final output is identical however the
work was scheduled.

Snapshot format (JSON, UTF-8)::

    {
      "format": "isorank-snapshot",
      "version": 1,
      "kind": "mazur",               # scan kind
      "config_hash": "<sha256>",     # hash of the canonical scan config
      "config": {...},               # the config itself, for humans
      "n_chunks": 12,
      "completed": {"0": <payload>, "3": <payload>, ...}
    }

Readers accept any version <= SNAPSHOT_VERSION and ignore unknown keys.
"""

from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
import hashlib
import json
import logging
import os
import tempfile

from .errors import ScanInterrupted, SnapshotMismatch

SNAPSHOT_VERSION = 1

log = logging.getLogger(__name__)


def config_hash(config):
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def write_atomic(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".snap")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Snapshot:
    def __init__(self, path, kind, config, n_chunks):
        self.path = path
        self.kind = kind
        self.config = config
        self.hash = config_hash(config)
        self.n_chunks = n_chunks
        self.completed = {}

    def load(self):
        """Read an existing snapshot; returns the number of restored chunks."""
        if not self.path or not os.path.exists(self.path):
            return 0
        with open(self.path, encoding="utf-8") as fh:
            data = json.load(fh)
        if data.get("format") != "isorank-snapshot" or data.get("version", 0) > SNAPSHOT_VERSION:
            raise SnapshotMismatch(f"{self.path}: unsupported snapshot")
        if data.get("kind") != self.kind or data.get("config_hash") != self.hash:
            raise SnapshotMismatch(f"{self.path} was written for a different scan configuration")
        if data.get("n_chunks") != self.n_chunks:
            raise SnapshotMismatch(f"{self.path}: chunk count changed")
        self.completed = {int(k): v for k, v in data["completed"].items()}
        return len(self.completed)

    def save(self):
        if not self.path:
            return
        data = {
            "format": "isorank-snapshot",
            "version": SNAPSHOT_VERSION,
            "kind": self.kind,
            "config_hash": self.hash,
            "config": self.config,
            "n_chunks": self.n_chunks,
            "completed": {str(k): self.completed[k] for k in sorted(self.completed)},
        }
        write_atomic(self.path, json.dumps(data, sort_keys=True) + "\n")


def run_chunks(func, chunks, *, kind, config, snapshot_path=None, workers=1,
               stop_after=None, save_every=1):
    """Apply ``func`` to every chunk and return the payloads in chunk order.

    ``func`` must be a picklable top-level function whose return value is
    JSON-serializable. With ``snapshot_path`` set, progress is restored from and
    written to that file. ``stop_after`` limits the number of chunks computed in
    this call; when it cuts the scan short ScanInterrupted is raised after the
    snapshot is saved.
    """
    snap = Snapshot(snapshot_path, kind, config, len(chunks))
    restored = snap.load()
    if restored:
        log.info("resumed %d/%d chunks from %s", restored, len(chunks), snapshot_path)
    todo = [i for i in range(len(chunks)) if i not in snap.completed]
    if stop_after is not None:
        todo = todo[:stop_after]
    since_save = 0

    def record(i, payload):
        nonlocal since_save
        # restored payloads come back from JSON; make fresh ones look the same
        snap.completed[i] = json.loads(json.dumps(payload))
        since_save += 1
        if since_save >= save_every:
            snap.save()
            since_save = 0

    try:
        if workers <= 1:
            for i in todo:
                record(i, func(chunks[i]))
        else:
            with ProcessPoolExecutor(workers) as pool:
                pending = {pool.submit(func, chunks[i]): i for i in todo}
                while pending:
                    done, _ = wait(pending, return_when=FIRST_COMPLETED)
                    for fut in done:
                        record(pending.pop(fut), fut.result())
    except KeyboardInterrupt:
        snap.save()
        raise
    snap.save()
    if len(snap.completed) < len(chunks):
        raise ScanInterrupted(len(snap.completed), len(chunks))
    return [snap.completed[i] for i in range(len(chunks))]


def split(items, size):
    return [items[i : i + size] for i in range(0, len(items), size)]
