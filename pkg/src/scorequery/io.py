"""Corpus loading and the on-disk formats (JSONL datasets, predictions, manifests)."""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable

from . import __version__
from .engine import MatchDecision
from .errors import ScoreQueryError
from .kern import Corpus, parse_kern
from .querygen import LabeledQuery


def kern_files(directory) -> list[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"not a directory: {directory}")
    return sorted(p for p in directory.iterdir() if p.suffix == ".krn" and p.is_file())


def load_corpus(directory) -> Corpus:
    """Parse every ``.krn`` file in ``directory``; staff ids are filename stems."""
    staves = [parse_kern(p.read_text(encoding="utf-8"), p.stem) for p in kern_files(directory)]
    return Corpus(staves, provenance=str(Path(directory)))


def corpus_checksum(directory) -> str:
    h = hashlib.sha256()
    for p in kern_files(directory):
        h.update(p.name.encode())
        h.update(b"\0")
        h.update(p.read_bytes())
        h.update(b"\0")
    return h.hexdigest()


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps_dataset(dataset: Iterable[LabeledQuery]) -> str:
    return "".join(json.dumps(q.to_json(), ensure_ascii=False) + "\n" for q in dataset)


def read_jsonl(path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ScoreQueryError(f"{path}:{number}: invalid JSON ({exc.msg})") from None
    return rows


def read_dataset(path) -> list[LabeledQuery]:
    try:
        return [LabeledQuery.from_json(obj) for obj in read_jsonl(path)]
    except (KeyError, TypeError) as exc:
        raise ScoreQueryError(f"{path}: malformed query record ({exc})") from None


def read_predictions(path) -> list[MatchDecision]:
    out = []
    for obj in read_jsonl(path):
        if not isinstance(obj.get("predicted"), bool) or "query_id" not in obj:
            raise ScoreQueryError(f"{path}: each line needs query_id and boolean predicted")
        out.append(MatchDecision(obj["query_id"], obj["predicted"]))
    return out


def make_manifest(command: str, config: dict, corpus_checksum: str = "") -> dict:
    return {
        "command": command,
        "config": config,
        "corpus_checksum": corpus_checksum,
        "tool_version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }


def write_manifest(path, manifest: dict) -> None:
    atomic_write(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
