"""On-disk cache of model reports.

Entries are JSON files named by a hash of (level, normalized triple, code
version). Each file carries a checksum of its payload, and a loaded report must
also satisfy the degree identities before it is trusted.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

from . import __version__
from .planemodel import FormTriple, ModelError, ModelReport

ENV_VAR = "ETAQ_CACHE_DIR"


class CacheCorruption(Exception):
    """A cache entry exists but cannot be trusted."""


def default_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "etaplane"


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class ReportCache:
    def __init__(self, directory: str | Path | None = None, version: str = __version__):
        self.directory = Path(directory) if directory is not None else default_dir()
        self.version = version

    def key(self, triple: FormTriple) -> str:
        text = f"{triple.key()}|v{self.version}"
        return hashlib.sha256(text.encode()).hexdigest()

    def path(self, triple: FormTriple) -> Path:
        return self.directory / f"model-{triple.level}-{self.key(triple)[:24]}.json"

    def store(self, report: ModelReport) -> Path:
        payload = report.to_json()
        entry = {
            "key": self.key(report.triple),
            "triple": report.triple.key(),
            "version": self.version,
            "checksum": hashlib.sha256(_canonical(payload).encode()).hexdigest(),
            "report": payload,
        }
        self.directory.mkdir(parents=True, exist_ok=True)
        target = self.path(report.triple)
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(entry, fh, indent=1)
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return target

    def load(self, triple: FormTriple) -> ModelReport | None:
        """The cached report, None when absent; CacheCorruption when untrustworthy."""
        path = self.path(triple)
        if not path.exists():
            return None
        try:
            entry = json.loads(path.read_text(encoding="utf-8"))
            payload = entry["report"]
            digest = hashlib.sha256(_canonical(payload).encode()).hexdigest()
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise CacheCorruption(f"{path}: unreadable entry ({exc})") from exc
        if entry.get("checksum") != digest:
            raise CacheCorruption(f"{path}: checksum mismatch")
        if entry.get("key") != self.key(triple) or entry.get("triple") != triple.key():
            raise CacheCorruption(f"{path}: entry belongs to a different triple")
        try:
            report = ModelReport.from_json(payload)
            if report.triple.key() != triple.key():
                raise ModelError("triple mismatch")
            report.check()
        except (ModelError, ValueError, KeyError, TypeError) as exc:
            raise CacheCorruption(f"{path}: {exc}") from exc
        report.triple = triple
        return report
