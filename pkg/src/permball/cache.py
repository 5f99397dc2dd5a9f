"""Persistent on-disk cache of exact ball sizes, one plain-text file per key.

Records are JSON with the count as a decimal string (counts outgrow every
fixed width).  Writes go through a temporary file and an atomic rename, so
concurrent writers of the same key cannot interleave.  Cached values are
never trusted blindly: the verify command recomputes every record it can
reach and flags mismatches.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator

from .core import BallSpec
from .errors import ValidationError

ENV_CACHE_DIR = "PERMBALL_CACHE"


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_CACHE_DIR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "permball"


@dataclass(frozen=True)
class CacheRecord:
    n: int
    r: int
    exact_count: str
    backend: str
    tool_version: str
    timestamp: str

    def spec(self) -> BallSpec:
        return BallSpec(self.n, self.r)


class ResultCache:
    """Directory of one record per (n, r)."""

    def __init__(self, directory: Path | str):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def path_for(self, spec: BallSpec) -> Path:
        return self.directory / f"n{spec.n}_r{spec.r}.json"

    def get(self, spec: BallSpec) -> CacheRecord | None:
        path = self.path_for(spec)
        if not path.exists():
            return None
        return self._load(path)

    def _load(self, path: Path) -> CacheRecord:
        try:
            data = json.loads(path.read_text())
            record = CacheRecord(**data)
        except (json.JSONDecodeError, TypeError, KeyError, ValueError) as exc:
            raise ValidationError(f"unreadable cache record {path}: {exc}") from exc
        if not record.exact_count.isdigit():
            raise ValidationError(
                f"cache record {path} has a non-decimal count field"
            )
        return record

    def put(self, spec: BallSpec, count: int, backend: str) -> CacheRecord:
        from . import __version__

        record = CacheRecord(
            n=spec.n,
            r=spec.r,
            exact_count=str(count),
            backend=backend,
            tool_version=__version__,
            timestamp=datetime.now(timezone.utc).isoformat(),
        )
        path = self.path_for(spec)
        fd, tmp_name = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as handle:
                json.dump(asdict(record), handle, indent=1)
                handle.write("\n")
            os.replace(tmp_name, path)
        finally:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
        return record

    def records(self) -> Iterator[CacheRecord]:
        for path in sorted(self.directory.glob("n*_r*.json")):
            yield self._load(path)

    def audit(self) -> list[str]:
        """Recompute every reachable record; return mismatch descriptions."""
        from .oracle import applicable_backends, ball_size_exact

        problems = []
        for path in sorted(self.directory.glob("n*_r*.json")):
            try:
                record = self._load(path)
            except ValidationError as exc:
                problems.append(str(exc))
                continue
            spec = record.spec()
            if not applicable_backends(spec):
                continue
            recomputed = ball_size_exact(spec)
            if str(recomputed) != record.exact_count:
                problems.append(
                    f"cache mismatch at n={spec.n}, r={spec.r}: stored "
                    f"{record.exact_count}, recomputed {recomputed}"
                )
        return problems
