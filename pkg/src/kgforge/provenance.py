"""Build provenance: source digests, per-step timing, logs, metadata files.

Re-running a build over unchanged inputs and configuration reproduces the
metadata byte-for-byte except for timestamps and wall times.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Optional, TypeVar

from .errors import ConfigurationError, DataError

STEP_NAMES = ("data-download", "edge-list-creation", "graph-construction", "abstraction", "stats")

T = TypeVar("T")


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class SourceRecord:
    """Digest-backed record of one file the pipeline read."""

    logical_name: str
    path: str
    acquired_at: str
    sha256: str
    size_bytes: int
    count: Optional[int] = None

    def as_dict(self) -> dict:
        return {
            "logical_name": self.logical_name,
            "path": self.path,
            "acquired_at": self.acquired_at,
            "sha256": self.sha256,
            "size_bytes": self.size_bytes,
            "count": self.count,
        }


def record_source(path: str, logical_name: Optional[str] = None,
                  count: Optional[int] = None) -> SourceRecord:
    """Record name, timestamp, SHA-256 digest, and size for a readable file."""
    if not os.path.isfile(path):
        raise DataError(f"cannot record source, not a readable file: {path}")
    return SourceRecord(
        logical_name=logical_name or os.path.basename(path),
        path=path,
        acquired_at=_utc_now(),
        sha256=sha256_file(path),
        size_bytes=os.path.getsize(path),
        count=count,
    )


@dataclass
class StepRecord:
    """Wall time and item counts for one pipeline step."""

    name: str
    seconds: float
    items_in: int = 0
    items_out: int = 0

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "seconds": self.seconds,
            "items_in": self.items_in,
            "items_out": self.items_out,
        }


@dataclass
class BuildMetadata:
    """Provenance for one build: configuration, sources, and step records."""

    build_id: str
    tool_version: str
    config_digest: str
    sources: list[SourceRecord] = field(default_factory=list)
    steps: list[StepRecord] = field(default_factory=list)

    def validate(self) -> None:
        names = [s.name for s in self.steps]
        if len(set(names)) != len(names):
            raise ConfigurationError(f"duplicate step names in build metadata: {names}")
        for step in self.steps:
            if step.name not in STEP_NAMES:
                raise ConfigurationError(f"unknown step name {step.name!r}")
            if step.seconds < 0:
                raise ConfigurationError(f"negative wall time for step {step.name!r}")

    def add_step(self, record: StepRecord) -> None:
        """Insert or replace the record for one step, then revalidate."""
        self.steps = [s for s in self.steps if s.name != record.name]
        self.steps.append(record)
        self.steps.sort(key=lambda s: STEP_NAMES.index(s.name))
        self.validate()

    def as_dict(self) -> dict:
        return {
            "build_id": self.build_id,
            "tool_version": self.tool_version,
            "config_digest": self.config_digest,
            "sources": [s.as_dict() for s in self.sources],
            "steps": [s.as_dict() for s in self.steps],
        }


def log_step(name: str, fn: Callable[[], T], items_in: int = 0,
             count_out: Optional[Callable[[T], int]] = None,
             log: Optional["BuildLog"] = None) -> tuple[T, StepRecord]:
    """Run one pipeline stage, timing it and recording in/out counts."""
    if log is not None:
        log.info(name, "started")
    started = time.perf_counter()
    result = fn()
    record = StepRecord(
        name=name,
        seconds=time.perf_counter() - started,
        items_in=items_in,
        items_out=count_out(result) if count_out is not None else 0,
    )
    if log is not None:
        log.info(name, f"finished in {record.seconds:.3f}s "
                       f"(in={record.items_in}, out={record.items_out})")
    return result, record


def write_build_metadata(meta: BuildMetadata, directory: str) -> None:
    """Write machine-readable and human-readable metadata files.

    Raises:
        DataError: When the build directory is not writable.
    """
    meta.validate()
    try:
        json_path = os.path.join(directory, "build_metadata.json")
        with open(json_path, "w", encoding="utf-8", newline="\n") as handle:
            json.dump(meta.as_dict(), handle, indent=2, sort_keys=True)
            handle.write("\n")
        lines = [
            "[build]",
            f"build_id\t{meta.build_id}",
            f"tool_version\t{meta.tool_version}",
            f"config_digest\t{meta.config_digest}",
            "",
            "[sources]",
        ]
        for source in meta.sources:
            count = "" if source.count is None else str(source.count)
            lines.append(
                f"{source.logical_name}\t{source.path}\t{source.sha256}"
                f"\t{source.size_bytes}\t{count}\t{source.acquired_at}"
            )
        lines += ["", "[steps]"]
        for step in meta.steps:
            lines.append(f"{step.name}\t{step.seconds:.6f}\t{step.items_in}\t{step.items_out}")
        text_path = os.path.join(directory, "build_metadata.txt")
        with open(text_path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise DataError(f"cannot write build metadata in {directory}: {exc}") from exc


def read_build_metadata(directory: str) -> BuildMetadata:
    """Inverse of :func:`write_build_metadata` (reads the JSON variant)."""
    path = os.path.join(directory, "build_metadata.json")
    with open(path, encoding="utf-8") as handle:
        payload = json.load(handle)
    return BuildMetadata(
        build_id=payload["build_id"],
        tool_version=payload["tool_version"],
        config_digest=payload["config_digest"],
        sources=[SourceRecord(**s) for s in payload["sources"]],
        steps=[StepRecord(**s) for s in payload["steps"]],
    )


class BuildLog:
    """Append-only build log: ``ISO8601 LEVEL step message`` per line."""

    def __init__(self, path: str) -> None:
        try:
            self._handle = open(path, "a", encoding="utf-8", newline="\n")
        except OSError as exc:
            raise DataError(f"cannot open build log {path}: {exc}") from exc
        self.path = path

    def write(self, level: str, step: str, message: str) -> None:
        try:
            self._handle.write(f"{_utc_now()} {level} {step} {message}\n")
            self._handle.flush()
        except OSError as exc:
            raise DataError(f"cannot write build log {self.path}: {exc}") from exc

    def info(self, step: str, message: str) -> None:
        self.write("INFO", step, message)

    def warning(self, step: str, message: str) -> None:
        self.write("WARNING", step, message)

    def error(self, step: str, message: str) -> None:
        self.write("ERROR", step, message)

    def close(self) -> None:
        self._handle.close()

    def __enter__(self) -> "BuildLog":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()
