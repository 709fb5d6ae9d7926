"""Bounded-memory line reader over plain, bzip2 or gzip dump files."""

from __future__ import annotations

import bz2
import gzip
import os
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

DEFAULT_READ_WINDOW = 64 << 20
DEFAULT_MAX_LINE = 256 << 20
# read granularity; the window caps it from above
_CHUNK = 4 << 20

_CODEC_ALIASES = {
    "auto": "auto",
    "none": "none",
    "plain": "none",
    "bz2": "bzip2",
    "bzip2": "bzip2",
    "gz": "gzip",
    "gzip": "gzip",
}


class DumpError(Exception):
    pass


class DumpNotFoundError(DumpError, FileNotFoundError):
    pass


class CodecError(DumpError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at compressed byte offset {offset})")
        self.offset = offset


class LineTooLongError(DumpError):
    pass


@dataclass(frozen=True)
class DumpSource:
    path: Path
    codec: str = "auto"
    read_window: int = DEFAULT_READ_WINDOW
    max_line: int = DEFAULT_MAX_LINE

    def __post_init__(self):
        object.__setattr__(self, "path", Path(self.path))
        codec = _CODEC_ALIASES.get(str(self.codec).lower())
        if codec is None:
            raise ValueError(f"unknown codec {self.codec!r}")
        object.__setattr__(self, "codec", codec)
        if self.read_window <= 0 or self.max_line <= 0:
            raise ValueError("read_window and max_line must be positive")

    def resolved_codec(self) -> str:
        if self.codec != "auto":
            return self.codec
        return detect_codec(self.path)


def detect_codec(path: str | os.PathLike) -> str:
    try:
        with open(path, "rb") as fh:
            magic = fh.read(3)
    except FileNotFoundError as exc:
        raise DumpNotFoundError(str(path)) from exc
    if magic.startswith(b"BZh"):
        return "bzip2"
    if magic.startswith(b"\x1f\x8b"):
        return "gzip"
    return "none"


def open_dump(source: DumpSource | str | os.PathLike) -> Iterator[bytes]:
    """Yield every physical line of the dump, without its ``\\n`` terminator.

    At most ``read_window`` decompressed bytes are requested per read, and a
    partial line longer than ``max_line`` raises :class:`LineTooLongError`.
    """
    if not isinstance(source, DumpSource):
        source = DumpSource(source)
    codec = source.resolved_codec()
    try:
        raw = open(source.path, "rb")
    except FileNotFoundError as exc:
        raise DumpNotFoundError(str(source.path)) from exc
    return _iter_lines(raw, codec, min(source.read_window, _CHUNK), source.max_line)


def _iter_lines(raw, codec: str, chunk_size: int, max_line: int) -> Iterator[bytes]:
    with raw:
        if codec == "bzip2":
            stream = bz2.BZ2File(raw)
        elif codec == "gzip":
            stream = gzip.GzipFile(fileobj=raw)
        else:
            stream = raw
        with stream:
            tail = b""
            while True:
                try:
                    chunk = stream.read(chunk_size)
                except (OSError, EOFError, zlib.error) as exc:
                    if codec == "none":
                        raise
                    raise CodecError(f"corrupt {codec} stream: {exc}", raw.tell()) from exc
                if not chunk:
                    break
                lines = chunk.split(b"\n")
                lines[0] = tail + lines[0]
                tail = lines.pop()
                if len(tail) > max_line:
                    raise LineTooLongError(f"line exceeds {max_line} bytes")
                for line in lines:
                    if len(line) > max_line:
                        raise LineTooLongError(f"line exceeds {max_line} bytes")
                    yield line
            if tail:
                yield tail
