"""Versioned checkpoint envelope holding one opaque payload per component.

Layout (little endian)::

    b"HC2CKPT\\0"  u16 version  u32 header length  header (UTF-8 JSON)  payloads

The header records the config hash and, per component, its status, payload
length and SHA-256. Payloads follow in header order.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import pickle
import struct

from hc2.io.results import atomic_write

__all__ = ["CheckpointError", "ComponentEntry", "Checkpoint", "MAGIC", "VERSION", "FILENAME"]

MAGIC = b"HC2CKPT\0"
VERSION = 1
FILENAME = "hc2.ckpt"
STATUSES = ("partial", "done", "failed")


class CheckpointError(ValueError):
    """A checkpoint that cannot be read or does not belong to this build."""


@dataclasses.dataclass
class ComponentEntry:
    status: str
    payload: bytes = b""
    message: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown component status {self.status!r}")

    def value(self):
        return pickle.loads(self.payload) if self.payload else None


@dataclasses.dataclass
class Checkpoint:
    """In-memory checkpoint; payload bytes are kept as read, so re-saving is a fixpoint."""

    config_hash: str
    entries: dict = dataclasses.field(default_factory=dict)

    def put(self, component: str, status: str, value=None, message: str = "") -> None:
        payload = b"" if value is None else pickle.dumps(value, protocol=4)
        self.entries[component] = ComponentEntry(status, payload, message)

    def to_bytes(self) -> bytes:
        comps = [
            {
                "id": cid,
                "status": e.status,
                "message": e.message,
                "length": len(e.payload),
                "sha256": hashlib.sha256(e.payload).hexdigest(),
            }
            for cid, e in self.entries.items()
        ]
        header = json.dumps({"config_hash": self.config_hash, "components": comps},
                            sort_keys=True, separators=(",", ":")).encode()
        body = b"".join(e.payload for e in self.entries.values())
        return MAGIC + struct.pack("<HI", VERSION, len(header)) + header + body

    @classmethod
    def from_bytes(cls, data: bytes) -> "Checkpoint":
        fixed = len(MAGIC) + 6
        if len(data) < fixed or data[: len(MAGIC)] != MAGIC:
            raise CheckpointError("not a checkpoint file (bad magic)")
        version, hlen = struct.unpack("<HI", data[len(MAGIC):fixed])
        if version != VERSION:
            raise CheckpointError(f"checkpoint version {version} is not supported (expected {VERSION})")
        if len(data) < fixed + hlen:
            raise CheckpointError("checkpoint truncated inside the header")
        try:
            header = json.loads(data[fixed:fixed + hlen].decode())
            comps = header["components"]
            ckpt = cls(str(header["config_hash"]))
        except (ValueError, KeyError, TypeError) as exc:
            raise CheckpointError(f"unreadable checkpoint header: {exc}") from None
        pos = fixed + hlen
        for c in comps:
            payload = data[pos:pos + c["length"]]
            if len(payload) != c["length"]:
                raise CheckpointError(f"checkpoint truncated in the {c['id']} payload")
            if hashlib.sha256(payload).hexdigest() != c["sha256"]:
                raise CheckpointError(f"checksum mismatch in the {c['id']} payload")
            pos += c["length"]
            ckpt.entries[c["id"]] = ComponentEntry(c["status"], payload, c.get("message", ""))
        if pos != len(data):
            raise CheckpointError("trailing bytes after the last payload")
        return ckpt

    def save(self, path: str | os.PathLike) -> None:
        atomic_write(path, self.to_bytes())

    @classmethod
    def load(cls, path: str | os.PathLike, config_hash: str | None = None) -> "Checkpoint":
        """Read ``path``; with ``config_hash`` given, refuse a checkpoint of another build."""
        with open(path, "rb") as f:
            ckpt = cls.from_bytes(f.read())
        if config_hash is not None and ckpt.config_hash != config_hash:
            raise CheckpointError(
                f"{os.fspath(path)} was written by a different configuration "
                f"(hash {ckpt.config_hash[:12]}, expected {config_hash[:12]}); refusing to resume")
        return ckpt
