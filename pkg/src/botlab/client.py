"""Small synchronous client for the framed transport.

Used by the test suite and handy for scripting against a running session
server. Pushes that arrive while waiting for a response are kept in
``pushes`` in arrival order.
"""
from __future__ import annotations

import itertools
import json
import socket
import struct


class SyncClient:
    def __init__(self, host: str, port: int, timeout: float = 30.0):
        self.sock = socket.create_connection((host, port), timeout=timeout)
        self.pushes: list[dict] = []
        self._ids = itertools.count(1)

    def close(self) -> None:
        try:
            self.sock.close()
        except OSError:
            pass

    def __enter__(self) -> "SyncClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def send(self, kind: str, payload: dict, env_id: str | None = None) -> str:
        env_id = env_id or f"c{next(self._ids)}"
        body = json.dumps({"id": env_id, "kind": kind, "payload": payload},
                          separators=(",", ":")).encode("utf-8")
        self.sock.sendall(struct.pack(">I", len(body)) + body)
        return env_id

    def recv(self) -> dict:
        header = self._read(4)
        (length,) = struct.unpack(">I", header)
        return json.loads(self._read(length).decode("utf-8"))

    def _read(self, n: int) -> bytes:
        chunks = b""
        while len(chunks) < n:
            chunk = self.sock.recv(n - len(chunks))
            if not chunk:
                raise ConnectionError("server closed the connection")
            chunks += chunk
        return chunks

    def request(self, kind: str, payload: dict) -> dict:
        """Send and wait for the matching result/error envelope."""
        env_id = self.send(kind, payload)
        while True:
            envelope = self.recv()
            if envelope.get("id") == env_id and envelope["kind"] in ("result", "error"):
                return envelope
            self.pushes.append(envelope)

    def query(self, **payload) -> dict:
        envelope = self.request("query", payload)
        if envelope["kind"] == "error":
            raise RuntimeError(f"query failed: {envelope['payload']}")
        return envelope["payload"]

    def drain_pushes(self, kind: str | None = None) -> list[dict]:
        out = [p for p in self.pushes if kind is None or p.get("kind") == kind]
        self.pushes = [p for p in self.pushes if not (kind is None or p.get("kind") == kind)]
        return out
