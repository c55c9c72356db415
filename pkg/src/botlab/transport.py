"""Wire transports for the session server.

Both transports carry identical UTF-8 JSON envelopes:

* framed:    4-byte big-endian length prefix + body (the native protocol)
* websocket: RFC 6455 text frames (the browser-friendly equivalent)

One listening port serves both: the first bytes of a connection are peeked
and ``GET `` selects the websocket handshake, anything else is treated as a
length prefix. Only the server side of the websocket protocol is
implemented here (handshake, masked client frames, ping/pong, close); the
frame layer is deliberately minimal and extension-free.
"""
from __future__ import annotations

import asyncio
import base64
import hashlib
import json
import struct

MAX_MESSAGE = 64 * 1024 * 1024
_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"


def encode_envelope(doc: dict) -> bytes:
    body = json.dumps(doc, separators=(",", ":"), ensure_ascii=False).encode("utf-8")
    return struct.pack(">I", len(body)) + body


class Transport:
    """Common interface over the two wire formats."""

    def __init__(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        self.reader = reader
        self.writer = writer

    async def send(self, doc: dict) -> None:
        raise NotImplementedError

    async def recv(self) -> dict | None:
        """Next envelope, or None once the peer is gone."""
        raise NotImplementedError

    async def close(self) -> None:
        try:
            self.writer.close()
            await self.writer.wait_closed()
        except (ConnectionError, OSError):
            pass


class FramedTransport(Transport):
    async def send(self, doc: dict) -> None:
        self.writer.write(encode_envelope(doc))
        await self.writer.drain()

    async def recv(self) -> dict | None:
        try:
            header = await self.reader.readexactly(4)
        except (asyncio.IncompleteReadError, ConnectionError):
            return None
        (length,) = struct.unpack(">I", header)
        if length > MAX_MESSAGE:
            return None
        try:
            body = await self.reader.readexactly(length)
        except (asyncio.IncompleteReadError, ConnectionError):
            return None
        try:
            return json.loads(body.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            return {"id": "", "kind": "error", "payload": {"code": "bad_json"}}


def websocket_accept(key: str) -> str:
    return base64.b64encode(hashlib.sha1((key + _WS_GUID).encode()).digest()).decode()


async def websocket_handshake(reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> bool:
    """Consume an HTTP upgrade request and answer 101, or reject with 400."""
    try:
        raw = await asyncio.wait_for(reader.readuntil(b"\r\n\r\n"), timeout=10)
    except (asyncio.IncompleteReadError, asyncio.LimitOverrunError, asyncio.TimeoutError):
        return False
    lines = raw.decode("latin-1").split("\r\n")
    headers = {}
    for line in lines[1:]:
        if ":" in line:
            name, _, value = line.partition(":")
            headers[name.strip().lower()] = value.strip()
    key = headers.get("sec-websocket-key")
    if "websocket" not in headers.get("upgrade", "").lower() or not key:
        writer.write(b"HTTP/1.1 400 Bad Request\r\nConnection: close\r\n\r\n")
        await writer.drain()
        return False
    response = (
        "HTTP/1.1 101 Switching Protocols\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Accept: {websocket_accept(key)}\r\n"
        "\r\n"
    )
    writer.write(response.encode("latin-1"))
    await writer.drain()
    return True


def ws_frame(payload: bytes, opcode: int, mask: bool = False) -> bytes:
    head = bytearray([0x80 | opcode])
    n = len(payload)
    mask_bit = 0x80 if mask else 0
    if n < 126:
        head.append(mask_bit | n)
    elif n < (1 << 16):
        head.append(mask_bit | 126)
        head += struct.pack(">H", n)
    else:
        head.append(mask_bit | 127)
        head += struct.pack(">Q", n)
    if mask:
        key = b"\x00\x00\x00\x00"  # a zero mask is valid and keeps tests readable
        head += key
        payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
    return bytes(head) + payload


class WebSocketTransport(Transport):
    """Server side of an already-upgraded websocket connection."""

    async def send(self, doc: dict) -> None:
        body = json.dumps(doc, separators=(",", ":"), ensure_ascii=False).encode("utf-8")
        self.writer.write(ws_frame(body, opcode=0x1))
        await self.writer.drain()

    async def _read_frame(self):
        head = await self.reader.readexactly(2)
        fin = bool(head[0] & 0x80)
        opcode = head[0] & 0x0F
        masked = bool(head[1] & 0x80)
        length = head[1] & 0x7F
        if length == 126:
            (length,) = struct.unpack(">H", await self.reader.readexactly(2))
        elif length == 127:
            (length,) = struct.unpack(">Q", await self.reader.readexactly(8))
        if length > MAX_MESSAGE:
            raise ConnectionError("frame too large")
        mask = await self.reader.readexactly(4) if masked else None
        payload = await self.reader.readexactly(length) if length else b""
        if mask:
            payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        return fin, opcode, payload

    async def recv(self) -> dict | None:
        buffer = b""
        while True:
            try:
                fin, opcode, payload = await self._read_frame()
            except (asyncio.IncompleteReadError, ConnectionError, OSError):
                return None
            if opcode == 0x8:  # close
                try:
                    self.writer.write(ws_frame(payload[:2], opcode=0x8))
                    await self.writer.drain()
                except (ConnectionError, OSError):
                    pass
                return None
            if opcode == 0x9:  # ping -> pong
                self.writer.write(ws_frame(payload, opcode=0xA))
                await self.writer.drain()
                continue
            if opcode == 0xA:  # unsolicited pong
                continue
            buffer += payload
            if not fin:
                continue
            text = buffer
            buffer = b""
            try:
                return json.loads(text.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError):
                return {"id": "", "kind": "error", "payload": {"code": "bad_json"}}


async def accept_transport(reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> Transport | None:
    """Peek the first bytes and pick the matching transport."""
    try:
        head = await reader.readexactly(4)
    except (asyncio.IncompleteReadError, ConnectionError):
        return None
    if head == b"GET ":
        # the consumed method token carries no header info; the handshake
        # parser only needs everything up to the blank line
        ok = await websocket_handshake(reader, writer)
        return WebSocketTransport(reader, writer) if ok else None
    (length,) = struct.unpack(">I", head)
    if length > MAX_MESSAGE:
        return None
    try:
        body = await reader.readexactly(length)
    except (asyncio.IncompleteReadError, ConnectionError):
        return None
    transport = FramedTransport(reader, writer)
    try:
        first = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        first = {"id": "", "kind": "error", "payload": {"code": "bad_json"}}
    transport.pending_first = first
    return transport
