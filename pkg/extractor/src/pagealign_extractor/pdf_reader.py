"""Minimal PDF reader for programmatically generated documents.

Scope: classic cross-reference tables, Flate and ASCII85 stream filters,
literal/hex strings, and a flat or nested page tree with attribute
inheritance. That covers the output of common report generators. It is
not a general PDF implementation: no object streams, no xref streams,
no decryption, no damaged-file repair.

Objects are located through the cross-reference table rather than by
scanning for ``obj`` keywords, so stream payloads that happen to contain
PDF syntax cannot confuse the parser.
"""
from __future__ import annotations

import base64
import zlib
from dataclasses import dataclass
from pathlib import Path

from .errors import EncryptedPdf, PdfReadError

_WHITESPACE = frozenset(b"\x00\t\n\x0c\r ")
_DELIMITERS = frozenset(b"()<>[]{}/%")


class Name(str):
    """A PDF name token, kept distinct from string objects."""

    __slots__ = ()


@dataclass(frozen=True)
class Ref:
    """Indirect object reference."""

    num: int
    gen: int


@dataclass
class PdfStream:
    """A stream object: its dictionary plus the raw (still encoded) bytes."""

    dictionary: dict
    raw: bytes


@dataclass
class PdfPage:
    """One leaf of the page tree with inherited attributes resolved."""

    index: int
    mediabox: tuple[float, float, float, float]
    contents: object  # Ref, list of Refs, or None


def _skip_ws(data: bytes, i: int) -> int:
    n = len(data)
    while i < n:
        c = data[i]
        if c in _WHITESPACE:
            i += 1
        elif c == 0x25:  # % comment runs to end of line
            while i < n and data[i] not in (0x0A, 0x0D):
                i += 1
        else:
            break
    return i


def _read_token(data: bytes, i: int) -> tuple[bytes, int]:
    """Read a run of regular characters starting at i."""
    start = i
    n = len(data)
    while i < n and data[i] not in _WHITESPACE and data[i] not in _DELIMITERS:
        i += 1
    if i == start:
        raise PdfReadError(f"expected token at offset {start}")
    return data[start:i], i


def _parse_name(data: bytes, i: int) -> tuple[Name, int]:
    # data[i] is the slash
    i += 1
    out = bytearray()
    n = len(data)
    while i < n and data[i] not in _WHITESPACE and data[i] not in _DELIMITERS:
        c = data[i]
        if c == 0x23 and i + 2 < n:  # #xx hex escape
            out.append(int(data[i + 1:i + 3], 16))
            i += 3
        else:
            out.append(c)
            i += 1
    return Name(out.decode("latin-1")), i


def _parse_literal_string(data: bytes, i: int) -> tuple[bytes, int]:
    # data[i] is the opening parenthesis
    i += 1
    depth = 1
    out = bytearray()
    n = len(data)
    while i < n:
        c = data[i]
        if c == 0x5C:  # backslash escape
            i += 1
            if i >= n:
                break
            e = data[i]
            if e == 0x6E:
                out.append(0x0A)
            elif e == 0x72:
                out.append(0x0D)
            elif e == 0x74:
                out.append(0x09)
            elif e == 0x62:
                out.append(0x08)
            elif e == 0x66:
                out.append(0x0C)
            elif 0x30 <= e <= 0x37:  # up to three octal digits
                val = e - 0x30
                i += 1
                for _ in range(2):
                    if i < n and 0x30 <= data[i] <= 0x37:
                        val = val * 8 + (data[i] - 0x30)
                        i += 1
                    else:
                        break
                out.append(val & 0xFF)
                continue
            elif e == 0x0D:  # line continuation
                if i + 1 < n and data[i + 1] == 0x0A:
                    i += 1
            elif e == 0x0A:
                pass
            else:
                out.append(e)
            i += 1
        elif c == 0x28:
            depth += 1
            out.append(c)
            i += 1
        elif c == 0x29:
            depth -= 1
            if depth == 0:
                return bytes(out), i + 1
            out.append(c)
            i += 1
        else:
            out.append(c)
            i += 1
    raise PdfReadError("unterminated literal string")


def _parse_hex_string(data: bytes, i: int) -> tuple[bytes, int]:
    # data[i] is '<' and data[i+1] is not '<'
    i += 1
    digits = bytearray()
    n = len(data)
    while i < n and data[i] != 0x3E:
        if data[i] not in _WHITESPACE:
            digits.append(data[i])
        i += 1
    if i >= n:
        raise PdfReadError("unterminated hex string")
    if len(digits) % 2:
        digits.append(0x30)  # odd count: pad with zero
    return bytes.fromhex(digits.decode("latin-1")), i + 1


def _parse_number(data: bytes, i: int) -> tuple[int | float, int]:
    token, i = _read_token(data, _skip_ws(data, i))
    text = token.decode("latin-1")
    try:
        if b"." in token:
            return float(text), i
        return int(text), i
    except ValueError as exc:
        raise PdfReadError(f"bad number {text!r}") from exc


def parse_value(data: bytes, i: int) -> tuple[object, int]:
    """Parse one PDF object starting at or after offset i."""
    i = _skip_ws(data, i)
    if i >= len(data):
        raise PdfReadError("unexpected end of data")
    c = data[i]
    if c == 0x3C:  # < or <<
        if i + 1 < len(data) and data[i + 1] == 0x3C:
            return _parse_dict(data, i)
        return _parse_hex_string(data, i)
    if c == 0x5B:  # [
        return _parse_array(data, i)
    if c == 0x2F:  # /
        return _parse_name(data, i)
    if c == 0x28:  # (
        return _parse_literal_string(data, i)
    if c in b"+-." or 0x30 <= c <= 0x39:
        value, j = _parse_number(data, i)
        if isinstance(value, int) and value >= 0:
            ref, k = _try_ref(data, j, value)
            if ref is not None:
                return ref, k
        return value, j
    token, j = _read_token(data, i)
    if token == b"true":
        return True, j
    if token == b"false":
        return False, j
    if token == b"null":
        return None, j
    raise PdfReadError(f"unexpected token {token!r} at offset {i}")


def _try_ref(data: bytes, i: int, num: int) -> tuple[Ref | None, int]:
    """Lookahead for 'gen R' after an integer; returns (None, i) if absent."""
    j = _skip_ws(data, i)
    n = len(data)
    if j >= n or not (0x30 <= data[j] <= 0x39):
        return None, i
    start = j
    while j < n and 0x30 <= data[j] <= 0x39:
        j += 1
    gen = int(data[start:j])
    j = _skip_ws(data, j)
    if j < n and data[j] == 0x52:  # R
        after = j + 1
        if after >= n or data[after] in _WHITESPACE or data[after] in _DELIMITERS:
            return Ref(num, gen), after
    return None, i


def _parse_array(data: bytes, i: int) -> tuple[list, int]:
    i += 1  # [
    out: list = []
    while True:
        i = _skip_ws(data, i)
        if i >= len(data):
            raise PdfReadError("unterminated array")
        if data[i] == 0x5D:  # ]
            return out, i + 1
        value, i = parse_value(data, i)
        out.append(value)


def _parse_dict(data: bytes, i: int) -> tuple[dict, int]:
    i += 2  # <<
    out: dict = {}
    while True:
        i = _skip_ws(data, i)
        if i + 1 < len(data) and data[i] == 0x3E and data[i + 1] == 0x3E:
            return out, i + 2
        if i >= len(data):
            raise PdfReadError("unterminated dictionary")
        if data[i] != 0x2F:
            raise PdfReadError(f"dictionary key must be a name at offset {i}")
        key, i = _parse_name(data, i)
        value, i = parse_value(data, i)
        out[str(key)] = value


def decode_stream(stream: PdfStream, resolve) -> bytes:
    """Apply the stream's filter chain. Supports Flate and ASCII85."""
    filters = resolve(stream.dictionary.get("Filter"))
    if filters is None:
        names = []
    elif isinstance(filters, list):
        names = [str(resolve(f)) for f in filters]
    else:
        names = [str(filters)]
    data = stream.raw
    for name in names:
        try:
            if name == "ASCII85Decode":
                data = base64.a85decode(data.strip(), adobe=True)
            elif name == "FlateDecode":
                data = zlib.decompress(data)
            else:
                raise PdfReadError(f"unsupported stream filter {name}")
        except (ValueError, zlib.error) as exc:
            raise PdfReadError(f"stream decode failed in {name}: {exc}") from exc
    return data


class PdfReader:
    """Random-access reader over one PDF file."""

    def __init__(self, path: str | Path) -> None:
        data = Path(path).read_bytes()
        head = data.find(b"%PDF-")
        if head < 0 or head > 1024:
            raise PdfReadError("missing %PDF header")
        if head:
            data = data[head:]  # offsets count from the header
        self._data = data
        self._xref: dict[int, int] = {}
        self.trailer: dict = {}
        self._cache: dict[int, object] = {}
        self._load_xref_chain()
        if "Encrypt" in self.trailer:
            raise EncryptedPdf("document declares /Encrypt; decryption is out of scope")
        if "Root" not in self.trailer:
            raise PdfReadError("trailer has no /Root")

    # -- cross-reference handling -------------------------------------

    def _load_xref_chain(self) -> None:
        data = self._data
        pos = data.rfind(b"startxref")
        if pos < 0:
            raise PdfReadError("missing startxref")
        offset, _ = _parse_number(data, _skip_ws(data, pos + len(b"startxref")))
        seen: set[int] = set()
        while True:
            if not isinstance(offset, int) or offset in seen:
                break
            seen.add(offset)
            trailer = self._parse_xref_table(offset)
            for key, value in trailer.items():
                self.trailer.setdefault(key, value)
            prev = trailer.get("Prev")
            if prev is None:
                break
            offset = prev

    def _parse_xref_table(self, offset: int) -> dict:
        data = self._data
        i = _skip_ws(data, offset)
        token, i = _read_token(data, i)
        if token != b"xref":
            raise PdfReadError("cross-reference streams are not supported")
        while True:
            i = _skip_ws(data, i)
            token, j = _read_token(data, i)
            if token == b"trailer":
                trailer, _ = _parse_dict(data, _skip_ws(data, j))
                return trailer
            start, i = _parse_number(data, i)
            count, i = _parse_number(data, i)
            if not isinstance(start, int) or not isinstance(count, int):
                raise PdfReadError("malformed xref subsection header")
            for num in range(start, start + count):
                obj_off, i = _parse_number(data, _skip_ws(data, i))
                _, i = _parse_number(data, _skip_ws(data, i))  # generation
                flag, i = _read_token(data, _skip_ws(data, i))
                if flag == b"n":
                    # first table in the chain wins for a given number
                    self._xref.setdefault(num, int(obj_off))
                elif flag != b"f":
                    raise PdfReadError(f"bad xref entry flag {flag!r}")

    # -- object access -------------------------------------------------

    def get(self, num: int) -> object:
        if num in self._cache:
            return self._cache[num]
        if num not in self._xref:
            raise PdfReadError(f"object {num} not in cross-reference table")
        data = self._data
        i = self._xref[num]
        got, i = _parse_number(data, _skip_ws(data, i))
        if got != num:
            raise PdfReadError(f"object {num} not found at its xref offset")
        _, i = _parse_number(data, _skip_ws(data, i))  # generation
        token, i = _read_token(data, _skip_ws(data, i))
        if token != b"obj":
            raise PdfReadError(f"expected obj keyword for object {num}")
        value, i = parse_value(data, i)
        j = _skip_ws(data, i)
        if isinstance(value, dict) and data[j:j + 6] == b"stream":
            value = self._read_stream(value, j + 6)
        self._cache[num] = value
        return value

    def _read_stream(self, dictionary: dict, i: int) -> PdfStream:
        data = self._data
        if data[i:i + 2] == b"\r\n":
            i += 2
        elif data[i:i + 1] in (b"\n", b"\r"):
            i += 1
        length = self.resolve(dictionary.get("Length"))
        if not isinstance(length, int) or length < 0:
            raise PdfReadError("stream without a usable /Length")
        return PdfStream(dictionary=dictionary, raw=data[i:i + length])

    def resolve(self, value: object) -> object:
        while isinstance(value, Ref):
            value = self.get(value.num)
        return value

    # -- page tree -----------------------------------------------------

    def pages(self) -> list[PdfPage]:
        root = self.resolve(self.trailer["Root"])
        if not isinstance(root, dict) or "Pages" not in root:
            raise PdfReadError("catalog has no /Pages")
        out: list[PdfPage] = []
        self._walk(self.resolve(root["Pages"]), {}, out, set())
        return out

    def _walk(self, node: object, inherited: dict, out: list[PdfPage],
              seen: set[int]) -> None:
        if not isinstance(node, dict):
            raise PdfReadError("page tree node is not a dictionary")
        ident = id(node)
        if ident in seen:
            raise PdfReadError("page tree contains a cycle")
        seen.add(ident)
        merged = dict(inherited)
        for key in ("MediaBox", "Resources"):
            if key in node:
                merged[key] = node[key]
        kids = node.get("Kids")
        if kids is not None:
            for kid in self.resolve(kids):
                self._walk(self.resolve(kid), merged, out, seen)
            return
        box = self.resolve(merged.get("MediaBox"))
        if not isinstance(box, list) or len(box) != 4:
            raise PdfReadError(f"page {len(out)} has no usable /MediaBox")
        coords = tuple(float(self.resolve(v)) for v in box)
        out.append(PdfPage(index=len(out), mediabox=coords,
                           contents=node.get("Contents")))

    def page_content(self, page: PdfPage) -> bytes:
        """Decode and concatenate a page's content streams."""
        contents = self.resolve(page.contents)
        if contents is None:
            return b""
        items = contents if isinstance(contents, list) else [contents]
        parts: list[bytes] = []
        for item in items:
            obj = self.resolve(item)
            if not isinstance(obj, PdfStream):
                raise PdfReadError("page /Contents entry is not a stream")
            parts.append(decode_stream(obj, self.resolve))
        return b"\n".join(parts)
