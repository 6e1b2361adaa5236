"""Reading and writing 8-bit PGM rasters (plain ``P2`` and binary ``P5``)."""

from __future__ import annotations

import os
import re

import numpy as np

from .core import GrayImage

TOOL_NAME = "lhedof"


class PGMError(ValueError):
    """Base class for PGM parse failures."""


class PGMHeaderError(PGMError):
    """Magic number or header fields are missing or not integers."""


class PGMDimensionError(PGMError):
    """Width or height is zero or negative."""


class PGMMaxvalError(PGMError):
    """Only maxval 255 is supported."""


class PGMTruncatedError(PGMError):
    """The pixel payload is shorter than the header promises."""


_TOKEN = re.compile(rb"#[^\n\r]*|\S+")


def _header_tokens(data: bytes, count: int):
    """Pull ``count`` whitespace-separated header tokens, skipping comments.

    Returns the tokens and the offset just past the last one.
    """
    tokens = []
    pos = 0
    for match in _TOKEN.finditer(data):
        tok = match.group()
        if tok.startswith(b"#"):
            continue
        tokens.append(tok)
        pos = match.end()
        if len(tokens) == count:
            break
    if len(tokens) < count:
        raise PGMHeaderError("incomplete PGM header")
    return tokens, pos


def decode_pgm(data: bytes) -> GrayImage:
    """Parse P2 or P5 bytes into a GrayImage with 256 levels."""
    tokens, pos = _header_tokens(data, 4)
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise PGMHeaderError(f"unsupported magic number {magic!r}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise PGMHeaderError("non-integer field in PGM header") from None
    if width <= 0 or height <= 0:
        raise PGMDimensionError(f"invalid dimensions {width}x{height}")
    if maxval != 255:
        raise PGMMaxvalError(f"maxval must be 255, got {maxval}")

    n = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates maxval from the payload
        payload = data[pos + 1:pos + 1 + n]
        if len(payload) < n:
            raise PGMTruncatedError(f"expected {n} bytes of pixel data, got {len(payload)}")
        pixels = np.frombuffer(payload, dtype=np.uint8)
    else:
        body = data[pos:]
        values = [t for t in _TOKEN.findall(body) if not t.startswith(b"#")]
        if len(values) < n:
            raise PGMTruncatedError(f"expected {n} samples, got {len(values)}")
        try:
            pixels = np.array([int(v) for v in values[:n]], dtype=np.int64)
        except ValueError:
            raise PGMHeaderError("non-integer sample in P2 payload") from None
        if pixels.min() < 0 or pixels.max() > maxval:
            raise PGMError("sample outside [0, maxval]")
    return GrayImage(pixels.reshape(height, width), 256)


def encode_pgm(image: GrayImage, plain: bool = False) -> bytes:
    """Serialise to P5 (or P2 if ``plain``) with a single tool comment line."""
    if image.levels != 256:
        raise ValueError("PGM output supports 256-level images only")
    magic = "P2" if plain else "P5"
    header = f"{magic}\n# {TOOL_NAME}\n{image.width} {image.height}\n255\n".encode("ascii")
    if plain:
        rows = (" ".join(str(v) for v in row) for row in image.pixels)
        return header + ("\n".join(rows) + "\n").encode("ascii")
    return header + image.pixels.astype(np.uint8).tobytes()


def read_pgm(path: str | os.PathLike) -> GrayImage:
    with open(path, "rb") as fh:
        return decode_pgm(fh.read())


def write_pgm(image: GrayImage, path: str | os.PathLike, plain: bool = False) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_pgm(image, plain=plain))
