"""Bit-exact binary container for dataset samples.

Layout (little-endian):

* magic ``NLOS`` (4 bytes), format version (u32),
* height, width (u32 each), frequency count (u32),
* frequency list (f64, Hz),
* arrays in IEEE-754 single precision, row-major: input real planes per
  frequency, input imaginary planes per frequency, gt real, gt imaginary,
  gt depth, gt mask (0.0 / 1.0),
* trailer: meta length (u32) + UTF-8 JSON ``{"id": ..., "meta": ...}``.

The trailer keeps the write/parse round trip lossless; readers of the core
layout can stop after the mask plane.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

MAGIC = b"NLOS"
FORMAT_VERSION = 1


class SampleFormatError(Exception):
    """Base class for malformed sample files."""


class BadMagicError(SampleFormatError):
    pass


class BadVersionError(SampleFormatError):
    pass


class TruncatedSampleError(SampleFormatError):
    def __init__(self, section: str):
        super().__init__(f"sample file truncated in section: {section}")
        self.section = section


@dataclass
class SampleRecord:
    """One dataset sample: multi-frequency inputs plus mirror-trick GT."""

    id: str
    frequencies_hz: tuple
    input_phasors: np.ndarray  # complex64, (n_freq, h, w)
    gt_phasor: np.ndarray  # complex64, (h, w), at the first frequency
    gt_depth: np.ndarray  # float32, (h, w), 0 = background
    gt_mask: np.ndarray  # bool, (h, w)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.frequencies_hz = tuple(float(f) for f in self.frequencies_hz)
        self.input_phasors = np.asarray(self.input_phasors, dtype=np.complex64)
        self.gt_phasor = np.asarray(self.gt_phasor, dtype=np.complex64)
        self.gt_depth = np.asarray(self.gt_depth, dtype=np.float32)
        self.gt_mask = np.asarray(self.gt_mask, dtype=bool)
        h, w = self.gt_depth.shape
        if self.input_phasors.shape != (len(self.frequencies_hz), h, w):
            raise ValueError("input phasor planes do not match the image dims")
        if self.gt_phasor.shape != (h, w) or self.gt_mask.shape != (h, w):
            raise ValueError("ground-truth planes do not match the image dims")

    @property
    def height(self) -> int:
        return self.gt_depth.shape[0]

    @property
    def width(self) -> int:
        return self.gt_depth.shape[1]

    def __eq__(self, other):
        if not isinstance(other, SampleRecord):
            return NotImplemented
        return (
            self.id == other.id
            and self.frequencies_hz == other.frequencies_hz
            and np.array_equal(self.input_phasors, other.input_phasors)
            and np.array_equal(self.gt_phasor, other.gt_phasor)
            and np.array_equal(self.gt_depth, other.gt_depth)
            and np.array_equal(self.gt_mask, other.gt_mask)
            and self.meta == other.meta
        )


def write_sample(record: SampleRecord, path) -> None:
    h, w = record.gt_depth.shape
    n_f = len(record.frequencies_hz)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<IIII", FORMAT_VERSION, h, w, n_f))
        f.write(np.asarray(record.frequencies_hz, dtype="<f8").tobytes())
        f.write(np.ascontiguousarray(record.input_phasors.real, dtype="<f4").tobytes())
        f.write(np.ascontiguousarray(record.input_phasors.imag, dtype="<f4").tobytes())
        f.write(np.ascontiguousarray(record.gt_phasor.real, dtype="<f4").tobytes())
        f.write(np.ascontiguousarray(record.gt_phasor.imag, dtype="<f4").tobytes())
        f.write(np.ascontiguousarray(record.gt_depth, dtype="<f4").tobytes())
        f.write(np.ascontiguousarray(record.gt_mask, dtype="<f4").tobytes())
        trailer = json.dumps({"id": record.id, "meta": record.meta}).encode("utf-8")
        f.write(struct.pack("<I", len(trailer)))
        f.write(trailer)


def _read_exact(f, n: int, section: str) -> bytes:
    data = f.read(n)
    if len(data) != n:
        raise TruncatedSampleError(section)
    return data


def _read_planes(f, count: int, h: int, w: int, section: str) -> np.ndarray:
    data = _read_exact(f, count * h * w * 4, section)
    return np.frombuffer(data, dtype="<f4").reshape(count, h, w).copy()


def parse_sample(path) -> SampleRecord:
    with open(path, "rb") as f:
        magic = _read_exact(f, 4, "magic")
        if magic != MAGIC:
            raise BadMagicError(f"bad magic {magic!r}, expected {MAGIC!r}")
        version, h, w, n_f = struct.unpack("<IIII", _read_exact(f, 16, "header"))
        if version != FORMAT_VERSION:
            raise BadVersionError(f"unsupported format version {version}")
        freqs = np.frombuffer(_read_exact(f, 8 * n_f, "frequency list"), dtype="<f8")
        in_re = _read_planes(f, n_f, h, w, "input real planes")
        in_im = _read_planes(f, n_f, h, w, "input imaginary planes")
        gt_re = _read_planes(f, 1, h, w, "gt real plane")[0]
        gt_im = _read_planes(f, 1, h, w, "gt imaginary plane")[0]
        depth = _read_planes(f, 1, h, w, "gt depth plane")[0]
        mask = _read_planes(f, 1, h, w, "gt mask plane")[0]
        (meta_len,) = struct.unpack("<I", _read_exact(f, 4, "meta length"))
        trailer = json.loads(_read_exact(f, meta_len, "meta").decode("utf-8"))
    return SampleRecord(
        id=trailer["id"],
        frequencies_hz=tuple(freqs),
        input_phasors=in_re + 1j * in_im,
        gt_phasor=gt_re + 1j * gt_im,
        gt_depth=depth,
        gt_mask=mask > 0.5,
        meta=trailer["meta"],
    )
