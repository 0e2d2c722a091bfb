"""Reader/writer for the dataset's binary sample container.

This mirrors the published little-endian layout: magic ``NLOS``, format
version (u32), height/width/frequency count (u32), frequency list (f64),
float32 planes (input real x n_f, input imaginary x n_f, gt real, gt
imaginary, gt depth, gt mask), then a length-prefixed JSON trailer
``{"id": ..., "meta": ...}``.  Implemented here independently so the
trainer depends only on the on-disk format, not the simulator package.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

MAGIC = b"NLOS"
FORMAT_VERSION = 1


@dataclass
class Sample:
    id: str
    frequencies_hz: tuple
    input_phasors: np.ndarray  # complex64 (n_f, h, w)
    gt_phasor: np.ndarray  # complex64 (h, w)
    gt_depth: np.ndarray  # float32 (h, w)
    gt_mask: np.ndarray  # bool (h, w)
    meta: dict = field(default_factory=dict)


def read_sample(path) -> Sample:
    with open(path, "rb") as f:
        if f.read(4) != MAGIC:
            raise ValueError(f"not a sample file: {path}")
        version, h, w, n_f = struct.unpack("<IIII", f.read(16))
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported sample format version {version}")
        freqs = np.frombuffer(f.read(8 * n_f), dtype="<f8")

        def planes(count):
            data = f.read(count * h * w * 4)
            if len(data) != count * h * w * 4:
                raise ValueError(f"truncated sample file: {path}")
            return np.frombuffer(data, dtype="<f4").reshape(count, h, w).copy()

        in_re = planes(n_f)
        in_im = planes(n_f)
        gt_re = planes(1)[0]
        gt_im = planes(1)[0]
        depth = planes(1)[0]
        mask = planes(1)[0]
        (meta_len,) = struct.unpack("<I", f.read(4))
        trailer = json.loads(f.read(meta_len).decode("utf-8"))
    return Sample(
        id=trailer["id"],
        frequencies_hz=tuple(float(x) for x in freqs),
        input_phasors=(in_re + 1j * in_im).astype(np.complex64),
        gt_phasor=(gt_re + 1j * gt_im).astype(np.complex64),
        gt_depth=depth,
        gt_mask=mask > 0.5,
        meta=trailer["meta"],
    )


def write_sample(sample: Sample, path) -> None:
    h, w = sample.gt_depth.shape
    n_f = len(sample.frequencies_hz)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<IIII", FORMAT_VERSION, h, w, n_f))
        f.write(np.asarray(sample.frequencies_hz, dtype="<f8").tobytes())
        f.write(np.ascontiguousarray(sample.input_phasors.real, dtype="<f4").tobytes())
        f.write(np.ascontiguousarray(sample.input_phasors.imag, dtype="<f4").tobytes())
        f.write(np.ascontiguousarray(sample.gt_phasor.real, dtype="<f4").tobytes())
        f.write(np.ascontiguousarray(sample.gt_phasor.imag, dtype="<f4").tobytes())
        f.write(np.ascontiguousarray(sample.gt_depth, dtype="<f4").tobytes())
        f.write(np.ascontiguousarray(sample.gt_mask, dtype="<f4").tobytes())
        trailer = json.dumps({"id": sample.id, "meta": sample.meta}).encode("utf-8")
        f.write(struct.pack("<I", len(trailer)))
        f.write(trailer)
