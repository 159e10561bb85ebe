"""Binary descriptor file format: the on-disk contract with feature extractors.

Layout (all integers little-endian, see FORMAT.md for the byte-exact spec):

    magic "LDWR" | version u32 | C u32 | H u32 | W u32
    | class_count u32 | sample_count u32
    | class table: class_count x (u16 length + UTF-8 name)
    | records: sample_count x (class_index u32, u16 length + UTF-8 sample id,
                               C*H*W float32 values, channel-major)

Values are float32 on disk; trailing bytes, truncation, bad magic/version,
out-of-range class indices, and non-finite values are all rejected on read
with the failing byte offset.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import DatasetFormatError
from .episodes import DatasetMeta, DescriptorDataset
from .model import DescriptorSet, LabeledSample

MAGIC = b"LDWR"
VERSION = 1


class _Reader:
    def __init__(self, blob: bytes, source: str):
        self.blob = blob
        self.offset = 0
        self.source = source

    def take(self, n: int, what: str) -> bytes:
        if self.offset + n > len(self.blob):
            raise DatasetFormatError(
                f"{self.source}: truncated while reading {what}: need {n} bytes, "
                f"file has {len(self.blob) - self.offset} left",
                offset=self.offset,
            )
        out = self.blob[self.offset : self.offset + n]
        self.offset += n
        return out

    def u32(self, what: str) -> int:
        return struct.unpack("<I", self.take(4, what))[0]

    def string(self, what: str) -> str:
        (length,) = struct.unpack("<H", self.take(2, f"{what} length"))
        raw = self.take(length, what)
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise DatasetFormatError(
                f"{self.source}: {what} is not valid UTF-8: {e}",
                offset=self.offset - length,
            ) from e


def read_dataset(path: str | Path) -> DescriptorDataset:
    """Load and fully validate a descriptor file."""
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as e:
        raise DatasetFormatError(f"{path}: cannot read dataset file: {e}") from e
    r = _Reader(blob, str(path))

    magic = r.take(4, "magic")
    if magic != MAGIC:
        raise DatasetFormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}", offset=0)
    version = r.u32("version")
    if version != VERSION:
        raise DatasetFormatError(f"{path}: unsupported version {version}, expected {VERSION}", offset=4)
    channels = r.u32("channels")
    height = r.u32("height")
    width = r.u32("width")
    class_count = r.u32("class count")
    sample_count = r.u32("sample count")
    if min(channels, height, width) < 1:
        raise DatasetFormatError(
            f"{path}: dimensions must be positive, got C={channels} H={height} W={width}",
            offset=8,
        )
    if class_count < 1:
        raise DatasetFormatError(f"{path}: class table is empty", offset=20)

    classes = tuple(r.string(f"class name {i}") for i in range(class_count))
    n = height * width
    values_per_sample = channels * n
    record_bytes = 4 * values_per_sample

    samples = []
    for i in range(sample_count):
        class_index = r.u32(f"sample {i} class index")
        if class_index >= class_count:
            raise DatasetFormatError(
                f"{path}: sample {i} class index {class_index} out of range "
                f"(table has {class_count} classes)",
                offset=r.offset - 4,
            )
        sample_id = r.string(f"sample {i} id")
        value_offset = r.offset
        raw = r.take(record_bytes, f"sample {i} ({sample_id!r}) values")
        data = np.frombuffer(raw, dtype="<f4").reshape(channels, n)
        finite = np.isfinite(data)
        if not finite.all():
            flat = int(np.argmin(finite.ravel()))
            raise DatasetFormatError(
                f"{path}: sample {i} ({sample_id!r}) has non-finite value at "
                f"channel {flat // n}, position {flat % n}",
                offset=value_offset + 4 * flat,
            )
        samples.append(
            LabeledSample(
                descriptors=DescriptorSet(channels, height, width, data.astype(np.float32)),
                label=classes[class_index],
                sample_id=sample_id,
            )
        )
    if r.offset != len(blob):
        raise DatasetFormatError(
            f"{path}: {len(blob) - r.offset} trailing bytes after the last record",
            offset=r.offset,
        )
    return DescriptorDataset(
        classes=classes,
        samples=tuple(samples),
        meta=DatasetMeta(channels, height, width, source=str(path)),
    )


def _encode_string(value: str, what: str) -> bytes:
    raw = value.encode("utf-8")
    if len(raw) > 0xFFFF:
        raise DatasetFormatError(f"{what} is longer than 65535 bytes")
    return struct.pack("<H", len(raw)) + raw


def write_dataset(ds: DescriptorDataset, path: str | Path) -> None:
    """Write the canonical byte layout; the same dataset always produces the
    same bytes."""
    if not ds.classes:
        raise DatasetFormatError("refusing to write a dataset with an empty class table")
    meta = ds.meta
    parts = [
        MAGIC,
        struct.pack(
            "<IIIIII",
            VERSION,
            meta.channels,
            meta.height,
            meta.width,
            len(ds.classes),
            len(ds.samples),
        ),
    ]
    for label in ds.classes:
        parts.append(_encode_string(label, f"class name {label!r}"))
    for s in ds.samples:
        parts.append(struct.pack("<I", ds.class_id(s.label)))
        parts.append(_encode_string(s.sample_id, f"sample id {s.sample_id!r}"))
        parts.append(np.ascontiguousarray(s.descriptors.data, dtype="<f4").tobytes())
    Path(path).write_bytes(b"".join(parts))
