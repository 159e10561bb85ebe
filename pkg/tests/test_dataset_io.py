"""Binary descriptor file format: round trips and corruption reporting."""

import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ldwr.dataset_io import MAGIC, VERSION, read_dataset, write_dataset
from ldwr.episodes import SyntheticSpec, generate_synthetic
from ldwr.errors import DatasetFormatError

from .test_episodes import tiny_dataset


def small_synthetic(seed=0):
    ds, _ = generate_synthetic(
        SyntheticSpec(n_classes=3, samples_per_class=2, channels=4,
                      height=2, width=3, seed=seed)
    )
    return ds


class TestRoundTrip:
    def test_values_classes_ids_survive(self, tmp_path):
        ds = small_synthetic()
        path = tmp_path / "data.ldwr"
        write_dataset(ds, path)
        back = read_dataset(path)
        assert back.classes == ds.classes
        assert back.meta.channels == ds.meta.channels
        assert back.meta.height == ds.meta.height
        assert back.meta.width == ds.meta.width
        assert len(back.samples) == len(ds.samples)
        for a, b in zip(ds.samples, back.samples):
            assert a.sample_id == b.sample_id
            assert a.label == b.label
            np.testing.assert_array_equal(a.descriptors.data, b.descriptors.data)

    def test_write_is_canonical(self, tmp_path):
        ds = small_synthetic()
        p1, p2 = tmp_path / "a.ldwr", tmp_path / "b.ldwr"
        write_dataset(ds, p1)
        write_dataset(ds, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_float32_exactness(self, tmp_path):
        # Values that are not exactly representable in float64 decimal terms
        # still round-trip bit-for-bit because storage is float32 everywhere.
        ds = tiny_dataset(n_classes=2, per_class=2)
        path = tmp_path / "t.ldwr"
        write_dataset(ds, path)
        back = read_dataset(path)
        for a, b in zip(ds.samples, back.samples):
            np.testing.assert_array_equal(
                np.asarray(a.descriptors.data, dtype=np.float32),
                b.descriptors.data,
            )

    def test_unicode_labels_round_trip(self, tmp_path):
        ds = small_synthetic()
        renamed = type(ds)(
            classes=("ほげ", "classB", "Ωmega"),
            samples=tuple(
                type(s)(s.descriptors, ("ほげ", "classB", "Ωmega")[ds.class_id(s.label)], s.sample_id)
                for s in ds.samples
            ),
            meta=ds.meta,
        )
        path = tmp_path / "u.ldwr"
        write_dataset(renamed, path)
        assert read_dataset(path).classes == ("ほげ", "classB", "Ωmega")

    @given(seed=st.integers(0, 2**32 - 1))
    @settings(max_examples=15, deadline=None)
    def test_random_datasets_round_trip(self, seed, tmp_path_factory):
        ds = small_synthetic(seed)
        path = tmp_path_factory.mktemp("io") / "r.ldwr"
        write_dataset(ds, path)
        back = read_dataset(path)
        for a, b in zip(ds.samples, back.samples):
            np.testing.assert_array_equal(a.descriptors.data, b.descriptors.data)


def _write_good_bytes(tmp_path):
    ds = small_synthetic()
    path = tmp_path / "good.ldwr"
    write_dataset(ds, path)
    return path, bytearray(path.read_bytes())


class TestCorruptionReporting:
    def test_bad_magic_offset_zero(self, tmp_path):
        path, blob = _write_good_bytes(tmp_path)
        blob[0:4] = b"NOPE"
        path.write_bytes(blob)
        with pytest.raises(DatasetFormatError, match="bad magic") as exc:
            read_dataset(path)
        assert exc.value.offset == 0

    def test_bad_version_offset_four(self, tmp_path):
        path, blob = _write_good_bytes(tmp_path)
        blob[4:8] = struct.pack("<I", 99)
        path.write_bytes(blob)
        with pytest.raises(DatasetFormatError, match="version 99") as exc:
            read_dataset(path)
        assert exc.value.offset == 4

    def test_truncation_reports_offset(self, tmp_path):
        path, blob = _write_good_bytes(tmp_path)
        path.write_bytes(blob[: len(blob) - 7])
        with pytest.raises(DatasetFormatError, match="truncated") as exc:
            read_dataset(path)
        assert exc.value.offset is not None

    def test_trailing_bytes_rejected(self, tmp_path):
        path, blob = _write_good_bytes(tmp_path)
        path.write_bytes(bytes(blob) + b"\x00\x00")
        with pytest.raises(DatasetFormatError, match="2 trailing bytes") as exc:
            read_dataset(path)
        assert exc.value.offset == len(blob)

    def test_class_index_out_of_range(self, tmp_path):
        path, blob = _write_good_bytes(tmp_path)
        # First record starts right after the header and class table.
        offset = 4 + 24
        for name in ("class000", "class001", "class002"):
            offset += 2 + len(name.encode())
        blob[offset : offset + 4] = struct.pack("<I", 7)
        path.write_bytes(blob)
        with pytest.raises(DatasetFormatError, match="class index 7") as exc:
            read_dataset(path)
        assert exc.value.offset == offset

    def test_non_finite_value_pinpointed(self, tmp_path):
        path, blob = _write_good_bytes(tmp_path)
        offset = 4 + 24
        for name in ("class000", "class001", "class002"):
            offset += 2 + len(name.encode())
        offset += 4  # class index
        offset += 2 + len("class000/0000".encode())  # sample id
        # corrupt the 5th float of the first record
        value_offset = offset + 4 * 4
        blob[value_offset : value_offset + 4] = struct.pack("<f", np.nan)
        path.write_bytes(blob)
        with pytest.raises(DatasetFormatError, match="non-finite") as exc:
            read_dataset(path)
        assert exc.value.offset == value_offset
        # C=4, H=2, W=3: flat index 4 sits at channel 0, position 4
        assert "channel 0" in str(exc.value)
        assert "position 4" in str(exc.value)

    def test_invalid_utf8_in_class_name(self, tmp_path):
        path, blob = _write_good_bytes(tmp_path)
        name_offset = 4 + 24 + 2
        blob[name_offset : name_offset + 2] = b"\xff\xfe"
        path.write_bytes(blob)
        with pytest.raises(DatasetFormatError, match="not valid UTF-8"):
            read_dataset(path)

    def test_empty_class_table_rejected_on_read(self, tmp_path):
        path, blob = _write_good_bytes(tmp_path)
        blob[20:24] = struct.pack("<I", 0)
        path.write_bytes(blob)
        with pytest.raises(DatasetFormatError, match="class table is empty") as exc:
            read_dataset(path)
        assert exc.value.offset == 20

    def test_zero_dimension_rejected(self, tmp_path):
        path, blob = _write_good_bytes(tmp_path)
        blob[8:12] = struct.pack("<I", 0)
        path.write_bytes(blob)
        with pytest.raises(DatasetFormatError, match="dimensions must be positive"):
            read_dataset(path)
