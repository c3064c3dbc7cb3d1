import numpy as np
import pytest

from memvos.xkf import MAGIC, read_xkf, write_xkf


def test_roundtrip(tmp_path, rng):
    arr = rng.normal(size=(6, 4, 5)).astype(np.float32)
    path = tmp_path / "k.xkf"
    write_xkf(path, arr)
    assert np.array_equal(read_xkf(path), arr)


def test_header_layout(tmp_path):
    arr = np.arange(6, dtype=np.float32).reshape(1, 2, 3)
    path = tmp_path / "k.xkf"
    write_xkf(path, arr)
    blob = path.read_bytes()
    assert blob[:4] == MAGIC
    assert int.from_bytes(blob[4:8], "little") == 3
    dims = [int.from_bytes(blob[8 + 4 * i : 12 + 4 * i], "little") for i in range(3)]
    assert dims == [1, 2, 3]
    assert len(blob) == 8 + 12 + 4 * 6


def test_bad_magic(tmp_path):
    path = tmp_path / "bad.xkf"
    path.write_bytes(b"NOPE" + b"\x00" * 16)
    with pytest.raises(ValueError, match="magic"):
        read_xkf(path)


def test_truncated(tmp_path):
    arr = np.zeros((2, 2), dtype=np.float32)
    path = tmp_path / "k.xkf"
    write_xkf(path, arr)
    path.write_bytes(path.read_bytes()[:-3])
    with pytest.raises(ValueError, match="length"):
        read_xkf(path)


def test_2d_roundtrip(tmp_path):
    arr = np.eye(3, dtype=np.float32)
    write_xkf(tmp_path / "m.xkf", arr)
    assert np.array_equal(read_xkf(tmp_path / "m.xkf"), arr)
