"""Self-describing weights files: header + raw float32 payload."""

import json

import numpy as np
import pytest

from lfolab.errors import FormatError
from lfolab.nn import load_weights, lstmfx_init, lstmfx_shapes, save_weights


def small_weights():
    return lstmfx_init(np.random.default_rng(0), 4)


def test_round_trip_values_and_header(tmp_path):
    w = small_weights()
    path = tmp_path / "model.bin"
    save_weights(path, w, arch="fx-lstm", meta={"hidden": 4})
    loaded, header = load_weights(path)
    assert set(loaded) == set(w)
    for k in w:
        assert loaded[k].dtype == np.float64
        np.testing.assert_allclose(loaded[k], w[k], atol=1e-7)  # f32 on disk
    assert header["arch"] == "fx-lstm"
    assert header["meta"] == {"hidden": 4}
    assert header["dtype"] == "<f4"


def test_write_read_write_is_byte_identical(tmp_path):
    w = small_weights()
    p1, p2 = tmp_path / "a.bin", tmp_path / "b.bin"
    save_weights(p1, w, arch="fx-lstm")
    loaded, _ = load_weights(p1, dtype=np.float32)
    save_weights(p2, loaded, arch="fx-lstm")
    assert p1.read_bytes() == p2.read_bytes()


def test_header_is_one_sorted_json_line(tmp_path):
    path = tmp_path / "model.bin"
    save_weights(path, small_weights(), arch="fx-lstm")
    first = path.read_bytes().split(b"\n", 1)[0]
    header = json.loads(first)
    assert list(header) == sorted(header)
    names = list(header["tensors"])
    assert names == sorted(names)
    # Offsets are cumulative over the sorted names.
    offset = 0
    for name in names:
        info = header["tensors"][name]
        assert info["offset"] == offset
        offset += int(np.prod(info["shape"])) * 4


def test_load_with_expected_shapes(tmp_path):
    path = tmp_path / "model.bin"
    save_weights(path, small_weights(), arch="fx-lstm")
    loaded, _ = load_weights(path, expect_shapes=lstmfx_shapes(4))
    assert loaded["lstm.w_h"].shape == (16, 4)

    with pytest.raises(FormatError, match=r"lstm\.w_x"):
        load_weights(path, expect_shapes=lstmfx_shapes(8))

    missing = dict(lstmfx_shapes(4))
    missing["extra.tensor"] = (3,)
    with pytest.raises(FormatError, match="extra.tensor"):
        load_weights(path, expect_shapes=missing)

    fewer = dict(lstmfx_shapes(4))
    del fewer["head.b"]
    with pytest.raises(FormatError, match="head.b"):
        load_weights(path, expect_shapes=fewer)


def test_load_as_float32(tmp_path):
    path = tmp_path / "model.bin"
    save_weights(path, small_weights(), arch="fx-lstm")
    loaded, _ = load_weights(path, dtype=np.float32)
    assert all(v.dtype == np.float32 for v in loaded.values())


def test_truncated_payload_rejected(tmp_path):
    path = tmp_path / "model.bin"
    save_weights(path, small_weights(), arch="fx-lstm")
    path.write_bytes(path.read_bytes()[:-10])
    with pytest.raises(FormatError):
        load_weights(path)


def test_non_weights_file_rejected(tmp_path):
    path = tmp_path / "noise.bin"
    path.write_bytes(b"\x00\x01\x02 not a header")
    with pytest.raises(FormatError):
        load_weights(path)
    path.write_bytes(json.dumps({"format": "other"}).encode() + b"\n")
    with pytest.raises(FormatError):
        load_weights(path)
    path.write_bytes(b"no newline at all")
    with pytest.raises(FormatError):
        load_weights(path)
