import numpy as np
import pytest
from hypothesis import given

from aerialdet import imagery
from aerialdet.errors import ImageFormatError, UnsupportedImageError

from conftest import mask_strategy, saliency_strategy


def test_normalize_endpoints():
    out = imagery.normalize(np.array([[0, 128, 255]], dtype=np.uint8))
    assert out[0, 0] == 0.0
    assert out[0, 2] == 1.0
    assert out[0, 1] == pytest.approx(128 / 255)


def test_normalize_constant_is_zero():
    assert (imagery.normalize(np.full((3, 3), 77)) == 0.0).all()


def test_normalize_linear_values():
    out = imagery.normalize(np.array([[10, 20, 30]]))
    assert out.tolist() == [[0.0, 0.5, 1.0]]


def test_normalize_empty_raises():
    with pytest.raises(ValueError):
        imagery.normalize(np.zeros((0, 3)))


@given(saliency_strategy())
def test_normalize_idempotent_and_spans_unit_range(img):
    once = imagery.normalize(img)
    assert np.array_equal(imagery.normalize(once), once)
    if img.max() > img.min():
        assert once.min() == 0.0
        assert once.max() == 1.0


def test_read_pgm_p2(tmp_path):
    path = tmp_path / "f.pgm"
    path.write_bytes(b"P2\n# comment\n2 2\n255\n0 255\n128 64\n")
    raw = imagery.read_pgm(path)
    assert raw.tolist() == [[0, 255], [128, 64]]
    frame = imagery.load_frame(path)
    assert frame[0].tolist() == [0.0, 1.0]
    assert frame[1, 0] == pytest.approx(128 / 255)
    assert frame[1, 1] == pytest.approx(64 / 255)


def test_load_frame_constant_single_pixel(tmp_path):
    path = tmp_path / "one.pgm"
    path.write_bytes(b"P2\n1 1\n255\n5\n")
    assert imagery.load_frame(path).tolist() == [[0.0]]


def test_read_pgm_truncated_body(tmp_path):
    path = tmp_path / "bad.pgm"
    path.write_bytes(b"P5\n4 4\n255\n\x00\x01")
    with pytest.raises(ImageFormatError):
        imagery.read_pgm(path)


def test_read_pgm_bad_magic(tmp_path):
    path = tmp_path / "bad.pgm"
    path.write_bytes(b"P7\n2 2\n255\n" + bytes(4))
    with pytest.raises(UnsupportedImageError):
        imagery.read_pgm(path)


def test_read_pgm_16bit_rejected(tmp_path):
    path = tmp_path / "deep.pgm"
    path.write_bytes(b"P5\n1 1\n65535\n\x00\x00")
    with pytest.raises(UnsupportedImageError):
        imagery.read_pgm(path)


def test_load_frame_missing_file(tmp_path):
    with pytest.raises(OSError):
        imagery.load_frame(tmp_path / "nope.pgm")


def test_save_mask_encoding(tmp_path):
    mask = np.array([[True, False], [False, True]])
    path = tmp_path / "m.pgm"
    imagery.save_mask(mask, path)
    body = path.read_bytes().split(b"255\n", 1)[1]
    assert body == bytes([255, 0, 0, 255])


def test_save_mask_all_background(tmp_path):
    path = tmp_path / "z.pgm"
    imagery.save_mask(np.zeros((2, 3), bool), path)
    assert path.read_bytes().endswith(bytes(6))


@given(mask=mask_strategy())
def test_mask_roundtrip_identity(tmp_path_factory, mask):
    path = tmp_path_factory.mktemp("masks") / "m.pgm"
    imagery.save_mask(mask, path)
    assert np.array_equal(imagery.load_mask(path), mask)


def test_png_grayscale_roundtrip(tmp_path):
    from PIL import Image

    raw = np.arange(12, dtype=np.uint8).reshape(3, 4) * 20
    path = tmp_path / "f.png"
    Image.fromarray(raw, mode="L").save(path)
    assert np.array_equal(imagery.load_frame(path), imagery.normalize(raw))


def test_png_color_rejected(tmp_path):
    from PIL import Image

    path = tmp_path / "c.png"
    Image.new("RGB", (4, 3)).save(path)
    with pytest.raises(UnsupportedImageError):
        imagery.load_frame(path)


def test_save_image_quantization_lossless_for_8bit(tmp_path):
    raw = np.arange(256, dtype=np.uint8).reshape(16, 16)
    imagery.save_image(raw / 255.0, tmp_path / "q.pgm")
    assert np.array_equal(imagery.read_pgm(tmp_path / "q.pgm"), raw)
