import numpy as np
import pytest
from hypothesis import given, settings

from aerialdet.morphology import (
    StructuringElement,
    close_mask,
    dilate,
    erode,
    make_disk,
    make_square,
    open_mask,
)

import oracles
from conftest import mask_strategy

SQUARE2 = make_square(2)
DISK1 = make_disk(1)


def test_disk_radius1_is_plus():
    assert set(DISK1.offsets) == {(0, 0), (-1, 0), (1, 0), (0, -1), (0, 1)}


def test_disk_radius2_has_13_offsets():
    assert len(make_disk(2).offsets) == 13


def test_disk_radius7_fits_15x15():
    d = make_disk(7)
    assert d.extent == 7
    assert all(-7 <= dr <= 7 and -7 <= dc <= 7 for dr, dc in d.offsets)


def test_disk_symmetric_under_negation():
    for radius in (1, 2, 3, 5):
        offs = set(make_disk(radius).offsets)
        assert {(-dr, -dc) for dr, dc in offs} == offs


def test_bad_parameters():
    with pytest.raises(ValueError):
        make_disk(0)
    with pytest.raises(ValueError):
        make_square(0)
    with pytest.raises(ValueError):
        StructuringElement((), "empty")


def test_dilate_point_with_disk_is_plus():
    mask = np.zeros((5, 5), bool)
    mask[2, 2] = True
    out = dilate(mask, DISK1)
    expect = np.zeros((5, 5), bool)
    for r, c in [(2, 2), (1, 2), (3, 2), (2, 1), (2, 3)]:
        expect[r, c] = True
    assert np.array_equal(out, expect)


def test_dilate_empty_mask():
    assert not dilate(np.zeros((4, 6), bool), SQUARE2).any()


def test_erode_plus_to_center():
    mask = np.zeros((5, 5), bool)
    for r, c in [(2, 2), (1, 2), (3, 2), (2, 1), (2, 3)]:
        mask[r, c] = True
    out = erode(mask, DISK1)
    assert out.sum() == 1 and out[2, 2]


def test_erode_full_mask_leaves_border_band():
    mask = np.ones((6, 6), bool)
    out = erode(mask, DISK1)
    expect = np.zeros((6, 6), bool)
    expect[1:5, 1:5] = True
    assert np.array_equal(out, expect)


@settings(max_examples=80)
@given(mask_strategy(max_side=10))
def test_dilate_matches_translation_oracle(mask):
    for se in (SQUARE2, DISK1):
        assert np.array_equal(dilate(mask, se), oracles.dilate_ref(mask, se.offsets))


@settings(max_examples=80)
@given(mask_strategy(max_side=10))
def test_erode_matches_probe_oracle(mask):
    for se in (SQUARE2, DISK1):
        assert np.array_equal(erode(mask, se), oracles.erode_ref(mask, se.offsets))


@settings(max_examples=60)
@given(mask_strategy(max_side=10))
def test_erode_dilate_duality_on_interior(mask):
    # The boundary conventions differ on purpose (erosion is strict at the
    # border, dilation clips), so the complement duality
    # erode(m, se) == ~dilate(~m, reflected(se)) is asserted where every
    # probe stays in bounds.
    for se in (SQUARE2, DISK1):
        lhs = erode(mask, se)
        rhs = ~dilate(~mask, se.reflected())
        ext = se.extent
        h, w = mask.shape
        if h > 2 * ext and w > 2 * ext:
            interior = (slice(ext, h - ext), slice(ext, w - ext))
            assert np.array_equal(lhs[interior], rhs[interior])


def test_open_sieves_single_pixel():
    mask = np.zeros((5, 5), bool)
    mask[2, 2] = True
    assert not open_mask(mask, SQUARE2).any()


def test_open_keeps_2x2_block():
    mask = np.zeros((5, 5), bool)
    mask[1:3, 1:3] = True
    assert np.array_equal(open_mask(mask, SQUARE2), mask)


def test_close_fills_interior_hole():
    mask = np.zeros((7, 7), bool)
    mask[1:6, 1:6] = True
    mask[3, 3] = False
    out = close_mask(mask, DISK1)
    expect = np.zeros((7, 7), bool)
    expect[1:6, 1:6] = True
    assert np.array_equal(out, expect)


@settings(max_examples=60)
@given(mask_strategy(max_side=12))
def test_open_close_idempotent(mask):
    for se in (SQUARE2, DISK1):
        opened = open_mask(mask, se)
        closed = close_mask(mask, se)
        assert np.array_equal(open_mask(opened, se), opened)
        assert np.array_equal(close_mask(closed, se), closed)


@settings(max_examples=60)
@given(mask_strategy(max_side=12))
def test_anti_extensive_extensive(mask):
    for se in (SQUARE2, DISK1):
        opened = open_mask(mask, se)
        closed = close_mask(mask, se)
        assert not (opened & ~mask).any()  # open(m) <= m
        assert not (mask & ~closed).any()  # m <= close(m)


@settings(max_examples=40)
@given(mask_strategy(max_side=10), mask_strategy(max_side=10))
def test_monotone_in_mask(m1, m2):
    if m1.shape != m2.shape:
        return
    small = m1 & m2
    for se in (SQUARE2, DISK1):
        assert not (open_mask(small, se) & ~open_mask(m1, se)).any()
        assert not (close_mask(small, se) & ~close_mask(m1, se)).any()
