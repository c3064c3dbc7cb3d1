import numpy as np
import pytest

from memvos.augment import (
    DEFAULT_SPECS,
    EXTRA_SPECS,
    AugmentationSpec,
    augment_pair,
    augment_set,
    transform_mask,
)


@pytest.fixture
def square_pair():
    frame = np.zeros((96, 96, 3), dtype=np.uint8)
    frame[:] = (20, 30, 40)
    frame[28:68, 28:68] = (220, 120, 60)
    mask = np.zeros((96, 96), dtype=np.int32)
    mask[28:68, 28:68] = 1
    return frame, mask


def spec(kind):
    by_kind = {s.kind: s for s in DEFAULT_SPECS + EXTRA_SPECS}
    return by_kind[kind]


class TestSpecSet:
    def test_cardinality(self):
        assert len(DEFAULT_SPECS) == 11

    def test_geometric_split(self):
        geometric = [s for s in DEFAULT_SPECS if s.geometric]
        assert len(geometric) == 6
        assert {s.kind for s in geometric} == {
            "rotate+45", "rotate-45", "zoom0.5", "zoom1.5", "shear+20", "shear-20",
        }

    def test_symmetric_pairs_present(self):
        kinds = {s.kind for s in DEFAULT_SPECS}
        assert {"rotate+45", "rotate-45"} <= kinds
        assert {"shear+20", "shear-20"} <= kinds

    def test_extras_not_in_default(self):
        assert {s.kind for s in EXTRA_SPECS} == {
            "grayscale", "translate+100", "crop_mask_region",
        }
        assert not ({s.kind for s in EXTRA_SPECS} & {s.kind for s in DEFAULT_SPECS})


class TestPhotometric:
    @pytest.mark.parametrize("kind", [
        "brightness+", "brightness-", "posterize3", "sharpen", "gaussian_blur",
    ])
    def test_mask_untouched(self, square_pair, kind):
        frame, mask = square_pair
        _, out_mask = augment_pair(frame, mask, spec(kind))
        assert np.array_equal(out_mask, mask)

    def test_brightness_delta(self, square_pair):
        frame, mask = square_pair
        out, _ = augment_pair(frame, mask, spec("brightness+"))
        assert np.array_equal(out, np.clip(frame.astype(int) + 51, 0, 255))
        down, _ = augment_pair(frame, mask, spec("brightness-"))
        assert np.array_equal(down, np.clip(frame.astype(int) - 51, 0, 255))

    def test_posterize_three_bits(self, square_pair):
        frame, mask = square_pair
        out, _ = augment_pair(frame, mask, spec("posterize3"))
        assert np.array_equal(out, frame & 0b11100000)
        assert len(np.unique(out)) <= 8 * 3

    def test_blur_smooths(self, square_pair):
        frame, mask = square_pair
        out, _ = augment_pair(frame, mask, spec("gaussian_blur"))
        edge_var_before = np.var(np.diff(frame[:, :, 0].astype(int), axis=1))
        edge_var_after = np.var(np.diff(out[:, :, 0].astype(int), axis=1))
        assert edge_var_after < edge_var_before

    def test_sharpen_amplifies_edges(self, square_pair):
        frame, mask = square_pair
        out, _ = augment_pair(frame, mask, spec("sharpen"))
        assert int(np.abs(np.diff(out[48, :, 0].astype(int))).max()) >= int(
            np.abs(np.diff(frame[48, :, 0].astype(int))).max()
        )


class TestGeometric:
    def test_rotate_roundtrip_iou(self, square_pair):
        frame, mask = square_pair
        _, once = augment_pair(frame, mask, spec("rotate+45"))
        _, back = augment_pair(frame, once, spec("rotate-45"))
        inter = np.count_nonzero((mask > 0) & (back > 0))
        union = np.count_nonzero((mask > 0) | (back > 0))
        assert inter / union >= 0.95

    def test_zoom_out_halves_square(self, square_pair):
        frame, mask = square_pair
        _, zoomed = augment_pair(frame, mask, spec("zoom0.5"))
        rows = np.flatnonzero((zoomed > 0).any(axis=1))
        cols = np.flatnonzero((zoomed > 0).any(axis=0))
        # 40px square about the center becomes 20px, within a pixel
        assert abs((rows[-1] - rows[0] + 1) - 20) <= 1
        assert abs((cols[-1] - cols[0] + 1) - 20) <= 1
        center = (rows[0] + rows[-1]) / 2
        assert abs(center - 47.5) <= 1

    def test_zoom_in_grows_square(self, square_pair):
        frame, mask = square_pair
        _, zoomed = augment_pair(frame, mask, spec("zoom1.5"))
        rows = np.flatnonzero((zoomed > 0).any(axis=1))
        assert abs((rows[-1] - rows[0] + 1) - 60) <= 1

    def test_shear_moves_rows_oppositely(self, square_pair):
        frame, mask = square_pair
        _, pos = augment_pair(frame, mask, spec("shear+20"))
        _, neg = augment_pair(frame, mask, spec("shear-20"))
        top_pos = np.flatnonzero((pos[30] > 0))
        top_neg = np.flatnonzero((neg[30] > 0))
        assert top_pos.mean() != top_neg.mean()

    def test_canvas_preserved_and_background_filled(self, square_pair):
        frame, mask = square_pair
        for kind in ("rotate+45", "zoom1.5", "shear+20"):
            out_frame, out_mask = augment_pair(frame, mask, spec(kind))
            assert out_frame.shape == frame.shape
            assert out_mask.shape == mask.shape
            assert set(np.unique(out_mask)) <= {0, 1}

    def test_joint_equals_separate(self, square_pair):
        frame, mask = square_pair
        for s in DEFAULT_SPECS:
            if s.geometric:
                _, joint = augment_pair(frame, mask, s)
                separate = transform_mask(mask, s)
                assert np.array_equal(joint, separate), s.kind


class TestAugmentSet:
    def test_exactly_eleven(self, square_pair):
        assert len(augment_set(*square_pair)) == 11

    def test_all_background_stays_background(self):
        frame = np.full((32, 32, 3), 77, dtype=np.uint8)
        mask = np.zeros((32, 32), dtype=np.int32)
        for _, out_mask in augment_set(frame, mask):
            assert not out_mask.any()

    def test_deterministic(self, square_pair):
        first = augment_set(*square_pair)
        second = augment_set(*square_pair)
        for (f1, m1), (f2, m2) in zip(first, second):
            assert np.array_equal(f1, f2)
            assert np.array_equal(m1, m2)

    def test_extras_included_on_request(self, square_pair):
        assert len(augment_set(*square_pair, include_extras=True)) == 14

    def test_unknown_kind(self, square_pair):
        frame, mask = square_pair
        with pytest.raises(ValueError):
            augment_pair(frame, mask, AugmentationSpec("solarize", False))
