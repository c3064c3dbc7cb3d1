import numpy as np
import pytest

from memvos.errors import DimensionMismatchError
from memvos.memory import MemoryConfig
from memvos.pipeline import (
    EncoderConfig,
    decode_mask,
    encode_value,
    propagate,
    toy_encode,
)
from memvos.synthetic import identical_bands, palindromic_square, translating_square
from memvos.tensors import ValueMap


def gray(h, w, level=128):
    return np.full((h, w, 3), level, dtype=np.uint8)


class TestToyEncode:
    def test_uniform_frame_channels(self):
        key = toy_encode(gray(32, 48, 128))
        assert key.channels == 6
        assert key.grid == (4, 6)
        np.testing.assert_allclose(key.data[0], 128 / 255, atol=1e-6)
        assert np.all(key.data[3] == 0.0)               # no gradient anywhere
        assert np.all(np.diff(key.data[4], axis=1) > 0)  # x position rises
        assert np.all(np.diff(key.data[5], axis=0) > 0)  # y position rises

    def test_deterministic(self, rng):
        frame = rng.integers(0, 256, size=(40, 40, 3)).astype(np.uint8)
        assert np.array_equal(toy_encode(frame).data, toy_encode(frame).data)

    def test_brightness_shift_moves_rgb_only(self, rng):
        frame = rng.integers(20, 180, size=(32, 40, 3)).astype(np.uint8)
        shifted = (frame.astype(np.int64) + 51).astype(np.uint8)  # +0.2 full scale
        base = toy_encode(frame)
        moved = toy_encode(shifted)
        np.testing.assert_allclose(
            moved.data[:3] - base.data[:3], 0.2, atol=1e-6
        )
        assert np.array_equal(moved.data[4:], base.data[4:])

    def test_non_divisible_stride_pads(self):
        key = toy_encode(gray(33, 41), EncoderConfig(stride=8))
        assert key.grid == (5, 6)

    def test_position_weight(self):
        key = toy_encode(gray(16, 16), EncoderConfig(position_weight=0.0))
        assert np.all(key.data[4:] == 0.0)

    def test_bad_frame(self):
        with pytest.raises(ValueError):
            toy_encode(np.zeros((4, 4, 3), dtype=np.float32))
        with pytest.raises(DimensionMismatchError):
            toy_encode(np.zeros((4, 4), dtype=np.uint8))


class TestEncodeValue:
    def test_all_background(self):
        val = encode_value(np.zeros((16, 16), dtype=np.int32), 2, 2, 2)
        assert np.all(val.data[0] == 1.0)
        assert np.all(val.data[1:] == 0.0)

    def test_half_half(self):
        mask = np.zeros((2, 2), dtype=np.int32)
        mask[0] = 1
        mask[1] = 2
        val = encode_value(mask, 2, 1, 1)
        np.testing.assert_allclose(val.data.ravel(), [0.0, 0.5, 0.5], atol=1e-12)

    def test_partition_of_unity(self, rng):
        mask = rng.integers(0, 4, size=(33, 29)).astype(np.int32)
        val = encode_value(mask, 3, 5, 4)
        np.testing.assert_allclose(val.data.sum(axis=0), 1.0, atol=1e-9)

    def test_label_above_count(self):
        with pytest.raises(ValueError):
            encode_value(np.full((4, 4), 3, dtype=np.int32), 2, 2, 2)


class TestDecodeMask:
    def test_one_hot_roundtrip(self, rng):
        labels = rng.integers(0, 3, size=(4, 4)).astype(np.int32)
        planes = np.stack([(labels == o).astype(float) for o in range(3)])
        out = decode_mask(ValueMap(planes), 16, 16)
        assert out.shape == (16, 16)
        assert np.array_equal(out[::4, ::4], labels)

    def test_argmax_and_tie(self):
        planes = np.array([[[0.4]], [[0.6]]])
        assert decode_mask(ValueMap(planes), 1, 1)[0, 0] == 1
        tie = np.array([[[0.5]], [[0.5]]])
        assert decode_mask(ValueMap(tie), 1, 1)[0, 0] == 0

    def test_encode_decode_lossless_when_aligned(self, rng):
        mask = np.zeros((32, 32), dtype=np.int32)
        mask[8:24, 16:32] = 1
        mask[0:8, 0:16] = 2
        val = encode_value(mask, 2, 4, 4)
        assert np.array_equal(decode_mask(val, 32, 32), mask)


class TestPropagate:
    def test_identical_frames_reproduce_annotation(self):
        frames, mask = identical_bands(6)
        result = propagate(frames, {0: mask})
        for out in result.masks:
            assert np.array_equal(out, mask)

    def test_annotated_frames_emit_ground_truth(self):
        frames, gts = translating_square(12)
        result = propagate(frames, {0: gts[0], 7: gts[7]})
        assert np.array_equal(result.masks[0], gts[0])
        assert np.array_equal(result.masks[7], gts[7])

    def test_palindrome_symmetry_with_frozen_memory(self):
        frames, gts = palindromic_square(21)
        center = 10
        result = propagate(
            frames, {center: gts[center]},
            mem_cfg=MemoryConfig(temporary_memory_enabled=False),
        )
        for delta in range(1, center + 1):
            assert np.array_equal(result.masks[center - delta], result.masks[center + delta])

    def test_deterministic(self):
        frames, gts = translating_square(10)
        first = propagate(frames, {0: gts[0]})
        second = propagate(frames, {0: gts[0]})
        for a, b in zip(first.masks, second.masks):
            assert np.array_equal(a, b)
        for a, b in zip(first.keys, second.keys):
            assert np.array_equal(a.data, b.data)

    def test_insertion_counting(self):
        frames, gts = translating_square(24)
        result = propagate(frames, {0: gts[0]})
        # 23 non-annotated frames, q=5 -> insertions at positions 0,5,10,15,20
        assert result.report.inserted == 5
        assert [b.frame for b in result.store.working] == [1, 6, 11, 16, 21]

    def test_augment_flag_grows_permanent(self):
        frames, gts = translating_square(4)
        plain = propagate(frames, {0: gts[0]})
        augmented = propagate(frames, {0: gts[0]}, augment=True)
        entries = plain.report.permanent_entries
        assert augmented.report.permanent_entries == 12 * entries
        assert augmented.report.permanent_blocks == 12

    def test_no_annotations(self):
        frames, _ = translating_square(4)
        with pytest.raises(ValueError):
            propagate(frames, {})

    def test_mismatched_annotation_size(self):
        frames, _ = translating_square(4)
        with pytest.raises(DimensionMismatchError):
            propagate(frames, {0: np.zeros((8, 8), dtype=np.int32)})

    def test_frozen_memory_never_inserts(self):
        frames, gts = translating_square(12)
        result = propagate(
            frames, {0: gts[0]}, mem_cfg=MemoryConfig(temporary_memory_enabled=False)
        )
        assert result.report.inserted == 0
        assert result.report.working_blocks == 0

    def test_precomputed_keys_replace_encoder(self):
        frames, gts = translating_square(8)
        baseline = propagate(frames, {0: gts[0]})
        ingested = propagate(
            frames, {0: gts[0]},
            precomputed_keys={i: k for i, k in enumerate(baseline.keys)},
        )
        for a, b in zip(baseline.masks, ingested.masks):
            assert np.array_equal(a, b)
        # swapping in another frame's key drags its content into the prediction
        warped = dict(enumerate(baseline.keys))
        warped[3] = baseline.keys[0]
        poked = propagate(frames, {0: gts[0]}, precomputed_keys=warped)
        assert not np.array_equal(poked.masks[3], baseline.masks[3])
        assert np.array_equal(poked.masks[3], gts[0])

    def test_precomputed_keys_reject_augment(self):
        frames, gts = translating_square(4)
        keys = propagate(frames, {0: gts[0]}).keys
        with pytest.raises(ValueError, match="augment"):
            propagate(frames, {0: gts[0]}, augment=True,
                      precomputed_keys={0: keys[0]})
