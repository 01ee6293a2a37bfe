"""
Phase 2: Preprocessing Tests

Release detection, segmentation, time normalization, mirroring and the
chained per-pitch pipeline.
"""
import numpy as np
import pytest

from src.common.errors import SignalError
from src.dataset.models import N_FRAMES, Handedness, JointId
from src.dataset.synthetic import (
    SynthConfig,
    planted_release_frame,
    synthesize_raw_corpus,
    synthesize_raw_pitch,
)
from src.signal_prep.models import RawMotion
from src.signal_prep.preprocessing import (
    PrepOptions,
    detect_release,
    extract_segment,
    mirror,
    preprocess_pitch,
    resample_frames,
    time_normalize,
)

CLEAN = SynthConfig(n_pitchers=2, marker_noise_sd=0.0)


def _wrist_track(x: list[float], fs: float = 1.0) -> RawMotion:
    frames = np.zeros((len(x), 15, 3))
    frames[:, JointId.R_WRIST.position, 0] = x
    return RawMotion(frames=frames, sampling_rate=fs, handedness=Handedness.RIGHT)


def _pairwise(frame: np.ndarray) -> np.ndarray:
    diff = frame[:, None, :] - frame[None, :, :]
    return np.sort(np.linalg.norm(diff, axis=-1).reshape(-1))


@pytest.mark.phase2
class TestReleaseDetection:
    """Peak throwing-wrist speed"""

    def test_planted_release_found(self):
        """Verify release lands within two frames of the planted release"""
        pitch = synthesize_raw_pitch(CLEAN, seed=3)

        release = detect_release(pitch.raw)

        assert abs(release - pitch.release_frame) <= 2, (
            f"detected {release}, planted {pitch.release_frame}"
        )

    def test_interior_tie_preferred_over_boundary(self):
        """Verify a boundary frame tied with interior frames loses to the earliest interior one"""
        motion = _wrist_track([0, 2, 2, 2, 6, 6, 6])
        assert detect_release(motion) == 3

    def test_earliest_interior_tie(self):
        """Verify equal interior peaks resolve to the earliest frame"""
        motion = _wrist_track([0, 0, 0, 1, 2, 2, 2, 3, 4, 4, 4])
        assert detect_release(motion) == 3

    def test_motionless_wrist_rejected(self):
        """Verify a wrist that never moves raises SignalError"""
        with pytest.raises(SignalError):
            detect_release(_wrist_track([1.0] * 8))

    def test_too_few_frames_rejected(self):
        """Verify fewer than three frames raise SignalError"""
        with pytest.raises(SignalError):
            detect_release(_wrist_track([0.0, 1.0]))


@pytest.mark.phase2
class TestSegmentation:
    """Fixed window around release and normalization to 101 frames"""

    @pytest.fixture
    def capture(self, rng):
        return RawMotion(
            frames=rng.standard_normal((300, 15, 3)),
            sampling_rate=100.0,
            handedness=Handedness.RIGHT,
        )

    def test_segment_length(self, capture):
        """Verify 1.0 s before and 0.2 s after release are kept inclusively"""
        segment = extract_segment(capture, release=150)

        assert segment.n_frames == 121
        np.testing.assert_array_equal(segment.frames[0], capture.frames[50])
        np.testing.assert_array_equal(segment.frames[-1], capture.frames[170])

    def test_recording_starts_too_late(self, capture):
        """Verify a release too close to the start names the missing duration"""
        with pytest.raises(SignalError) as exc:
            extract_segment(capture, release=50)
        assert exc.value.context["side"] == "pre"
        assert exc.value.context["missing_seconds"] == pytest.approx(0.5)

    def test_recording_ends_too_early(self, capture):
        """Verify a release too close to the end names the missing duration"""
        with pytest.raises(SignalError) as exc:
            extract_segment(capture, release=290)
        assert exc.value.context["side"] == "post"
        assert exc.value.context["missing_seconds"] == pytest.approx(0.11)

    def test_normalization_keeps_endpoints(self, capture):
        """Verify resampling to 101 frames reproduces both endpoints exactly"""
        segment = extract_segment(capture, release=150)

        normalized = time_normalize(segment)

        assert normalized.matrix.shape == (N_FRAMES, 15, 3)
        np.testing.assert_array_equal(normalized.matrix[0], segment.frames[0])
        np.testing.assert_array_equal(normalized.matrix[-1], segment.frames[-1])
        assert normalized.release_fraction == pytest.approx(100 / 120)

    def test_resample_is_linear(self):
        """Verify resampling a linear ramp yields a linear ramp"""
        ramp = np.linspace(0.0, 1.0, 7).reshape(7, 1, 1)
        out = resample_frames(ramp, 11)
        np.testing.assert_allclose(out.reshape(-1), np.linspace(0.0, 1.0, 11))


@pytest.mark.phase2
class TestMirroring:
    """Sagittal reflection of left-handed captures"""

    @pytest.fixture
    def lefty(self, rng):
        return RawMotion(
            frames=rng.standard_normal((20, 15, 3)),
            sampling_rate=100.0,
            handedness=Handedness.LEFT,
        )

    def test_swaps_sides_and_negates_lateral_axis(self, lefty):
        """Verify the left wrist becomes the right wrist with x negated"""
        flipped = mirror(lefty)

        assert flipped.handedness == Handedness.RIGHT
        expected = lefty.frames[:, JointId.L_WRIST.position, :] * np.array([-1.0, 1.0, 1.0])
        np.testing.assert_array_equal(flipped.frames[:, JointId.R_WRIST.position, :], expected)
        np.testing.assert_array_equal(
            flipped.frames[:, JointId.HEAD.position, 1:], lefty.frames[:, JointId.HEAD.position, 1:]
        )

    def test_is_an_isometry(self, lefty):
        """Verify all inter-joint distances are preserved"""
        flipped = mirror(lefty)
        for t in (0, 9, 19):
            np.testing.assert_allclose(_pairwise(flipped.frames[t]), _pairwise(lefty.frames[t]))

    def test_twice_is_identity(self, lefty):
        """Verify mirroring back restores the capture"""
        restored = mirror(mirror(lefty), guard=False)
        np.testing.assert_array_equal(restored.frames, lefty.frames)
        assert restored.handedness == Handedness.LEFT

    def test_right_handed_input_guarded(self, lefty):
        """Verify mirroring a right-handed capture raises SignalError"""
        righty = lefty.model_copy(update={"handedness": Handedness.RIGHT})
        with pytest.raises(SignalError):
            mirror(righty)


@pytest.mark.phase2
class TestPreprocessPipeline:
    """filter -> release -> segment -> normalize -> mirror"""

    def test_right_handed_pitch(self):
        """Verify a synthetic capture becomes a 101-frame right-handed motion"""
        pitch = synthesize_raw_pitch(CLEAN, seed=5)

        normalized, log = preprocess_pitch(pitch.raw)

        assert normalized.matrix.shape == (N_FRAMES, 15, 3)
        assert normalized.handedness == Handedness.RIGHT
        assert not log.mirrored
        assert 5.0 <= log.cutoff <= 25.0
        assert log.segment_frames == 241
        assert log.release_fraction == pytest.approx(200 / 240)

    def test_fixed_cutoff_skips_residual_analysis(self):
        """Verify a fixed cutoff is applied verbatim and release stays on the planted frame"""
        pitch = synthesize_raw_pitch(CLEAN, seed=5)

        _, log = preprocess_pitch(pitch.raw, PrepOptions(fixed_cutoff=12.0))

        assert log.cutoff == 12.0
        assert log.noise_floor is None
        assert abs(log.release_frame - planted_release_frame(CLEAN.sampling_rate)) <= 2

    def test_left_hander_matches_right_hander(self):
        """Verify a mirrored left-handed capture prepares to the same motion"""
        right = synthesize_raw_pitch(CLEAN, seed=7, handedness=Handedness.RIGHT)
        left = synthesize_raw_pitch(CLEAN, seed=7, handedness=Handedness.LEFT)

        right_motion, right_log = preprocess_pitch(right.raw)
        left_motion, left_log = preprocess_pitch(left.raw)

        assert left_log.mirrored and not right_log.mirrored
        assert left_log.release_frame == right_log.release_frame
        assert left_motion.handedness == Handedness.RIGHT
        np.testing.assert_allclose(left_motion.matrix, right_motion.matrix, atol=1e-9)


@pytest.mark.phase2
@pytest.mark.slow
class TestReleaseAcrossCorpus:
    """Release detection over a whole raw synthetic corpus"""

    def test_release_within_two_frames(self):
        """Verify release lands within two frames of the plant on at least 95% of 200 pitches"""
        pitchers = synthesize_raw_corpus(SynthConfig(n_pitchers=40), seed=0)
        pitches = [p for pitcher in pitchers for p in pitcher]

        offsets = [detect_release(p.raw) - p.release_frame for p in pitches]

        assert len(pitches) == 200
        misses = [d for d in offsets if abs(d) > 2]
        assert len(misses) <= 10, f"{len(misses)} misses, offsets {sorted(misses)}"
