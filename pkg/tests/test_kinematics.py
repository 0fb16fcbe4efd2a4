import math

import numpy as np
import pytest

from conftest import random_canonical_q
from oracles import arc_translation_quadrature, bead_chain_pose, rotation_axis_angle
from softarm.errors import MismatchedChainLength
from softarm.kinematics import (
    Configuration,
    HomogeneousTransform,
    SegmentConfig,
    SegmentGeometry,
    canonical_vector,
    default_geometry,
    forward_kinematics,
    segment_rotation,
    segment_transform,
    segment_translation,
    tip_position,
    wrap_angle,
)


class TestSegmentTranslation:
    def test_straight_segment(self, kernel_backend):
        t = segment_translation(SegmentConfig(0.0, 0.0), 1.0 / 3.0)
        assert np.allclose(t, [0.0, 0.0, 1.0 / 3.0], atol=1e-15)

    def test_quarter_circle_matches_quadrature(self, kernel_backend):
        # oracle: integrate the arc tangent; closed form is 2/pi along x and z
        expected = arc_translation_quadrature(0.0, math.pi / 2, 1.0)
        assert np.allclose(expected, [2 / math.pi, 0.0, 2 / math.pi], atol=1e-10)
        t = segment_translation(SegmentConfig(0.0, math.pi / 2), 1.0)
        assert np.allclose(t, expected, atol=1e-9)

    def test_quarter_circle_rotated_plane(self, kernel_backend):
        expected = arc_translation_quadrature(math.pi / 2, math.pi / 2, 1.0)
        t = segment_translation(SegmentConfig(math.pi / 2, math.pi / 2), 1.0)
        assert np.allclose(t, expected, atol=1e-9)
        assert np.allclose(t, [0.0, 2 / math.pi, 2 / math.pi], atol=1e-9)

    def test_random_against_quadrature(self, kernel_backend, rng):
        for _ in range(20):
            phi = rng.uniform(-math.pi, math.pi)
            theta = rng.uniform(-math.pi / 2, math.pi / 2)
            t = segment_translation(SegmentConfig(phi, theta), 0.4)
            assert np.allclose(t, arc_translation_quadrature(phi, theta, 0.4), atol=1e-9)

    def test_singularity_continuity(self, kernel_backend):
        t = segment_translation(SegmentConfig(0.3, 1e-8), 0.5)
        assert np.linalg.norm(t - np.array([0.0, 0.0, 0.5])) < 1e-6

    def test_series_switch_is_seamless(self, kernel_backend):
        below = segment_translation(SegmentConfig(0.7, 0.999e-6), 0.5)
        above = segment_translation(SegmentConfig(0.7, 1.001e-6), 0.5)
        assert np.linalg.norm(above - below) < 1e-12

    def test_translation_stays_in_bending_plane(self, kernel_backend, rng):
        for _ in range(200):
            phi = rng.uniform(-math.pi, math.pi)
            theta = rng.uniform(-math.pi / 2, math.pi / 2)
            t = segment_translation(SegmentConfig(phi, theta), 1.0)
            normal = np.array([-math.sin(phi), math.cos(phi), 0.0])
            assert abs(t @ normal) < 1e-12


class TestSegmentRotation:
    def test_zero_curvature_is_identity(self, kernel_backend, rng):
        for phi in rng.uniform(-math.pi, math.pi, 5):
            assert np.allclose(segment_rotation(SegmentConfig(phi, 0.0)), np.eye(3), atol=1e-15)

    def test_matches_axis_angle_oracle(self, kernel_backend, rng):
        r = segment_rotation(SegmentConfig(0.0, math.pi / 2))
        # pure y-axis quarter turn
        assert np.allclose(r, rotation_axis_angle(0.0, math.pi / 2), atol=1e-12)
        assert np.allclose(r[:, 2], [1.0, 0.0, 0.0], atol=1e-12)
        for _ in range(50):
            phi = rng.uniform(-math.pi, math.pi)
            theta = rng.uniform(-math.pi, math.pi)
            assert np.allclose(
                segment_rotation(SegmentConfig(phi, theta)),
                rotation_axis_angle(phi, theta),
                atol=1e-12,
            )

    def test_orthonormal(self, kernel_backend):
        r = segment_rotation(SegmentConfig(math.pi / 4, 0.7))
        assert np.linalg.norm(r.T @ r - np.eye(3)) < 1e-12
        assert abs(np.linalg.det(r) - 1.0) < 1e-12

    def test_orthonormality_sweep(self, kernel_backend, rng):
        # 1e4 random pairs: Frobenius orthogonality and unit determinant
        worst_orth = worst_det = 0.0
        for _ in range(10_000):
            phi = rng.uniform(-math.pi, math.pi)
            theta = rng.uniform(-math.pi / 2, math.pi / 2)
            r = segment_rotation(SegmentConfig(phi, theta))
            worst_orth = max(worst_orth, np.linalg.norm(r.T @ r - np.eye(3)))
            worst_det = max(worst_det, abs(np.linalg.det(r) - 1.0))
        assert worst_orth < 1e-12
        assert worst_det < 1e-12

    def test_rotation_carries_initial_tangent_to_arc_tangent(self, kernel_backend, rng):
        for _ in range(100):
            phi = rng.uniform(-math.pi, math.pi)
            theta = rng.uniform(-math.pi / 2, math.pi / 2)
            r = segment_rotation(SegmentConfig(phi, theta))
            tangent = [
                math.cos(phi) * math.sin(theta),
                math.sin(phi) * math.sin(theta),
                math.cos(theta),
            ]
            assert np.allclose(r @ [0.0, 0.0, 1.0], tangent, atol=1e-12)


class TestSegmentTransform:
    def test_straight(self, kernel_backend):
        t = segment_transform(SegmentConfig(0.0, 0.0), 0.333)
        assert np.allclose(t.rotation, np.eye(3), atol=1e-15)
        assert np.allclose(t.translation, [0.0, 0.0, 0.333], atol=1e-15)
        assert np.allclose(t.matrix()[3], [0.0, 0.0, 0.0, 1.0])

    def test_quarter_circle(self, kernel_backend):
        t = segment_transform(SegmentConfig(0.0, math.pi / 2), 1.0)
        assert np.allclose(t.rotation, rotation_axis_angle(0.0, math.pi / 2), atol=1e-12)
        assert np.allclose(t.translation, [2 / math.pi, 0.0, 2 / math.pi], atol=1e-9)

    def test_inverse_roundtrip(self, kernel_backend):
        t = segment_transform(SegmentConfig(1.1, 0.8), 0.4)
        eye = (t @ t.inverse()).matrix()
        assert np.linalg.norm(eye - np.eye(4)) < 1e-12


class TestForwardKinematics:
    def test_straight_meter_arm(self, kernel_backend, geometry):
        tip, frames = forward_kinematics(np.zeros(6), geometry)
        assert np.allclose(tip.translation, [0.0, 0.0, 1.0], atol=1e-15)
        assert len(frames) == 3
        assert np.allclose(frames[0].translation, [0.0, 0.0, 1.0 / 3.0], atol=1e-15)

    def test_single_segment_equals_segment_transform(self, kernel_backend):
        geom = [SegmentGeometry(length=0.5)]
        cfg = SegmentConfig(0.9, 0.6)
        tip, frames = forward_kinematics(np.array([0.9, 0.6]), geom)
        direct = segment_transform(cfg, 0.5)
        assert np.allclose(tip.rotation, direct.rotation, atol=1e-15)
        assert np.allclose(tip.translation, direct.translation, atol=1e-15)
        assert len(frames) == 1

    def test_matches_discrete_bead_chain(self, kernel_backend, geometry, rng):
        lengths = np.array([g.length for g in geometry])
        for _ in range(25):
            q = random_canonical_q(rng)
            tip, _ = forward_kinematics(q, geometry)
            pos, rot = bead_chain_pose(q, lengths, n_beads=16)
            assert np.linalg.norm(tip.translation - pos) < 1e-3
            assert np.linalg.norm(tip.rotation - rot) < 1e-2

    def test_gauge_freedom_at_zero_curvature(self, kernel_backend, geometry, rng):
        base = random_canonical_q(rng)
        base[3] = 0.0  # straighten segment 2
        ref = tip_position(base, geometry)
        for phi in rng.uniform(-math.pi, math.pi, 10):
            q = base.copy()
            q[2] = phi
            assert np.allclose(tip_position(q, geometry), ref, atol=1e-14)

    def test_mismatched_chain(self, geometry):
        with pytest.raises(MismatchedChainLength):
            forward_kinematics(np.zeros(4), geometry)

    def test_tip_position_agrees_with_frames(self, kernel_backend, geometry, rng):
        q = random_canonical_q(rng)
        tip, _ = forward_kinematics(q, geometry)
        assert np.allclose(tip_position(q, geometry), tip.translation, atol=1e-15)


class TestTypes:
    def test_wrap_angle_range(self, rng):
        assert wrap_angle(math.pi) == pytest.approx(math.pi)
        assert wrap_angle(-math.pi) == pytest.approx(math.pi)
        assert wrap_angle(0.0) == 0.0
        for a in rng.uniform(-20, 20, 200):
            w = wrap_angle(a)
            assert -math.pi < w <= math.pi
            assert abs(math.remainder(w - a, 2 * math.pi)) < 1e-9

    def test_canonicalization(self):
        cfg = SegmentConfig(math.radians(-90.0), math.radians(-5.0)).canonical()
        assert cfg.theta == pytest.approx(math.radians(5.0))
        assert cfg.phi == pytest.approx(math.radians(90.0))

    def test_canonical_vector_clamps(self):
        q = canonical_vector(np.array([4.0, -0.2, 0.0, 2.0]), theta_max=math.pi / 2)
        assert 0.0 <= q[1] <= math.pi / 2
        assert q[3] == math.pi / 2
        assert -math.pi < q[0] <= math.pi

    def test_configuration_vector_roundtrip(self):
        q = np.array([0.1, 0.2, -0.3, 0.4, 1.5, 0.6])
        assert np.allclose(Configuration.from_vector(q).as_vector(), q)
        assert len(Configuration.from_vector(q)) == 3

    def test_geometry_validation(self):
        with pytest.raises(ValueError):
            SegmentGeometry(length=-1.0)
        with pytest.raises(ValueError):
            SegmentGeometry(tendon_count=2)

    def test_homogeneous_from_matrix(self):
        m = np.eye(4)
        m[:3, 3] = [1.0, 2.0, 3.0]
        t = HomogeneousTransform.from_matrix(m)
        assert np.allclose(t.translation, [1.0, 2.0, 3.0])
        assert np.allclose(t.matrix(), m)
