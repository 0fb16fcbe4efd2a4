"""Constant-curvature kinematics for a serial chain of bending segments.

Each segment bends as a circular arc described by a bending-plane angle
``phi`` (about the segment base z-axis) and a curvature angle ``theta``
(total arc angle). The canonical chart keeps ``theta >= 0`` and
``phi`` in (-pi, pi]; a negative curvature is the same arc bent in the
opposite half-plane, ``(phi, -theta) == (phi + pi, theta)``.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import MismatchedChainLength

# Series switch for the theta -> 0 singular limit of the arc formulas.
EPS_SINGULAR = 1e-6
# Rotation matrices produced here satisfy orthogonality to this tolerance.
ORTHONORMAL_TOL = 1e-12
# Mechanical curvature limit per segment unless configured otherwise.
DEFAULT_THETA_MAX = math.pi / 2


def wrap_angle(angle):
    """Wrap an angle into (-pi, pi]."""
    m = math.fmod(angle + math.pi, 2.0 * math.pi)
    if m <= 0.0:
        m += 2.0 * math.pi
    return m - math.pi


@dataclass(frozen=True)
class SegmentConfig:
    """Arc parameters (phi, theta) of one segment, radians."""

    phi: float
    theta: float

    def canonical(self):
        """Equivalent parameters with theta >= 0 and phi in (-pi, pi]."""
        phi, theta = self.phi, self.theta
        if theta < 0.0:
            phi, theta = phi + math.pi, -theta
        return SegmentConfig(wrap_angle(phi), theta)


@dataclass(frozen=True)
class SegmentGeometry:
    """Fixed geometry of one segment."""

    length: float = 1.0 / 3.0
    tendon_radius: float = 0.025
    tendon_count: int = 4

    def __post_init__(self):
        if self.length <= 0.0:
            raise ValueError("segment length must be positive")
        if self.tendon_radius <= 0.0:
            raise ValueError("tendon radius must be positive")
        if self.tendon_count < 3:
            raise ValueError("need at least 3 tendons per segment")


@dataclass(frozen=True)
class Configuration:
    """Ordered arc parameters of the whole chain."""

    segments: tuple

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    def __len__(self):
        return len(self.segments)

    @classmethod
    def from_vector(cls, q):
        q = np.asarray(q, dtype=float)
        if q.ndim != 1 or q.shape[0] % 2:
            raise ValueError("configuration vector must have even length")
        return cls(
            tuple(SegmentConfig(q[2 * i], q[2 * i + 1]) for i in range(q.shape[0] // 2))
        )

    def as_vector(self):
        out = np.empty(2 * len(self.segments))
        for i, seg in enumerate(self.segments):
            out[2 * i] = seg.phi
            out[2 * i + 1] = seg.theta
        return out

    def canonical(self):
        return Configuration(tuple(s.canonical() for s in self.segments))


def config_vector(q):
    """Accept a Configuration or a raw interleaved vector."""
    if isinstance(q, Configuration):
        return q.as_vector()
    return np.asarray(q, dtype=float)


def canonical_vector(q, theta_max=None):
    """Canonicalize an interleaved vector in place-free form.

    Optionally clamps curvature to a mechanical limit.
    """
    q = config_vector(q).copy()
    for i in range(q.shape[0] // 2):
        phi, theta = q[2 * i], q[2 * i + 1]
        if theta < 0.0:
            phi, theta = phi + math.pi, -theta
        if theta_max is not None and theta > theta_max:
            theta = theta_max
        q[2 * i] = wrap_angle(phi)
        q[2 * i + 1] = theta
    return q


def geometry_arrays(geometry):
    """Split a list of SegmentGeometry into kernel-friendly arrays."""
    lengths = np.array([g.length for g in geometry], dtype=float)
    radii = np.array([g.tendon_radius for g in geometry], dtype=float)
    counts = {g.tendon_count for g in geometry}
    if len(counts) != 1:
        raise ValueError("all segments must share the tendon count")
    return lengths, radii, counts.pop()


def default_geometry(n_segments=3, total_length=1.0):
    """Uniform chain geometry: n equal segments summing to total_length."""
    seg = SegmentGeometry(length=total_length / n_segments)
    return [seg] * n_segments


@dataclass(frozen=True)
class HomogeneousTransform:
    """Rigid transform between two frames."""

    rotation: np.ndarray
    translation: np.ndarray

    @classmethod
    def identity(cls):
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_matrix(cls, mat):
        mat = np.asarray(mat, dtype=float)
        return cls(mat[:3, :3].copy(), mat[:3, 3].copy())

    def matrix(self):
        out = np.eye(4)
        out[:3, :3] = self.rotation
        out[:3, 3] = self.translation
        return out

    def inverse(self):
        rt = self.rotation.T.copy()
        return HomogeneousTransform(rt, -(rt @ self.translation))

    def __matmul__(self, other):
        return HomogeneousTransform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )


def segment_translation(cfg, length):
    """Chord of the arc from the segment base to its end, meters.

    The closed form divides by theta; below EPS_SINGULAR the series limit
    is used so the straight posture is exact: (phi, 0) -> [0, 0, L].
    """
    return backend.kernels().segment_translation(cfg.phi, cfg.theta, length)


def segment_rotation(cfg):
    """Orientation of the segment end frame, Rz(phi) Ry(theta) Rz(-phi)."""
    return backend.kernels().segment_rotation(cfg.phi, cfg.theta)


def segment_transform(cfg, length):
    """Full rigid transform of one segment."""
    return HomogeneousTransform(
        segment_rotation(cfg), segment_translation(cfg, length)
    )


def forward_kinematics(q, geometry):
    """End-effector pose plus all intermediate cumulative frames.

    Returns ``(tip, frames)`` where ``frames[i]`` maps the base frame to
    the end of segment i and ``tip is frames[-1]``.
    """
    qv = config_vector(q)
    lengths, _, _ = geometry_arrays(geometry)
    if qv.shape[0] != 2 * lengths.shape[0]:
        raise MismatchedChainLength(
            f"{qv.shape[0] // 2} configured segments vs {lengths.shape[0]} geometric"
        )
    mats = backend.kernels().chain_frames(qv, lengths)
    frames = [HomogeneousTransform.from_matrix(m) for m in mats]
    return frames[-1], frames


def tip_position(q, geometry):
    """End-effector position only."""
    qv = config_vector(q)
    lengths, _, _ = geometry_arrays(geometry)
    if qv.shape[0] != 2 * lengths.shape[0]:
        raise MismatchedChainLength(
            f"{qv.shape[0] // 2} configured segments vs {lengths.shape[0]} geometric"
        )
    return backend.kernels().tip_position(qv, lengths)
