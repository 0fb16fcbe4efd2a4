"""Arc-parameter estimation from per-segment orientation quaternions.

Each segment tip carries an IMU reporting absolute orientation as
``[x, y, z, w]``. Relative orientations between consecutive tips are pure
constant-curvature rotations, from which (phi, theta) are recovered in
closed form.
"""

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import DegenerateQuaternion
from .kinematics import Configuration, wrap_angle

# Below this curvature the bending plane is unobservable; phi reports 0.
EPS_SINGULAR = 1e-6
# Inputs with smaller norm carry no orientation information.
MIN_QUAT_NORM = 1e-3


@dataclass(frozen=True)
class Quaternion:
    """Orientation sample in sensor wire order [x, y, z, w]."""

    x: float
    y: float
    z: float
    w: float

    @classmethod
    def identity(cls):
        return cls(0.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_array(cls, arr):
        return cls(float(arr[0]), float(arr[1]), float(arr[2]), float(arr[3]))

    def as_array(self):
        return np.array([self.x, self.y, self.z, self.w])

    def norm(self):
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2 + self.w**2))

    def normalized(self):
        n = self.norm()
        if n < MIN_QUAT_NORM:
            raise DegenerateQuaternion(f"quaternion norm {n:.2e} too small")
        return Quaternion(self.x / n, self.y / n, self.z / n, self.w / n)

    def conjugate(self):
        return Quaternion(-self.x, -self.y, -self.z, self.w)


@dataclass(frozen=True)
class SensorFrameSet:
    """One synchronized reading of the base and all tip IMUs."""

    base_orientation: Quaternion
    tip_orientations: tuple

    def __post_init__(self):
        object.__setattr__(self, "tip_orientations", tuple(self.tip_orientations))


def quat_multiply(a, b):
    """Hamilton product; composes rotations like matrix product a.R @ b.R."""
    return Quaternion.from_array(
        backend.kernels().quat_multiply(a.as_array(), b.as_array())
    )


def quat_from_rotation(rot):
    """Unit quaternion of a rotation matrix, canonicalized to w >= 0."""
    return Quaternion.from_array(backend.kernels().quat_from_matrix(rot))


def relative_orientation(tip, parent):
    """Orientation of ``tip`` expressed in the ``parent`` frame.

    Both inputs are normalized first; the result is canonicalized to
    w >= 0 so the quaternion double cover cannot flip the bending plane.
    """
    tip = tip.normalized()
    parent = parent.normalized()
    rel = quat_multiply(parent.conjugate(), tip)
    if rel.w < 0.0:
        rel = Quaternion(-rel.x, -rel.y, -rel.z, -rel.w)
    return rel


def arc_parameters_from_quaternion(quat, eps=EPS_SINGULAR):
    """Recover (phi, theta) from a single segment rotation.

    theta comes from the tilt of the segment z-axis and is always in
    [0, pi]; the argument of the arccos is clamped so numerical overshoot
    cannot raise. Both extracted angles are even in the quaternion sign.
    """
    from .kinematics import SegmentConfig

    phi, theta = backend.kernels().arc_from_quat(quat.as_array(), eps)
    return SegmentConfig(phi, theta)


def estimate_configuration(frames, eps=EPS_SINGULAR):
    """Arc parameters of every segment from one sensor frame set.

    Segment i uses the orientation of tip i relative to tip i-1 (the
    first segment relative to the base sensor).
    """
    parent = frames.base_orientation
    segments = []
    for i, tip in enumerate(frames.tip_orientations):
        try:
            rel = relative_orientation(tip, parent)
        except DegenerateQuaternion as exc:
            raise DegenerateQuaternion(f"segment {i}: {exc}") from exc
        segments.append(arc_parameters_from_quaternion(rel, eps))
        parent = tip
    return Configuration(tuple(segments))


def wrap_shortest(delta_phi):
    """Wrap a bending-plane error into (-pi, pi] (shortest way round)."""
    return wrap_angle(delta_phi)


def add_quaternion_noise(quat, sigma, rng):
    """Sensor noise model: additive Gaussian per component, renormalized."""
    arr = quat.as_array() + rng.normal(0.0, sigma, size=4)
    n = float(np.linalg.norm(arr))
    if n < MIN_QUAT_NORM:
        raise DegenerateQuaternion("noise collapsed the quaternion")
    return Quaternion.from_array(arr / n)
