"""Independent reference computations the tests check the library against.

Everything here is deliberately built on different machinery than the
package (scipy rotations, quadrature, discrete chains, symbolic math) so
a shared bug cannot hide.
"""

import numpy as np
from scipy.integrate import quad
from scipy.spatial.transform import Rotation


def arc_translation_quadrature(phi, theta, length):
    """Chord of a constant-curvature arc by integrating its tangent.

    The unit tangent at arc length s is the initial tangent [0,0,1]
    rotated by theta*s/L about the bending axis; integrate component-wise.
    """
    axis = np.array([-np.sin(phi), np.cos(phi), 0.0])

    def tangent(s, comp):
        rot = Rotation.from_rotvec(axis * (theta * s / length))
        return rot.apply([0.0, 0.0, 1.0])[comp]

    return np.array(
        [quad(tangent, 0.0, length, args=(c,), epsabs=1e-12)[0] for c in range(3)]
    )


def rotation_axis_angle(phi, theta):
    """Segment end orientation as a rotation of theta about the bending axis."""
    axis = np.array([-np.sin(phi), np.cos(phi), 0.0])
    return Rotation.from_rotvec(axis * theta).as_matrix()


def bead_chain_pose(q, lengths, n_beads=16):
    """Discrete-chain approximation: n straight links per segment.

    Each link is sandwiched between two half-angle rotations about the
    segment bending axis (midpoint splitting of the arc).
    """
    pos = np.zeros(3)
    rot = np.eye(3)
    for i, length in enumerate(lengths):
        phi, theta = q[2 * i], q[2 * i + 1]
        axis = np.array([-np.sin(phi), np.cos(phi), 0.0])
        half = Rotation.from_rotvec(axis * (theta / (2.0 * n_beads))).as_matrix()
        link = np.array([0.0, 0.0, length / n_beads])
        for _ in range(n_beads):
            rot = rot @ half
            pos = pos + rot @ link
            rot = rot @ half
    return pos, rot


def quat_of_matrix(rot):
    """scipy quaternion in [x, y, z, w] wire order, w >= 0."""
    quat = Rotation.from_matrix(rot).as_quat()
    return quat if quat[3] >= 0 else -quat


def compose_quats(a, b):
    """scipy quaternion product (same rotation-composition order)."""
    return (Rotation.from_quat(a) * Rotation.from_quat(b)).as_quat()


def fd_matrix(func, x, h):
    """Generic central-difference Jacobian of a vector function."""
    x = np.asarray(x, dtype=float)
    cols = []
    for k in range(x.shape[0]):
        hi = x.copy()
        lo = x.copy()
        hi[k] += h
        lo[k] -= h
        cols.append((np.asarray(func(hi)) - np.asarray(func(lo))) / (2.0 * h))
    return np.stack(cols, axis=-1)


def sin_window_rms(t0, dt, count):
    """Closed form of sqrt(mean(sin(t_k)^2)) over t_k = t0 + k dt.

    Uses sum sin^2(a+kd) = N/2 - sin(Nd)/(2 sin d) * cos(2a + (N-1)d).
    """
    if count <= 0:
        raise ValueError("empty window")
    a, d, n = 2.0 * t0, 2.0 * dt, count
    if abs(np.sin(d / 2.0)) < 1e-15:
        total = n * np.sin(t0) ** 2
    else:
        kernel = np.sin(n * d / 2.0) / np.sin(d / 2.0)
        total = n / 2.0 - 0.5 * kernel * np.cos(a + (n - 1) * d / 2.0)
    return float(np.sqrt(total / n))
