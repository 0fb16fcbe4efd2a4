"""Pure-Python (numpy) implementations of the numerical kernels.

Reference implementation of the hot-path math; ``softarm._core`` is the
compiled twin with the same surface. All angles are radians, all lengths
meters. Configuration vectors interleave per segment as
``[phi_1, theta_1, phi_2, theta_2, ...]``. None of these functions
canonicalize their inputs: they are plain math over raw angles so that
finite differencing may cross theta = 0.
"""

import math

import numpy as np

# Below this curvature angle the arc formulas switch to their series
# limits (the closed forms divide by theta).
EPS_THETA = 1e-6


def _arc_coeffs(theta):
    # a = (1 - cos t)/t computed slack-free via 2 sin^2(t/2)/t, b = sin t / t
    if abs(theta) < EPS_THETA:
        t2 = theta * theta
        return 0.5 * theta * (1.0 - t2 / 12.0), 1.0 - t2 / 6.0
    h = math.sin(0.5 * theta)
    return 2.0 * h * h / theta, math.sin(theta) / theta


def segment_translation(phi, theta, length):
    """Chord vector of one constant-curvature arc, base frame."""
    a, b = _arc_coeffs(theta)
    return np.array(
        [length * math.cos(phi) * a, length * math.sin(phi) * a, length * b]
    )


def segment_rotation(phi, theta):
    """End-frame orientation of one arc: Rz(phi) Ry(theta) Rz(-phi)."""
    cp, sp = math.cos(phi), math.sin(phi)
    ct, st = math.cos(theta), math.sin(theta)
    return np.array(
        [
            [cp * cp * (ct - 1.0) + 1.0, sp * cp * (ct - 1.0), cp * st],
            [sp * cp * (ct - 1.0), cp * cp * (1.0 - ct) + ct, sp * st],
            [-cp * st, -sp * st, ct],
        ]
    )


def chain_frames(q, lengths):
    """Cumulative base-to-segment-end transforms, shape (n, 4, 4)."""
    q = np.asarray(q, dtype=float)
    lengths = np.asarray(lengths, dtype=float)
    n = lengths.shape[0]
    out = np.empty((n, 4, 4))
    rot = np.eye(3)
    pos = np.zeros(3)
    for i in range(n):
        r = segment_rotation(q[2 * i], q[2 * i + 1])
        t = segment_translation(q[2 * i], q[2 * i + 1], lengths[i])
        pos = rot @ t + pos
        rot = rot @ r
        out[i, :3, :3] = rot
        out[i, :3, 3] = pos
        out[i, 3, :3] = 0.0
        out[i, 3, 3] = 1.0
    return out


def tip_position(q, lengths):
    """End-effector position only (cheaper than chain_frames)."""
    q = np.asarray(q, dtype=float)
    lengths = np.asarray(lengths, dtype=float)
    rot = np.eye(3)
    pos = np.zeros(3)
    for i in range(lengths.shape[0]):
        t = segment_translation(q[2 * i], q[2 * i + 1], lengths[i])
        pos = rot @ t + pos
        rot = rot @ segment_rotation(q[2 * i], q[2 * i + 1])
    return pos


def tendon_lengths(q, lengths, radii, n_tendons):
    """Tendon path lengths, shape (n_segments, n_tendons).

    Tendon j of segment i runs the full backbone up to that segment and
    deviates from it by -r theta cos((2j-1) pi / n_t - phi).
    """
    q = np.asarray(q, dtype=float)
    lengths = np.asarray(lengths, dtype=float)
    radii = np.asarray(radii, dtype=float)
    n = lengths.shape[0]
    out = np.empty((n, n_tendons))
    backbone = 0.0
    for i in range(n):
        backbone += lengths[i]
        phi, theta = q[2 * i], q[2 * i + 1]
        for j in range(n_tendons):
            c = (2 * j + 1) * math.pi / n_tendons
            out[i, j] = backbone - radii[i] * theta * math.cos(c - phi)
    return out


def tendon_jacobian(q, lengths, radii, n_tendons):
    """Sensitivity of every tendon length to q, shape (n*n_t, 2n)."""
    q = np.asarray(q, dtype=float)
    radii = np.asarray(radii, dtype=float)
    n = np.asarray(lengths, dtype=float).shape[0]
    out = np.zeros((n * n_tendons, 2 * n))
    for i in range(n):
        phi, theta = q[2 * i], q[2 * i + 1]
        for j in range(n_tendons):
            c = (2 * j + 1) * math.pi / n_tendons
            row = i * n_tendons + j
            out[row, 2 * i] = -radii[i] * theta * math.sin(c - phi)
            out[row, 2 * i + 1] = -radii[i] * math.cos(c - phi)
    return out


def quat_from_matrix(rot):
    """Unit quaternion [x, y, z, w] of a rotation matrix, w >= 0."""
    r = np.asarray(rot, dtype=float)
    tr = r[0, 0] + r[1, 1] + r[2, 2]
    if tr > 0.0:
        s = math.sqrt(tr + 1.0) * 2.0
        w = 0.25 * s
        x = (r[2, 1] - r[1, 2]) / s
        y = (r[0, 2] - r[2, 0]) / s
        z = (r[1, 0] - r[0, 1]) / s
    elif r[0, 0] >= r[1, 1] and r[0, 0] >= r[2, 2]:
        s = math.sqrt(1.0 + r[0, 0] - r[1, 1] - r[2, 2]) * 2.0
        w = (r[2, 1] - r[1, 2]) / s
        x = 0.25 * s
        y = (r[0, 1] + r[1, 0]) / s
        z = (r[0, 2] + r[2, 0]) / s
    elif r[1, 1] >= r[2, 2]:
        s = math.sqrt(1.0 + r[1, 1] - r[0, 0] - r[2, 2]) * 2.0
        w = (r[0, 2] - r[2, 0]) / s
        x = (r[0, 1] + r[1, 0]) / s
        y = 0.25 * s
        z = (r[1, 2] + r[2, 1]) / s
    else:
        s = math.sqrt(1.0 + r[2, 2] - r[0, 0] - r[1, 1]) * 2.0
        w = (r[1, 0] - r[0, 1]) / s
        x = (r[0, 2] + r[2, 0]) / s
        y = (r[1, 2] + r[2, 1]) / s
        z = 0.25 * s
    quat = np.array([x, y, z, w])
    quat /= math.sqrt(x * x + y * y + z * z + w * w)
    if quat[3] < 0.0:
        quat = -quat
    return quat


def _wrap(angle):
    m = math.fmod(angle + math.pi, 2.0 * math.pi)
    if m <= 0.0:
        m += 2.0 * math.pi
    return m - math.pi


def arc_from_quat(quat, eps):
    """Bending-plane and curvature angles of a segment quaternion.

    The curvature angle comes from the tilt of the segment z-axis and is
    always in [0, pi]; below ``eps`` the bending plane is unobservable and
    phi is reported as 0 by convention. The atan2 of the raw bilinears
    returns -(phi + pi/2) for this rotation convention, hence the fixed
    alignment constant.
    """
    x, y, z, w = float(quat[0]), float(quat[1]), float(quat[2]), float(quat[3])
    c = 2.0 * w * w - 1.0 + 2.0 * z * z
    theta = math.acos(min(1.0, max(-1.0, c)))
    if theta < eps:
        return 0.0, theta
    phi = _wrap(-(math.atan2(x * z - w * y, y * z + w * x) + 0.5 * math.pi))
    return phi, theta


def quat_multiply(a, b):
    """Hamilton product in [x, y, z, w] layout."""
    ax, ay, az, aw = float(a[0]), float(a[1]), float(a[2]), float(a[3])
    bx, by, bz, bw = float(b[0]), float(b[1]), float(b[2]), float(b[3])
    return np.array(
        [
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
            aw * bw - ax * bx - ay * by - az * bz,
        ]
    )


def position_jacobian(q, lengths, h):
    """Central-difference sensitivity of the tip position, shape (3, 2n)."""
    q = np.asarray(q, dtype=float)
    m = q.shape[0]
    out = np.empty((3, m))
    work = q.copy()
    for k in range(m):
        qk = q[k]
        work[k] = qk + h
        hi = tip_position(work, lengths)
        work[k] = qk - h
        lo = tip_position(work, lengths)
        work[k] = qk
        out[:, k] = (hi - lo) / (2.0 * h)
    return out
