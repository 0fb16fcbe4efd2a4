# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``softarm._kernels_py`` (same surface, same math)."""

from libc.math cimport acos, atan2, cos, fabs, fmod, sin, sqrt

import numpy as np

cdef double PI = 3.141592653589793238462643383279502884
cdef double _EPS_THETA = 1e-6

EPS_THETA = _EPS_THETA


cdef inline void _arc_coeffs(double theta, double* a, double* b) noexcept nogil:
    cdef double t2, h
    if fabs(theta) < _EPS_THETA:
        t2 = theta * theta
        a[0] = 0.5 * theta * (1.0 - t2 / 12.0)
        b[0] = 1.0 - t2 / 6.0
    else:
        h = sin(0.5 * theta)
        a[0] = 2.0 * h * h / theta
        b[0] = sin(theta) / theta


cdef inline void _trans(double phi, double theta, double length, double* t) noexcept nogil:
    cdef double a, b
    _arc_coeffs(theta, &a, &b)
    t[0] = length * cos(phi) * a
    t[1] = length * sin(phi) * a
    t[2] = length * b


cdef inline void _rot(double phi, double theta, double* r) noexcept nogil:
    cdef double cp = cos(phi), sp = sin(phi)
    cdef double ct = cos(theta), st = sin(theta)
    r[0] = cp * cp * (ct - 1.0) + 1.0
    r[1] = sp * cp * (ct - 1.0)
    r[2] = cp * st
    r[3] = sp * cp * (ct - 1.0)
    r[4] = cp * cp * (1.0 - ct) + ct
    r[5] = sp * st
    r[6] = -cp * st
    r[7] = -sp * st
    r[8] = ct


def segment_translation(double phi, double theta, double length):
    """Chord vector of one constant-curvature arc, base frame."""
    out = np.empty(3)
    cdef double[::1] v = out
    _trans(phi, theta, length, &v[0])
    return out


def segment_rotation(double phi, double theta):
    """End-frame orientation of one arc: Rz(phi) Ry(theta) Rz(-phi)."""
    out = np.empty((3, 3))
    cdef double[:, ::1] v = out
    _rot(phi, theta, &v[0, 0])
    return out


cdef inline void _mat3_mul(double* a, double* b, double* out) noexcept nogil:
    cdef int i, j, k
    for i in range(3):
        for j in range(3):
            out[3 * i + j] = 0.0
            for k in range(3):
                out[3 * i + j] += a[3 * i + k] * b[3 * k + j]


def chain_frames(double[::1] q, double[::1] lengths):
    """Cumulative base-to-segment-end transforms, shape (n, 4, 4)."""
    cdef Py_ssize_t n = lengths.shape[0]
    out = np.empty((n, 4, 4))
    cdef double[:, :, ::1] v = out
    cdef double rot[9]
    cdef double seg_r[9]
    cdef double tmp[9]
    cdef double seg_t[3]
    cdef double pos[3]
    cdef Py_ssize_t i, a
    for a in range(9):
        rot[a] = 0.0
    rot[0] = rot[4] = rot[8] = 1.0
    pos[0] = pos[1] = pos[2] = 0.0
    for i in range(n):
        _rot(q[2 * i], q[2 * i + 1], seg_r)
        _trans(q[2 * i], q[2 * i + 1], lengths[i], seg_t)
        pos[0] += rot[0] * seg_t[0] + rot[1] * seg_t[1] + rot[2] * seg_t[2]
        pos[1] += rot[3] * seg_t[0] + rot[4] * seg_t[1] + rot[5] * seg_t[2]
        pos[2] += rot[6] * seg_t[0] + rot[7] * seg_t[1] + rot[8] * seg_t[2]
        _mat3_mul(rot, seg_r, tmp)
        for a in range(9):
            rot[a] = tmp[a]
        for a in range(3):
            v[i, a, 0] = rot[3 * a]
            v[i, a, 1] = rot[3 * a + 1]
            v[i, a, 2] = rot[3 * a + 2]
            v[i, a, 3] = pos[a]
            v[i, 3, a] = 0.0
        v[i, 3, 3] = 1.0
    return out


cdef void _tip(double* q, double* lengths, Py_ssize_t n, double* pos) noexcept nogil:
    cdef double rot[9]
    cdef double seg_r[9]
    cdef double tmp[9]
    cdef double seg_t[3]
    cdef Py_ssize_t i, a
    for a in range(9):
        rot[a] = 0.0
    rot[0] = rot[4] = rot[8] = 1.0
    pos[0] = pos[1] = pos[2] = 0.0
    for i in range(n):
        _trans(q[2 * i], q[2 * i + 1], lengths[i], seg_t)
        pos[0] += rot[0] * seg_t[0] + rot[1] * seg_t[1] + rot[2] * seg_t[2]
        pos[1] += rot[3] * seg_t[0] + rot[4] * seg_t[1] + rot[5] * seg_t[2]
        pos[2] += rot[6] * seg_t[0] + rot[7] * seg_t[1] + rot[8] * seg_t[2]
        _rot(q[2 * i], q[2 * i + 1], seg_r)
        _mat3_mul(rot, seg_r, tmp)
        for a in range(9):
            rot[a] = tmp[a]


def tip_position(double[::1] q, double[::1] lengths):
    """End-effector position only (cheaper than chain_frames)."""
    out = np.empty(3)
    cdef double[::1] v = out
    _tip(&q[0], &lengths[0], lengths.shape[0], &v[0])
    return out


def tendon_lengths(double[::1] q, double[::1] lengths, double[::1] radii, int n_tendons):
    """Tendon path lengths, shape (n_segments, n_tendons)."""
    cdef Py_ssize_t n = lengths.shape[0]
    out = np.empty((n, n_tendons))
    cdef double[:, ::1] v = out
    cdef double backbone = 0.0
    cdef double phi, theta, c
    cdef Py_ssize_t i, j
    for i in range(n):
        backbone += lengths[i]
        phi = q[2 * i]
        theta = q[2 * i + 1]
        for j in range(n_tendons):
            c = (2 * j + 1) * PI / n_tendons
            v[i, j] = backbone - radii[i] * theta * cos(c - phi)
    return out


def tendon_jacobian(double[::1] q, double[::1] lengths, double[::1] radii, int n_tendons):
    """Sensitivity of every tendon length to q, shape (n*n_t, 2n)."""
    cdef Py_ssize_t n = lengths.shape[0]
    out = np.zeros((n * n_tendons, 2 * n))
    cdef double[:, ::1] v = out
    cdef double phi, theta, c
    cdef Py_ssize_t i, j, row
    for i in range(n):
        phi = q[2 * i]
        theta = q[2 * i + 1]
        for j in range(n_tendons):
            c = (2 * j + 1) * PI / n_tendons
            row = i * n_tendons + j
            v[row, 2 * i] = -radii[i] * theta * sin(c - phi)
            v[row, 2 * i + 1] = -radii[i] * cos(c - phi)
    return out


def quat_from_matrix(double[:, :] r):
    """Unit quaternion [x, y, z, w] of a rotation matrix, w >= 0."""
    cdef double tr = r[0, 0] + r[1, 1] + r[2, 2]
    cdef double s, w, x, y, z, norm
    if tr > 0.0:
        s = sqrt(tr + 1.0) * 2.0
        w = 0.25 * s
        x = (r[2, 1] - r[1, 2]) / s
        y = (r[0, 2] - r[2, 0]) / s
        z = (r[1, 0] - r[0, 1]) / s
    elif r[0, 0] >= r[1, 1] and r[0, 0] >= r[2, 2]:
        s = sqrt(1.0 + r[0, 0] - r[1, 1] - r[2, 2]) * 2.0
        w = (r[2, 1] - r[1, 2]) / s
        x = 0.25 * s
        y = (r[0, 1] + r[1, 0]) / s
        z = (r[0, 2] + r[2, 0]) / s
    elif r[1, 1] >= r[2, 2]:
        s = sqrt(1.0 + r[1, 1] - r[0, 0] - r[2, 2]) * 2.0
        w = (r[0, 2] - r[2, 0]) / s
        x = (r[0, 1] + r[1, 0]) / s
        y = 0.25 * s
        z = (r[1, 2] + r[2, 1]) / s
    else:
        s = sqrt(1.0 + r[2, 2] - r[0, 0] - r[1, 1]) * 2.0
        w = (r[1, 0] - r[0, 1]) / s
        x = (r[0, 2] + r[2, 0]) / s
        y = (r[1, 2] + r[2, 1]) / s
        z = 0.25 * s
    norm = sqrt(x * x + y * y + z * z + w * w)
    x /= norm
    y /= norm
    z /= norm
    w /= norm
    if w < 0.0:
        x, y, z, w = -x, -y, -z, -w
    out = np.empty(4)
    cdef double[::1] v = out
    v[0] = x
    v[1] = y
    v[2] = z
    v[3] = w
    return out


cdef inline double _wrap(double a) noexcept nogil:
    cdef double m = fmod(a + PI, 2.0 * PI)
    if m <= 0.0:
        m += 2.0 * PI
    return m - PI


def arc_from_quat(double[::1] quat, double eps):
    """Bending-plane and curvature angles of a segment quaternion.

    See the pure twin for the convention notes; below ``eps`` the
    bending plane is unobservable and phi reports 0.
    """
    cdef double x = quat[0], y = quat[1], z = quat[2], w = quat[3]
    cdef double c = 2.0 * w * w - 1.0 + 2.0 * z * z
    if c > 1.0:
        c = 1.0
    elif c < -1.0:
        c = -1.0
    cdef double theta = acos(c)
    if theta < eps:
        return 0.0, theta
    cdef double phi = _wrap(-(atan2(x * z - w * y, y * z + w * x) + 0.5 * PI))
    return phi, theta


def quat_multiply(double[::1] a, double[::1] b):
    """Hamilton product in [x, y, z, w] layout."""
    out = np.empty(4)
    cdef double[::1] v = out
    v[0] = a[3] * b[0] + a[0] * b[3] + a[1] * b[2] - a[2] * b[1]
    v[1] = a[3] * b[1] - a[0] * b[2] + a[1] * b[3] + a[2] * b[0]
    v[2] = a[3] * b[2] + a[0] * b[1] - a[1] * b[0] + a[2] * b[3]
    v[3] = a[3] * b[3] - a[0] * b[0] - a[1] * b[1] - a[2] * b[2]
    return out


def position_jacobian(double[::1] q, double[::1] lengths, double h):
    """Central-difference sensitivity of the tip position, shape (3, 2n)."""
    cdef Py_ssize_t m = q.shape[0]
    cdef Py_ssize_t n = lengths.shape[0]
    out = np.empty((3, m))
    work_arr = np.empty(m)
    cdef double[:, ::1] v = out
    cdef double[::1] work = work_arr
    cdef double hi[3]
    cdef double lo[3]
    cdef double qk
    cdef Py_ssize_t k, a
    for k in range(m):
        work[k] = q[k]
    for k in range(m):
        qk = work[k]
        work[k] = qk + h
        _tip(&work[0], &lengths[0], n, hi)
        work[k] = qk - h
        _tip(&work[0], &lengths[0], n, lo)
        work[k] = qk
        for a in range(3):
            v[a, k] = (hi[a] - lo[a]) / (2.0 * h)
    return out
