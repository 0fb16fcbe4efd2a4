"""Tendon actuation map, its Jacobian, and the closed-loop control laws.

Tendon j of segment i sits at angle (2j-1) pi / n_t around the bead
cross-section; bending shortens the tendons on the inside of the arc and
lengthens the antagonists by the same amount.
"""

from dataclasses import dataclass, field

import numpy as np

from . import backend
from .estimation import wrap_shortest
from .kinematics import config_vector, geometry_arrays

# 6x6 condition number above which the square Jacobian is flagged
# singular (phi columns vanish at theta = 0).
SINGULAR_CONDITION = 1e8


@dataclass(frozen=True)
class ControllerGains:
    """Control parameters shared by both feedback loops."""

    gamma: float = 0.3  # error reduction factor per tick
    tau_min: float = 2.0  # minimum admissible cable tension, N
    alpha: float = 0.002  # retension gain, m of payout per N of deficit
    tick_period: float = 0.05  # control period, s
    dl_max: float = 0.005  # per-tick payout change limit, m

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must be in (0, 1]")
        if self.tau_min <= 0.0 or self.alpha <= 0.0:
            raise ValueError("tau_min and alpha must be positive")
        if self.tick_period <= 0.0 or self.dl_max <= 0.0:
            raise ValueError("tick_period and dl_max must be positive")


@dataclass(frozen=True)
class TendonLengths:
    """Geometric tendon path lengths, (n_segments, n_tendons), meters."""

    lengths: np.ndarray


@dataclass(frozen=True)
class TendonCommand:
    """Per-tick payout changes, positive = pay out (lengthen)."""

    deltas: np.ndarray

    @classmethod
    def zero(cls, n_segments=3, n_tendons=4):
        return cls(np.zeros((n_segments, n_tendons)))


@dataclass(frozen=True)
class TensionReadings:
    """Measured cable tensions, newtons (load cells cannot read < 0)."""

    tensions: np.ndarray


@dataclass(frozen=True)
class TendonJacobian:
    """Sensitivity of tendon lengths to the configuration.

    ``full`` is the complete (n*n_t, 2n) map used for command fan-out.
    ``square`` keeps tendons 1 and 2 of each segment, the adjacent pair
    spanning both bending directions; the remaining tendons are their
    exact antagonists, so no information is lost.
    """

    full: np.ndarray
    square: np.ndarray
    condition: float
    singular: bool


def tendon_lengths(q, geometry):
    qv = config_vector(q)
    lengths, radii, n_t = geometry_arrays(geometry)
    return TendonLengths(backend.kernels().tendon_lengths(qv, lengths, radii, n_t))


def tendon_jacobian(q, geometry):
    qv = config_vector(q)
    lengths, radii, n_t = geometry_arrays(geometry)
    full = backend.kernels().tendon_jacobian(qv, lengths, radii, n_t)
    rows = [i * n_t + j for i in range(lengths.shape[0]) for j in (0, 1)]
    square = full[rows, :]
    condition = float(np.linalg.cond(square))
    return TendonJacobian(
        full, square, condition, bool(condition > SINGULAR_CONDITION)
    )


def configuration_error(q, q_d):
    """Componentwise q_d - q with bending-plane errors wrapped shortest."""
    dq = config_vector(q_d) - config_vector(q)
    for i in range(0, dq.shape[0], 2):
        dq[i] = wrap_shortest(dq[i])
    return dq


def config_space_step(q, q_d, gains, geometry):
    """One tick of the configuration-space law: dl = gamma (J dq).

    The full sensitivity fans the correction out to all tendons; at
    theta = 0 the phi column vanishes so the command degrades to a
    curvature-only correction (phi is gauge there). The result is
    rate-limited to ``gains.dl_max`` per tendon.
    """
    qv = config_vector(q)
    dq = configuration_error(qv, q_d)
    jac = tendon_jacobian(qv, geometry)
    n_t = jac.full.shape[0] // (qv.shape[0] // 2)
    dl = gains.gamma * (jac.full @ dq)
    dl = np.clip(dl, -gains.dl_max, gains.dl_max)
    return TendonCommand(dl.reshape(-1, n_t))


def supervise_tension(cmd, readings, gains):
    """Retrospective slack correction on top of a posture command.

    Every tendon measured strictly below tau_min gets an extra payout
    reduction proportional to the deficit (reeling in re-tensions the
    cable); all other tendons pass through untouched. The clip keeps the
    per-tick rate invariant intact.
    """
    tau = readings.tensions
    deltas = cmd.deltas.copy()
    slack = tau < gains.tau_min
    deltas[slack] -= gains.alpha * (gains.tau_min - tau[slack])
    np.clip(deltas, -gains.dl_max, gains.dl_max, out=deltas)
    return TendonCommand(deltas)
