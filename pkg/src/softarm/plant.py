"""Quasi-static simulated manipulator.

Stands in for the physical arm: consumes tendon commands, produces
orientation quaternions and cable tensions, and injects disturbances.
Purely kinematic -- the actuated configuration relaxes toward the
commanded one with a first-order lag, and disturbances render as
configuration-space deflections.
"""

import abc
import math
from dataclasses import dataclass, replace

import numpy as np

from . import backend
from .actuation import TensionReadings
from .errors import InvalidSegment
from .estimation import Quaternion, SensorFrameSet, add_quaternion_noise
from .kinematics import canonical_vector, config_vector, geometry_arrays, wrap_angle

DEFAULT_LAG = 0.1  # s, first-order actuator response
DEFAULT_TENDON_STIFFNESS = 500.0  # N/m
DEFAULT_REST_TENSION = 4.0  # N
DEFAULT_POINT_LOAD_GAIN = 0.35  # rad of impulse per kg of poke

_KINDS = ("tip_load", "point_load", "step_offset")


@dataclass(frozen=True)
class DisturbanceSpec:
    """One scheduled disturbance.

    ``tip_load`` hangs a mass (kg) on the end effector for the window;
    ``point_load`` pokes the named segment once at start_tick (kg);
    ``step_offset`` holds a direct curvature offset (radians) on the
    named segment for the window.
    """

    kind: str
    magnitude: float
    start_tick: int
    end_tick: int
    segment_index: int = 0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown disturbance kind {self.kind!r}")
        if self.magnitude < 0.0:
            raise ValueError("disturbance magnitude must be >= 0")
        if self.start_tick >= self.end_tick:
            raise ValueError("start_tick must precede end_tick")


@dataclass(frozen=True)
class ComplianceModel:
    """Elastic stand-in for the arm's response to external loads."""

    deflection_gain: np.ndarray  # rad per kg*m of gravity moment, per segment
    point_load_gain: float = DEFAULT_POINT_LOAD_GAIN

    def __post_init__(self):
        gain = np.atleast_1d(np.asarray(self.deflection_gain, dtype=float))
        if np.any(gain < 0.0):
            raise ValueError("deflection gain must be >= 0")
        object.__setattr__(self, "deflection_gain", gain)


@dataclass(frozen=True)
class PlantState:
    """Ground-truth simulator state (immutable snapshot).

    ``q_base`` is the actuated configuration after lag; ``q_true`` adds
    the deflections of whatever disturbances are active. ``paid_lengths``
    tracks accumulated tendon payout for the elastic tension model.
    """

    q_true: np.ndarray
    q_cmd: np.ndarray
    q_base: np.ndarray
    paid_lengths: np.ndarray
    lag_constant: float
    tick: int
    disturbance: tuple = ()  # active (spec, q-offset) pairs
    theta_max: float = math.pi / 2


def initial_state(q0, geometry, lag_constant=DEFAULT_LAG, theta_max=math.pi / 2):
    """Plant at rest: actuators matched to the configuration, no slack."""
    q = canonical_vector(config_vector(q0), theta_max)
    lengths, radii, n_t = geometry_arrays(geometry)
    paid = backend.kernels().tendon_lengths(q, lengths, radii, n_t)
    return PlantState(
        q_true=q.copy(),
        q_cmd=q.copy(),
        q_base=q.copy(),
        paid_lengths=paid,
        lag_constant=lag_constant,
        tick=0,
        theta_max=theta_max,
    )


def _canon(q, theta_max):
    return canonical_vector(q, theta_max)


def _with_deflections(state, q_base):
    q = q_base.copy()
    for _, offset in state.disturbance:
        q = q + offset
    return _canon(q, state.theta_max)


def apply_command(state, cmd, geometry, gains):
    """Advance one tick: integrate the command, relax through the lag.

    The payout deltas convert to a configuration change by least-squares
    inversion of the tendon sensitivity at the current actuator target
    (rank-deficient columns at theta = 0 drop out of the solution). The
    physical configuration then relaxes toward the target by
    exp(-tick_period / lag_constant).
    """
    lengths, radii, n_t = geometry_arrays(geometry)
    kern = backend.kernels()
    deltas = cmd.deltas
    if np.any(deltas != 0.0):
        jac = kern.tendon_jacobian(state.q_cmd, lengths, radii, n_t)
        dq = np.linalg.lstsq(jac, deltas.ravel(), rcond=None)[0]
        q_cmd = _canon(state.q_cmd + dq, state.theta_max)
    else:
        q_cmd = state.q_cmd
    if state.lag_constant > 0.0:
        beta = math.exp(-gains.tick_period / state.lag_constant)
    else:
        beta = 0.0
    q_base = q_cmd.copy()
    for i in range(q_cmd.shape[0] // 2):
        q_base[2 * i] += beta * wrap_angle(state.q_base[2 * i] - q_cmd[2 * i])
        q_base[2 * i + 1] += beta * (state.q_base[2 * i + 1] - q_cmd[2 * i + 1])
    q_base = _canon(q_base, state.theta_max)
    new = replace(
        state,
        q_cmd=q_cmd,
        q_base=q_base,
        q_true=_with_deflections(state, q_base),
        paid_lengths=state.paid_lengths + deltas,
        tick=state.tick + 1,
    )
    return new


def tip_load_deflection(q, mass, compliance, geometry):
    """Static curvature deflections of a vertical tip load.

    The load bends each segment by gain * mass * (horizontal moment arm
    of the tip about the segment base), directed so the tip droops
    toward -z; segments whose curvature does not move the tip vertically
    are unaffected.
    """
    lengths, _, _ = geometry_arrays(geometry)
    kern = backend.kernels()
    qv = config_vector(q)
    n = lengths.shape[0]
    frames = kern.chain_frames(qv, lengths)
    tip = frames[-1, :3, 3]
    jac = kern.position_jacobian(qv, lengths, 1e-6)
    gains = np.broadcast_to(compliance.deflection_gain, (n,))
    offset = np.zeros(2 * n)
    for i in range(n):
        base = np.zeros(3) if i == 0 else frames[i - 1, :3, 3]
        arm = math.hypot(tip[0] - base[0], tip[1] - base[1])
        dz = jac[2, 2 * i + 1]
        direction = -math.copysign(1.0, dz) if abs(dz) > 1e-12 else 0.0
        offset[2 * i + 1] = gains[i] * mass * arm * direction
    return offset


def apply_disturbance(state, spec, compliance, geometry):
    """Activate, hold or retire one scheduled disturbance for this tick.

    Tip loads freeze their deflection at the attach posture; pokes shift
    both the arm and the actuator target once (the displacement is
    retained until the feedback loop pulls it back); step offsets hold a
    raw configuration offset for the window.
    """
    n = len(geometry)
    if spec.kind != "tip_load" and not 0 <= spec.segment_index < n:
        raise InvalidSegment(f"segment {spec.segment_index} not in chain of {n}")

    if spec.kind == "point_load":
        if state.tick != spec.start_tick:
            return state
        impulse = np.zeros(2 * n)
        impulse[2 * spec.segment_index + 1] = compliance.point_load_gain * spec.magnitude
        q_cmd = _canon(state.q_cmd + impulse, state.theta_max)
        q_base = _canon(state.q_base + impulse, state.theta_max)
        return replace(
            state, q_cmd=q_cmd, q_base=q_base, q_true=_with_deflections(state, q_base)
        )

    active = spec.start_tick <= state.tick < spec.end_tick
    held = any(s is spec or s == spec for s, _ in state.disturbance)
    if active and not held:
        if spec.kind == "tip_load":
            offset = tip_load_deflection(state.q_base, spec.magnitude, compliance, geometry)
        else:
            offset = np.zeros(2 * n)
            offset[2 * spec.segment_index + 1] = spec.magnitude
        disturbance = state.disturbance + ((spec, offset),)
    elif not active and held:
        disturbance = tuple((s, o) for s, o in state.disturbance if s != spec)
    else:
        return state
    new = replace(state, disturbance=disturbance)
    return replace(new, q_true=_with_deflections(new, new.q_base))


def read_sensors(
    state,
    geometry,
    noise_sigma,
    rng,
    tendon_stiffness=DEFAULT_TENDON_STIFFNESS,
    rest_tension=DEFAULT_REST_TENSION,
):
    """Simulated IMU and load-cell backends.

    Quaternions come from the true forward kinematics plus additive
    component noise; tensions from a linear elastic tendon model with
    slack clipping at zero, tau = max(0, tau_rest + k (l_geom - l_paid)).
    """
    lengths, radii, n_t = geometry_arrays(geometry)
    kern = backend.kernels()
    frames = kern.chain_frames(state.q_true, lengths)
    base = Quaternion.identity()
    if noise_sigma > 0.0:
        base = add_quaternion_noise(base, noise_sigma, rng)
    tips = []
    for i in range(lengths.shape[0]):
        quat = Quaternion.from_array(kern.quat_from_matrix(frames[i, :3, :3]))
        if noise_sigma > 0.0:
            quat = add_quaternion_noise(quat, noise_sigma, rng)
        tips.append(quat)
    geom_lengths = kern.tendon_lengths(state.q_true, lengths, radii, n_t)
    tensions = np.maximum(
        0.0, rest_tension + tendon_stiffness * (geom_lengths - state.paid_lengths)
    )
    return SensorFrameSet(base, tuple(tips)), TensionReadings(tensions)


def calibrate_deflection_gain(geometry, q_ref, mass=0.3, max_deflection=math.radians(6.0)):
    """Gain making a reference tip load deflect the worst segment by a target angle."""
    probe = ComplianceModel(deflection_gain=np.ones(len(geometry)))
    offset = tip_load_deflection(config_vector(q_ref), mass, probe, geometry)
    worst = float(np.max(np.abs(offset)))
    if worst == 0.0:
        raise ValueError("reference posture gives the tip load no moment arm")
    return max_deflection / worst


class Driver(abc.ABC):
    """Hardware-shaped interface: commands in, sensor samples out.

    A physical backend would talk to servos, IMUs and load cells; the
    simulator implements the same surface so harness code cannot tell
    the difference.
    """

    @abc.abstractmethod
    def read(self):
        """Return (SensorFrameSet, TensionReadings) for the current tick."""

    @abc.abstractmethod
    def apply(self, cmd):
        """Consume one TendonCommand and advance one tick."""


class SimulatedPlantDriver(Driver):
    """Owns a PlantState, its RNG and the disturbance schedule."""

    def __init__(
        self,
        geometry,
        gains,
        seed=0,
        q0=None,
        noise_sigma=0.0,
        lag_constant=DEFAULT_LAG,
        tendon_stiffness=DEFAULT_TENDON_STIFFNESS,
        rest_tension=DEFAULT_REST_TENSION,
        compliance=None,
        disturbances=(),
        theta_max=math.pi / 2,
    ):
        if q0 is None:
            q0 = np.zeros(2 * len(geometry))
        self.geometry = geometry
        self.gains = gains
        self.noise_sigma = noise_sigma
        self.tendon_stiffness = tendon_stiffness
        self.rest_tension = rest_tension
        self.compliance = compliance or ComplianceModel(
            deflection_gain=np.zeros(len(geometry))
        )
        self.disturbances = tuple(disturbances)
        self._rng = np.random.default_rng(seed)
        self._state = initial_state(q0, geometry, lag_constant, theta_max)

    @property
    def state(self):
        return self._state

    def read(self):
        return read_sensors(
            self._state,
            self.geometry,
            self.noise_sigma,
            self._rng,
            self.tendon_stiffness,
            self.rest_tension,
        )

    def apply(self, cmd):
        state = apply_command(self._state, cmd, self.geometry, self.gains)
        for spec in self.disturbances:
            state = apply_disturbance(state, spec, self.compliance, self.geometry)
        self._state = state

    def active_disturbances(self):
        tick = self._state.tick
        return tuple(
            s for s in self.disturbances if s.start_tick <= tick < s.end_tick
        )
