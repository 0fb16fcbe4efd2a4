"""Experiment runner: posture tracking, task-space tracking, disturbances.

Reproduces the desk-scale protocol on the simulated plant: set-points
held for a dwell period, tracking scored as RMSE over the final seconds
of each window, three seeded trials per trajectory, and structured CSV /
JSON / plot-data exports.
"""

import csv
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .actuation import config_space_step, supervise_tension
from .config import SimConfig
from .errors import ConfigError, ExportError, IncompleteLog
from .estimation import estimate_configuration, wrap_shortest
from .ik import TaskSpaceController
from .kinematics import canonical_vector, config_vector, geometry_arrays, tip_position
from .plant import (
    ComplianceModel,
    DisturbanceSpec,
    SimulatedPlantDriver,
    calibrate_deflection_gain,
)

# Posture schedule for the configuration-space tracking runs:
# (phi_d per segment, theta_d per segment), degrees.
TABLE_POSTURES = (
    ((-90.0, -90.0, -90.0), (0.0, 40.0, 5.0)),
    ((-90.0, -90.0, -90.0), (40.0, 10.0, -5.0)),
    ((-90.0, -90.0, -90.0), (40.0, 10.0, 35.0)),
    ((-90.0, -90.0, -90.0), (40.0, 10.0, -40.0)),
    ((-45.0, -45.0, -45.0), (40.0, 10.0, -5.0)),
    ((-45.0, -45.0, -45.0), (40.0, 10.0, 35.0)),
    ((-45.0, -45.0, 0.0), (40.0, 10.0, 35.0)),
    ((-45.0, -45.0, -90.0), (40.0, 10.0, 35.0)),
)

# Set-point held during the disturbance experiments (phi/theta per
# segment interleaved, degrees).
DISTURB_HOLD_DEG = (-90.0, 40.0, -90.0, 10.0, -90.0, 35.0)

# Reference tip load (kg) and the curvature deviation it is calibrated
# to produce on the worst segment at the hold posture.
CALIBRATION_MASS = 0.3
CALIBRATION_DEFLECTION = math.radians(6.0)


def posture_vector(phi_deg, theta_deg):
    """Interleaved canonical configuration from per-segment degrees.

    Negative curvature entries are folded into the canonical chart:
    (phi, -theta) represents the same arc as (phi + 180deg, theta).
    """
    q = np.empty(2 * len(phi_deg))
    q[0::2] = np.radians(phi_deg)
    q[1::2] = np.radians(theta_deg)
    return canonical_vector(q)


def disturb_hold_vector():
    return posture_vector(DISTURB_HOLD_DEG[0::2], DISTURB_HOLD_DEG[1::2])


@dataclass(frozen=True)
class TrajectorySpec:
    """Schedule of set-points, each held for the dwell period."""

    mode: str  # "config_space" or "task_space"
    setpoints: tuple  # canonical q vectors or xyz targets
    dwell_s: float = 45.0
    steady_window_s: float = 5.0
    labels: tuple = ()

    def __post_init__(self):
        if self.mode not in ("config_space", "task_space"):
            raise ConfigError(f"unknown trajectory mode {self.mode!r}")
        if not self.setpoints:
            raise ConfigError("trajectory needs at least one set-point")
        if not self.dwell_s > self.steady_window_s > 0.0:
            raise ConfigError("need dwell_s > steady_window_s > 0")
        object.__setattr__(
            self, "setpoints", tuple(np.asarray(s, dtype=float) for s in self.setpoints)
        )
        labels = self.labels or tuple(
            f"setpoint_{i + 1}" for i in range(len(self.setpoints))
        )
        if len(labels) != len(self.setpoints):
            raise ConfigError("one label per set-point")
        object.__setattr__(self, "labels", tuple(labels))


def table_trajectory(config):
    """The eight-posture configuration-space tracking schedule."""
    points = tuple(posture_vector(p, t) for p, t in TABLE_POSTURES)
    labels = tuple(f"posture_{i + 1}" for i in range(len(points)))
    return TrajectorySpec(
        "config_space", points, config.dwell_s, config.steady_window_s, labels
    )


def default_task_trajectory(config):
    """Task-space schedule: end-effector images of the tracking postures.

    The original task-space set-point list is not published; this
    reconstruction keeps the targets inside the tested workspace.
    """
    points = tuple(
        tip_position(posture_vector(p, t), config.geometry) for p, t in TABLE_POSTURES
    )
    labels = tuple(f"target_{i + 1}" for i in range(len(points)))
    return TrajectorySpec(
        "task_space", points, config.dwell_s, config.steady_window_s, labels
    )


def hold_trajectory(q_d, config, dwell_s=None, label="hold"):
    return TrajectorySpec(
        "config_space",
        (config_vector(q_d),),
        dwell_s or config.dwell_s,
        config.steady_window_s,
        (label,),
    )


def load_trajectory(path, config):
    """Read a user trajectory file (JSON)."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read trajectory {path}: {exc}") from exc
    if not isinstance(data, dict) or "setpoints" not in data:
        raise ConfigError("trajectory file needs a 'setpoints' list")
    mode = data.get("mode", "config_space")
    dwell = float(data.get("dwell_s", config.dwell_s))
    steady = float(data.get("steady_window_s", config.steady_window_s))
    points, labels = [], []
    for i, entry in enumerate(data["setpoints"]):
        labels.append(entry.get("label", f"setpoint_{i + 1}"))
        if mode == "config_space":
            try:
                points.append(posture_vector(entry["phi_deg"], entry["theta_deg"]))
            except (KeyError, TypeError) as exc:
                raise ConfigError(f"set-point {i}: need phi_deg and theta_deg") from exc
        else:
            try:
                points.append(np.asarray(entry["position_m"], dtype=float).reshape(3))
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"set-point {i}: need position_m [x,y,z]") from exc
    return TrajectorySpec(mode, tuple(points), dwell, steady, tuple(labels))


def resolve_compliance(config):
    """Compliance model, calibrating the deflection gain when unset."""
    gain = config.deflection_gain
    if gain is None:
        gain = calibrate_deflection_gain(
            config.geometry,
            disturb_hold_vector(),
            CALIBRATION_MASS,
            CALIBRATION_DEFLECTION,
        )
    return ComplianceModel(
        deflection_gain=np.full(config.n_segments, gain),
        point_load_gain=config.point_load_gain,
    )


def recovery_tick_bound(config, ratio=5.0):
    """Documented bound on closed-loop recovery, in ticks.

    The error contraction per tick is bounded by the slower of the
    controller reduction (1 - gamma) and the actuator lag pole
    sqrt(exp(-dt/lag)); the bound is the time to shrink a deviation by
    ``ratio``, tripled as margin for the oscillatory regime.
    """
    rho = 1.0 - config.gains.gamma
    if config.lag_constant > 0.0:
        rho = max(rho, math.sqrt(math.exp(-config.gains.tick_period / config.lag_constant)))
    rho = min(max(rho, 1e-6), 0.999999)
    return 3 * math.ceil(math.log(ratio) / -math.log(rho))


@dataclass
class RunLog:
    """Per-tick record of one closed-loop run."""

    mode: str
    tick_period: float
    seed: int
    n_segments: int
    n_tendons: int
    ticks: np.ndarray
    time_s: np.ndarray
    q_d: np.ndarray  # (m, 2n) radians
    q_est: np.ndarray
    q_true: np.ndarray
    tip_d: np.ndarray  # (m, 3) meters
    tip_est: np.ndarray
    tip_true: np.ndarray
    tensions: np.ndarray  # (m, n*nt) newtons
    commands: np.ndarray  # (m, n*nt) meters
    disturbance: list

    @property
    def n_ticks(self):
        return self.ticks.shape[0]


def run_trajectory(spec, seed, config, disturbances=(), q0=None):
    """Execute the closed loop over the full schedule, deterministically.

    Per tick: sense, estimate, control (with IK in task mode), tension
    supervision, then plant update. The log records the sense-time state
    together with the command issued from it.
    """
    if not isinstance(spec, TrajectorySpec):
        raise ConfigError("spec must be a TrajectorySpec")
    geometry = config.geometry
    gains = config.gains
    dwell_ticks = int(round(spec.dwell_s / gains.tick_period))
    if dwell_ticks <= 0:
        raise ConfigError("dwell shorter than one control tick")
    total = dwell_ticks * len(spec.setpoints)
    n = config.n_segments
    _, _, n_t = geometry_arrays(geometry)

    driver = SimulatedPlantDriver(
        geometry,
        gains,
        seed=seed,
        q0=q0,
        noise_sigma=config.noise_sigma,
        lag_constant=config.lag_constant,
        tendon_stiffness=config.tendon_stiffness,
        rest_tension=config.rest_tension,
        compliance=resolve_compliance(config),
        disturbances=disturbances,
        theta_max=config.theta_max,
    )
    controller = None
    if spec.mode == "task_space":
        controller = TaskSpaceController(
            geometry,
            tol_pos=config.ik_tol_pos,
            max_iter=config.ik_max_iter,
            lambda0=config.ik_lambda0,
            theta_max=config.theta_max,
        )
        targets = spec.setpoints
    else:
        targets = tuple(canonical_vector(s, config.theta_max) for s in spec.setpoints)
        target_tips = tuple(tip_position(t, geometry) for t in targets)

    log = RunLog(
        mode=spec.mode,
        tick_period=gains.tick_period,
        seed=seed,
        n_segments=n,
        n_tendons=n_t,
        ticks=np.arange(total),
        time_s=np.arange(total) * gains.tick_period,
        q_d=np.empty((total, 2 * n)),
        q_est=np.empty((total, 2 * n)),
        q_true=np.empty((total, 2 * n)),
        tip_d=np.empty((total, 3)),
        tip_est=np.empty((total, 3)),
        tip_true=np.empty((total, 3)),
        tensions=np.empty((total, n * n_t)),
        commands=np.empty((total, n * n_t)),
        disturbance=[""] * total,
    )

    for k in range(total):
        frames, tensions = driver.read()
        q_est = estimate_configuration(frames).as_vector()
        idx = k // dwell_ticks
        if spec.mode == "config_space":
            q_d = targets[idx]
            tip_d = target_tips[idx]
            cmd = config_space_step(q_est, q_d, gains, geometry)
        else:
            tip_d = targets[idx]
            cmd = controller.step(tip_d, q_est, gains)
            q_d = controller.last_q_d
        cmd = supervise_tension(cmd, tensions, gains)

        state = driver.state
        log.q_d[k] = q_d
        log.q_est[k] = q_est
        log.q_true[k] = state.q_true
        log.tip_d[k] = tip_d
        log.tip_est[k] = tip_position(q_est, geometry)
        log.tip_true[k] = tip_position(state.q_true, geometry)
        log.tensions[k] = tensions.tensions.ravel()
        log.commands[k] = cmd.deltas.ravel()
        active = driver.active_disturbances()
        if active:
            log.disturbance[k] = ";".join(s.kind for s in active)

        driver.apply(cmd)
    return log


def tracking_errors_deg(log, gauge_eps_deg=0.5, truth=False):
    """Per-tick, per-variable tracking error in degrees.

    Bending-plane errors take the shortest way round; where the desired
    curvature is below the gauge threshold the bending plane is
    physically meaningless (any value is equivalent), so its error is
    reported as zero.
    """
    q = log.q_true if truth else log.q_est
    err = q - log.q_d
    gauge = math.radians(gauge_eps_deg)
    for i in range(0, err.shape[1], 2):
        err[:, i] = np.vectorize(wrap_shortest)(err[:, i])
        err[:, i][log.q_d[:, i + 1] < gauge] = 0.0
    return np.degrees(err)


@dataclass(frozen=True)
class RmseEntry:
    index: int
    label: str
    target: np.ndarray  # q_d (2n, radians) or t_d (3, meters)
    rmse_est_deg: np.ndarray  # (2n,)
    rmse_true_deg: np.ndarray
    rmse_pos_est_m: np.ndarray  # (4,) x, y, z, norm
    rmse_pos_true_m: np.ndarray

    def to_dict(self):
        return {
            "index": self.index,
            "label": self.label,
            "target": list(self.target),
            "rmse_est_deg": list(self.rmse_est_deg),
            "rmse_true_deg": list(self.rmse_true_deg),
            "rmse_pos_est_m": list(self.rmse_pos_est_m),
            "rmse_pos_true_m": list(self.rmse_pos_true_m),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            index=int(d["index"]),
            label=d["label"],
            target=np.array(d["target"]),
            rmse_est_deg=np.array(d["rmse_est_deg"]),
            rmse_true_deg=np.array(d["rmse_true_deg"]),
            rmse_pos_est_m=np.array(d["rmse_pos_est_m"]),
            rmse_pos_true_m=np.array(d["rmse_pos_true_m"]),
        )


@dataclass(frozen=True)
class RmseReport:
    mode: str
    dwell_s: float
    steady_window_s: float
    entries: tuple

    def max_rmse_deg(self, truth=False):
        key = "rmse_true_deg" if truth else "rmse_est_deg"
        return float(max(np.max(getattr(e, key)) for e in self.entries))

    def max_pos_rmse_m(self, truth=True):
        key = "rmse_pos_true_m" if truth else "rmse_pos_est_m"
        return float(max(getattr(e, key)[3] for e in self.entries))

    def to_dict(self):
        return {
            "mode": self.mode,
            "dwell_s": self.dwell_s,
            "steady_window_s": self.steady_window_s,
            "entries": [e.to_dict() for e in self.entries],
            "max_rmse_est_deg": self.max_rmse_deg(),
            "max_rmse_true_deg": self.max_rmse_deg(truth=True),
            "max_pos_rmse_true_m": self.max_pos_rmse_m(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            mode=d["mode"],
            dwell_s=float(d["dwell_s"]),
            steady_window_s=float(d["steady_window_s"]),
            entries=tuple(RmseEntry.from_dict(e) for e in d["entries"]),
        )


def _pos_rmse(diff):
    per_axis = np.sqrt(np.mean(diff**2, axis=0))
    norm = math.sqrt(float(np.mean(np.sum(diff**2, axis=1))))
    return np.array([per_axis[0], per_axis[1], per_axis[2], norm])


def compute_rmse(log, spec, gauge_eps_deg=0.5):
    """Steady-window RMSE per set-point and variable.

    The window is exactly the final ``steady_window_s`` of each dwell,
    so it never overlaps a set-point transition.
    """
    dwell_ticks = int(round(spec.dwell_s / log.tick_period))
    window = int(round(spec.steady_window_s / log.tick_period))
    n_set = len(spec.setpoints)
    if log.n_ticks != n_set * dwell_ticks:
        raise IncompleteLog(
            f"log has {log.n_ticks} ticks, schedule needs {n_set * dwell_ticks}"
        )
    if not np.array_equal(log.ticks, np.arange(log.n_ticks)):
        raise IncompleteLog("ticks are not contiguous")

    err_est = tracking_errors_deg(log, gauge_eps_deg)
    err_true = tracking_errors_deg(log, gauge_eps_deg, truth=True)
    entries = []
    for i in range(n_set):
        sl = slice((i + 1) * dwell_ticks - window, (i + 1) * dwell_ticks)
        target = spec.setpoints[i]
        entries.append(
            RmseEntry(
                index=i,
                label=spec.labels[i],
                target=np.asarray(target, dtype=float),
                rmse_est_deg=np.sqrt(np.mean(err_est[sl] ** 2, axis=0)),
                rmse_true_deg=np.sqrt(np.mean(err_true[sl] ** 2, axis=0)),
                rmse_pos_est_m=_pos_rmse(log.tip_est[sl] - log.tip_d[sl]),
                rmse_pos_true_m=_pos_rmse(log.tip_true[sl] - log.tip_d[sl]),
            )
        )
    return RmseReport(spec.mode, spec.dwell_s, spec.steady_window_s, tuple(entries))


@dataclass(frozen=True)
class MultiTrialReport:
    """Three-trial protocol: per-variable mean and spread across seeds."""

    seeds: tuple
    reports: tuple

    def _stacked(self, key):
        return np.array(
            [[getattr(e, key) for e in r.entries] for r in self.reports]
        )  # (trials, setpoints, vars)

    def mean_rmse_deg(self, truth=False):
        return self._stacked("rmse_true_deg" if truth else "rmse_est_deg").mean(axis=0)

    def spread_rmse_deg(self, truth=False):
        stacked = self._stacked("rmse_true_deg" if truth else "rmse_est_deg")
        return stacked.max(axis=0) - stacked.min(axis=0)

    def std_rmse_deg(self, truth=False):
        return self._stacked("rmse_true_deg" if truth else "rmse_est_deg").std(axis=0)

    def max_rmse_deg(self, truth=False):
        return float(max(r.max_rmse_deg(truth) for r in self.reports))

    def max_spread_deg(self, truth=False):
        return float(np.max(self.spread_rmse_deg(truth)))

    def max_pos_rmse_m(self, truth=True):
        return float(max(r.max_pos_rmse_m(truth) for r in self.reports))

    def to_dict(self):
        return {
            "seeds": list(self.seeds),
            "trials": [r.to_dict() for r in self.reports],
            "mean_rmse_est_deg": self.mean_rmse_deg().tolist(),
            "std_rmse_est_deg": self.std_rmse_deg().tolist(),
            "spread_rmse_est_deg": self.spread_rmse_deg().tolist(),
            "max_rmse_est_deg": self.max_rmse_deg(),
            "max_spread_est_deg": self.max_spread_deg(),
            "max_pos_rmse_true_m": self.max_pos_rmse_m(),
        }


def run_trials(spec, config, seeds=None, disturbances=()):
    """Run the schedule once per seed (the repeatability protocol)."""
    if seeds is None:
        seeds = tuple(config.seed + i for i in range(config.trials))
    logs = [run_trajectory(spec, s, config, disturbances) for s in seeds]
    reports = tuple(compute_rmse(log, spec, config.gauge_eps_deg) for log in logs)
    return logs, MultiTrialReport(tuple(seeds), reports)


# ---------------------------------------------------------------------------
# Disturbance suite


@dataclass(frozen=True)
class DisturbanceEvent:
    spec: DisturbanceSpec
    max_dev_deg: float
    recovery_ticks: int  # ticks after the window until all |err| < restore
    restored: bool

    def to_dict(self):
        return {
            "kind": self.spec.kind,
            "magnitude": self.spec.magnitude,
            "segment_index": self.spec.segment_index,
            "start_tick": self.spec.start_tick,
            "end_tick": self.spec.end_tick,
            "max_dev_deg": self.max_dev_deg,
            "recovery_ticks": self.recovery_ticks,
            "restored": self.restored,
        }


def measure_events(log, disturbances, restore_deg=1.0, gauge_eps_deg=0.5):
    """Max true deviation during each disturbance and recovery time after.

    Recovery is the first tick after the window from which every later
    tick (up to the next event) stays within ``restore_deg`` of the
    set-point on all variables.
    """
    err = np.max(np.abs(tracking_errors_deg(log, gauge_eps_deg, truth=True)), axis=1)
    total = log.n_ticks
    ordered = sorted(disturbances, key=lambda s: s.start_tick)
    events = []
    for pos, spec in enumerate(ordered):
        w0 = min(spec.start_tick, total)
        w1 = min(spec.end_tick, total)
        max_dev = float(err[w0:w1].max()) if w1 > w0 else 0.0
        horizon = total
        if pos + 1 < len(ordered):
            horizon = min(ordered[pos + 1].start_tick, total)
        tail = err[w1:horizon]
        restored = False
        recovery = len(tail)
        if tail.size:
            # first index from which the suffix stays below the threshold
            suffix_max = np.maximum.accumulate(tail[::-1])[::-1]
            idx = np.nonzero(suffix_max < restore_deg)[0]
            if idx.size:
                restored = True
                recovery = int(idx[0])
        events.append(DisturbanceEvent(spec, max_dev, recovery, restored))
    return events


@dataclass(frozen=True)
class DisturbanceSuiteResult:
    hold_q_d: np.ndarray
    tip_log: RunLog
    tip_report: RmseReport
    tip_events: tuple
    rod_log: RunLog
    rod_report: RmseReport
    rod_events: tuple
    recovery_tick_bound: int

    def max_dev_deg(self):
        return max(e.max_dev_deg for e in self.tip_events)

    def all_restored(self):
        return all(e.restored for e in self.tip_events + self.rod_events)

    def to_dict(self):
        return {
            "hold_q_d_deg": np.degrees(self.hold_q_d).tolist(),
            "recovery_tick_bound": self.recovery_tick_bound,
            "tip_events": [e.to_dict() for e in self.tip_events],
            "rod_events": [e.to_dict() for e in self.rod_events],
            "tip_rmse": self.tip_report.to_dict(),
            "rod_rmse": self.rod_report.to_dict(),
        }


def tip_load_schedule(config, masses=(0.2, 0.3), settle_s=20.0, hold_s=20.0, gap_s=10.0):
    """Successive attach/release windows for each tip mass."""
    rate = config.tick_rate
    specs = []
    t = settle_s
    for m in masses:
        specs.append(
            DisturbanceSpec(
                "tip_load",
                m,
                start_tick=int(round(t * rate)),
                end_tick=int(round((t + hold_s) * rate)),
            )
        )
        t += hold_s + gap_s
    return tuple(specs), t + settle_s  # total duration


def rod_poke_schedule(config, seed, n_pokes=5, settle_s=20.0, spacing_s=8.0):
    """Randomized point loads along the arm (position, magnitude, timing)."""
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x9E3779B9]))
    rate = config.tick_rate
    specs = []
    t = settle_s
    for _ in range(n_pokes):
        seg = int(rng.integers(0, config.n_segments))
        mass = float(rng.uniform(0.1, 0.3))
        tick = int(round(t * rate))
        specs.append(
            DisturbanceSpec(
                "point_load", mass, start_tick=tick, end_tick=tick + 1, segment_index=seg
            )
        )
        t += spacing_s
    return tuple(specs), t + settle_s


def run_disturbance_suite(config, seed=None):
    """Hold the reference posture through tip loads, then rod pokes."""
    seed = config.seed if seed is None else seed
    q_d = disturb_hold_vector()

    tip_specs, tip_total = tip_load_schedule(config)
    tip_spec = hold_trajectory(q_d, config, dwell_s=tip_total, label="tip_load_hold")
    tip_log = run_trajectory(tip_spec, seed, config, disturbances=tip_specs)
    tip_report = compute_rmse(tip_log, tip_spec, config.gauge_eps_deg)
    restore = config.thresholds.disturb_restore_deg
    tip_events = measure_events(tip_log, tip_specs, restore, config.gauge_eps_deg)

    rod_specs, rod_total = rod_poke_schedule(config, seed)
    rod_spec = hold_trajectory(q_d, config, dwell_s=rod_total, label="rod_poke_hold")
    rod_log = run_trajectory(rod_spec, seed, config, disturbances=rod_specs)
    rod_report = compute_rmse(rod_log, rod_spec, config.gauge_eps_deg)
    rod_events = measure_events(rod_log, rod_specs, restore, config.gauge_eps_deg)

    return DisturbanceSuiteResult(
        hold_q_d=q_d,
        tip_log=tip_log,
        tip_report=tip_report,
        tip_events=tuple(tip_events),
        rod_log=rod_log,
        rod_report=rod_report,
        rod_events=tuple(rod_events),
        recovery_tick_bound=recovery_tick_bound(config),
    )


# ---------------------------------------------------------------------------
# Export

_FIG_PREFIX = {"config_space": "fig6", "task_space": "fig8", "tip_load": "fig9", "rod": "fig10"}


def runlog_columns(n_segments, n_tendons):
    """Fixed CSV schema; angles exported in degrees, SI everywhere else."""
    cols = ["tick", "time_s"]
    for tag in ("d", "est", "true"):
        for i in range(1, n_segments + 1):
            cols += [f"phi{i}_{tag}_deg", f"theta{i}_{tag}_deg"]
    for tag in ("d", "est", "true"):
        cols += [f"tip_x_{tag}_m", f"tip_y_{tag}_m", f"tip_z_{tag}_m"]
    for i in range(1, n_segments + 1):
        cols += [f"tau_s{i}t{j}_n" for j in range(1, n_tendons + 1)]
    for i in range(1, n_segments + 1):
        cols += [f"dl_s{i}t{j}_m" for j in range(1, n_tendons + 1)]
    cols.append("disturbance")
    return cols


def _fmt(x):
    return format(float(x), ".17g")


def write_runlog(log, path):
    cols = runlog_columns(log.n_segments, log.n_tendons)
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(cols)
            for k in range(log.n_ticks):
                row = [str(int(log.ticks[k])), _fmt(log.time_s[k])]
                for arr in (log.q_d, log.q_est, log.q_true):
                    row += [_fmt(math.degrees(v)) for v in arr[k]]
                for arr in (log.tip_d, log.tip_est, log.tip_true):
                    row += [_fmt(v) for v in arr[k]]
                row += [_fmt(v) for v in log.tensions[k]]
                row += [_fmt(v) for v in log.commands[k]]
                row.append(log.disturbance[k])
                if len(row) != len(cols):
                    raise ExportError(f"runlog row width {len(row)} != schema {len(cols)}")
                writer.writerow(row)
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc
    return path


def read_runlog(path, mode="config_space", tick_period=None, seed=0):
    """Re-import an exported runlog.csv."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = list(reader)
    except (OSError, StopIteration) as exc:
        raise ExportError(f"cannot read {path}: {exc}") from exc
    n = sum(1 for c in header if c.startswith("phi") and c.endswith("_d_deg"))
    n_t_cols = sum(1 for c in header if c.startswith("tau_s1t"))
    if header != runlog_columns(n, n_t_cols):
        raise ExportError(f"{path}: unexpected runlog schema")
    m = len(rows)
    data = np.array([[float(v) for v in row[: len(header) - 1]] for row in rows]) if m else np.empty((0, len(header) - 1))
    q_cols = 2 * n
    base = 2
    log = RunLog(
        mode=mode,
        tick_period=tick_period if tick_period is not None else (float(data[1, 1] - data[0, 1]) if m > 1 else 0.05),
        seed=seed,
        n_segments=n,
        n_tendons=n_t_cols,
        ticks=data[:, 0].astype(int) if m else np.empty(0, dtype=int),
        time_s=data[:, 1] if m else np.empty(0),
        q_d=np.radians(data[:, base : base + q_cols]) if m else np.empty((0, q_cols)),
        q_est=np.radians(data[:, base + q_cols : base + 2 * q_cols]) if m else np.empty((0, q_cols)),
        q_true=np.radians(data[:, base + 2 * q_cols : base + 3 * q_cols]) if m else np.empty((0, q_cols)),
        tip_d=data[:, base + 3 * q_cols : base + 3 * q_cols + 3] if m else np.empty((0, 3)),
        tip_est=data[:, base + 3 * q_cols + 3 : base + 3 * q_cols + 6] if m else np.empty((0, 3)),
        tip_true=data[:, base + 3 * q_cols + 6 : base + 3 * q_cols + 9] if m else np.empty((0, 3)),
        tensions=data[:, base + 3 * q_cols + 9 : base + 3 * q_cols + 9 + n * n_t_cols] if m else np.empty((0, n * n_t_cols)),
        commands=data[:, base + 3 * q_cols + 9 + n * n_t_cols : base + 3 * q_cols + 9 + 2 * n * n_t_cols] if m else np.empty((0, n * n_t_cols)),
        disturbance=[row[-1] for row in rows],
    )
    return log


def _write_series(path, header, columns):
    cols = [np.asarray(c) for c in columns]
    try:
        with open(path, "w") as fh:
            fh.write("# " + " ".join(header) + "\n")
            for k in range(cols[0].shape[0]):
                fh.write(" ".join(_fmt(c[k]) for c in cols) + "\n")
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc
    return path


def export_results(log, report, out_dir, figset=None, stem="runlog"):
    """Write runlog.csv, rmse.json and the per-figure plot data files."""
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise ExportError(f"cannot create {out_dir}: {exc}") from exc
    paths = [write_runlog(log, os.path.join(out_dir, f"{stem}.csv"))]
    rmse_path = os.path.join(out_dir, "rmse.json")
    try:
        with open(rmse_path, "w") as fh:
            json.dump(report.to_dict() if report is not None else {}, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise ExportError(f"cannot write {rmse_path}: {exc}") from exc
    paths.append(rmse_path)

    prefix = _FIG_PREFIX.get(figset or log.mode, figset or "fig")
    t = log.time_s
    if log.n_ticks:
        for i in range(log.n_segments):
            paths.append(
                _write_series(
                    os.path.join(out_dir, f"{prefix}_phi_seg{i + 1}.dat"),
                    ["time_s", "phi_d_deg", "phi_est_deg", "phi_true_deg"],
                    [t] + [np.degrees(a[:, 2 * i]) for a in (log.q_d, log.q_est, log.q_true)],
                )
            )
            paths.append(
                _write_series(
                    os.path.join(out_dir, f"{prefix}_theta_seg{i + 1}.dat"),
                    ["time_s", "theta_d_deg", "theta_est_deg", "theta_true_deg"],
                    [t] + [np.degrees(a[:, 2 * i + 1]) for a in (log.q_d, log.q_est, log.q_true)],
                )
            )
        for axis, name in ((1, "y"), (2, "z")):
            paths.append(
                _write_series(
                    os.path.join(out_dir, f"{prefix}_tip_{name}.dat"),
                    [f"time_s", f"tip_{name}_d_m", f"tip_{name}_est_m", f"tip_{name}_true_m"],
                    [t, log.tip_d[:, axis], log.tip_est[:, axis], log.tip_true[:, axis]],
                )
            )
    if report is not None and log.mode == "config_space" and report.entries:
        rows = np.array([e.rmse_est_deg for e in report.entries])
        header = ["setpoint"] + [
            f"{v}{i + 1}_rmse_deg" for i in range(log.n_segments) for v in ("phi", "theta")
        ]
        fig7 = os.path.join(out_dir, "fig7_rmse.dat")
        try:
            with open(fig7, "w") as fh:
                fh.write("# " + " ".join(header) + "\n")
                for e, row in zip(report.entries, rows):
                    fh.write(" ".join([e.label] + [_fmt(v) for v in row]) + "\n")
        except OSError as exc:
            raise ExportError(f"cannot write {fig7}: {exc}") from exc
        paths.append(fig7)
    return paths


def load_report(path):
    try:
        with open(path) as fh:
            return RmseReport.from_dict(json.load(fh))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ExportError(f"cannot read report {path}: {exc}") from exc
