"""Run configuration: defaults, JSON loading, CLI overrides."""

import json
import math
from dataclasses import dataclass, field, replace

from .actuation import ControllerGains
from .errors import ConfigError
from .kinematics import DEFAULT_THETA_MAX, SegmentGeometry
from .plant import (
    DEFAULT_LAG,
    DEFAULT_POINT_LOAD_GAIN,
    DEFAULT_REST_TENSION,
    DEFAULT_TENDON_STIFFNESS,
)

DEFAULT_SEED = 20240
DEFAULT_TRIALS = 3


@dataclass(frozen=True)
class Thresholds:
    """Pass/fail limits the CLI enforces on experiment runs."""

    config_rmse_deg: float = 5.0
    config_spread_deg: float = 2.0
    task_rmse_m: float = 0.03
    disturb_max_dev_deg: float = 6.0
    disturb_restore_deg: float = 1.0


@dataclass(frozen=True)
class SimConfig:
    """Everything a reproducible run needs besides the trajectory."""

    geometry: tuple = tuple(SegmentGeometry() for _ in range(3))
    gains: ControllerGains = ControllerGains()
    noise_sigma: float = 1e-3
    lag_constant: float = DEFAULT_LAG
    tendon_stiffness: float = DEFAULT_TENDON_STIFFNESS
    rest_tension: float = DEFAULT_REST_TENSION
    deflection_gain: float = None  # None -> calibrated from the hold posture
    point_load_gain: float = DEFAULT_POINT_LOAD_GAIN
    theta_max: float = DEFAULT_THETA_MAX
    ik_tol_pos: float = 1e-4
    ik_max_iter: int = 100
    ik_lambda0: float = 1e-3
    dwell_s: float = 45.0
    steady_window_s: float = 5.0
    gauge_eps_deg: float = 0.5
    seed: int = DEFAULT_SEED
    trials: int = DEFAULT_TRIALS
    thresholds: Thresholds = Thresholds()

    def __post_init__(self):
        object.__setattr__(self, "geometry", tuple(self.geometry))
        if self.dwell_s <= self.steady_window_s or self.steady_window_s <= 0.0:
            raise ConfigError("need dwell_s > steady_window_s > 0")

    @property
    def n_segments(self):
        return len(self.geometry)

    @property
    def tick_rate(self):
        return 1.0 / self.gains.tick_period

    def dwell_ticks(self):
        return int(round(self.dwell_s / self.gains.tick_period))

    def steady_ticks(self):
        return int(round(self.steady_window_s / self.gains.tick_period))


def default_config():
    return SimConfig()


def _take(section, key, default):
    value = section.pop(key, None)
    return default if value is None else value


def from_dict(data):
    """Build a SimConfig from a plain dict, defaults filling the gaps."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be an object")
    data = {k: (dict(v) if isinstance(v, dict) else v) for k, v in data.items()}
    base = SimConfig()

    geom = data.pop("geometry", {})
    lengths = _take(geom, "segment_lengths", [g.length for g in base.geometry])
    radius = _take(geom, "tendon_radius", base.geometry[0].tendon_radius)
    count = int(_take(geom, "tendon_count", base.geometry[0].tendon_count))
    if geom:
        raise ConfigError(f"unknown geometry keys: {sorted(geom)}")
    try:
        geometry = tuple(
            SegmentGeometry(length=float(L), tendon_radius=float(radius), tendon_count=count)
            for L in lengths
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    gd = data.pop("gains", {})
    try:
        gains = ControllerGains(
            gamma=float(_take(gd, "gamma", base.gains.gamma)),
            tau_min=float(_take(gd, "tau_min", base.gains.tau_min)),
            alpha=float(_take(gd, "alpha", base.gains.alpha)),
            tick_period=float(_take(gd, "tick_period", base.gains.tick_period)),
            dl_max=float(_take(gd, "dl_max", base.gains.dl_max)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if gd:
        raise ConfigError(f"unknown gains keys: {sorted(gd)}")

    est = data.pop("estimator", {})
    noise_sigma = float(_take(est, "noise_sigma", base.noise_sigma))
    if est:
        raise ConfigError(f"unknown estimator keys: {sorted(est)}")

    pl = data.pop("plant", {})
    lag = float(_take(pl, "lag_constant", base.lag_constant))
    stiffness = float(_take(pl, "tendon_stiffness", base.tendon_stiffness))
    rest = float(_take(pl, "rest_tension", base.rest_tension))
    deflection = pl.pop("deflection_gain", base.deflection_gain)
    point_gain = float(_take(pl, "point_load_gain", base.point_load_gain))
    theta_max = float(_take(pl, "theta_max_deg", math.degrees(base.theta_max)))
    if pl:
        raise ConfigError(f"unknown plant keys: {sorted(pl)}")

    ikd = data.pop("ik", {})
    tol = float(_take(ikd, "tol_pos", base.ik_tol_pos))
    it = int(_take(ikd, "max_iter", base.ik_max_iter))
    lam = float(_take(ikd, "lambda0", base.ik_lambda0))
    if ikd:
        raise ConfigError(f"unknown ik keys: {sorted(ikd)}")

    tr = data.pop("trajectory", {})
    dwell = float(_take(tr, "dwell_s", base.dwell_s))
    steady = float(_take(tr, "steady_window_s", base.steady_window_s))
    if tr:
        raise ConfigError(f"unknown trajectory keys: {sorted(tr)}")

    rm = data.pop("rmse", {})
    gauge = float(_take(rm, "gauge_eps_deg", base.gauge_eps_deg))
    if rm:
        raise ConfigError(f"unknown rmse keys: {sorted(rm)}")

    th = data.pop("thresholds", {})
    thresholds = Thresholds(
        config_rmse_deg=float(_take(th, "config_rmse_deg", base.thresholds.config_rmse_deg)),
        config_spread_deg=float(
            _take(th, "config_spread_deg", base.thresholds.config_spread_deg)
        ),
        task_rmse_m=float(_take(th, "task_rmse_m", base.thresholds.task_rmse_m)),
        disturb_max_dev_deg=float(
            _take(th, "disturb_max_dev_deg", base.thresholds.disturb_max_dev_deg)
        ),
        disturb_restore_deg=float(
            _take(th, "disturb_restore_deg", base.thresholds.disturb_restore_deg)
        ),
    )
    if th:
        raise ConfigError(f"unknown thresholds keys: {sorted(th)}")

    seed = int(data.pop("seed", base.seed))
    trials = int(data.pop("trials", base.trials))
    if data:
        raise ConfigError(f"unknown config keys: {sorted(data)}")

    return SimConfig(
        geometry=geometry,
        gains=gains,
        noise_sigma=noise_sigma,
        lag_constant=lag,
        tendon_stiffness=stiffness,
        rest_tension=rest,
        deflection_gain=None if deflection is None else float(deflection),
        point_load_gain=point_gain,
        theta_max=math.radians(theta_max),
        ik_tol_pos=tol,
        ik_max_iter=it,
        ik_lambda0=lam,
        dwell_s=dwell,
        steady_window_s=steady,
        gauge_eps_deg=gauge,
        seed=seed,
        trials=trials,
        thresholds=thresholds,
    )


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return from_dict(data)


def with_overrides(config, seed=None, trials=None, noise_sigma=None, lag_constant=None):
    """CLI flag overrides on top of a loaded config."""
    kwargs = {}
    if seed is not None:
        kwargs["seed"] = int(seed)
    if trials is not None:
        kwargs["trials"] = int(trials)
    if noise_sigma is not None:
        kwargs["noise_sigma"] = float(noise_sigma)
    if lag_constant is not None:
        kwargs["lag_constant"] = float(lag_constant)
    return replace(config, **kwargs) if kwargs else config
