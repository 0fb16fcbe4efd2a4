"""Control stack and simulator for a tendon-driven constant-curvature arm.

Modules
-------
kinematics   constant-curvature transforms and forward kinematics
estimation   quaternion samples -> arc parameters
actuation    tendon map, Jacobian, feedback law, tension supervision
ik           damped least-squares task-space inverse kinematics
plant        quasi-static simulated arm with disturbance injection
harness      experiment runner, RMSE scoring, exports
backend      compiled / pure-Python kernel selection
"""

from . import backend
from .actuation import (
    ControllerGains,
    TendonCommand,
    TendonJacobian,
    TendonLengths,
    TensionReadings,
    config_space_step,
    supervise_tension,
    tendon_jacobian,
    tendon_lengths,
)
from .config import SimConfig, default_config, load_config
from .errors import (
    ConfigError,
    DegenerateQuaternion,
    IncompleteLog,
    InvalidSegment,
    MismatchedChainLength,
    NotConverged,
    SoftarmError,
)
from .estimation import (
    Quaternion,
    SensorFrameSet,
    arc_parameters_from_quaternion,
    estimate_configuration,
    relative_orientation,
    wrap_shortest,
)
from .ik import IkSolution, TaskSpaceController, TaskTarget, position_jacobian, solve_ik, task_space_step
from .kinematics import (
    Configuration,
    HomogeneousTransform,
    SegmentConfig,
    SegmentGeometry,
    default_geometry,
    forward_kinematics,
    segment_rotation,
    segment_transform,
    segment_translation,
    tip_position,
)
from .plant import (
    ComplianceModel,
    DisturbanceSpec,
    Driver,
    PlantState,
    SimulatedPlantDriver,
    apply_command,
    apply_disturbance,
    calibrate_deflection_gain,
    initial_state,
    read_sensors,
)

__version__ = "0.1.0"
