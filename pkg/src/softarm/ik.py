"""Numerical task-space inverse kinematics (damped least squares).

Position-only: the task is a 3-vector target for the end effector, the
configuration has 2n degrees of freedom. Damping handles the rank
deficiency at straight segments, where the bending plane has no effect.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .actuation import config_space_step
from .errors import NotConverged
from .kinematics import (
    DEFAULT_THETA_MAX,
    Configuration,
    canonical_vector,
    config_vector,
    geometry_arrays,
)

DEFAULT_TOL_POS = 1e-4
DEFAULT_MAX_ITER = 100
DEFAULT_LAMBDA = 1e-3
DEFAULT_FD_STEP = 1e-6
_MAX_BACKOFF = 24
# Straight segments leave the solver rank-deficient in the lateral
# directions; they are seeded with this curvature, bending plane aimed
# at the residual (deterministic, and free because phi is gauge there).
_SEED_THETA = 1e-3


@dataclass(frozen=True)
class TaskTarget:
    """Desired end-effector position [x, y, z], meters."""

    position: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "position", np.asarray(self.position, dtype=float).reshape(3)
        )


@dataclass(frozen=True)
class IkSolution:
    q_star: Configuration
    residual: float
    iterations: int
    converged: bool


def position_jacobian(q, geometry, h=DEFAULT_FD_STEP):
    """Central finite differences of the tip position, shape (3, 2n)."""
    qv = config_vector(q)
    lengths, _, _ = geometry_arrays(geometry)
    return backend.kernels().position_jacobian(qv, lengths, h)


def solve_ik(
    target,
    q0,
    geometry,
    tol_pos=DEFAULT_TOL_POS,
    max_iter=DEFAULT_MAX_ITER,
    lambda0=DEFAULT_LAMBDA,
    theta_max=DEFAULT_THETA_MAX,
    strict=False,
):
    """Damped least-squares iteration from a warm start.

    Steps solve (J'J + lambda^2 I) dq = J' r; a step is accepted only if
    it reduces the position residual, otherwise lambda doubles and the
    step is retried, so the residual of accepted iterates never
    increases. Every iterate is wrapped/clamped back into the canonical
    chart before evaluation. With ``strict`` a failure raises
    :class:`NotConverged` carrying the best iterate; otherwise the best
    iterate is returned with ``converged=False``.
    """
    t_d = target.position if isinstance(target, TaskTarget) else np.asarray(target, float)
    lengths, _, _ = geometry_arrays(geometry)
    reach = float(lengths.sum())
    q = canonical_vector(config_vector(q0), theta_max)
    m = q.shape[0]

    kern = backend.kernels()
    residual_vec = t_d - kern.tip_position(q, lengths)
    best_res = float(np.linalg.norm(residual_vec))
    iterations = 0
    lam = lambda0

    if best_res >= tol_pos and np.any(q[1::2] < _SEED_THETA):
        azimuth = math.atan2(residual_vec[1], residual_vec[0])
        for i in range(m // 2):
            if q[2 * i + 1] < _SEED_THETA:
                q[2 * i] = azimuth
                q[2 * i + 1] = _SEED_THETA
        residual_vec = t_d - kern.tip_position(q, lengths)
        best_res = float(np.linalg.norm(residual_vec))

    while best_res >= tol_pos and iterations < max_iter:
        jac = kern.position_jacobian(q, lengths, DEFAULT_FD_STEP)
        jtj = jac.T @ jac
        jtr = jac.T @ residual_vec
        accepted = False
        for _ in range(_MAX_BACKOFF):
            try:
                dq = np.linalg.solve(jtj + lam * lam * np.eye(m), jtr)
            except np.linalg.LinAlgError:
                lam *= 2.0
                continue
            q_try = canonical_vector(q + dq, theta_max)
            r_try = t_d - kern.tip_position(q_try, lengths)
            res_try = float(np.linalg.norm(r_try))
            if res_try < best_res:
                q, residual_vec, best_res = q_try, r_try, res_try
                lam = max(lambda0, lam * 0.5)
                accepted = True
                break
            lam *= 2.0
        iterations += 1
        if not accepted:
            break

    converged = best_res < tol_pos
    solution = IkSolution(Configuration.from_vector(q), best_res, iterations, converged)
    if not converged and strict:
        hint = "" if np.linalg.norm(t_d) <= reach else " (target outside reach)"
        raise NotConverged(
            f"ik stalled at residual {best_res:.3e} m after "
            f"{iterations} iterations{hint}",
            solution=solution,
        )
    return solution


class TaskSpaceController:
    """Per-tick task-space regulator: IK then configuration-space law.

    Keeps the last admissible configuration target so a failed solve
    leaves the commanded set-point unchanged.
    """

    def __init__(
        self,
        geometry,
        tol_pos=DEFAULT_TOL_POS,
        max_iter=DEFAULT_MAX_ITER,
        lambda0=DEFAULT_LAMBDA,
        theta_max=DEFAULT_THETA_MAX,
    ):
        self.geometry = geometry
        self.tol_pos = tol_pos
        self.max_iter = max_iter
        self.lambda0 = lambda0
        self.theta_max = theta_max
        self.last_q_d = None
        self.last_solution = None

    def step(self, target, q, gains):
        sol = solve_ik(
            target,
            q,
            self.geometry,
            tol_pos=self.tol_pos,
            max_iter=self.max_iter,
            lambda0=self.lambda0,
            theta_max=self.theta_max,
        )
        self.last_solution = sol
        if sol.converged:
            self.last_q_d = sol.q_star.as_vector()
        elif self.last_q_d is None:
            # nothing admissible yet: hold the current estimate
            self.last_q_d = canonical_vector(config_vector(q), self.theta_max)
        return config_space_step(q, self.last_q_d, gains, self.geometry)


def task_space_step(target, q, gains, geometry, controller=None):
    """One tick of task-space control (stateless convenience wrapper)."""
    if controller is None:
        controller = TaskSpaceController(geometry)
    return controller.step(target, q, gains)
