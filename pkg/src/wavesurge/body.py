"""Bottom-hinged rigid flap with a run-time-variable PTO damping coefficient.

Rotation convention: theta = 0 is upright, positive tilts the top of the
flap toward the beach (+x). In that convention a reference offset q from the
pivot maps to R(theta) q with

    R = [[cos, sin], [-sin, cos]],     d/dt -> velocity = Omega * S q,
    S = dR/dtheta = [[-sin, cos], [-cos, -sin]],   acceleration includes
    the centripetal term -Omega^2 R q.

The mass center sits above the pivot, so gravity is destabilizing:
tau_gravity = +m g d_cm sin(theta). Buoyancy (which actually rights the
flap) arrives through the fluid pressure forces.

The hinge ODE  J dOmega/dt = tau_ext - k_d Omega  is integrated
semi-implicitly: the damping term is taken at the new angular velocity, so
the update is exact in the stiff-damping limit and unconditionally stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import GRAVITY

KD_MIN = 0.0
KD_MAX = 100.0
ACTION_LIMIT = 25.0     # |dk_d| per action step
RAMP_STEPS = 10         # M increments per action


class FlapOverRotation(RuntimeError):
    """Flap exceeded +/- 90 degrees; the simulation state is unusable."""


@dataclass(frozen=True)
class FlapGeometry:
    pivot: tuple[float, float]
    thickness: float = 0.12
    height: float = 0.48
    width: float = 1.04           # out-of-plane width, scales 2D loads
    mass: float = 33.0            # kg
    inertia_hinge: float = 1.84   # kg m^2 about the pivot
    cm_distance: float = 0.24     # pivot-to-mass-center distance, m


class FlapBody:
    """Kinematic state, damping-ramp state, and load aggregation for one flap."""

    def __init__(self, geometry: FlapGeometry, index_start: int, index_stop: int,
                 ref_offsets: np.ndarray, ref_normals: np.ndarray,
                 k_d: float = 0.0, flap_id: int = 0):
        self.geometry = geometry
        self.idx = slice(index_start, index_stop)
        self.ref_offsets = np.asarray(ref_offsets, dtype=float)
        self.ref_normals = np.asarray(ref_normals, dtype=float)
        self.flap_id = flap_id
        self.theta = 0.0
        self.omega = 0.0
        self.omega_dot = 0.0          # lagged angular acceleration
        self.k_d = float(k_d)
        self.ramp_increment = 0.0
        self.ramp_remaining = 0
        self.bounds_flag = False
        self.tau_fluid = 0.0          # latest fluid torque, width-scaled
        self.force = np.zeros(2)      # latest total fluid force, width-scaled

    # -- damping schedule -------------------------------------------------

    def set_target_damping(self, dk_d: float, t_a: float) -> None:
        """Schedule M equal k_d increments over the action period t_a.

        Raises on |dk_d| > 25 (caller contract). The bounds flag records
        whether the requested target left [0, 100] (it feeds the reward
        penalty); each increment is clamped so k_d itself never leaves the
        operating range.
        """
        if abs(dk_d) > ACTION_LIMIT + 1e-12:
            raise ValueError(f"|dk_d| <= {ACTION_LIMIT} required, got {dk_d}")
        target = self.k_d + dk_d
        self.bounds_flag = target < KD_MIN - 1e-12 or target > KD_MAX + 1e-12
        self.ramp_increment = dk_d / RAMP_STEPS
        self.ramp_remaining = RAMP_STEPS

    def ramp_tick(self) -> None:
        """Apply one scheduled damping increment (start of a ramp substep)."""
        if self.ramp_remaining > 0:
            self.k_d = min(max(self.k_d + self.ramp_increment, KD_MIN), KD_MAX)
            self.ramp_remaining -= 1

    # -- dynamics ----------------------------------------------------------

    def gravity_torque(self) -> float:
        g = self.geometry
        return g.mass * GRAVITY * g.cm_distance * math.sin(self.theta)

    def hinge_advance(self, tau_fluid: float, dt: float) -> None:
        """One semi-implicit step of J dOmega/dt = tau - k_d Omega."""
        g = self.geometry
        tau = tau_fluid + self.gravity_torque()
        omega_new = (self.omega + dt * tau / g.inertia_hinge) / \
            (1.0 + dt * self.k_d / g.inertia_hinge)
        self.omega_dot = (omega_new - self.omega) / dt
        self.omega = omega_new
        self.theta += dt * omega_new
        if abs(self.theta) >= 0.5 * math.pi:
            raise FlapOverRotation(
                f"flap {self.flap_id} rotated to {math.degrees(self.theta):.1f} deg "
                f"(omega={self.omega:.3f} rad/s, k_d={self.k_d:.1f})")

    def sync_particles(self, ps) -> None:
        """Write rigid-body positions, velocities, normals, and accelerations."""
        c = math.cos(self.theta)
        s = math.sin(self.theta)
        q = self.ref_offsets
        rx = c * q[:, 0] + s * q[:, 1]
        ry = -s * q[:, 0] + c * q[:, 1]
        px, py = self.geometry.pivot
        sl = self.idx
        ps.pos[sl, 0] = px + rx
        ps.pos[sl, 1] = py + ry
        # S(theta) q and the lagged acceleration Omega' S q - Omega^2 R q
        sqx = -s * q[:, 0] + c * q[:, 1]
        sqy = -c * q[:, 0] - s * q[:, 1]
        ps.vel[sl, 0] = self.omega * sqx
        ps.vel[sl, 1] = self.omega * sqy
        om2 = self.omega * self.omega
        ps.solid_acc[sl, 0] = self.omega_dot * sqx - om2 * rx
        ps.solid_acc[sl, 1] = self.omega_dot * sqy - om2 * ry
        n = self.ref_normals
        ps.normal[sl, 0] = c * n[:, 0] + s * n[:, 1]
        ps.normal[sl, 1] = -s * n[:, 0] + c * n[:, 1]

    def aggregate_loads(self, ps, body_force: np.ndarray) -> tuple[np.ndarray, float]:
        """Total force and pivot torque from per-particle loads, width-scaled.

        The torque sign follows the clockwise-positive rotation convention,
        tau = sum (r_y - p_y) f_x - (r_x - p_x) f_y.
        """
        sl = self.idx
        f = body_force[sl]
        px, py = self.geometry.pivot
        arm_x = ps.pos[sl, 0] - px
        arm_y = ps.pos[sl, 1] - py
        tau = float((arm_y * f[:, 0] - arm_x * f[:, 1]).sum()) * self.geometry.width
        force = f.sum(axis=0) * self.geometry.width
        return force, tau

    def instantaneous_power(self) -> float:
        """k_d Omega^2, W (PTO extraction rate at this instant)."""
        return self.k_d * self.omega * self.omega

    def state_dict(self) -> dict:
        return {
            "theta": self.theta, "omega": self.omega, "omega_dot": self.omega_dot,
            "k_d": self.k_d, "ramp_increment": self.ramp_increment,
            "ramp_remaining": self.ramp_remaining, "bounds_flag": self.bounds_flag,
        }

    def load_state_dict(self, d: dict) -> None:
        self.theta = float(d["theta"])
        self.omega = float(d["omega"])
        self.omega_dot = float(d["omega_dot"])
        self.k_d = float(d["k_d"])
        self.ramp_increment = float(d["ramp_increment"])
        self.ramp_remaining = int(d["ramp_remaining"])
        self.bounds_flag = bool(d["bounds_flag"])
