"""Manipulator geometry: DH transforms, forward kinematics, Jacobian,
fitness objective and workspace sampling for a 7-joint serial arm.

All lengths are millimetres, all angles radians. Joint vectors are plain
numpy arrays of shape (7,).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi

# Canonical DH table of the 7R arm: (alpha, a, d-slot index or None).
# Only rows 1, 3, 5, 7 carry a nonzero link offset (d1, d3, d5, d7).
_CANONICAL_ALPHA = (-math.pi / 2, -math.pi / 2, -math.pi / 2,
                    math.pi / 2, -math.pi / 2, math.pi / 2, 0.0)
_CANONICAL_D_ROWS = (0, 2, 4, 6)  # zero-based rows holding d1, d3, d5, d7


def wrap_angle(theta):
    """Wrap angle(s) into (-pi, pi]."""
    return -((-np.asarray(theta, dtype=float) + math.pi) % TWO_PI - math.pi)


@dataclass(frozen=True)
class DhRow:
    """One Denavit-Hartenberg row: rotation alpha about x, offsets a and d,
    and a fixed theta offset added to the joint variable."""
    alpha: float
    a: float
    d: float
    theta_offset: float = 0.0


@dataclass(frozen=True)
class WorkspaceSphere:
    """Reachable ball: centre (0, 0, h), radius r."""
    h: float
    r: float

    def contains(self, point) -> bool:
        p = np.asarray(point, dtype=float)
        return float(p[0] ** 2 + p[1] ** 2 + (p[2] - self.h) ** 2) <= self.r ** 2


class KinematicModel:
    """Seven-row DH chain plus joint limits.

    ``lengths`` are the four nonzero link offsets (d1, d3, d5, d7).
    ``convention`` selects the DH flavour: "standard" (distal,
    Rz*Tz*Tx*Rx) or "modified" (proximal, Rx*Tx*Rz*Tz).
    """

    def __init__(self, lengths=(1.0, 1.0, 1.0, 1.0), joint_limits=None,
                 convention="standard"):
        lengths = tuple(float(v) for v in lengths)
        if len(lengths) != 4 or any(v <= 0 for v in lengths):
            raise ValueError("need four positive link lengths (d1, d3, d5, d7)")
        if convention not in ("standard", "modified"):
            raise ValueError(f"unknown DH convention: {convention!r}")
        self.lengths = lengths
        self.convention = convention

        d = [0.0] * 7
        for slot, row in enumerate(_CANONICAL_D_ROWS):
            d[row] = lengths[slot]
        self.rows = tuple(DhRow(alpha=_CANONICAL_ALPHA[i], a=0.0, d=d[i])
                          for i in range(7))

        if joint_limits is None:
            joint_limits = [(-math.pi, math.pi)] * 7
        limits = np.asarray(joint_limits, dtype=float)
        if limits.shape != (7, 2):
            raise ValueError("joint_limits must be 7 (lo, hi) pairs")
        if np.any(limits[:, 0] >= limits[:, 1]):
            raise ValueError("every joint limit interval must be nonempty")
        if np.any(limits < -TWO_PI) or np.any(limits > TWO_PI):
            raise ValueError("joint limits must lie within [-2*pi, 2*pi]")
        self.joint_limits = limits
        self.lower = limits[:, 0].copy()
        self.upper = limits[:, 1].copy()

        # Per-row trig constants, hoisted out of the FK inner loop.
        self._ca = np.cos([r.alpha for r in self.rows])
        self._sa = np.sin([r.alpha for r in self.rows])
        self._d = np.array(d)
        self._a = np.zeros(7)
        self._off = np.array([r.theta_offset for r in self.rows])

    @property
    def d1(self):
        return self.lengths[0]

    @property
    def workspace(self) -> WorkspaceSphere:
        d1, d3, d5, d7 = self.lengths
        return WorkspaceSphere(h=d1, r=d3 + d5 + d7)

    def clip_to_limits(self, q):
        """Wrap into (-pi, pi] then clip into the joint limit box."""
        return np.clip(wrap_angle(q), self.lower, self.upper)

    def random_joints(self, rng):
        """Uniform joint vector within the limits."""
        return rng.uniform(self.lower, self.upper)


def dh_transform(row: DhRow, theta: float, convention: str = "standard"):
    """4x4 homogeneous transform of one joint.

    Standard (distal) convention: Rz(theta)*Tz(d)*Tx(a)*Rx(alpha).
    Modified (proximal) convention: Rx(alpha)*Tx(a)*Rz(theta)*Tz(d).
    """
    th = theta + row.theta_offset
    ct, st = math.cos(th), math.sin(th)
    ca, sa = math.cos(row.alpha), math.sin(row.alpha)
    if convention == "standard":
        return np.array([
            [ct, -st * ca, st * sa, row.a * ct],
            [st, ct * ca, -ct * sa, row.a * st],
            [0.0, sa, ca, row.d],
            [0.0, 0.0, 0.0, 1.0],
        ])
    if convention == "modified":
        return np.array([
            [ct, -st, 0.0, row.a],
            [st * ca, ct * ca, -sa, -row.d * sa],
            [st * sa, ct * sa, ca, row.d * ca],
            [0.0, 0.0, 0.0, 1.0],
        ])
    raise ValueError(f"unknown DH convention: {convention!r}")


def forward_kinematics(model: KinematicModel, q):
    """Base-to-tool 4x4 transform: product of the seven joint transforms."""
    q = np.asarray(q, dtype=float)
    t = np.eye(4)
    for i, row in enumerate(model.rows):
        t = t @ dh_transform(row, q[i], model.convention)
    return t


def joint_frames(model: KinematicModel, q):
    """All intermediate transforms [T0..T7]; T0 is the identity."""
    q = np.asarray(q, dtype=float)
    frames = [np.eye(4)]
    t = np.eye(4)
    for i, row in enumerate(model.rows):
        t = t @ dh_transform(row, q[i], model.convention)
        frames.append(t)
    return frames


def end_effector_position(model: KinematicModel, q):
    """Tool-point position, the translation column of the FK transform."""
    return forward_kinematics(model, q)[:3, 3]


def batch_end_effector_positions(model: KinematicModel, qs):
    """Vectorised FK translation for an (n, 7) array of joint vectors.

    Composes rotation/translation incrementally instead of stacking 4x4
    products; this is the hot path for the population solvers and the
    dataset generator.
    """
    qs = np.asarray(qs, dtype=float)
    n = qs.shape[0]
    rot = np.broadcast_to(np.eye(3), (n, 3, 3)).copy()
    pos = np.zeros((n, 3))
    for i in range(7):
        th = qs[:, i] + model._off[i]
        ct, st = np.cos(th), np.sin(th)
        ca, sa = model._ca[i], model._sa[i]
        a, d = model._a[i], model._d[i]
        if model.convention == "standard":
            local_r = np.empty((n, 3, 3))
            local_r[:, 0, 0] = ct
            local_r[:, 0, 1] = -st * ca
            local_r[:, 0, 2] = st * sa
            local_r[:, 1, 0] = st
            local_r[:, 1, 1] = ct * ca
            local_r[:, 1, 2] = -ct * sa
            local_r[:, 2, 0] = 0.0
            local_r[:, 2, 1] = sa
            local_r[:, 2, 2] = ca
            local_p = np.stack([a * ct, a * st, np.full(n, d)], axis=1)
        else:
            local_r = np.empty((n, 3, 3))
            local_r[:, 0, 0] = ct
            local_r[:, 0, 1] = -st
            local_r[:, 0, 2] = 0.0
            local_r[:, 1, 0] = st * ca
            local_r[:, 1, 1] = ct * ca
            local_r[:, 1, 2] = -sa
            local_r[:, 2, 0] = st * sa
            local_r[:, 2, 1] = ct * sa
            local_r[:, 2, 2] = ca
            local_p = np.stack([np.full(n, a), np.full(n, -d * sa),
                                np.full(n, d * ca)], axis=1)
        pos = pos + np.einsum("nij,nj->ni", rot, local_p)
        rot = np.einsum("nij,njk->nik", rot, local_r)
    return pos


def fitness(model: KinematicModel, q, target):
    """Euclidean distance (mm) from the tool point to the target."""
    p = end_effector_position(model, q)
    return float(np.linalg.norm(p - np.asarray(target, dtype=float)))


def batch_fitness(model: KinematicModel, qs, target):
    """Distances to one target for many joint vectors at once."""
    p = batch_end_effector_positions(model, qs)
    return np.linalg.norm(p - np.asarray(target, dtype=float), axis=1)


def position_jacobian(model: KinematicModel, q):
    """Analytic 3x7 position Jacobian, column j = z_j x (p_e - p_j)."""
    frames = joint_frames(model, q)
    p_e = frames[-1][:3, 3]
    jac = np.empty((3, 7))
    for j in range(7):
        z = frames[j][:3, 2]
        p = frames[j][:3, 3]
        jac[:, j] = np.cross(z, p_e - p)
    return jac


def finite_difference_jacobian(model: KinematicModel, q, step=1e-6):
    """Central-difference position Jacobian; the cross-check oracle."""
    q = np.asarray(q, dtype=float)
    jac = np.empty((3, 7))
    for j in range(7):
        hi = q.copy()
        lo = q.copy()
        hi[j] += step
        lo[j] -= step
        jac[:, j] = (end_effector_position(model, hi)
                     - end_effector_position(model, lo)) / (2.0 * step)
    return jac


def is_reachable(sphere: WorkspaceSphere, target) -> bool:
    """Membership in the closed workspace ball."""
    return sphere.contains(target)


def sample_workspace(sphere: WorkspaceSphere, rng, law="ball"):
    """One random target inside the workspace sphere.

    law="ball" draws uniformly over the ball volume (r = R*u^(1/3));
    law="paper" uses the disk-style square-root radius law instead, kept
    for exact-reproduction runs.
    """
    u = rng.random()
    if law == "ball":
        r = sphere.r * u ** (1.0 / 3.0)
    elif law == "paper":
        r = sphere.r * math.sqrt(u)
    else:
        raise ValueError(f"unknown sampling law: {law!r}")
    # Uniform direction from two angles.
    phi = rng.uniform(0.0, TWO_PI)
    cos_t = rng.uniform(-1.0, 1.0)
    sin_t = math.sqrt(max(0.0, 1.0 - cos_t * cos_t))
    return np.array([r * sin_t * math.cos(phi),
                     r * sin_t * math.sin(phi),
                     sphere.h + r * cos_t])


def sample_workspace_batch(sphere: WorkspaceSphere, rng, count, law="ball"):
    """Stack of `count` workspace samples, shape (count, 3).

    Same distribution as sample_workspace, drawn vectorised; the random
    stream is consumed in a different order than repeated single calls.
    """
    draws = rng.random((count, 3))
    if law == "ball":
        r = sphere.r * draws[:, 0] ** (1.0 / 3.0)
    elif law == "paper":
        r = sphere.r * np.sqrt(draws[:, 0])
    else:
        raise ValueError(f"unknown sampling law: {law!r}")
    phi = TWO_PI * draws[:, 1]
    cos_t = 2.0 * draws[:, 2] - 1.0
    sin_t = np.sqrt(np.maximum(0.0, 1.0 - cos_t ** 2))
    return np.stack([r * sin_t * np.cos(phi),
                     r * sin_t * np.sin(phi),
                     sphere.h + r * cos_t], axis=1)
