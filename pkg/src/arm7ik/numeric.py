"""Numerical IK solvers: Newton-Raphson with a pseudo-inverse Jacobian,
and the Nelder-Mead downhill simplex."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .core import Budget, ConvergenceTrace, SolveResult
from .kinematics import (KinematicModel, end_effector_position, fitness,
                         joint_frames, position_jacobian, wrap_angle)

DIVERGENCE_GUARD = 5   # consecutive fitness increases before aborting
STALL_STEP_NORM = 1e-8  # joint-space step below which Newton has stalled


@dataclass(frozen=True)
class NewtonConfig:
    max_iterations: int = 30
    damping: float = 0.0
    step_scale: float = 1.0

    def __post_init__(self):
        if self.damping < 0:
            raise ValueError("damping must be nonnegative")
        if not 0 < self.step_scale <= 1:
            raise ValueError("step_scale must be in (0, 1]")


@dataclass(frozen=True)
class NelderMeadConfig:
    max_iterations: int = 799
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    initial_simplex_scale: float = 0.35

    def __post_init__(self):
        if self.reflection <= 0 or self.expansion <= 1:
            raise ValueError("need reflection > 0 and expansion > 1")
        if not (0 < self.contraction < 1 and 0 < self.shrink < 1):
            raise ValueError("contraction and shrink must be in (0, 1)")


def pseudo_inverse(jac, damping=0.0):
    """Moore-Penrose pseudo-inverse (SVD, singular values below 1e-12
    zeroed) or, with damping > 0, damped least squares J^T (J J^T + l^2 I)^-1."""
    jac = np.asarray(jac, dtype=float)
    if damping > 0.0:
        m = jac.shape[0]
        return jac.T @ np.linalg.inv(jac @ jac.T + damping ** 2 * np.eye(m))
    u, s, vt = np.linalg.svd(jac, full_matrices=False)
    s_inv = np.where(s > 1e-12, 1.0 / np.where(s > 0, s, 1.0), 0.0)
    return vt.T @ (s_inv[:, None] * u.T)


def _finish(model, q, best_f, iterations, start, budget, trace):
    q = wrap_angle(q)
    return SolveResult(
        joints=q,
        final_fitness=best_f,
        iterations_used=iterations,
        elapsed=time.perf_counter() - start,
        converged=best_f < budget.tolerance,
        trace=trace,
    )


def solve_newton_raphson(model: KinematicModel, target, seed, config=None,
                         budget=None):
    """Iterate q <- q - step * J+ (p(q) - target) until the tolerance or
    the budget is hit. Divergence (five consecutive fitness increases) is
    reported as a non-converged result."""
    config = config or NewtonConfig()
    budget = budget or Budget(max_iterations=config.max_iterations)
    target = np.asarray(target, dtype=float)
    start = time.perf_counter()
    trace = ConvergenceTrace()

    q = np.asarray(seed, dtype=float).copy()
    best_q = q.copy()
    best_f = fitness(model, q, target)
    trace.record(0, best_f, time.perf_counter() - start)

    max_iter = min(config.max_iterations, budget.max_iterations)
    prev_f = best_f
    rises = 0
    it = 0
    while it < max_iter and best_f >= budget.tolerance:
        it += 1
        frames = joint_frames(model, q)
        p = frames[-1][:3, 3]
        jac = np.empty((3, 7))
        for j in range(7):
            jac[:, j] = np.cross(frames[j][:3, 2], p - frames[j][:3, 3])
        step = config.step_scale * (pseudo_inverse(jac, config.damping)
                                    @ (p - target))
        q = q - step
        f = fitness(model, q, target)
        if f < best_f:
            best_f, best_q = f, q.copy()
        rises = rises + 1 if f > prev_f else 0
        prev_f = f
        trace.record(it, f, time.perf_counter() - start)
        if rises >= DIVERGENCE_GUARD or not np.all(np.isfinite(q)):
            break
        if np.linalg.norm(step) < STALL_STEP_NORM:
            break  # pinned at a constrained optimum; no progress possible
        if budget.wall_clock_limit and time.perf_counter() - start > budget.wall_clock_limit:
            break
    return _finish(model, best_q, best_f, it, start, budget, trace)


def nelder_mead_minimize(obj, x0, config=None, budget=None,
                         restart_sampler=None, trace=None, start=None):
    """Reflect/expand/contract/shrink simplex minimisation of an
    arbitrary objective over R^n. Returns (best_x, best_value, iterations).

    A degenerate simplex triggers a restart from restart_sampler() when
    one is supplied (otherwise the search just stops); restarts count
    against the budget.
    """
    config = config or NelderMeadConfig()
    budget = budget or Budget(max_iterations=config.max_iterations)
    start = time.perf_counter() if start is None else start
    x0 = np.asarray(x0, dtype=float)
    dims = x0.size

    def build_simplex(center):
        pts = [np.asarray(center, dtype=float).copy()]
        for j in range(dims):
            v = pts[0].copy()
            v[j] += config.initial_simplex_scale
            pts.append(v)
        return np.array(pts)

    simplex = build_simplex(x0)
    values = np.array([obj(v) for v in simplex])
    max_iter = min(config.max_iterations, budget.max_iterations)
    it = 0
    if trace is not None:
        trace.record(0, float(values.min()), time.perf_counter() - start)

    while it < max_iter and values.min() >= budget.tolerance:
        it += 1
        order = np.argsort(values)
        simplex, values = simplex[order], values[order]

        # Restart on simplex collapse.
        if np.ptp(simplex, axis=0).max() < 1e-15:
            if restart_sampler is None:
                break
            simplex = build_simplex(restart_sampler())
            values = np.array([obj(v) for v in simplex])
            if trace is not None:
                trace.record(it, float(values.min()),
                             time.perf_counter() - start)
            continue

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        reflected = centroid + config.reflection * (centroid - worst)
        f_r = obj(reflected)
        if f_r < values[0]:
            expanded = centroid + config.expansion * (reflected - centroid)
            f_e = obj(expanded)
            if f_e < f_r:
                simplex[-1], values[-1] = expanded, f_e
            else:
                simplex[-1], values[-1] = reflected, f_r
        elif f_r < values[-2]:
            simplex[-1], values[-1] = reflected, f_r
        else:
            contracted = centroid + config.contraction * (worst - centroid)
            f_c = obj(contracted)
            if f_c < values[-1]:
                simplex[-1], values[-1] = contracted, f_c
            else:
                best = simplex[0]
                for k in range(1, len(simplex)):
                    simplex[k] = best + config.shrink * (simplex[k] - best)
                    values[k] = obj(simplex[k])
        if trace is not None:
            trace.record(it, float(values.min()), time.perf_counter() - start)
        if budget.wall_clock_limit and time.perf_counter() - start > budget.wall_clock_limit:
            break

    best_i = int(np.argmin(values))
    return simplex[best_i], float(values[best_i]), it


def solve_nelder_mead(model: KinematicModel, target, seed, config=None,
                      budget=None, rng=None):
    """Downhill simplex over the seven joint angles, minimising the
    Euclidean distance to the target position."""
    config = config or NelderMeadConfig()
    budget = budget or Budget(max_iterations=config.max_iterations)
    rng = rng or np.random.default_rng(0)
    target = np.asarray(target, dtype=float)
    start = time.perf_counter()
    trace = ConvergenceTrace()
    best_q, best_f, it = nelder_mead_minimize(
        lambda q: fitness(model, q, target), seed, config, budget,
        restart_sampler=lambda: model.random_joints(rng),
        trace=trace, start=start)
    return _finish(model, best_q, best_f, it, start, budget, trace)
