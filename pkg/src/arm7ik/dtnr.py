"""Tree-seeded Newton-Raphson hybrid: a regression tree supplies the
initial joint guess, then Newton-Raphson refines only the first three
joints against the position target."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .core import Budget, ConvergenceTrace, SolveResult
from .kinematics import KinematicModel, dh_transform, wrap_angle
from .ml import RegressionTree
from .numeric import (DIVERGENCE_GUARD, STALL_STEP_NORM, NewtonConfig,
                      pseudo_inverse)


@dataclass(frozen=True)
class DtnrConfig:
    refine_joint_count: int = 3
    newton: NewtonConfig = field(
        default_factory=lambda: NewtonConfig(max_iterations=15))
    fallback_enabled: bool = False

    def __post_init__(self):
        if not 1 <= self.refine_joint_count <= 7:
            raise ValueError("refine_joint_count must be in [1, 7]")


def solve_dtnr(tree: RegressionTree, model: KinematicModel, target,
               config=None, budget=None):
    """Predict joints with the tree, then iterate Newton-Raphson on the
    leading refine_joint_count joints using the corresponding sub-block
    of the position Jacobian. The distal joints stay bitwise at the tree
    seed unless the (off-by-default) full-chain fallback fires.
    """
    config = config or DtnrConfig()
    budget = budget or Budget(max_iterations=config.newton.max_iterations)
    target = np.asarray(target, dtype=float)
    start = time.perf_counter()
    trace = ConvergenceTrace()

    seed = tree.predict(target)
    k = config.refine_joint_count
    q = np.asarray(seed, dtype=float).copy()

    # The distal joints never move, so their chain collapses to one fixed
    # transform; each iteration then only rebuilds the first k frames.
    tail = np.eye(4)
    for j in range(6, k - 1, -1):
        tail = dh_transform(model.rows[j], q[j], model.convention) @ tail

    def proximal_state(joints):
        frames = [np.eye(4)]
        t = np.eye(4)
        for j in range(k):
            t = t @ dh_transform(model.rows[j], joints[j], model.convention)
            frames.append(t)
        p_e = (t @ tail)[:3, 3]
        jac = np.empty((3, k))
        for j in range(k):
            jac[:, j] = np.cross(frames[j][:3, 2], p_e - frames[j][:3, 3])
        return p_e, jac

    p, sub_jac = proximal_state(q)
    best_q = q.copy()
    best_f = float(np.linalg.norm(p - target))
    trace.record(0, best_f, time.perf_counter() - start)  # tree stage
    stage_boundary = 0

    max_iter = min(config.newton.max_iterations, budget.max_iterations)
    prev_f = best_f
    rises = 0
    it = 0
    while it < max_iter and best_f >= budget.tolerance:
        it += 1
        step = pseudo_inverse(sub_jac, config.newton.damping) @ (p - target)
        q = q.copy()
        q[:k] = q[:k] - config.newton.step_scale * step
        p, sub_jac = proximal_state(q)
        f = float(np.linalg.norm(p - target))
        if f < best_f:
            best_f, best_q = f, q.copy()
        rises = rises + 1 if f > prev_f else 0
        prev_f = f
        trace.record(it, f, time.perf_counter() - start)
        if rises >= DIVERGENCE_GUARD or not np.all(np.isfinite(q)):
            break
        if np.linalg.norm(step) < STALL_STEP_NORM:
            break  # at the constrained optimum of the proximal joints

    used_fallback = False
    if best_f >= budget.tolerance and config.fallback_enabled:
        from .numeric import solve_newton_raphson
        used_fallback = True
        fb = solve_newton_raphson(model, target, seed, config.newton, budget)
        if fb.final_fitness < best_f:
            best_q, best_f = np.asarray(fb.joints), fb.final_fitness

    out = best_q.copy()
    out[:k] = wrap_angle(out[:k])
    if used_fallback:
        out = wrap_angle(out)
    result = SolveResult(
        joints=out,
        final_fitness=best_f,
        iterations_used=it,
        elapsed=time.perf_counter() - start,
        converged=best_f < budget.tolerance,
        trace=trace,
    )
    result.stage_boundary = stage_boundary
    result.used_fallback = used_fallback
    return result
