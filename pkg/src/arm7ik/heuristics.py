"""Greedy and annealing IK solvers: cyclic coordinate descent and
simulated annealing."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .core import Budget, ConvergenceTrace, SolveResult
from .kinematics import (KinematicModel, fitness, joint_frames, wrap_angle)
from .numeric import _finish


@dataclass(frozen=True)
class CcdConfig:
    max_cycles: int = 300
    per_joint_tolerance: float = 1e-12
    loop_guard: int = 30
    sweep_order: str = "tip_to_base"  # or "base_to_tip"

    def __post_init__(self):
        if self.max_cycles < 1:
            raise ValueError("max_cycles must be >= 1")


@dataclass(frozen=True)
class SaConfig:
    t_max: float = 100.0
    t_min: float = 1e-50
    cooling_rate: float = 0.7
    max_stay_counter: int = 20
    neighborhood_scale: float = 0.5
    step_decay: float = 0.2  # proposal width ~ (T / t_max) ** step_decay
    paper_literal_acceptance: bool = False

    def __post_init__(self):
        if not self.t_max > self.t_min > 0:
            raise ValueError("need t_max > t_min > 0")
        if not 0 < self.cooling_rate < 1:
            raise ValueError("cooling_rate must be in (0, 1)")


def ccd_joint_update(model: KinematicModel, q, joint, target):
    """Closed-form best angle for one joint with the rest frozen.

    Rotating the tool about the joint axis traces a circle; the distance
    to the target is minimised when the projections of (tool - origin)
    and (target - origin) onto the plane normal to the axis align.
    Returns the signed rotation to apply.
    """
    frames = joint_frames(model, q)
    axis = frames[joint][:3, 2]
    origin = frames[joint][:3, 3]
    p_e = frames[-1][:3, 3]
    v_cur = p_e - origin
    v_tgt = np.asarray(target, dtype=float) - origin
    cur_p = v_cur - np.dot(v_cur, axis) * axis
    tgt_p = v_tgt - np.dot(v_tgt, axis) * axis
    if np.linalg.norm(cur_p) < 1e-12 or np.linalg.norm(tgt_p) < 1e-12:
        return 0.0
    return math.atan2(float(np.dot(axis, np.cross(cur_p, tgt_p))),
                      float(np.dot(cur_p, tgt_p)))


def solve_ccd(model: KinematicModel, target, seed, config=None, budget=None):
    """Cyclic coordinate descent: optimise one joint at a time, cycling
    through the chain. The recorded trace keeps running minima, so the
    jittery raw curve comes out clipped."""
    config = config or CcdConfig()
    budget = budget or Budget(max_iterations=config.max_cycles)
    target = np.asarray(target, dtype=float)
    start = time.perf_counter()
    trace = ConvergenceTrace()

    q = wrap_angle(np.asarray(seed, dtype=float))
    best_q = q.copy()
    best_f = fitness(model, q, target)
    trace.record(0, best_f, time.perf_counter() - start)

    order = range(6, -1, -1) if config.sweep_order == "tip_to_base" else range(7)
    max_cycles = min(config.max_cycles, budget.max_iterations)
    stalled = 0
    cycle = 0
    while cycle < max_cycles and best_f >= budget.tolerance:
        cycle += 1
        for j in order:
            delta = ccd_joint_update(model, q, j, target)
            if abs(delta) > config.per_joint_tolerance:
                q[j] = wrap_angle(q[j] + delta)
        f = fitness(model, q, target)
        if f < best_f - 1e-15:
            best_f, best_q = f, q.copy()
            stalled = 0
        else:
            stalled += 1
        trace.record(cycle, f, time.perf_counter() - start)
        if stalled >= config.loop_guard:
            break  # oscillating cycle; bail out as non-converged
        if budget.wall_clock_limit and time.perf_counter() - start > budget.wall_clock_limit:
            break
    return _finish(model, best_q, best_f, cycle, start, budget, trace)


def temperature_schedule(config: SaConfig):
    """Yield the geometric cooling sequence t_max, t_max*r, ... while it
    stays above t_min."""
    t = config.t_max
    while t > config.t_min:
        yield t
        t *= config.cooling_rate


def acceptance_probability(delta_e, temperature, literal=False):
    """Probability of accepting a candidate with fitness change delta_e.

    Standard Metropolis: 1 for improvements, exp(-dE/T) otherwise. The
    literal variant keeps the printed rule exp(+dE/T), which accepts
    every worsening move.
    """
    if delta_e < 0:
        return 1.0
    exponent = delta_e / temperature if literal else -delta_e / temperature
    try:
        return min(1.0, math.exp(exponent))
    except OverflowError:
        return 1.0


def solve_sa(model: KinematicModel, target, config=None, budget=None,
             rng=None, seed=None):
    """Simulated annealing over the seven joint angles.

    Per temperature level, joints are swept one at a time with uniform
    proposals whose width shrinks with the temperature; the level ends
    after max_stay_counter consecutive proposals without a new best.
    Cooling is geometric. The best configuration ever seen is returned.
    """
    config = config or SaConfig()
    budget = budget or Budget(max_iterations=10_000)
    rng = rng or np.random.default_rng(0)
    target = np.asarray(target, dtype=float)
    start = time.perf_counter()
    trace = ConvergenceTrace()

    q = np.asarray(seed, dtype=float).copy() if seed is not None \
        else model.random_joints(rng)
    e_now = fitness(model, q, target)
    best_q, best_f = q.copy(), e_now
    trace.record(0, best_f, time.perf_counter() - start)

    level = 0
    for temperature in temperature_schedule(config):
        if level >= budget.max_iterations or best_f < budget.tolerance:
            break
        level += 1
        # Width cools slower than the temperature so a greedy refinement
        # phase survives after acceptance becomes selective.
        scale = config.neighborhood_scale * (
            temperature / config.t_max) ** config.step_decay
        stay = 0
        while stay < config.max_stay_counter:
            for j in range(7):
                q_new = q.copy()
                q_new[j] = wrap_angle(q_new[j] + rng.uniform(-scale, scale))
                e_new = fitness(model, q_new, target)
                delta = e_new - e_now
                if (delta < 0 or rng.random() < acceptance_probability(
                        delta, temperature, config.paper_literal_acceptance)):
                    q, e_now = q_new, e_new
                if e_new < best_f:
                    best_q, best_f = q_new.copy(), e_new
                    stay = 0
                else:
                    stay += 1
            if best_f < budget.tolerance:
                break
        trace.record(level, best_f, time.perf_counter() - start)
        if budget.wall_clock_limit and time.perf_counter() - start > budget.wall_clock_limit:
            break
    return _finish(model, best_q, best_f, level, start, budget, trace)
