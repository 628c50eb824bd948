"""YAML config loading for the robot geometry and benchmark specs."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import yaml

from .core import SolverId
from .kinematics import KinematicModel


class ConfigError(ValueError):
    """Malformed or inconsistent configuration input."""


def _load_yaml(path):
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return data


def load_robot(path):
    """Robot geometry file -> (KinematicModel, sampler law).

    Keys: lengths (four mm values d1, d3, d5, d7), optional joint_limits
    (seven [lo, hi] radian pairs), convention (standard | modified),
    sampler (ball | paper).
    """
    data = _load_yaml(path)
    try:
        model = KinematicModel(
            lengths=data["lengths"],
            joint_limits=data.get("joint_limits"),
            convention=data.get("convention", "standard"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    sampler = data.get("sampler", "ball")
    if sampler not in ("ball", "paper"):
        raise ConfigError(f"{path}: sampler must be 'ball' or 'paper'")
    return model, sampler


def default_model():
    """Unit-length canonical model (h = 1 mm, workspace radius 3 mm)."""
    return KinematicModel()


@dataclass
class BenchmarkSpec:
    """One benchmark campaign: a shared target batch applied to every
    listed algorithm."""
    n_targets: int = 100
    success_threshold: float = 1.0
    master_seed: int = 0
    algorithms: list = field(default_factory=lambda: list(SolverId))
    repeats_per_target: int = 1
    configs: dict = field(default_factory=dict)   # solver -> override dict
    budgets: dict = field(default_factory=dict)   # solver -> budget dict
    sampler: str = "ball"
    tree_path: str | None = None

    def __post_init__(self):
        if self.n_targets < 1:
            raise ConfigError("n_targets must be >= 1")
        if self.success_threshold <= 0:
            raise ConfigError("success_threshold must be positive")
        if self.repeats_per_target < 1:
            raise ConfigError("repeats_per_target must be >= 1")
        self.algorithms = [SolverId(a) for a in self.algorithms]


def load_benchmark_spec(path):
    data = _load_yaml(path)
    known = {"n_targets", "success_threshold", "master_seed", "algorithms",
             "repeats_per_target", "configs", "budgets", "sampler", "tree"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    try:
        return BenchmarkSpec(
            n_targets=data.get("n_targets", 100),
            success_threshold=data.get("success_threshold", 1.0),
            master_seed=data.get("master_seed", 0),
            algorithms=data.get("algorithms", [s.value for s in SolverId]),
            repeats_per_target=data.get("repeats_per_target", 1),
            configs=data.get("configs", {}),
            budgets=data.get("budgets", {}),
            sampler=data.get("sampler", "ball"),
            tree_path=data.get("tree"),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
