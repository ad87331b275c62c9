"""Exploration reward for the camera policy: alignment with the heuristic
direction, newly explored area, and a unit penalty whenever the camera
motor actuates. The three terms are combined as

    total = alpha * (s_prev - s_now) + beta * (c_now - c_prev) - penalty

with s the camera/heuristic angle in degrees and c the explored area in
square meters; the defaults keep the terms on comparable scales.
"""

from __future__ import annotations

from dataclasses import dataclass

import math


class RewardDomainError(ValueError):
    """Inputs violate the reward's domain (area shrank or angle out of range)."""


@dataclass(frozen=True)
class RewardConfig:
    alpha: float = 10.0   # scales the alignment term
    beta: float = 1.0     # scales the area term

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0")


@dataclass(frozen=True)
class RewardState:
    s_prev: float   # degrees in [0, 180], previous camera/heuristic angle
    c_prev: float   # square meters explored so far


@dataclass(frozen=True)
class RewardBreakdown:
    r_heuristic: float
    r_area: float
    r_turn_penalty: float
    total: float


def reward_step(rstate: RewardState, s_now: float, c_now: float,
                motor_actuated: bool,
                cfg: RewardConfig = RewardConfig()) -> tuple[RewardBreakdown, RewardState]:
    """One reward evaluation; returns the breakdown and the carried state."""
    if not 0.0 <= s_now <= 180.0:
        raise RewardDomainError(f"angle {s_now} outside [0, 180]")
    if c_now < rstate.c_prev:
        raise RewardDomainError(
            f"explored area decreased: {rstate.c_prev} -> {c_now}")
    r_heuristic = rstate.s_prev - s_now
    r_area = c_now - rstate.c_prev
    r_turn_penalty = 1.0 if motor_actuated else 0.0
    total = cfg.alpha * r_heuristic + cfg.beta * r_area - r_turn_penalty
    return (RewardBreakdown(r_heuristic=r_heuristic, r_area=r_area,
                            r_turn_penalty=r_turn_penalty, total=total),
            RewardState(s_prev=s_now, c_prev=c_now))


def motor_actuation_rate(episode_log) -> float:
    """Fraction of steps whose camera motor actuated. Accepts any sequence
    of records carrying a motor_actuated attribute, or plain booleans."""
    flags = [bool(getattr(rec, "motor_actuated", rec)) for rec in episode_log]
    if not flags:
        raise ValueError("empty episode log")
    return sum(flags) / len(flags)


def nav_progress_reward(prev_goal_dist: float, goal_dist: float) -> float:
    """Optional shaping term for joint navigation training: reduction of
    the distance to the current goal."""
    return prev_goal_dist - goal_dist
