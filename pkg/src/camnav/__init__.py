"""camnav: a 2D multi-object navigation simulator with an actively
steered camera.

The package couples a frontier-exploration navigation policy with camera
policies that decide where to look: rule-based controllers and a small
recurrent actor-critic trained from scratch with PPO on an exploration
reward.
"""

__version__ = "0.1.0"
