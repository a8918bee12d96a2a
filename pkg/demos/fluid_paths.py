"""
Fluid trajectories and the reflecting boundary
===============================================

Integrate the fluid model from the raw initial states used for each example
and report how long it takes to settle at the origin.
"""

import numpy as np

from ondemand_agents import EXAMPLES, EXAMPLE_INITS, FluidConfig, integrate, scale_center
from ondemand_agents.fluid import tail_decay_rate

cfg = FluidConfig(dt=1e-3, t_end=100)

for name in ("example1", "example2", "example4"):
    p = EXAMPLES[name]
    for init in EXAMPLE_INITS[name]:
        traj, v = integrate(scale_center(init, p), p, cfg)
        print(f"{name} from {init.as_tuple()}: {v.kind.value} at t={v.time}, "
              f"boundary hit={v.hit_boundary}, decay rate {tail_decay_rate(traj):.3f}")

###############################################################################
# With ``alpha = 0.9`` the matrix ``A_minus`` is no longer Hurwitz.  The
# path neither settles nor blows up; it keeps cycling.

p = EXAMPLES["example5b"]
traj, v = integrate(scale_center(EXAMPLE_INITS["example5b"][0], p), p, FluidConfig(t_end=200))
late = traj.norms()[traj.times > 150]
print(f"example5b: {v.kind.value}, norm over t>150 in [{late.min():.3f}, {late.max():.3f}]")

###############################################################################
# The pending-invitation coordinate never goes below ``x_min``.

p = EXAMPLES["example2"]
traj, v = integrate(scale_center(EXAMPLE_INITS["example2"][1], p), p, cfg)
print(f"x_min = {p.x_min:.4f}, smallest x reached = {np.min(traj.states[:, 0]):.4f}")
