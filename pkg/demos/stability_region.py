"""
Mapping the stability region
============================

Sweep ``gamma`` and ``epsilon`` around example1 and draw the region where
each sufficient condition holds.  ``2`` marks the first condition, ``3``
the second, ``*`` a CQLF found by the product test alone, ``.`` nothing.
"""

import numpy as np

from ondemand_agents import EXAMPLES
from ondemand_agents.experiments import parse_axis, sweep

base = EXAMPLES["example1"]
axes = [parse_axis("epsilon=3:0.1:24"), parse_axis("gamma=0.2:4:48")]
rows = sweep(base, axes)

for i, eps in enumerate(axes[0][1]):
    line = rows[i * 48:(i + 1) * 48]
    marks = "".join("2" if r["cond_thm2"] else "3" if r["cond_thm3"]
                    else "*" if r["cqlf_exists"] else "." for r in line)
    print(f"eps={eps:4.2f} {marks}")
print(" " * 9 + "gamma 0.2 -> 4")

###############################################################################
# Raising ``alpha`` shrinks the set where ``A_minus`` is Hurwitz.  For the
# example5 rates the switch happens where the closed-form test hits equality.

p = EXAMPLES["example5a"]
alphas = np.linspace(0.05, 0.9, 18)
flags = [r["aminus_hurwitz"] for r in sweep(p, [("alpha", alphas), ("gamma", np.array([1.0]))])]
print("".join("H" if f else "-" for f in flags), "for alpha", alphas[0], "->", alphas[-1])
