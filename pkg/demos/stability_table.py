"""
Which parameter sets admit a common Lyapunov function?
=======================================================

Classify the bundled example parameter sets.  Each row shows the two
sufficient conditions, whether ``A_minus`` is Hurwitz, and the verdict.
"""

from ondemand_agents import EXAMPLES, classify

print(f"{'name':20s} {'thm2':>5s} {'thm3':>5s} {'A-':>5s}  verdict")
for name, p in EXAMPLES.items():
    rep = classify(p)
    print(f"{name:20s} {rep.cond_thm2!s:>5} {rep.cond_thm3!s:>5} "
          f"{rep.aminus_hurwitz!s:>5}  {rep.verdict.value}")

###############################################################################
# example4 fails both sufficient conditions, yet the rank-one test on the
# product ``A_plus @ A_minus`` still finds a CQLF.  The discriminant of the
# product cubic tells the same story:

rep = classify(EXAMPLES["example4"])
print("product discriminant:", rep.discriminant_product)
print("negative real eigenvalue:", rep.product_has_negative_real_eig)
