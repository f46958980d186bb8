"""Why the plain sign link cannot be consistent for structured binary
classification unless the set function is modular.

The symmetric certificate builds two nearby distributions that share one
optimal abstaining report while demanding different sign answers. The
asymmetric certificate (which covers Jaccard) isolates the all-abstain
report as the unique optimum and shows the sign of zero must answer wrong.

Run:  python3 demos/04_inconsistency.py
"""

import numpy as np

from lovasz_abstain import (
    counterexample_asymmetric,
    counterexample_symmetric,
    make_jaccard,
    make_modular,
    make_sqrt_card,
    make_zero_one,
)

print("== symmetric case ==")
for name, f in [
    ("nonempty indicator, k=3", make_zero_one(3)),
    ("sqrt cardinality, k=3", make_sqrt_card(3)),
    ("modular, k=3", make_modular([1.0, 2.0, 0.5])),
]:
    res = counterexample_symmetric(f)
    if res.consistent_case:
        print(f"{name}: modular, the weighted sign link is consistent; no certificate")
        continue
    print(f"{name}: certificate with bump eps = {res.epsilon:.6f}")
    print(f"  optimal abstaining report v = {res.v}")
    print(f"  labels demanded: y = {res.y_bits:0{f.k}b} at p_y, "
          f"y' = {res.y_prime_bits:0{f.k}b} at the flipped distribution")
    print(f"  v stays optimal at both, so one answer must be wrong")

print()
print("== asymmetric case: Jaccard, k=3 ==")
res = counterexample_asymmetric(make_jaccard(3))
print(f"witness mode: {res.mode}")
print(f"all-abstain report uniquely optimal at p_eps (eps = {res.epsilon})")
np.set_printoptions(precision=4)
print(f"p_eps = {res.p_witness}")
if res.mode == "sequence":
    gaps = ", ".join(f"{g:.6f}" for g in res.details["ray_gaps"])
    print(f"approach the optimum along the label {res.bad_sign_bits:03b}:")
    print(f"  expected-hinge gaps along the ray: [{gaps}]")
    print("  the sign of every point on that ray is a suboptimal label,")
    print("  so the sign link is not calibrated.")
