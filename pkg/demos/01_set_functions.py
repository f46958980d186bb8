"""Build the running set-function examples and check their structure.

Run:  python3 demos/01_set_functions.py
"""

import numpy as np

from lovasz_abstain import (
    check_condition1,
    make_jaccard,
    make_modular,
    make_sqrt_card,
    make_zero_one,
    mean_value,
    random_polymatroid,
    validate_polymatroid,
)

k = 3
examples = {
    "weighted (modular)": make_modular([0.5, 1.0, 2.0]),
    "nonempty indicator": make_zero_one(k),
    "sqrt of cardinality": make_sqrt_card(k),
}

print("== polymatroid structure of the built-ins ==")
for name, f in examples.items():
    rep = validate_polymatroid(f, strict=True)
    print(f"{name:22s} valid={rep.valid} modular={rep.modular} "
          f"strictly_submodular={rep.strictly_submodular} "
          f"strictly_increasing={rep.strictly_increasing}")

print()
print("== mean value vs f([k])/2 ==")
print("the average over all subsets meets f([k])/2 exactly when the table is")
print("modular, and exceeds it otherwise:")
for name, f in examples.items():
    print(f"{name:22s} mean={mean_value(f):.4f}  f([k])/2={f.full() / 2:.4f}")

rng = np.random.default_rng(0)
f = random_polymatroid(k, rng)
print(f"{'random draw':22s} mean={mean_value(f):.4f}  f([k])/2={f.full() / 2:.4f}")

print()
print("== label-indexed Jaccard tables ==")
jac = make_jaccard(k)
print("J_y(S) = |S| / |S u foreground(y)|; a few values for y = ++-:")
y = 0b011
for s, label in [(0b100, "{3}"), (0b001, "{1}"), (0b111, "{1,2,3}")]:
    print(f"  J(S={label:8s}) = {jac.for_label(y).eval(s):.4f}")

print()
print("== complementary-error condition ==")
print("Jaccard satisfies it (so the asymmetric inconsistency machinery applies):")
print(" ", check_condition1(jac).to_dict())
print("a modular table cannot (no strict inequality anywhere):")
print(" ", check_condition1(make_modular([1, 1, 1])).to_dict())
