"""Multiclass structured abstention through the compact block code.

Each of C = 2^d classes becomes d sign bits; a cost g on class-level
mispredictions lifts to bits by charging g on the set of touched blocks.
Partial in-block abstention is dominated by abstaining on the whole block,
so the trimmed link answers a class or a clean "don't know" per prediction.

Run:  python3 demos/06_multiclass.py
"""

import numpy as np

from lovasz_abstain import (
    BlockCodec,
    ClassCosts,
    LinkConfig,
    bep_ova_incompatibility,
    encode_bep,
    lift_polymatroid,
    make_sqrt_card,
    make_zero_one,
    multiclass_surrogate,
    multiclass_target,
    trimmed_link,
    validate_polymatroid,
    verify_block_domination,
)
from lovasz_abstain.multiclass import ClassLabel, MulticlassReport

codec = BlockCodec(8)
print("class codes for C = 8 (d = 3 bits):")
for c in (1, 2, 5, 7, 8):
    print(f"  class {c} -> {codec.code_signs(c).astype(int)}")

C, k = 4, 2
codec = BlockCodec(C)
g = ClassCosts.from_setfn(make_sqrt_card(k))
lifted = lift_polymatroid(g, codec, k)
print()
print(f"lifted cost over {codec.d * k} bits is a valid polymatroid:",
      validate_polymatroid(lifted.for_label(0)).valid)
print("block domination (partial abstention never helps):",
      verify_block_domination(g, codec, k).passed)

y = ClassLabel(C, (3, 1))
print()
print(f"label y = {y}, encoded bits = {encode_bep(y, codec):04b}")
for v in (MulticlassReport(C, (3, 1)), MulticlassReport(C, (0, 1)), MulticlassReport(C, (2, 0))):
    print(f"  target({v}) = {multiclass_target(g, v, y):.4f}")

u = np.array([0.8, 0.8, -0.7, 0.1])
print()
print(f"surrogate at u = {u}: {multiclass_surrogate(g, codec, u, y):.4f}")
for tau in (0.0, 0.5, 1.0):
    out = trimmed_link(u, LinkConfig(tau=tau), codec)
    print(f"  trimmed link, tau={tau}: {out}")

print()
rep = bep_ova_incompatibility(make_zero_one(1))
print("one-vs-all costs cannot ride the compact code:", rep.message)
