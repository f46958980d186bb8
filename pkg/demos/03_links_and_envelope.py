"""Link envelope and the threshold-abstain link family.

The envelope at u is the set of reports any calibrated link may output.
Its members are read off the sorted magnitudes of the clipped point: level i
qualifies when the gap below the i-th largest magnitude is at least 2 eps.
The tau knob picks a qualifying level: small tau commits, large tau abstains.

Run:  python3 demos/03_links_and_envelope.py
"""

import numpy as np

from lovasz_abstain import LinkConfig, envelope, envelope_oracle, threshold_abstain_link
from lovasz_abstain import naive_threshold_link, trim_single_abstain

u = np.array([0.72, 0.38, -0.02])
k = len(u)
eps = 1 / (2 * k)
print(f"u = {u}, eps = 1/(2k) = {eps:.4f}")

cfg = LinkConfig(epsilon=eps)
members = sorted(str(v) for v in envelope(u, cfg))
oracle_members = sorted(str(v) for v in envelope_oracle(u, cfg))
print(f"envelope (gap rule):   {members}")
print(f"envelope (face route): {oracle_members}")

print()
print("tau sweep: the chosen level moves from committing to abstaining")
for tau in (0.0, 0.25, 0.5, 0.75, 1.0):
    out = threshold_abstain_link(u, LinkConfig(epsilon=eps, tau=tau))
    print(f"  tau={tau:4.2f}  ->  {out}")

print()
print("a lone abstention is never necessary: trimming fills it with the sign")
v = threshold_abstain_link(u, LinkConfig(epsilon=eps, tau=0.25))
print(f"  linked {v}  ->  trimmed {trim_single_abstain(v, u)}")

print()
print("the per-coordinate threshold link can leave the envelope;")
print("near (0.5, 0.45) with c = 0.5 it outputs +0 even though only")
print("00 and ++ are ever jointly optimal there:")
for point in ([0.52, 0.45], [0.5, 0.5], [0.9, 0.1]):
    naive = naive_threshold_link(point, 0.5)
    env = sorted(str(m) for m in envelope(point, LinkConfig(epsilon=0.25)))
    print(f"  u={point}  naive={naive}  envelope={env}")
