"""Multiclass structured abstention through binary reductions.

Two encodings: a compact block code mapping each of C = 2^d classes to d
sign bits (an abstained class becomes an all-zero block), and a one-hot
one-vs-all lift kept for loss evaluation and the misprediction-equality
check only. Costs g live on the k class-level predictions; the block lift
charges g on the set of blocks touched by bit errors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .links import LinkConfig, threshold_abstain_link
from .lovasz import hinge
from .oracle import VerificationReport
from .setfn import PolymatroidCollection, SetFunction
from .targets import AbstainReport

ABSTAIN = 0  # class slot reserved for the abstain answer


@dataclass(frozen=True)
class ClassLabel:
    """k class-valued predictions over classes 1..C."""

    C: int
    classes: tuple[int, ...]

    def __post_init__(self):
        if any(not 1 <= c <= self.C for c in self.classes):
            raise ValueError(f"classes must lie in [1, {self.C}]")

    @property
    def k(self) -> int:
        return len(self.classes)

    @classmethod
    def from_string(cls, C: int, s: str) -> "ClassLabel":
        return cls(C, tuple(int(tok) for tok in s.split(",")))

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.classes)


@dataclass(frozen=True)
class MulticlassReport:
    """k entries, each a class in 1..C or the abstain marker 0."""

    C: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if any(not 0 <= c <= self.C for c in self.entries):
            raise ValueError(f"entries must lie in [0, {self.C}]")

    @property
    def k(self) -> int:
        return len(self.entries)

    @classmethod
    def from_string(cls, C: int, s: str) -> "MulticlassReport":
        return cls(C, tuple(0 if tok == "_" else int(tok) for tok in s.split(",")))

    def __str__(self) -> str:
        return ",".join("_" if c == 0 else str(c) for c in self.entries)

    def mis_abs(self, y: ClassLabel) -> tuple[int, int]:
        """(misprediction, abstention) bitmasks against a class label."""
        m = a = 0
        for i, (v, t) in enumerate(zip(self.entries, y.classes)):
            if v != t:
                m |= 1 << i
            if v == ABSTAIN:
                a |= 1 << i
        return m, a


class BlockCodec:
    """Sign-bit block code for C = 2^d classes.

    Class c maps to the binary digits of c mod C, most significant bit
    first, with 0 -> -1 and 1 -> +1; so with d = 3, class 5 becomes
    (+1, -1, +1) and class 8 becomes (-1, -1, -1).
    """

    def __init__(self, C: int):
        if C < 2 or C & (C - 1):
            raise ValueError(f"block codec needs a power-of-two class count, got {C}")
        self.C = C
        self.d = C.bit_length() - 1
        self._decode = {}
        for c in range(1, C + 1):
            self._decode[self.code_bits(c)] = c

    def code_bits(self, c: int) -> int:
        """Bitmask (bit j set <=> +1 at in-block position j) of the class code."""
        if not 1 <= c <= self.C:
            raise ValueError(f"class {c} outside [1, {self.C}]")
        word = c % self.C
        bits = 0
        for j in range(self.d):  # most significant digit at in-block position 0
            if word >> (self.d - 1 - j) & 1:
                bits |= 1 << j
        return bits

    def code_signs(self, c: int) -> np.ndarray:
        bits = self.code_bits(c)
        return np.where((bits >> np.arange(self.d)) & 1 == 1, 1.0, -1.0)

    def decode_bits(self, bits: int) -> int:
        return self._decode[bits]

    def block_slice(self, i: int) -> slice:
        """Positions of prediction i (0-based) inside a dk-vector."""
        return slice(i * self.d, (i + 1) * self.d)


def encode_bep(y: ClassLabel, codec: BlockCodec) -> int:
    """Concatenated class codes of y as a dk-bit label bitmask."""
    if y.C != codec.C:
        raise ValueError("label and codec class counts differ")
    bits = 0
    for i, c in enumerate(y.classes):
        bits |= codec.code_bits(c) << (i * codec.d)
    return bits


def decode_bep(bits: int, k: int, codec: BlockCodec) -> ClassLabel:
    d = codec.d
    mask = (1 << d) - 1
    return ClassLabel(codec.C, tuple(codec.decode_bits(bits >> (i * d) & mask) for i in range(k)))


class ClassCosts:
    """Cost family g_y over class labels: one shared table, or per-class
    weights charging w(y_i) for each counted prediction."""

    def __init__(self, k: int, shared: SetFunction | None = None, weights_by_class=None):
        if (shared is None) == (weights_by_class is None):
            raise ValueError("exactly one of shared / weights_by_class must be given")
        self.k = k
        self.shared = shared
        self.weights = None if weights_by_class is None else np.asarray(weights_by_class, float)
        if self.shared is not None and self.shared.k != k:
            raise ValueError("shared table dimension mismatch")
        if self.weights is not None and np.any(self.weights < 0):
            raise ValueError("class weights must be nonnegative")

    @classmethod
    def from_setfn(cls, g: SetFunction) -> "ClassCosts":
        return cls(g.k, shared=g)

    @property
    def symmetric(self) -> bool:
        return self.shared is not None

    def for_label(self, y: ClassLabel) -> SetFunction:
        if self.shared is not None:
            return self.shared
        from .setfn import make_modular

        return make_modular([self.weights[c - 1] for c in y.classes])


def _as_costs(g) -> ClassCosts:
    if isinstance(g, ClassCosts):
        return g
    if isinstance(g, SetFunction):
        return ClassCosts.from_setfn(g)
    raise TypeError(f"expected ClassCosts or SetFunction, got {type(g)}")


def multiclass_target(g, v: MulticlassReport, y: ClassLabel) -> float:
    """g_y(mis \\ abs) + g_y(mis) with abstentions always counting as misses."""
    g = _as_costs(g)
    if v.k != y.k or v.k != g.k:
        raise ValueError("report, label and cost dimensions must agree")
    gy = g.for_label(y)
    m, a = v.mis_abs(y)
    return gy.eval(m & ~a) + gy.eval(m)


def lift_polymatroid(g, codec: BlockCodec, k: int) -> PolymatroidCollection:
    """Bit-level collection charging g on the set of blocks a subset touches."""
    g = _as_costs(g)
    d, C = codec.d, codec.C
    n = d * k
    if n > 12:
        raise ValueError("lifted ground set capped at d*k <= 12")
    masks = np.arange(1 << n)
    block_mask = (1 << d) - 1
    touched = np.zeros((1 << n, k), dtype=bool)
    for i in range(k):
        touched[:, i] = (masks >> (i * d)) & block_mask != 0

    def lift_one(gk: SetFunction) -> SetFunction:
        block_sets = touched @ (1 << np.arange(k))
        return SetFunction(n, gk.values[block_sets])

    if g.symmetric:
        return PolymatroidCollection.from_setfn(lift_one(g.shared))
    per_label = {}
    for class_tuple in np.ndindex(*([C] * k)):
        y = ClassLabel(C, tuple(c + 1 for c in class_tuple))
        per_label[encode_bep(y, codec)] = lift_one(g.for_label(y))
    return PolymatroidCollection.from_per_label(n, per_label)


def multiclass_surrogate(g, codec: BlockCodec, u, y: ClassLabel) -> float:
    """Hinge of the lifted collection at the encoded label."""
    u = np.asarray(u, dtype=float)
    k = y.k
    if len(u) != codec.d * k:
        raise ValueError(f"surrogate point must have length {codec.d * k}")
    lifted = lift_polymatroid(g, codec, k)
    return hinge(lifted, u, encode_bep(y, codec))


def trimmed_link(u, cfg: LinkConfig, codec: BlockCodec) -> MulticlassReport:
    """Threshold-abstain link followed by per-block trimming: any abstained
    bit inside a block abstains the whole prediction, else the block decodes."""
    u = np.asarray(u, dtype=float)
    d = codec.d
    if len(u) % d:
        raise ValueError("surrogate point length must be a multiple of the block size")
    k = len(u) // d
    if cfg.epsilon is not None and cfg.epsilon > 1.0 / (2 * d * k) + 1e-12:
        raise ValueError("epsilon exceeds the lifted-dimension bound 1/(2dk)")
    v = threshold_abstain_link(u, cfg)
    entries = []
    for i in range(k):
        block_zero = (v.zeros >> (i * d)) & ((1 << d) - 1)
        if block_zero:
            entries.append(ABSTAIN)
        else:
            entries.append(codec.decode_bits((v.pos >> (i * d)) & ((1 << d) - 1)))
    return MulticlassReport(codec.C, tuple(entries))


def verify_block_domination(g, codec: BlockCodec, k: int) -> VerificationReport:
    """Zeroing a whole block never costs more than a partial in-block abstention."""
    g = _as_costs(g)
    d = codec.d
    n = d * k
    if n > 9:
        raise ValueError("block domination check capped at d*k <= 9")
    lifted = lift_polymatroid(g, codec, k)
    from .targets import enumerate_reports, target_abstain

    labels = [encode_bep(ClassLabel(codec.C, tuple(c + 1 for c in t)), codec)
              for t in np.ndindex(*([codec.C] * k))]
    cases = 0
    block = (1 << d) - 1
    for v in enumerate_reports(n, "V"):
        partial = [
            i for i in range(k)
            if 0 < (v.zeros >> (i * d)) & block
            and ((v.zeros >> (i * d)) & block) != block
        ]
        for i in partial:
            shifted = block << (i * d)
            v_full = AbstainReport(n, v.pos & ~shifted, v.zeros | shifted)
            for y in labels:
                cases += 1
                if target_abstain(lifted, v_full, y) > target_abstain(lifted, v, y) + 1e-12:
                    return VerificationReport(
                        "block-domination", False, cases,
                        {"v": str(v), "block": i, "y": y},
                    )
    return VerificationReport("block-domination", True, cases)


# ---------------------------------------------------------------------------
# One-hot one-vs-all lift (loss evaluation and the equality check only)
# ---------------------------------------------------------------------------


def onehot_code_bits(c: int, C: int) -> int:
    """One-hot sign pattern of class c: +1 at position c, -1 elsewhere."""
    if not 1 <= c <= C:
        raise ValueError(f"class {c} outside [1, {C}]")
    return 1 << (c - 1)


def onehot_encode(y: ClassLabel) -> int:
    bits = 0
    for i, c in enumerate(y.classes):
        bits |= onehot_code_bits(c, y.C) << (i * y.C)
    return bits


def mis_class(yp: ClassLabel, y: ClassLabel, c: int) -> int:
    """One-vs-all misprediction set for class c: positions where exactly one
    of prediction and label equals c."""
    m = 0
    for i, (a, b) in enumerate(zip(yp.classes, y.classes)):
        if (a == c) != (b == c):
            m |= 1 << i
    return m


def ova_target(g_by_class, yp: ClassLabel, y: ClassLabel) -> float:
    """(1/C) sum_c g_{c,y}(mis_c(y', y)) with per-class cost tables."""
    C = y.C
    return sum(g_by_class(c, y).eval(mis_class(yp, y, c)) for c in range(1, C + 1)) / C


def ova_jaccard_costs(C: int, k: int):
    """Per-class Jaccard cost g_{c,y}(S) = |S| / |S u {i : y_i = c}|."""
    from .setfn import make_jaccard

    jac = make_jaccard(k)

    def g(c: int, y: ClassLabel) -> SetFunction:
        t_bits = 0
        for i, cls in enumerate(y.classes):
            if cls == c:
                t_bits |= 1 << i
        return jac.for_label(t_bits)

    return g


def onehot_lift(g_by_class, C: int, k: int) -> PolymatroidCollection:
    """Averaged per-class lift to Ck sign bits, defined at encoded labels only.

    Bit position C(i-1)+c-1 carries the class-c score of prediction i; each
    per-class table reads off its own bit positions and the average over
    classes reproduces the one-vs-all target on encoded mispredictions.
    """
    n = C * k
    if n > 12:
        raise ValueError("one-hot lift capped at C*k <= 12")
    masks = np.arange(1 << n)
    per_label = {}
    for class_tuple in np.ndindex(*([C] * k)):
        y = ClassLabel(C, tuple(c + 1 for c in class_tuple))
        total = np.zeros(1 << n)
        for c in range(1, C + 1):
            proj = np.zeros(1 << n, dtype=np.int64)
            for i in range(k):
                proj |= ((masks >> (i * C + c - 1)) & 1) << i
            total += g_by_class(c, y).values[proj]
        per_label[onehot_encode(y)] = SetFunction(n, total / C)
    return PolymatroidCollection.from_per_label(n, per_label)


@dataclass
class BepOvaIncompatibility:
    """Constraint pair showing the compact code cannot carry one-vs-all costs."""

    bit_mis_close: int
    bit_mis_far: int
    forced_close: float
    forced_far: float
    incompatible: bool
    message: str = ""


def bep_ova_incompatibility(g_single: SetFunction) -> BepOvaIncompatibility:
    """Reproduce the 8-class constraint pair that defeats any submodular lift.

    With the block code, predicting class 5 against label 7 is a one-vs-all
    error for class 5 with one mispredicted bit, while class 4 (one more bit
    wrong) is not an error at all. A bit-level f compatible with a nontrivial
    g would need f to drop on a superset, so no submodular f exists.
    """
    if g_single.k != 1:
        raise ValueError("the worked example uses a single class-level prediction")
    codec = BlockCodec(8)
    y, v, v_far = ClassLabel(8, (7,)), ClassLabel(8, (5,)), ClassLabel(8, (4,))
    yb, vb, vfb = (encode_bep(lbl, codec) for lbl in (y, v, v_far))
    close = yb ^ vb
    far = yb ^ vfb
    assert close == 0b010 and far == 0b110  # bits 2 and {2,3} in 1-based terms
    assert mis_class(v, y, 5) == 0b1 and mis_class(v_far, y, 5) == 0
    forced_close = g_single.eval(mis_class(v, y, 5))
    forced_far = g_single.eval(mis_class(v_far, y, 5))
    incompatible = forced_far < forced_close - 1e-12
    return BepOvaIncompatibility(
        bit_mis_close=close,
        bit_mis_far=far,
        forced_close=forced_close,
        forced_far=forced_far,
        incompatible=incompatible,
        message=(
            "no submodular f exists: f would need f({2,3}) < f({2})"
            if incompatible
            else "cost is trivial on a single misprediction; no contradiction forced"
        ),
    )
