"""Set functions on 2^[k] stored as dense tables, and label-indexed collections.

Subsets of [k] = {1..k} are bitmasks: bit i-1 set <=> element i in the subset.
Labels y in {-1,1}^k use the same indexing: bit i-1 set <=> y_i = +1, so the
all-minus label is bitmask 0 and subset/label indexing coincide everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

ATOL = 1e-9  # separates real ties from float noise; tables hold small rationals


def popcounts(masks: np.ndarray) -> np.ndarray:
    """Population count of each entry of an integer array."""
    return np.bitwise_count(masks.astype(np.uint64)).astype(np.int64)


@dataclass(frozen=True)
class Label:
    """A joint binary label y in {-1,1}^k, stored as the bitmask of +1 coordinates."""

    k: int
    bits: int

    def __post_init__(self):
        if not (1 <= self.k):
            raise ValueError(f"k must be positive, got {self.k}")
        if not (0 <= self.bits < (1 << self.k)):
            raise ValueError(f"label bitmask {self.bits} out of range for k={self.k}")

    @classmethod
    def from_signs(cls, signs) -> "Label":
        signs = np.asarray(signs)
        bits = 0
        for i, s in enumerate(signs):
            if s == 1:
                bits |= 1 << i
            elif s != -1:
                raise ValueError(f"label entries must be +-1, got {s}")
        return cls(len(signs), bits)

    @classmethod
    def from_string(cls, s: str) -> "Label":
        return cls.from_signs([{"+": 1, "-": -1}[c] for c in s])

    def signs(self) -> np.ndarray:
        return np.array([1.0 if self.bits >> i & 1 else -1.0 for i in range(self.k)])

    def __str__(self) -> str:
        return "".join("+" if self.bits >> i & 1 else "-" for i in range(self.k))


def label_signs_table(k: int) -> np.ndarray:
    """(2^k, k) array of +-1 label vectors, row index = label bitmask."""
    masks = np.arange(1 << k)[:, None]
    return np.where((masks >> np.arange(k)) & 1 == 1, 1.0, -1.0)


@dataclass(frozen=True)
class SetFunction:
    """A nonnegative normalized set function on 2^[k] as a dense value table."""

    k: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        vals.setflags(write=False)
        if self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")
        if vals.shape != (1 << self.k,):
            raise ValueError(f"need 2^{self.k} values, got shape {vals.shape}")

    @classmethod
    def from_values(cls, k: int, values, validate: bool = True) -> "SetFunction":
        f = cls(k, np.asarray(values, dtype=float))
        if validate:
            if abs(f.values[0]) > ATOL:
                raise ValueError(f"not normalized: f(empty) = {f.values[0]}")
            if np.any(f.values < -ATOL):
                raise ValueError("set function has negative values")
        return f

    def eval(self, subset: int) -> float:
        if not (0 <= subset < (1 << self.k)):
            raise ValueError(f"subset bitmask {subset} out of range for k={self.k}")
        return float(self.values[subset])

    def full(self) -> float:
        return float(self.values[-1])


def eval(f: SetFunction, subset: int) -> float:
    """Table lookup f(S) with range checking."""
    return f.eval(subset)


def make_modular(w) -> SetFunction:
    """f(S) = sum of w_i over i in S, for nonnegative weights w."""
    w = np.asarray(w, dtype=float)
    if np.any(w < 0):
        raise ValueError("modular weights must be nonnegative")
    k = len(w)
    masks = np.arange(1 << k)
    membership = (masks[:, None] >> np.arange(k)) & 1
    return SetFunction(k, membership @ w)


def make_zero_one(k: int) -> SetFunction:
    """Indicator of a nonempty subset: 0 on the empty set, 1 elsewhere."""
    if k < 1:
        raise ValueError("k must be positive")
    values = np.ones(1 << k)
    values[0] = 0.0
    return SetFunction(k, values)


def make_concave_card(k: int, g) -> SetFunction:
    """f(S) = g(|S|) for a nondecreasing concave g with g(0)=0."""
    gs = np.array([g(c) for c in range(k + 1)], dtype=float)
    if abs(gs[0]) > ATOL:
        raise ValueError("g(0) must be 0")
    diffs = np.diff(gs)
    if np.any(diffs < -ATOL):
        raise ValueError("g must be nondecreasing on {0..k}")
    if np.any(np.diff(diffs) > ATOL):
        raise ValueError("g must be concave on {0..k}")
    return SetFunction(k, gs[popcounts(np.arange(1 << k))])


def make_sqrt_card(k: int) -> SetFunction:
    """f(S) = sqrt(|S|), the running strictly-submodular strictly-increasing example."""
    return make_concave_card(k, math.sqrt)


@dataclass(frozen=True)
class PolymatroidCollection:
    """Family {f_y} of set functions indexed by label bitmask.

    A symmetric collection shares one table for every label; an asymmetric one
    carries a per-label mapping (possibly partial, e.g. only encoded labels).
    """

    k: int
    shared: SetFunction | None = None
    per_label: dict[int, SetFunction] | None = None

    def __post_init__(self):
        if (self.shared is None) == (self.per_label is None):
            raise ValueError("exactly one of shared / per_label must be given")
        members = [self.shared] if self.shared is not None else self.per_label.values()
        for f in members:
            if f.k != self.k:
                raise ValueError(f"member has k={f.k}, collection has k={self.k}")

    @property
    def symmetric(self) -> bool:
        return self.shared is not None

    @classmethod
    def from_setfn(cls, f: SetFunction) -> "PolymatroidCollection":
        return cls(f.k, shared=f)

    @classmethod
    def from_per_label(cls, k: int, per_label: dict[int, SetFunction]) -> "PolymatroidCollection":
        return cls(k, per_label=dict(per_label))

    def for_label(self, label_bits: int) -> SetFunction:
        if not (0 <= label_bits < (1 << self.k)):
            raise ValueError(f"label bitmask {label_bits} out of range for k={self.k}")
        if self.shared is not None:
            return self.shared
        try:
            return self.per_label[label_bits]
        except KeyError:
            raise KeyError(f"collection has no table for label bitmask {label_bits}")

    def labels(self) -> list[int]:
        if self.shared is not None:
            return list(range(1 << self.k))
        return sorted(self.per_label)

    def table_matrix(self) -> np.ndarray:
        """(2^k, 2^k) array, row y = value table of f_y. Requires a total collection."""
        if self.shared is not None:
            return np.broadcast_to(self.shared.values, (1 << self.k, 1 << self.k))
        rows = [self.for_label(y).values for y in range(1 << self.k)]
        return np.stack(rows)


def as_collection(fc) -> PolymatroidCollection:
    if isinstance(fc, PolymatroidCollection):
        return fc
    if isinstance(fc, SetFunction):
        return PolymatroidCollection.from_setfn(fc)
    raise TypeError(f"expected SetFunction or PolymatroidCollection, got {type(fc)}")


def make_jaccard(k: int) -> PolymatroidCollection:
    """Label-indexed Jaccard tables J_y(S) = |S| / |S u {i : y_i = +1}|, with 0/0 = 0."""
    if not 1 <= k <= 12:
        raise ValueError("dense per-label tables are capped at k <= 12")
    masks = np.arange(1 << k)
    sizes = popcounts(masks)
    per_label = {}
    for y in range(1 << k):
        union = popcounts(masks | y)
        with np.errstate(invalid="ignore"):
            vals = np.where(union > 0, sizes / np.maximum(union, 1), 0.0)
        per_label[y] = SetFunction(k, vals)
    return PolymatroidCollection.from_per_label(k, per_label)


@dataclass
class ValidationReport:
    """Findings from checking the polymatroid axioms on a value table."""

    k: int
    normalized: bool
    nonnegative: bool
    increasing: bool
    submodular: bool
    modular: bool
    strictly_submodular: bool | None = None
    strictly_increasing: bool | None = None
    zero_singletons: list[int] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.normalized and self.nonnegative and self.increasing and self.submodular

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "valid": self.valid,
            "normalized": self.normalized,
            "nonnegative": self.nonnegative,
            "increasing": self.increasing,
            "submodular": self.submodular,
            "modular": self.modular,
            "strictly_submodular": self.strictly_submodular,
            "strictly_increasing": self.strictly_increasing,
            "zero_singletons": self.zero_singletons,
            "violations": self.violations,
        }


def validate_polymatroid(f: SetFunction, strict: bool = False) -> ValidationReport:
    """Check normalization, nonnegativity, monotonicity and submodularity.

    Submodularity is checked through the pairwise-exchange form
    f(S+i) + f(S+j) >= f(S+i+j) + f(S), equivalent to the all-pairs
    inequality; strictness over exchanges is equivalent to strictness on
    incomparable pairs (telescoping). Modularity = every exchange tight.
    """
    k, vals = f.k, f.values
    masks = np.arange(1 << k)
    report = ValidationReport(
        k=k,
        normalized=bool(abs(vals[0]) <= ATOL),
        nonnegative=bool(np.all(vals >= -ATOL)),
        increasing=True,
        submodular=True,
        modular=True,
    )
    if not report.normalized:
        report.violations.append(f"f(empty) = {vals[0]} != 0")
    if not report.nonnegative:
        report.violations.append("negative value present")

    inc_margin = math.inf
    for i in range(k):
        absent = masks[(masks >> i) & 1 == 0]
        gains = vals[absent | (1 << i)] - vals[absent]
        worst = gains.min()
        inc_margin = min(inc_margin, worst)
        if worst < -ATOL:
            report.increasing = False
            s = int(absent[int(np.argmin(gains))])
            report.violations.append(f"f decreases adding element {i + 1} to {s:#x}")

    sub_margin = math.inf
    for i in range(k):
        for j in range(i + 1, k):
            both = (1 << i) | (1 << j)
            base = masks[masks & both == 0]
            slack = vals[base | (1 << i)] + vals[base | (1 << j)] - vals[base | both] - vals[base]
            worst = slack.min()
            sub_margin = min(sub_margin, worst)
            if worst < -ATOL:
                report.submodular = False
                s = int(base[int(np.argmin(slack))])
                report.violations.append(f"submodularity fails at S={s:#x}, i={i + 1}, j={j + 1}")
            if slack.max() > ATOL:
                report.modular = False
    if k == 1:
        report.modular = True  # no exchange pairs exist; single-element tables are modular

    report.zero_singletons = [i + 1 for i in range(k) if vals[1 << i] <= ATOL]
    if strict:
        report.strictly_increasing = bool(inc_margin > ATOL)
        report.strictly_submodular = bool(k >= 2 and sub_margin > ATOL)
    return report


@dataclass
class Condition1Report:
    """Result of the complementary-error lower-bound check on a collection."""

    passed: bool
    witness: tuple[int, int] | None = None  # (label bits, subset) of first violation
    reason: str = ""

    def to_dict(self) -> dict:
        return {"passed": self.passed, "witness": self.witness, "reason": self.reason}


def check_condition1(fc) -> Condition1Report:
    """Check f_y(S) + f_{-y}(~S) >= f_y([k]) for all y, S, plus f_y([k]) > f_y(0).

    The inequality must be strict unless S is empty or full, or y is the
    all-minus label, the all-plus label, or the label that is -1 exactly on S.
    """
    fc = as_collection(fc)
    k = fc.k
    full = (1 << k) - 1
    for y in range(1 << k):
        fy = fc.for_label(y)
        if not fy.values[full] > fy.values[0] + ATOL:
            return Condition1Report(False, (y, full), "f_y([k]) > f_y(empty) fails")
        fneg = fc.for_label(full ^ y)
        for s in range(1 << k):
            lhs = fy.values[s] + fneg.values[full ^ s]
            rhs = fy.values[full]
            if lhs < rhs - ATOL:
                return Condition1Report(False, (y, s), "complementary sum below f_y([k])")
            exempt = s in (0, full) or y in (0, full, full ^ s)
            if not exempt and lhs <= rhs + ATOL:
                return Condition1Report(False, (y, s), "strictness fails")
    return Condition1Report(True)


def mean_value(f: SetFunction) -> float:
    """Average of f over all 2^k subsets."""
    return float(np.mean(f.values))


def random_polymatroid(k: int, rng: np.random.Generator, strict: bool = False) -> SetFunction:
    """Concave-of-cardinality draw plus a random modular perturbation.

    Both parts are polymatroids, so the sum is; the construction is verified
    and redrawn on failure. strict=True forces strictly decreasing concave
    increments, giving a strictly submodular, strictly increasing table.
    """
    for _ in range(64):
        incs = np.sort(rng.uniform(0.05 if strict else 0.0, 1.0, size=k))[::-1]
        if not strict and rng.random() < 0.25:
            incs[:] = incs.mean()  # flat increments: lands on the modular boundary
        gs = np.concatenate([[0.0], np.cumsum(incs)])
        w = rng.uniform(0.0, 1.0, size=k)
        if strict:
            w += 0.01
        else:
            w *= rng.integers(0, 2, size=k)  # allow exact zero weights
        table = gs[popcounts(np.arange(1 << k))] + make_modular(w).values
        f = SetFunction(k, table)
        rep = validate_polymatroid(f, strict=strict)
        if rep.valid and (not strict or (rep.strictly_submodular and rep.strictly_increasing)):
            return f
    raise RuntimeError("random polymatroid generator failed to produce a valid table")


def random_collection(
    k: int, rng: np.random.Generator, symmetric: bool = False
) -> PolymatroidCollection:
    """A random polymatroid collection; asymmetric draws one table per label."""
    if symmetric:
        return PolymatroidCollection.from_setfn(random_polymatroid(k, rng))
    per_label = {y: random_polymatroid(k, rng) for y in range(1 << k)}
    return PolymatroidCollection.from_per_label(k, per_label)
