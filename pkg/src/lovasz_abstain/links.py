"""Link functions from surrogate points to abstain reports.

Two routes compute the link envelope (the set of reports any calibrated link
may emit at u): a closed-form gap rule over the sorted magnitudes of the
clipped point, and a direct geometric route intersecting chain faces whose
convex hulls pass within eps of the clipped point in the infinity norm.

Both routes clip u first and resolve exact eps-boundary configurations toward
keeping the vertex (tolerance GAP_TOL), so their outputs agree as sets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .lovasz import clip, descending_order
from .targets import AbstainReport, enumerate_reports, report_index

GAP_TOL = 1e-9


@dataclass(frozen=True)
class LinkConfig:
    """Parameters of the threshold-abstain link family.

    epsilon None means the widest always-valid thickening 1/(2k), resolved
    once the dimension is known. Tie rules are fixed: sign of an exact zero
    is +1 wherever a +-1 sign is forced, and midpoint ties in the gap index
    pick the largest index (fewest abstentions).
    """

    epsilon: float | None = None
    tau: float = 0.5
    sign_tie: int = field(default=1, init=False)
    argmin_tie: str = field(default="largest-index", init=False)

    def __post_init__(self):
        if self.epsilon is not None and not (self.epsilon > 0):
            raise ValueError("epsilon must be positive")
        if not (0.0 <= self.tau <= 1.0):
            raise ValueError("tau must lie in [0, 1]")

    def resolve_epsilon(self, k: int) -> float:
        return self.epsilon if self.epsilon is not None else 1.0 / (2 * k)


def sign_star(u) -> np.ndarray:
    """Coordinate signs with the fixed deterministic choice 0 -> +1."""
    return np.where(np.asarray(u, dtype=float) >= 0.0, 1.0, -1.0)


def naive_threshold_link(u, c: float) -> AbstainReport:
    """Abstain wherever |u_i| < c, otherwise take the sign."""
    if not c > 0:
        raise ValueError("threshold must be positive")
    u = np.asarray(u, dtype=float)
    out = np.where(np.abs(u) < c, 0.0, np.sign(u))
    return AbstainReport.from_vector(out.astype(int))


def _sorted_gaps(u, eps: float):
    """Clip, sort |u| descending, and return (order, magnitudes, gaps).

    gaps[i] for i in 0..k compares consecutive sorted magnitudes with the
    sentinels 1+eps on top and -eps at the bottom.
    """
    x = clip(u)
    a = np.abs(x)
    order = descending_order(a)
    seq = np.concatenate([[1.0 + eps], a[order], [-eps]])
    return x, order, seq, seq[:-1] - seq[1:]


def _prefix_report(order, i: int, signs) -> AbstainReport:
    k = len(order)
    pos = zeros = 0
    chosen = set(int(j) for j in order[:i])
    for j in range(k):
        if j in chosen:
            if signs[j] > 0:
                pos |= 1 << j
            elif signs[j] == 0:
                zeros |= 1 << j
        else:
            zeros |= 1 << j
    return AbstainReport(k, pos, zeros)


def envelope(u, cfg: LinkConfig) -> set[AbstainReport]:
    """Gap-rule link envelope at u.

    Level i (abstaining below the i largest magnitudes, signs from sign*)
    is a member exactly when the sorted-magnitude gap at i is >= 2 eps,
    with sentinels 1+eps and -eps closing the two ends.
    """
    u = np.asarray(u, dtype=float)
    eps = cfg.resolve_epsilon(len(u))
    x, order, _, gaps = _sorted_gaps(u, eps)
    signs = sign_star(x)
    return {
        _prefix_report(order, i, signs)
        for i in range(len(u) + 1)
        if gaps[i] >= 2 * eps - GAP_TOL
    }


def envelope_detailed(u, cfg: LinkConfig) -> list[dict]:
    """Envelope members annotated with their (pi, y, i) witness."""
    u = np.asarray(u, dtype=float)
    eps = cfg.resolve_epsilon(len(u))
    x, order, _, gaps = _sorted_gaps(u, eps)
    signs = sign_star(x)
    out = []
    for i in range(len(u) + 1):
        if gaps[i] >= 2 * eps - GAP_TOL:
            rep = _prefix_report(order, i, signs)
            out.append(
                {
                    "report": str(rep),
                    "i": i,
                    "pi": [int(j) + 1 for j in order],
                    "y": "".join("+" if s > 0 else "-" for s in signs),
                }
            )
    return out


def threshold_abstain_link(u, cfg: LinkConfig) -> AbstainReport:
    """Pick the envelope level whose gap midpoint is closest to tau.

    Output is the prefix indicator at that level times sign of the clipped
    point, so coordinates at exactly zero stay abstained. Well defined for
    eps <= 1/(2k); larger eps can leave no qualifying gap.
    """
    u = np.asarray(u, dtype=float)
    k = len(u)
    eps = cfg.resolve_epsilon(k)
    x, order, seq, gaps = _sorted_gaps(u, eps)
    candidates = [i for i in range(k + 1) if gaps[i] >= 2 * eps - GAP_TOL]
    if not candidates:
        raise ValueError(f"no gap of size 2*eps: eps={eps} exceeds 1/(2k)={1 / (2 * k)}")
    best_i, best_d = candidates[0], None
    for i in candidates:
        d = abs(cfg.tau - (seq[i] + seq[i + 1]) / 2.0)
        if best_d is None or d <= best_d:  # ties move to the larger index
            best_i, best_d = i, d
    return _prefix_report(order, best_i, np.sign(x))


def trim_single_abstain(v: AbstainReport, u) -> AbstainReport:
    """Replace a lone abstention by the sign of the corresponding coordinate."""
    if v.n_abstain() != 1:
        return v
    u = np.asarray(u, dtype=float)
    i = v.zeros.bit_length() - 1
    pos = v.pos | (v.zeros if sign_star(u)[i] > 0 else 0)
    return AbstainReport(v.k, pos, 0)


# ---------------------------------------------------------------------------
# Geometric route: chain faces and exact infinity-norm hull distances.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FaceVertexSet:
    """Reports lying on a common signed chain, with an ordering witness."""

    k: int
    members: frozenset[AbstainReport]
    pi: tuple[int, ...]
    y_bits: int


class _Face:
    """Internal face record prepared for vectorized distance queries."""

    __slots__ = ("prefix", "blocks", "suffix", "sign", "member_ids", "supports", "sigma")

    def __init__(self, k, supports, sigma, ridx):
        self.supports = supports  # strictly nested tuple of bitmasks
        self.sigma = sigma  # sign bitmask over the largest support
        sign = np.ones(k)
        top = supports[-1]
        for j in range(k):
            if top >> j & 1 and not sigma >> j & 1:
                sign[j] = -1.0
        self.sign = sign
        chain = list(supports)
        if chain[0] == 0:
            prefix = 0
            chain = chain[1:]
        elif chain:
            prefix = chain[0]
        else:
            prefix = 0
        self.prefix = _mask_idx(k, prefix)
        blocks = []
        prev = prefix if supports[0] != 0 else 0
        start = 1 if supports[0] != 0 else 0
        for t in supports[start:]:
            if t != prev:
                blocks.append(_mask_idx(k, t & ~prev))
            prev = t
        self.blocks = blocks
        self.suffix = _mask_idx(k, ((1 << k) - 1) & ~top)
        ids = []
        for t in supports:
            pos = t & sigma
            zeros = ((1 << k) - 1) & ~t
            ids.append(ridx[(pos, zeros)])
        self.member_ids = np.array(sorted(ids))


def _mask_idx(k: int, mask: int) -> np.ndarray:
    return np.array([i for i in range(k) if mask >> i & 1], dtype=np.intp)


def _chains_ending_at(top: int, k: int) -> list[tuple[int, ...]]:
    subs = [s for s in range(1 << k) if s & top == s and s != top]
    chains = [(top,)]
    for s in subs:
        for c in _chains_ending_at(s, k):
            chains.append(c + (top,))
    return chains


@lru_cache(maxsize=None)
def chain_faces(k: int) -> tuple:
    """Every distinct nonempty subset of a signed chain, as _Face records."""
    if k > 4:
        raise ValueError("face enumeration capped at k <= 4")
    ridx = report_index(k)
    faces = []
    for top in range(1 << k):
        bits = [i for i in range(k) if top >> i & 1]
        for chain in _chains_ending_at(top, k):
            for combo in itertools.product([0, 1], repeat=len(bits)):
                sigma = 0
                for b, i in zip(combo, bits):
                    if b:
                        sigma |= 1 << i
                faces.append(_Face(k, chain, sigma, ridx))
    return tuple(faces)


def face_vertex_sets(k: int) -> list[FaceVertexSet]:
    """chain_faces dressed up with reports and an ordering witness."""
    reports = enumerate_reports(k, "V")
    out = []
    for f in chain_faces(k):
        members = frozenset(reports[i] for i in f.member_ids)
        order = []
        prev = 0
        for t in f.supports:
            order.extend(i for i in range(k) if (t & ~prev) >> i & 1)
            prev = t
        order.extend(i for i in range(k) if not f.supports[-1] >> i & 1)
        y_bits = f.sigma | (((1 << k) - 1) & ~f.supports[-1])  # +1 off the top support
        out.append(FaceVertexSet(k, members, tuple(order), y_bits))
    return out


def face_distances(x_rows: np.ndarray, faces) -> np.ndarray:
    """Exact d_inf from each row of x_rows (clipped points) to each face hull.

    The hull of a chain-face is cut out by a forced prefix (signed value 1),
    free blocks with a nonincreasing value chain in [0, 1], and a forced-zero
    suffix; the distance is the smallest slack making the per-block intervals
    admit a nonincreasing selection.
    """
    x_rows = np.atleast_2d(np.asarray(x_rows, dtype=float))
    n = x_rows.shape[0]
    out = np.empty((n, len(faces)))
    for fi, f in enumerate(faces):
        s = x_rows * f.sign
        d = np.zeros(n)
        if len(f.prefix):
            d = np.abs(1.0 - s[:, f.prefix]).max(axis=1)
        if len(f.suffix):
            d = np.maximum(d, np.abs(x_rows[:, f.suffix]).max(axis=1))
        if f.blocks:
            ms = np.stack([s[:, b].min(axis=1) for b in f.blocks], axis=1)
            Ms = np.stack([s[:, b].max(axis=1) for b in f.blocks], axis=1)
            run_min = np.minimum.accumulate(ms, axis=1)
            chain = ((Ms - run_min) / 2.0).max(axis=1)
            chain = np.maximum(chain, (Ms - 1.0).max(axis=1))
            chain = np.maximum(chain, (-ms).max(axis=1))
            d = np.maximum(d, np.maximum(chain, 0.0))
        out[:, fi] = d
    return out


def envelope_oracle(u, cfg: LinkConfig) -> set[AbstainReport]:
    """Direct-definition envelope: intersect every face hull within eps of
    the clipped point. Exponential in k; the verification route."""
    u = np.asarray(u, dtype=float)
    k = len(u)
    eps = cfg.resolve_epsilon(k)
    faces = chain_faces(k)
    d = face_distances(clip(u)[None, :], faces)[0]
    reports = enumerate_reports(k, "V")
    keep = np.ones(len(reports), dtype=bool)
    for fi in np.nonzero(d < eps - GAP_TOL)[0]:
        mask = np.zeros(len(reports), dtype=bool)
        mask[faces[fi].member_ids] = True
        keep &= mask
    return {reports[i] for i in np.nonzero(keep)[0]}


@lru_cache(maxsize=None)
def _report_id_table(k: int) -> np.ndarray:
    """Dense (pos, zeros) -> canonical report id lookup; -1 off the domain."""
    table = np.full((1 << k, 1 << k), -1, dtype=np.int64)
    for (pos, zeros), i in report_index(k).items():
        table[pos, zeros] = i
    return table


@lru_cache(maxsize=None)
def _face_member_matrix(k: int) -> np.ndarray:
    faces = chain_faces(k)
    out = np.zeros((len(faces), len(enumerate_reports(k, "V"))), dtype=bool)
    for fi, f in enumerate(faces):
        out[fi, f.member_ids] = True
    return out


def envelope_members_gap(us: np.ndarray, eps: float) -> np.ndarray:
    """(n, n_reports) boolean membership of the gap-rule envelope, row-wise."""
    us = np.atleast_2d(np.asarray(us, dtype=float))
    n, k = us.shape
    x = clip(us)
    a = np.abs(x)
    order = np.argsort(-a, axis=1, kind="stable")
    asort = np.take_along_axis(a, order, axis=1)
    seq = np.concatenate([np.full((n, 1), 1.0 + eps), asort, np.full((n, 1), -eps)], axis=1)
    qualify = (seq[:, :-1] - seq[:, 1:]) >= 2 * eps - GAP_TOL
    bitvals = (1 << order).astype(np.int64)
    possign = np.take_along_axis(x >= 0, order, axis=1)
    pos_cum = np.cumsum(np.where(possign, bitvals, 0), axis=1)
    chosen_cum = np.cumsum(bitvals, axis=1)
    full = (1 << k) - 1
    ids = _report_id_table(k)
    out = np.zeros((n, ids.max() + 1), dtype=bool)
    rows = np.arange(n)
    for i in range(k + 1):
        pos = pos_cum[:, i - 1] if i > 0 else np.zeros(n, dtype=np.int64)
        zeros = full ^ (chosen_cum[:, i - 1] if i > 0 else np.zeros(n, dtype=np.int64))
        level_ids = ids[pos, zeros]
        sel = qualify[:, i]
        out[rows[sel], level_ids[sel]] = True
    return out


def envelope_members_oracle(us: np.ndarray, eps: float) -> np.ndarray:
    """Row-wise face-intersection envelope membership; matches the gap route."""
    us = np.atleast_2d(np.asarray(us, dtype=float))
    k = us.shape[1]
    faces = chain_faces(k)
    d = face_distances(clip(us), faces)
    qualified = (d < eps - GAP_TOL).astype(np.float32)
    missing = (~_face_member_matrix(k)).astype(np.float32)
    return (qualified @ missing) < 0.5


def envelope_nonempty_batch(us: np.ndarray, eps: float) -> np.ndarray:
    """Vectorized gap-rule nonemptiness check over rows of us."""
    a = np.abs(np.clip(np.asarray(us, dtype=float), -1.0, 1.0))
    a.sort(axis=1)
    seq = np.concatenate(
        [np.full((len(a), 1), 1.0 + eps), a[:, ::-1], np.full((len(a), 1), -eps)], axis=1
    )
    gaps = seq[:, :-1] - seq[:, 1:]
    return (gaps >= 2 * eps - GAP_TOL).any(axis=1)
