"""Brute-force verification engines.

Everything here favors exact finite enumeration over cleverness: expected
losses are computed as tables over the full report grid, optimality is
checked against every alternative, and failures always carry a reproducible
witness. Surrogate argmins are taken over the {-1,0,1}^k points, which is a
representative set for the hinge; a lattice spot-check guards that choice.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .links import GAP_TOL, LinkConfig, chain_faces, face_distances, threshold_abstain_link
from .lovasz import clip, expected_hinge, hinge_batch
from .setfn import PolymatroidCollection, SetFunction, as_collection, mean_value, validate_polymatroid
from .setfn import check_condition1
from .targets import (
    ARGMIN_TOL,
    AbstainReport,
    abstain_loss_table,
    enumerate_reports,
    plain_loss_table,
    report_index,
)

MARGIN = 1e-9  # strict-uniqueness margin between best and second best


# ---------------------------------------------------------------------------
# Label distributions
# ---------------------------------------------------------------------------


def validate_distribution(p, k: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (1 << k,):
        raise ValueError(f"distribution has shape {p.shape}, expected ({1 << k},)")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValueError("distribution entries must be nonnegative and sum to 1")
    return p


def uniform(k: int) -> np.ndarray:
    return np.full(1 << k, 1.0 / (1 << k))


def point_mass(y_bits: int, k: int) -> np.ndarray:
    p = np.zeros(1 << k)
    p[y_bits] = 1.0
    return p


def mix(p, q, lam: float) -> np.ndarray:
    """(1 - lam) * p + lam * q."""
    if not (0.0 <= lam <= 1.0):
        raise ValueError("mixing weight must lie in [0, 1]")
    return (1.0 - lam) * np.asarray(p, dtype=float) + lam * np.asarray(q, dtype=float)


def flip(p, r_bits: int, k: int) -> np.ndarray:
    """Distribution of Y * r when Y ~ p: q[y] = p[y * r] as bitmask indices."""
    p = np.asarray(p, dtype=float)
    masks = np.arange(1 << k)
    return p[masks ^ (((1 << k) - 1) ^ r_bits)]


def grid_distributions(k: int, m: int):
    """All compositions of m into 2^k parts, normalized; deterministic order."""
    if k > 4:
        raise ValueError("distribution grid capped at k <= 4")
    n = 1 << k
    for cuts in itertools.combinations(range(m + n - 1), n - 1):
        parts = []
        prev = -1
        for c in cuts:
            parts.append(c - prev - 1)
            prev = c
        parts.append(m + n - 2 - prev)
        yield np.array(parts, dtype=float) / m


# ---------------------------------------------------------------------------
# Shared argmin machinery
# ---------------------------------------------------------------------------


@dataclass
class VerificationReport:
    name: str
    passed: bool
    cases: int
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "cases": self.cases,
            "witness": self.witness,
            "details": self.details,
        }


def surrogate_loss_table(fc) -> np.ndarray:
    """Hinge values at every report embedding, one label per column.

    This goes through the extension (sorting) route, independent of the
    two-lookup table route in abstain_loss_table.
    """
    fc = as_collection(fc)
    reports = enumerate_reports(fc.k, "V")
    vecs = np.stack([v.vector() for v in reports])
    cols = [hinge_batch(fc, vecs, y) for y in range(1 << fc.k)]
    return np.stack(cols, axis=1)


def argmin_ids(values: np.ndarray, tol: float = ARGMIN_TOL) -> set[int]:
    best = values.min()
    return set(np.nonzero(values <= best + tol)[0].tolist())


def _lattice(k: int, step: float = 0.25) -> np.ndarray:
    axis = np.arange(-1.0, 1.0 + step / 2, step)
    return np.array(list(itertools.product(axis, repeat=k)))


# ---------------------------------------------------------------------------
# Embedding / representativeness / tightness
# ---------------------------------------------------------------------------


def verify_embedding(fc, grid_m: int | None = None) -> VerificationReport:
    """Check that the hinge agrees with the abstain loss on report points and
    that both elicit the same optimal report sets over a distribution grid."""
    fc = as_collection(fc)
    k = fc.k
    if k > 4:
        raise ValueError("embedding verification capped at k <= 4")
    reports = enumerate_reports(k, "V")
    surr = surrogate_loss_table(fc)
    disc = abstain_loss_table(fc)
    gap = np.abs(surr - disc).max()
    cases = surr.size
    if gap > 1e-12:
        i, y = np.unravel_index(np.abs(surr - disc).argmax(), surr.shape)
        return VerificationReport(
            "embedding",
            False,
            cases,
            {"v": str(reports[i]), "y": int(y), "hinge": surr[i, y], "target": disc[i, y]},
        )
    details = {"max_pointwise_gap": float(gap)}
    if k <= 3:
        m = grid_m if grid_m is not None else 8
        lat = _lattice(k)
        lat_table = np.stack([hinge_batch(fc, lat, y) for y in range(1 << k)], axis=1)
        worst_lattice = 0.0
        for p in grid_distributions(k, m):
            cases += 1
            a = argmin_ids(surr @ p)
            b = argmin_ids(disc @ p)
            if a != b:
                return VerificationReport(
                    "embedding", False, cases, {"p": p.tolist(), "mismatch": True}
                )
            shortfall = (disc @ p).min() - (lat_table @ p).min()
            worst_lattice = max(worst_lattice, shortfall)
            if shortfall > MARGIN:
                return VerificationReport(
                    "embedding", False, cases, {"p": p.tolist(), "lattice_beats_reports": True}
                )
        details["worst_lattice_shortfall"] = float(worst_lattice)
    return VerificationReport("embedding", True, cases, None, details)


def verify_representative(fc, reports, grid_m: int = 8) -> VerificationReport:
    """Grid check that the candidate set meets the optimal-report set everywhere."""
    fc = as_collection(fc)
    k = fc.k
    if k > 3:
        raise ValueError("representativeness check capped at k <= 3")
    ridx = report_index(k)
    candidate_ids = {ridx[(v.pos, v.zeros)] for v in reports}
    surr = surrogate_loss_table(fc)
    cases = 0
    for p in grid_distributions(k, grid_m):
        cases += 1
        if not (argmin_ids(surr @ p) & candidate_ids):
            return VerificationReport("representative", False, cases, {"p": p.tolist()})
    return VerificationReport("representative", True, cases)


def tightness_witness(v: AbstainReport) -> np.ndarray:
    """Distribution that agrees with v where it commits and randomizes signs
    on its abstentions: uniquely minimized at v for strict polymatroids."""
    k = v.k
    committed = ((1 << k) - 1) & ~v.zeros
    p = np.zeros(1 << k)
    weight = 1.0 / (1 << v.n_abstain())
    for y in range(1 << k):
        if y & committed == v.pos:
            p[y] = weight
    return p


def verify_tightness(f, grid_m: int = 8) -> VerificationReport:
    """Unique-minimizer witnesses for reports without a lone abstention, and
    grid domination of lone-abstention reports by their sign completions."""
    if isinstance(f, PolymatroidCollection):
        if not f.symmetric:
            raise ValueError("tightness check takes a symmetric set function")
        f = f.for_label(0)
    rep = validate_polymatroid(f, strict=True)
    if not (rep.valid and rep.strictly_submodular and rep.strictly_increasing):
        raise ValueError("tightness requires a strictly submodular, strictly increasing polymatroid")
    k = f.k
    if k > 4:
        raise ValueError("tightness verification capped at k <= 4")
    fc = as_collection(f)
    reports = enumerate_reports(k, "V")
    ridx = report_index(k)
    table = abstain_loss_table(fc)
    cases = 0

    for v in enumerate_reports(k, "V0"):
        cases += 1
        p = tightness_witness(v)
        vals = table @ p
        vid = ridx[(v.pos, v.zeros)]
        others = np.delete(vals, vid)
        if not vals[vid] < others.min() - MARGIN:
            return VerificationReport(
                "tightness", False, cases, {"v": str(v), "p": p.tolist(), "unique": False}
            )

    one_zero = [v for v in reports if v.n_abstain() == 1]
    for p in grid_distributions(k, grid_m) if k <= 3 else [uniform(k)]:
        vals = table @ p
        for v in one_zero:
            cases += 1
            vid = ridx[(v.pos, v.zeros)]
            plus = ridx[(v.pos | v.zeros, 0)]
            minus = ridx[(v.pos, 0)]
            if min(vals[plus], vals[minus]) > vals[vid] + 1e-12:
                return VerificationReport(
                    "tightness", False, cases, {"v": str(v), "p": p.tolist(), "dominated": False}
                )
    return VerificationReport("tightness", True, cases)


# ---------------------------------------------------------------------------
# Inconsistency counterexamples
# ---------------------------------------------------------------------------


@dataclass
class SymmetricCounterexample:
    consistent_case: bool
    epsilon: float | None = None
    kept_coords: list[int] | None = None
    y_bits: int | None = None
    y_prime_bits: int | None = None
    v: AbstainReport | None = None
    p_y: np.ndarray | None = None
    p_y_prime: np.ndarray | None = None
    details: dict = field(default_factory=dict)


def restrict_to_coords(f: SetFunction, coords: list[int]) -> SetFunction:
    """Set function induced on a subset of the ground set."""
    kk = len(coords)
    vals = np.empty(1 << kk)
    for s in range(1 << kk):
        mask = 0
        for b, i in enumerate(coords):
            if s >> b & 1:
                mask |= 1 << i
        vals[s] = f.values[mask]
    return SetFunction(kk, vals)


def counterexample_symmetric(f) -> SymmetricCounterexample:
    """Construct two ridge distributions that pin a single abstaining report
    as hinge-optimal while demanding different plain-loss answers.

    Returns a consistent-case marker for modular inputs (the one case where
    no such certificate exists). Coordinates with a zero singleton value are
    discarded first; they never affect the loss.
    """
    if isinstance(f, PolymatroidCollection):
        if not f.symmetric:
            raise ValueError("symmetric counterexample takes a symmetric set function")
        f = f.for_label(0)
    base = validate_polymatroid(f)
    if not base.valid:
        raise ValueError("input must be a valid polymatroid")
    if base.modular:
        return SymmetricCounterexample(consistent_case=True)

    coords = [i for i in range(f.k) if f.values[1 << i] > 1e-9]
    fr = restrict_to_coords(f, coords) if len(coords) < f.k else f
    if validate_polymatroid(fr).modular:
        raise RuntimeError("non-modular table became modular after discarding null coordinates")
    k = fr.k
    fbar = mean_value(fr)
    eps = 0.5 * (1.0 - fr.full() / (2.0 * fbar))
    full = (1 << k) - 1

    fc = as_collection(fr)
    reports = enumerate_reports(k, "V")
    ridx = report_index(k)
    table = abstain_loss_table(fc)
    plain = plain_loss_table(fc)

    p_y = mix(uniform(k), point_mass(full, k), eps)
    vals = table @ p_y
    ids = argmin_ids(vals)
    # The optimal set must avoid every +-1 report; pick a minimizer that
    # commits nowhere against y so that flipping fixes it in place.
    if any(reports[i].zeros == 0 for i in ids):
        raise RuntimeError("a non-abstaining report is hinge-optimal; construction failed")
    pick = next(
        (i for i in sorted(ids) if reports[i].pos == full & ~reports[i].zeros), None
    )
    if pick is None:
        raise RuntimeError("no optimal report agrees with the bumped label off its abstentions")
    v = reports[pick]

    y_prime = v.pos  # abstentions flip to -1, commitments stay +1
    r = v.pos  # bitmask of y * y'
    p_yp = flip(p_y, r, k)

    plain_y = plain @ p_y
    plain_yp = plain @ p_yp
    ok = (
        argmin_ids(plain_y) == {full}
        and np.delete(plain_y, full).min() > plain_y[full] + MARGIN
        and argmin_ids(plain_yp) == {y_prime}
        and np.delete(plain_yp, y_prime).min() > plain_yp[y_prime] + MARGIN
        and pick in argmin_ids(table @ p_yp)
        and vals[pick] < (1.0 - eps) * 2.0 * fbar - MARGIN
    )
    if not ok:
        raise RuntimeError("counterexample certificate failed to verify")
    return SymmetricCounterexample(
        consistent_case=False,
        epsilon=eps,
        kept_coords=coords,
        y_bits=full,
        y_prime_bits=y_prime,
        v=v,
        p_y=p_y,
        p_y_prime=p_yp,
        details={
            "mean_value": fbar,
            "abstain_value": float(vals[pick]),
            "best_plain_value": float(plain_y[full]),
        },
    )


@dataclass
class AsymmetricCounterexample:
    mode: str  # "direct", "flipped" or "sequence"
    epsilon: float
    p_witness: np.ndarray
    v_opt: AbstainReport
    linked_bits: int
    bad_sign_bits: int | None = None
    details: dict = field(default_factory=dict)


EPS_SCHEDULE = [2.0**-e for e in range(3, 13)]


def counterexample_asymmetric(fc) -> AsymmetricCounterexample:
    """Find a distribution where the all-abstain report is uniquely optimal
    for the hinge, then certify that the plain sign link must answer wrong.

    Requires the complementary-error condition (checked) and k >= 3. The
    witness takes one of three shapes: the sign of the zero report is already
    plain-suboptimal ("direct"), every +-1 report ties and a second bump
    breaks the tie against it ("flipped"), or some label is plain-suboptimal
    and a ray toward it reaches the optimal hinge value ("sequence").
    """
    fc = as_collection(fc)
    k = fc.k
    if not (3 <= k <= 4):
        raise ValueError("asymmetric counterexample needs 3 <= k <= 4")
    cond = check_condition1(fc)
    if not cond.passed:
        raise ValueError(f"collection fails the complementary-error condition: {cond.reason}")

    full = (1 << k) - 1
    reports = enumerate_reports(k, "V")
    ridx = report_index(k)
    table = abstain_loss_table(fc)
    plain = plain_loss_table(fc)
    zero_id = ridx[(0, full)]

    base = table @ uniform(k)
    lemma_ok = argmin_ids(base) <= {zero_id, ridx[(full, 0)]}
    if not lemma_ok:
        raise RuntimeError("optimal set at the uniform distribution escapes {0, all-plus}")

    chosen = None
    for eps in EPS_SCHEDULE:
        p_eps = mix(uniform(k), point_mass(0, k), eps)
        vals = table @ p_eps
        if argmin_ids(vals) == {zero_id} and np.delete(vals, zero_id).min() > vals[zero_id] + MARGIN:
            # The bump term is the abstain loss against the all-minus label;
            # it is zero exactly at the all-minus report, where the dominance
            # inequality holds with a zero left side.
            term = table[:, 0]
            ineq_b = term[zero_id] > 0 and np.all(eps * term < (1.0 - eps) * base)
            ineq_a = vals[ridx[(full, 0)]] > vals[zero_id] + MARGIN
            if ineq_a and ineq_b:
                chosen = (eps, p_eps, vals)
                break
    if chosen is None:
        raise RuntimeError("no epsilon in the schedule isolates the all-abstain report")
    eps, p_eps, vals = chosen

    if k <= 3:  # lattice guard: no off-report point beats the report optimum
        lat = _lattice(k)
        lat_vals = np.stack([hinge_batch(fc, lat, y) for y in range(1 << k)], axis=1) @ p_eps
        if lat_vals.min() < vals[zero_id] - MARGIN:
            raise RuntimeError("lattice point beats the report optimum")

    v_opt = reports[zero_id]
    y_hat = full  # sign* of the zero vector under the fixed 0 -> +1 rule
    plain_vals = plain @ p_eps
    plain_arg = argmin_ids(plain_vals)

    if y_hat not in plain_arg:
        return AsymmetricCounterexample(
            "direct", eps, p_eps, v_opt, y_hat,
            details={"plain_argmin": sorted(plain_arg), "abstain_values": vals.tolist()},
        )

    if plain_arg == set(range(1 << k)):
        for eps2 in EPS_SCHEDULE:
            p2 = mix(p_eps, point_mass(full ^ y_hat, k), eps2)
            v2 = table @ p2
            pl2 = plain @ p2
            if (
                argmin_ids(v2) == {zero_id}
                and np.delete(v2, zero_id).min() > v2[zero_id] + MARGIN
                and pl2[y_hat] > pl2.min() + MARGIN
            ):
                return AsymmetricCounterexample(
                    "flipped", eps, p2, v_opt, y_hat,
                    details={"epsilon_prime": eps2},
                )
        raise RuntimeError("tie-breaking bump failed to exclude the linked label")

    y_out = min(set(range(1 << k)) - plain_arg)
    signs = np.where((y_out >> np.arange(k)) & 1 == 1, 1.0, -1.0)
    ray_gap = expected_hinge(fc, signs, p_eps) - vals[zero_id]
    gaps = []
    for t in (1.0, 0.5, 0.25, 1e-3):
        g = expected_hinge(fc, t * signs, p_eps) - vals[zero_id]
        gaps.append(g)
        if abs(g - t * ray_gap) > 1e-9:
            raise RuntimeError("hinge is not affine along the witness ray")
    return AsymmetricCounterexample(
        "sequence", eps, p_eps, v_opt, y_hat, bad_sign_bits=y_out,
        details={"ray_gap_coefficient": float(ray_gap), "ray_gaps": gaps},
    )


# ---------------------------------------------------------------------------
# Link calibration sweeps and the naive-link failure witness
# ---------------------------------------------------------------------------


def calibration_sweep(
    fc,
    grid_m: int,
    taus=(0.0, 0.5, 1.0),
    n_perturb: int = 20,
    rng: np.random.Generator | None = None,
    epsilon: float | None = None,
) -> VerificationReport:
    """Perturb every optimal report by less than eps and demand the
    threshold-abstain link lands back in the optimal set, for each tau."""
    fc = as_collection(fc)
    k = fc.k
    rng = rng if rng is not None else np.random.default_rng(0)
    eps = epsilon if epsilon is not None else 1.0 / (2 * k)
    reports = enumerate_reports(k, "V")
    ridx = report_index(k)
    table = abstain_loss_table(fc)
    cfgs = [LinkConfig(epsilon=eps, tau=t) for t in taus]
    cases = 0
    for p in grid_distributions(k, grid_m):
        ids = argmin_ids(table @ p)
        for vid in sorted(ids):
            vec = reports[vid].vector()
            deltas = rng.uniform(-0.99 * eps, 0.99 * eps, size=(n_perturb, k))
            for delta in deltas:
                u = vec + delta
                for cfg in cfgs:
                    cases += 1
                    out = threshold_abstain_link(u, cfg)
                    if ridx[(out.pos, out.zeros)] not in ids:
                        return VerificationReport(
                            "calibration",
                            False,
                            cases,
                            {"p": p.tolist(), "v": str(reports[vid]), "u": u.tolist(),
                             "tau": cfg.tau, "linked": str(out)},
                        )
    return VerificationReport("calibration", True, cases)


@dataclass
class NaiveLinkWitness:
    c: float
    p: np.ndarray
    u_star: np.ndarray
    bad_report: AbstainReport
    optimal_ids: set[int]
    gaps: list[float]


def naive_link_inconsistency(fc, c: float = 0.5, grid_m: int = 8) -> NaiveLinkWitness:
    """Exhibit a distribution where per-coordinate thresholding is miscalibrated.

    Exact hinge minimizers always threshold into the optimal set, so the
    witness is a minimizing sequence: points approaching an optimal edge
    whose thresholded report stays outside the optimal set while their
    expected hinge converges to the optimum.
    """
    from .links import naive_threshold_link

    fc = as_collection(fc)
    k = fc.k
    reports = enumerate_reports(k, "V")
    ridx = report_index(k)
    table = abstain_loss_table(fc)
    zero_id = ridx[(0, (1 << k) - 1)]
    for p in grid_distributions(k, grid_m):
        vals = table @ p
        ids = argmin_ids(vals)
        if zero_id not in ids:
            continue
        for yid in sorted(ids):
            y = reports[yid]
            if y.zeros:
                continue
            signs = y.vector()
            for j in range(k):
                dropped = AbstainReport(k, y.pos & ~(1 << j), 1 << j)
                if ridx[(dropped.pos, dropped.zeros)] in ids:
                    continue
                gaps = []
                witness_ok = True
                for t in (1e-3, 1e-4, 1e-5):
                    u = (c + t) * signs
                    u[j] = (c - t) * signs[j]
                    out = naive_threshold_link(u, c)
                    if (out.pos, out.zeros) != (dropped.pos, dropped.zeros):
                        witness_ok = False
                        break
                    gaps.append(expected_hinge(fc, u, p) - vals.min())
                if witness_ok and gaps[-1] < 1e-4 and all(g >= -1e-12 for g in gaps):
                    return NaiveLinkWitness(c, p, c * signs, dropped, ids, gaps)
    raise RuntimeError("no naive-link failure found on this grid")


# ---------------------------------------------------------------------------
# Thickened envelope from grid-sampled optimal sets (containment check only)
# ---------------------------------------------------------------------------


def thickened_envelope_grid(fc, u, epsilon: float, grid_m: int = 8) -> set[int]:
    """Approximate per-loss link envelope, with optimal sets sampled on the
    distribution grid. Never a production link; used to falsify containment."""
    fc = as_collection(fc)
    k = fc.k
    faces = chain_faces(k)
    table = surrogate_loss_table(fc)
    optimal_sets = {frozenset(argmin_ids(table @ p)) for p in grid_distributions(k, grid_m)}
    x = clip(np.asarray(u, dtype=float))[None, :]
    d_faces = face_distances(x, faces)[0]
    out = set(range(len(enumerate_reports(k, "V"))))
    for ids in optimal_sets:
        inside = [fi for fi, f in enumerate(faces) if set(f.member_ids.tolist()) <= ids]
        if not inside:
            continue
        if d_faces[inside].min() < epsilon - GAP_TOL:
            out &= ids
    return out
