import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lovasz_abstain import (
    AbstainReport,
    Label,
    counts,
    make_modular,
    make_sqrt_card,
    metrics,
    synth_data,
    tau_sweep,
    train,
    TrainConfig,
)
from lovasz_abstain.bench import link_reports, mean_hinge, split_indices
from lovasz_abstain.links import LinkConfig, threshold_abstain_link


def test_counts_examples():
    tp, tn, fp, fn = counts(AbstainReport.from_string("+-0"), Label.from_string("+++"))
    assert (tp, tn, fp, fn) == (0b001, 0, 0, 0b010)
    y = Label.from_string("+-+")
    tp, tn, fp, fn = counts(AbstainReport.from_string("+-+"), y)
    assert tp | tn == 0b111 and fp == fn == 0
    tp, tn, fp, fn = counts(AbstainReport.from_string("000"), y)
    assert tp == tn == fp == fn == 0


def test_metrics_worked_example():
    rec = metrics([(AbstainReport.from_string("+-0"), Label.from_string("+++"))])
    assert rec.accuracy == pytest.approx(0.5)
    assert rec.recall == pytest.approx(0.5)
    assert rec.precision == pytest.approx(1.0)
    assert rec.iou == pytest.approx(0.5)
    assert rec.rejection_rate == pytest.approx(1 / 3)
    assert rec.rejection_rate_pos == pytest.approx(1.0)
    assert rec.rejection_rate_neg == pytest.approx(0.0)
    assert rec.undefined_flags == []


def test_metrics_perfect():
    pairs = [(AbstainReport.from_string("+-"), Label.from_string("+-"))] * 3
    rec = metrics(pairs)
    assert rec.accuracy == rec.recall == rec.precision == rec.iou == 1.0
    assert rec.rejection_rate == 0.0


def test_metrics_all_abstain():
    rec = metrics([(AbstainReport.from_string("00"), Label.from_string("+-"))])
    assert rec.rejection_rate == 1.0
    assert rec.accuracy == 0.0
    assert "accuracy" in rec.undefined_flags and "recall" in rec.undefined_flags


trit = st.sampled_from([-1, 0, 1])
sign = st.sampled_from([-1, 1])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.lists(trit, min_size=3, max_size=3),
                          st.lists(sign, min_size=3, max_size=3)),
                min_size=1, max_size=6))
def test_metrics_invariants(pairs):
    reports = [(AbstainReport.from_vector(v), Label.from_signs(y)) for v, y in pairs]
    rec = metrics(reports)
    total_abs = sum(v.n_abstain() for v, _ in reports)
    for v, y in reports:
        tp, tn, fp, fn = counts(v, y)
        assert (tp | tn | fp | fn | v.zeros).bit_count() == 3
        assert (tp | tn | fp | fn) & v.zeros == 0
    if total_abs:
        assert rec.rejection_rate_pos + rec.rejection_rate_neg == pytest.approx(1.0)
    assert 0 <= rec.rejection_rate <= 1


def test_synth_determinism():
    cfg = TrainConfig(k=3, feature_dim=6, n_samples=50, seed=9)
    a, b = synth_data(cfg), synth_data(cfg)
    assert np.array_equal(a.X, b.X) and np.array_equal(a.Y, b.Y)


def test_synth_separable_at_zero_noise():
    cfg = TrainConfig(k=3, feature_dim=5, n_samples=100, seed=3, noise=0.0)
    data = synth_data(cfg)
    W = np.zeros((3, 5))
    W[:, :3] = np.eye(3) / cfg.margin
    fc = make_modular([1.0, 1.0, 1.0])
    assert mean_hinge(fc, W, data.X, data.y_bits) == 0.0


def test_train_zero_epochs():
    cfg = TrainConfig(k=2, feature_dim=4, n_samples=40, epochs=0, seed=1)
    res = train(cfg, make_modular([1.0, 1.0]))
    assert np.all(res.weights == 0)


def test_train_converges_and_is_deterministic():
    cfg = TrainConfig(k=4, feature_dim=8, n_samples=200, epochs=150, seed=0)
    fc = make_modular(np.ones(4))
    r1 = train(cfg, fc)
    r2 = train(cfg, fc)
    assert r1.train_trace[-1] < 1e-2
    assert json.dumps(r1.to_dict()) == json.dumps(r2.to_dict())


def test_trace_nonincreasing_with_small_step():
    cfg = TrainConfig(
        k=2, feature_dim=4, n_samples=60, epochs=40, seed=5,
        lr_init=1e-3, lr_decay=1.0, lr_decay_every=10**9,
    )
    res = train(cfg, make_modular([1.0, 1.0]))
    diffs = np.diff(res.train_trace)
    assert np.all(diffs <= 1e-6)


def test_split_disjoint():
    tr, va, te = split_indices(100, 0)
    assert len(tr) + len(va) + len(te) == 100
    assert not (set(tr) & set(va)) and not (set(va) & set(te)) and not (set(tr) & set(te))


def test_tau_sweep_monotone_and_rows():
    cfg = TrainConfig(k=3, feature_dim=6, n_samples=120, epochs=60, seed=2,
                      noise=[0.0, 0.0, 2.5])
    fc = make_sqrt_card(3)
    data = synth_data(cfg)
    res = train(cfg, fc, data)
    rows = tau_sweep(res, data, [0.0, 0.25, 0.5, 0.75, 1.0])
    assert len(rows) == 5
    rates = [r["rejection_rate"] for r in rows]
    assert all(a <= b + 1e-12 for a, b in zip(rates, rates[1:]))
    single = tau_sweep(res, data, [0.5])
    assert len(single) == 1


def test_trimmed_reports_have_no_lone_abstention():
    cfg = TrainConfig(k=3, feature_dim=6, n_samples=80, epochs=30, seed=4,
                      noise=[0.0, 1.5, 3.0])
    fc = make_sqrt_card(3)
    data = synth_data(cfg)
    res = train(cfg, fc, data)
    for tau in (0.0, 0.5, 1.0):
        reports = link_reports(res.best_weights, data.X, tau, None, trim=True)
        assert all(v.n_abstain() != 1 for v in reports)


def test_link_reports_match_direct_calls(rng):
    W = rng.standard_normal((2, 3))
    X = rng.standard_normal((10, 3))
    out = link_reports(W, X, 0.5, None)
    for x, v in zip(X, out):
        u = W @ x
        assert v == threshold_abstain_link(u, LinkConfig(tau=0.5))


def test_trainconfig_validation():
    with pytest.raises(ValueError):
        TrainConfig(k=0)
    with pytest.raises(ValueError):
        TrainConfig(k=2, feature_dim=1)
    with pytest.raises(ValueError):
        TrainConfig(lr_init=0.0)
