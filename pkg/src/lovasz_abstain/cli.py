"""Command-line front end.

Vectors are comma-separated decimals, labels are strings over {+,-}, reports
over {+,-,0}; multiclass labels are comma-separated class numbers with "_"
for abstain. Verification subcommands print a JSON report to stdout.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import bench, links, lovasz, multiclass, oracle, serialize, setfn, targets


def _vec(s: str) -> np.ndarray:
    return np.array([float(tok) for tok in s.split(",")])


def _eps(s: str) -> float | None:
    return None if s == "auto" else float(s)


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, default=_jsonable)
    sys.stdout.write("\n")


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, set):
        return sorted(str(v) for v in x)
    if isinstance(x, targets.AbstainReport):
        return str(x)
    return str(x)


def cmd_validate(args):
    f = serialize.load_setfn(args.setfn)
    _emit(setfn.validate_polymatroid(f, strict=args.strict).to_dict())


def cmd_condition1(args):
    fc = serialize.load_collection(args.collection)
    _emit(setfn.check_condition1(fc).to_dict())


def cmd_eval_extension(args):
    f = serialize.load_setfn(args.setfn)
    print(lovasz.lovasz_extension(f, _vec(args.x)))


def cmd_eval_hinge(args):
    fc = serialize.load_collection(args.collection)
    y = setfn.Label.from_string(args.y)
    print(lovasz.hinge(fc, _vec(args.u), y))


def cmd_eval_target(args):
    fc = serialize.load_collection(args.collection)
    y = setfn.Label.from_string(args.y)
    v = targets.AbstainReport.from_string(args.v)
    if args.plain:
        print(targets.target_plain(fc, v, y))
    else:
        print(targets.target_abstain(fc, v, y))


def cmd_link(args):
    u = _vec(args.u)
    cfg = links.LinkConfig(epsilon=_eps(args.eps), tau=args.tau)
    v = links.threshold_abstain_link(u, cfg)
    if args.trim:
        v = links.trim_single_abstain(v, u)
    print(v)


def cmd_envelope(args):
    u = _vec(args.u)
    cfg = links.LinkConfig(epsilon=_eps(args.eps))
    detailed = links.envelope_detailed(u, cfg)
    if args.oracle:
        members = {str(v) for v in links.envelope_oracle(u, cfg)}
        by_report = {d["report"]: d for d in detailed}
        detailed = [by_report.get(m, {"report": m, "i": None, "pi": None, "y": None})
                    for m in sorted(members)]
    _emit({"members": detailed})


def cmd_verify(args):
    fc = serialize.load_collection(args.collection)
    if args.what == "embedding":
        rep = oracle.verify_embedding(fc, grid_m=args.grid)
    elif args.what == "representative":
        fam = targets.enumerate_reports(fc.k, args.family)
        rep = oracle.verify_representative(fc, fam, grid_m=args.grid or 8)
    else:
        rep = oracle.verify_tightness(fc, grid_m=args.grid or 8)
    _emit(rep.to_dict())


def cmd_counterexample(args):
    fc = serialize.load_collection(args.collection)
    if args.symmetric:
        res = oracle.counterexample_symmetric(fc)
        if res.consistent_case:
            _emit({"consistent_case": True})
        else:
            _emit({
                "consistent_case": False,
                "epsilon": res.epsilon,
                "kept_coords": res.kept_coords,
                "y": res.y_bits,
                "y_prime": res.y_prime_bits,
                "v": str(res.v),
                "p_y": res.p_y,
                "p_y_prime": res.p_y_prime,
                "details": res.details,
            })
    else:
        res = oracle.counterexample_asymmetric(fc)
        _emit({
            "mode": res.mode,
            "epsilon": res.epsilon,
            "p_witness": res.p_witness,
            "v_opt": str(res.v_opt),
            "linked_bits": res.linked_bits,
            "bad_sign_bits": res.bad_sign_bits,
            "details": res.details,
        })


def cmd_mc_encode(args):
    codec = multiclass.BlockCodec(args.C)
    y = multiclass.ClassLabel.from_string(args.C, args.y)
    bits = multiclass.encode_bep(y, codec)
    print("".join("+" if bits >> i & 1 else "-" for i in range(codec.d * y.k)))


def _load_costs(path, k: int):
    obj = json.loads(Path(path).read_text())
    if "weights_by_class" in obj:
        return multiclass.ClassCosts(k, weights_by_class=obj["weights_by_class"])
    return multiclass.ClassCosts.from_setfn(serialize.setfn_from_obj(obj))


def cmd_mc_eval(args):
    v = multiclass.MulticlassReport.from_string(args.C, args.v)
    y = multiclass.ClassLabel.from_string(args.C, args.y)
    g = _load_costs(args.g, y.k)
    print(multiclass.multiclass_target(g, v, y))


def cmd_mc_link(args):
    codec = multiclass.BlockCodec(args.C)
    cfg = links.LinkConfig(epsilon=_eps(args.eps), tau=args.tau)
    print(multiclass.trimmed_link(_vec(args.u), cfg, codec))


def cmd_train(args):
    spec = json.loads(Path(args.config).read_text())
    fc = serialize.collection_from_obj(spec.pop("setfn"))
    cfg = bench.TrainConfig(**{key: tuple(v) if key == "taus" else v for key, v in spec.items()})
    data = bench.synth_data(cfg)
    result = bench.train(cfg, fc, data)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "model.json").write_text(json.dumps(result.to_dict(), indent=2))
    (out / "collection.json").write_text(json.dumps(serialize.collection_to_obj(fc)))
    print(f"final train hinge {result.train_trace[-1]:.6g}, best epoch {result.best_epoch}")


def _read_report_csv(path):
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not all(c.startswith("c") for c in header):
            rows.append(header)  # tolerate missing header
        rows.extend(reader)
    return ["".join(r) for r in rows]


def cmd_metrics(args):
    preds = [targets.AbstainReport.from_string(s) for s in _read_report_csv(args.pred)]
    truths = [setfn.Label.from_string(s) for s in _read_report_csv(args.truth)]
    if len(preds) != len(truths):
        raise SystemExit("prediction and truth files have different lengths")
    rec = bench.metrics(list(zip(preds, truths)))
    Path(args.out).write_text(json.dumps(rec.to_dict(), indent=2))
    _emit(rec.to_dict())


def cmd_sweep(args):
    run = Path(args.model)
    model = json.loads((run / "model.json").read_text())
    cfg = bench.TrainConfig(**{key: tuple(v) if key == "taus" else v
                               for key, v in model["config"].items()})
    data = bench.synth_data(cfg)
    result = bench.TrainResult(
        weights=np.array(model["weights"]),
        best_weights=np.array(model["best_weights"]),
        best_epoch=model["best_epoch"],
        train_trace=model["train_trace"],
        val_trace=model["val_trace"],
        config=cfg,
    )
    taus = [float(t) for t in args.taus.split(",")]
    rows = bench.tau_sweep(result, data, taus, trim=args.trim)
    _emit(rows)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lovabs", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("validate", help="polymatroid axioms on a set function file")
    q.add_argument("--setfn", required=True)
    q.add_argument("--strict", action="store_true")
    q.set_defaults(fn=cmd_validate)

    q = sub.add_parser("condition1", help="complementary-error condition on a collection")
    q.add_argument("--collection", required=True)
    q.set_defaults(fn=cmd_condition1)

    q = sub.add_parser("eval-extension", help="extension value at a nonnegative point")
    q.add_argument("--setfn", required=True)
    q.add_argument("--x", required=True)
    q.set_defaults(fn=cmd_eval_extension)

    q = sub.add_parser("eval-hinge", help="hinge value at (u, y)")
    q.add_argument("--collection", required=True)
    q.add_argument("--u", required=True)
    q.add_argument("--y", required=True)
    q.set_defaults(fn=cmd_eval_hinge)

    q = sub.add_parser("eval-target", help="discrete target loss at (v, y)")
    q.add_argument("--collection", required=True)
    q.add_argument("--v", required=True)
    q.add_argument("--y", required=True)
    q.add_argument("--plain", action="store_true")
    q.set_defaults(fn=cmd_eval_target)

    q = sub.add_parser("link", help="threshold-abstain link output")
    q.add_argument("--u", required=True)
    q.add_argument("--tau", type=float, default=0.5)
    q.add_argument("--eps", default="auto")
    q.add_argument("--trim", action="store_true")
    q.set_defaults(fn=cmd_link)

    q = sub.add_parser("envelope", help="link envelope members with witnesses")
    q.add_argument("--u", required=True)
    q.add_argument("--eps", default="auto")
    q.add_argument("--oracle", action="store_true")
    q.set_defaults(fn=cmd_envelope)

    q = sub.add_parser("verify", help="brute-force verification sweeps")
    q.add_argument("what", choices=["embedding", "representative", "tightness"])
    q.add_argument("--collection", required=True)
    q.add_argument("--k", type=int, default=None, help="expected dimension (checked)")
    q.add_argument("--grid", type=int, default=None)
    q.add_argument("--family", choices=["V", "V0", "Y"], default="V0")
    q.set_defaults(fn=cmd_verify)

    q = sub.add_parser("counterexample", help="inconsistency certificates")
    q.add_argument("--collection", required=True)
    q.add_argument("--symmetric", action="store_true")
    q.set_defaults(fn=cmd_counterexample)

    q = sub.add_parser("mc-encode", help="block-encode a multiclass label")
    q.add_argument("--C", type=int, required=True)
    q.add_argument("--y", required=True)
    q.set_defaults(fn=cmd_mc_encode)

    q = sub.add_parser("mc-eval", help="multiclass abstain target value")
    q.add_argument("--g", required=True)
    q.add_argument("--C", type=int, required=True)
    q.add_argument("--v", required=True)
    q.add_argument("--y", required=True)
    q.set_defaults(fn=cmd_mc_eval)

    q = sub.add_parser("mc-link", help="trimmed threshold-abstain link")
    q.add_argument("--u", required=True)
    q.add_argument("--C", type=int, required=True)
    q.add_argument("--tau", type=float, default=0.5)
    q.add_argument("--eps", default="auto")
    q.set_defaults(fn=cmd_mc_link)

    q = sub.add_parser("train", help="fit the linear scorer on synthetic data")
    q.add_argument("--config", required=True)
    q.add_argument("--out", required=True)
    q.set_defaults(fn=cmd_train)

    q = sub.add_parser("metrics", help="abstention-aware metrics from CSV files")
    q.add_argument("--pred", required=True)
    q.add_argument("--truth", required=True)
    q.add_argument("--out", required=True)
    q.set_defaults(fn=cmd_metrics)

    q = sub.add_parser("sweep", help="tau sweep of a trained run directory")
    q.add_argument("--model", required=True)
    q.add_argument("--taus", default="0,0.25,0.5,0.75,1")
    q.add_argument("--trim", action="store_true")
    q.set_defaults(fn=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "k", None) is not None and hasattr(args, "collection"):
        fc = serialize.load_collection(args.collection)
        if fc.k != args.k:
            raise SystemExit(f"--k {args.k} does not match the collection (k={fc.k})")
    args.fn(args)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
