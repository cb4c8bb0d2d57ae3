"""tapmein command line.

    tapmein synth --users N --seed S --out ds.json
    tapmein stats fit ds.json --out pop.json
    tapmein enroll --user U --samples file.json --store DIR
    tapmein verify --user U --sample file.json --store DIR
    tapmein eval ds.json --pop pop.json --reps 30 --classifier svm --n 5 \
            --seed S --report out.json [--csv out.csv]
    tapmein sweep-n ds.json --pop pop.json [...] --report out.json
    tapmein rank-features ds.json --pop pop.json [...] --report out.json
    tapmein serve --port P --store DIR

Exit codes: 0 success, 1 usage error, 2 data error; `verify` exits 0 when
accepted and 3 when rejected.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from tapmein.authflow import ThresholdPolicy, TrainingConfig, enroll, verify
from tapmein.errors import TapmeinError
from tapmein.evalbench import (
    SynthParams,
    rank_features,
    run_protocol,
    sweep_enrollment_size,
    synth_dataset,
)
from tapmein.gateway import documents
from tapmein.gateway.store import ProfileStore
from tapmein.negatives import default_population_stats, fit_population_stats
from tapmein.tapcore import extract_durations

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_REJECTED = 3


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write_report(obj, path: str) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_csv(rows: Sequence[Sequence], header: Sequence[str], path: str) -> None:
    lines = [",".join(header)]
    lines += [",".join(str(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _load_stats(path: Optional[str]):
    return documents.load_population_stats(path) if path else default_population_stats()


def _training_config(args) -> TrainingConfig:
    policy = ThresholdPolicy()
    if getattr(args, "target_fpr", None) is not None:
        policy = ThresholdPolicy(kind="calibrated", target_fpr=args.target_fpr)
    return TrainingConfig(
        n=args.n,
        classifier_kind=args.classifier,
        threshold_policy=policy,
        master_seed=args.seed,
    )


def _cmd_synth(args) -> int:
    params = SynthParams(
        users=args.users,
        genuine_per_condition=args.genuine_per_condition,
        attackers=args.attackers,
        seed=args.seed,
    )
    ds, stats = synth_dataset(params)
    documents.export_dataset(ds, args.out)
    if args.pop_out:
        documents.dump_population_stats(stats, args.pop_out)
    total = sum(len(u.genuine) + len(u.all_attack_samples()) for u in ds.users)
    print(f"wrote {args.out}: {len(ds.users)} users, {total} samples")
    return EXIT_OK


def _cmd_stats_fit(args) -> int:
    ds = documents.import_dataset(args.dataset)
    processed = [extract_durations(s) for u in ds.users for s in u.genuine]
    stats = fit_population_stats(
        processed, provenance=f"fitted from genuine samples of {args.dataset}"
    )
    documents.dump_population_stats(stats, args.out)
    print(f"wrote {args.out}: pooled {stats.sample_count} sequences")
    return EXIT_OK


def _cmd_enroll(args) -> int:
    samples = documents.load_sample_file(args.samples)
    profile = enroll(args.user, samples, _load_stats(args.pop), _training_config(args))
    ProfileStore(args.store).save_profile(profile)
    print(
        f"enrolled {args.user}: length {profile.length}, "
        f"threshold {profile.threshold:.6g} ({profile.classifier_kind})"
    )
    return EXIT_OK


def _cmd_verify(args) -> int:
    candidates = documents.load_sample_file(args.sample)
    if len(candidates) != 1:
        raise documents.SchemaViolation("verify expects exactly one sample", args.sample)
    profile = ProfileStore(args.store).load_profile(args.user)
    decision = verify(profile, candidates[0])
    out = {"accepted": decision.accepted, "reason": decision.reason, "threshold": decision.threshold}
    if decision.score is not None:
        out["score"] = decision.score
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK if decision.accepted else EXIT_REJECTED


def _cmd_eval(args) -> int:
    ds = documents.import_dataset(args.dataset)
    stats = _load_stats(args.pop)
    report = run_protocol(ds, stats, _training_config(args), reps=args.reps)
    _write_report(report.to_dict(), args.report)
    if args.csv:
        rows = []
        for u in report.users:
            for kind, s in sorted(u.attacks.items()):
                rows.append([u.user_id, kind, s.eer, s.fpr, s.fnr, s.genuine_count, s.impostor_count])
            rows.append([u.user_id, "overall", u.overall.eer, u.overall.fpr, u.overall.fnr,
                         u.overall.genuine_count, u.overall.impostor_count])
        for kind, eer in sorted(report.aggregate_attack_eer.items()):
            rows.append(["__aggregate__", kind, eer, "", "", "", ""])
        rows.append(["__aggregate__", "overall", report.aggregate_overall_eer, "", "", "", ""])
        _write_csv(rows, ["user_id", "kind", "eer", "fpr", "fnr", "genuine", "impostor"], args.csv)
    print(f"wrote {args.report}")
    for kind, eer in sorted(report.aggregate_attack_eer.items()):
        print(f"  mean EER {kind}: {eer:.4f}")
    print(f"  mean EER overall: {report.aggregate_overall_eer:.4f}")
    for cond, fnr in sorted(report.aggregate_condition_fnr.items()):
        print(f"  mean FNR {cond} (operating threshold): {fnr:.4f}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    ds = documents.import_dataset(args.dataset)
    stats = _load_stats(args.pop)
    n_values = [int(v) for v in args.n_values.split(",")]
    kinds = args.classifiers.split(",")
    rows = sweep_enrollment_size(
        ds, stats, _training_config(args), n_values=n_values,
        classifier_kinds=kinds, reps=args.reps,
    )
    report = {
        "schema_version": 1,
        "rows": [{"classifier": r.classifier, "n": r.n, "mean_eer": r.mean_eer} for r in rows],
    }
    _write_report(report, args.report)
    if args.csv:
        _write_csv([[r.classifier, r.n, r.mean_eer] for r in rows],
                   ["classifier", "n", "mean_eer"], args.csv)
    for r in rows:
        print(f"  {r.classifier} n={r.n}: mean EER {r.mean_eer:.4f}")
    return EXIT_OK


def _cmd_rank(args) -> int:
    ds = documents.import_dataset(args.dataset)
    stats = _load_stats(args.pop)
    cfg = TrainingConfig(n=args.n, classifier_kind="forest", master_seed=args.seed)
    ranked = rank_features(ds, stats, cfg, reps=args.reps, top_k=args.top_k)
    report = {
        "schema_version": 1,
        "features": [{"rank": i + 1, "name": name, "importance": imp}
                     for i, (name, imp) in enumerate(ranked)],
    }
    _write_report(report, args.report)
    if args.csv:
        _write_csv([[i + 1, name, imp] for i, (name, imp) in enumerate(ranked)],
                   ["rank", "feature", "importance"], args.csv)
    for i, (name, imp) in enumerate(ranked):
        print(f"  {i + 1:2d}. {name}: {imp:.4f}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    from tapmein.gateway.service import serve

    serve(
        args.store,
        _load_stats(args.pop),
        _training_config(args),
        host=args.host,
        port=args.port,
    )
    return EXIT_OK


def _add_training_args(p, default_n=5):
    p.add_argument("--classifier", choices=("svm", "forest"), default="svm")
    p.add_argument("--n", type=int, default=default_n, help="enrollment size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target-fpr", type=float, default=None,
                   help="calibrate the threshold to this sampled FPR instead of the native boundary")


def build_parser() -> _Parser:
    parser = _Parser(prog="tapmein", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a synthetic labeled corpus")
    p.add_argument("--users", type=int, default=20)
    p.add_argument("--genuine-per-condition", type=int, default=10)
    p.add_argument("--attackers", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--pop-out", default=None, help="also write the fitted population statistics")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("stats", help="population statistics tools")
    stats_sub = p.add_subparsers(dest="stats_command", required=True, parser_class=_Parser)
    pf = stats_sub.add_parser("fit", help="fit channel statistics from a dataset's genuine samples")
    pf.add_argument("dataset")
    pf.add_argument("--out", required=True)
    pf.set_defaults(func=_cmd_stats_fit)

    p = sub.add_parser("enroll", help="enroll a user from a samples file")
    p.add_argument("--user", required=True)
    p.add_argument("--samples", required=True)
    p.add_argument("--store", required=True)
    p.add_argument("--pop", default=None, help="population stats document (default: bundled)")
    _add_training_args(p)
    p.set_defaults(func=_cmd_enroll)

    p = sub.add_parser("verify", help="verify one sample against a stored profile")
    p.add_argument("--user", required=True)
    p.add_argument("--sample", required=True)
    p.add_argument("--store", required=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("eval", help="run the repeated enrollment/attack protocol")
    p.add_argument("dataset")
    p.add_argument("--pop", default=None)
    p.add_argument("--reps", type=int, default=30)
    p.add_argument("--report", required=True)
    p.add_argument("--csv", default=None)
    _add_training_args(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sweep-n", help="sweep the enrollment size")
    p.add_argument("dataset")
    p.add_argument("--pop", default=None)
    p.add_argument("--reps", type=int, default=30)
    p.add_argument("--n-values", default="2,3,4,5,6,7")
    p.add_argument("--classifiers", default="svm,forest")
    p.add_argument("--report", required=True)
    p.add_argument("--csv", default=None)
    _add_training_args(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("rank-features", help="rank features by forest importance")
    p.add_argument("dataset")
    p.add_argument("--pop", default=None)
    p.add_argument("--reps", type=int, default=30)
    p.add_argument("--top-k", type=int, default=20)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", required=True)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("serve", help="run the HTTP authentication service")
    p.add_argument("--port", type=int, default=8650)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--store", required=True)
    p.add_argument("--pop", default=None)
    _add_training_args(p)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TapmeinError as exc:
        print(f"tapmein: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"tapmein: {exc}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
