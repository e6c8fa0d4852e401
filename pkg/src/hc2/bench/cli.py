"""``hc2`` command line: train, predict, benchmark and compare."""

from __future__ import annotations

import argparse
import hashlib
import logging
import sys
from pathlib import Path

from hc2.bench import experiment as ex
from hc2.hive.components import PRESETS

__all__ = ["main", "build_parser"]


def _add_common(p: argparse.ArgumentParser, many: bool) -> None:
    p.add_argument("--data-dir", default=None, help="archive root holding <problem>/<problem>_TRAIN.ts (default: bundled problems)")
    p.add_argument("--results-dir", default="results", help="where results files and models are written")
    p.add_argument("--preset", default="default", choices=sorted(PRESETS), help="component configuration preset")
    p.add_argument("--threads", type=int, default=1, help="worker threads")
    if many:
        p.add_argument("--problem", default=None, help="comma-separated problems (default: every problem in --data-dir)")
        p.add_argument("--classifier", default="HC2", help="comma-separated classifiers")
        p.add_argument("--resample", default="0", help="resample indices, e.g. 0-4 or 0,3")
    else:
        p.add_argument("--problem", required=True)
        p.add_argument("--classifier", default="HC2", choices=ex.CLASSIFIERS)
        p.add_argument("--resample", type=int, default=0)


def _add_build(p: argparse.ArgumentParser) -> None:
    p.add_argument("--contract", default=None, help="train time limit, e.g. 4h, 30m, 90s")
    p.add_argument("--checkpoint-dir", default=None, help="checkpoint and resume HC2 builds here")
    p.add_argument("--seed", type=int, default=None, help="seed (default: the resample index)")
    p.add_argument("--components", default=None, help="HC2 components, e.g. tde,drcif,arsenal,stc")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hc2", description="HIVE-COTE 2.0 time series classification")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one classifier on one resample and save the model")
    _add_common(p, many=False)
    _add_build(p)

    p = sub.add_parser("predict", help="predict the test split with a saved model and write the results file")
    _add_common(p, many=False)
    _add_build(p)

    p = sub.add_parser("benchmark", help="run every classifier/problem/resample, then compare")
    _add_common(p, many=True)
    _add_build(p)
    p.add_argument("--force", action="store_true", help="recompute existing results files")
    p.add_argument("--allow-partial", action="store_true", help="compare even if results are missing")

    p = sub.add_parser("compare", help="rank classifiers from existing results files")
    _add_common(p, many=True)
    p.add_argument("--allow-partial", action="store_true", help="compare even if results are missing")
    return parser


def _spec(args, classifier=None, problem=None, resample=None) -> ex.ExperimentSpec:
    comps = getattr(args, "components", None)
    return ex.ExperimentSpec(
        classifier=classifier or args.classifier,
        problem=problem or args.problem,
        resample=args.resample if resample is None else resample,
        data_dir=args.data_dir,
        results_dir=args.results_dir,
        contract=ex.parse_duration(getattr(args, "contract", None)),
        seed=getattr(args, "seed", None),
        threads=args.threads,
        components=tuple(comps.split(",")) if comps else None,
        preset=args.preset,
        checkpoint_dir=getattr(args, "checkpoint_dir", None),
    )


def _cmd_train(args) -> int:
    spec = _spec(args)
    train, _ = ex.load_split(spec.problem, spec.resample, spec.data_dir)
    model = ex.train_model(spec, train)
    path = ex.save_model(spec, model)
    print(f"model: {path}")
    print(f"train estimate: {model.train_accuracy:.6f}")
    print(f"model sha256: {hashlib.sha256(model.to_bytes()).hexdigest()}")
    return 0


def _cmd_predict(args) -> int:
    spec = _spec(args)
    if not spec.model_path.exists():
        print(f"no saved model at {spec.model_path}; run `hc2 train` first", file=sys.stderr)
        return 2
    _, test = ex.load_split(spec.problem, spec.resample, spec.data_dir)
    model = ex.load_model(spec)
    text, metrics = ex.predict_results(spec, model, test)
    ex.atomic_write(spec.results_path, text)
    print(f"results: {spec.results_path}")
    for k, v in metrics.items():
        print(f"{k}: {v:.6f}")
    return 0


def _grid(args):
    classifiers = [c.strip() for c in args.classifier.split(",") if c.strip()]
    problems = [p.strip() for p in args.problem.split(",")] if args.problem else ex.default_problems(args.data_dir)
    return classifiers, problems, ex.parse_resamples(args.resample)


def _compare(args, classifiers, problems, resamples) -> int:
    try:
        tables = ex.score_tables(args.results_dir, classifiers, problems, resamples, args.allow_partial)
    except ex.IncompleteResults as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    comparisons = ex.compare_results(tables)
    out = Path(args.results_dir) / "comparison"
    ex.write_comparison(out, tables, comparisons)
    acc = tables["accuracy"]
    print("dataset," + ",".join(acc.classifiers))
    for j, d in enumerate(acc.datasets):
        print(d + "," + ",".join(f"{v:.4f}" for v in acc.scores[:, j]))
    if "accuracy" in comparisons:
        cmp = comparisons["accuracy"]
        print("average accuracy rank: " + ", ".join(
            f"{n}={cmp.ranks[cmp.classifiers.index(n)]:.3f}" for n in cmp.order()))
        print("cliques: " + ("; ".join("{" + ",".join(c) + "}" for c in cmp.cliques) or "none"))
    print(f"tables written to {out}")
    return 0


def _cmd_benchmark(args) -> int:
    classifiers, problems, resamples = _grid(args)
    specs = [_spec(args, c, p, r) for c in classifiers for p in problems for r in resamples]
    outcomes = ex.run_suite(specs, threads=args.threads, force=args.force)
    for o in outcomes:
        tag = "ran" if o.computed else "kept"
        print(f"{tag} {o.spec.classifier} {o.spec.problem} resample {o.spec.resample}: "
              f"accuracy {o.metrics['accuracy']:.4f}")
    if len(classifiers) >= 2:
        return _compare(args, classifiers, problems, resamples)
    return 0


def _cmd_compare(args) -> int:
    return _compare(args, *_grid(args))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return {"train": _cmd_train, "predict": _cmd_predict,
                "benchmark": _cmd_benchmark, "compare": _cmd_compare}[args.command](args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
