#!/usr/bin/env python3
"""Run the dual-arm experiment on a construct screen with the full grid.

Defaults reproduce the production configuration: E1 feature map with 8
repetitions at scale pi/2, operator backpropagation truncated at 0.05,
10 random 70/30 splits, 10-fold cross-validated hyperparameter search
over the full grid for both the raw one-hot arm and the projected arm.
Writes report.json plus f1/counts/fisher CSV tables to the output
directory. Expect hours at full width; pass --cache to make reruns
cheap and --jobs to parallelize feature extraction.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from motifqk import data as dataio
from motifqk.cli import _parse_scale, _write_report_tables
from motifqk.errors import BackendError, ConfigError, DataError
from motifqk.evaluation import ExperimentConfig, run_experiment
from motifqk.features import BackendConfig, EmbeddingConfig


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data", required=True,
                        help="CSV with pos1,pos2,pos3,cytotoxicity columns")
    parser.add_argument("--output-dir", required=True)
    parser.add_argument("--embedding", choices=("e1", "e2"), default="e1")
    parser.add_argument("--reps", type=int, default=8,
                        help="feature-map repetitions (e1)")
    parser.add_argument("--steps", type=int, default=4,
                        help="Trotter steps (e2)")
    parser.add_argument("--scale", default="pi2")
    parser.add_argument("--backend", default="obp:0.05",
                        help="exact, shots:<n>, or obp:<threshold>")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for the e2 init layer / shot sampling")
    parser.add_argument("--order", choices=("natural", "correlation"),
                        default="natural")
    parser.add_argument("--splits", type=int, default=10)
    parser.add_argument("--train-frac", type=float, default=0.7)
    parser.add_argument("--split-seed", type=int, default=0)
    parser.add_argument("--cv-folds", type=int, default=10)
    parser.add_argument("--cv-seed", type=int, default=0)
    parser.add_argument("--alpha", type=float, default=0.01,
                        help="significance level for the per-motif tables")
    parser.add_argument("--cache", default=None,
                        help="feature cache directory")
    parser.add_argument("--jobs", type=int, default=1)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.embedding == "e1":
            embedding = EmbeddingConfig("e1", reps=args.reps,
                                        scale=_parse_scale(args.scale))
        else:
            embedding = EmbeddingConfig("e2", steps=args.steps,
                                        scale=_parse_scale(args.scale),
                                        seed=args.seed)
        config = ExperimentConfig(
            embedding=embedding,
            backend=BackendConfig.parse(args.backend, seed=args.seed),
            n_splits=args.splits, train_frac=args.train_frac,
            split_seed=args.split_seed, cv_folds=args.cv_folds,
            cv_seed=args.cv_seed, feature_order=args.order,
            cache_dir=args.cache, n_jobs=args.jobs)
        constructs = dataio.load_constructs(args.data)
        dataset = dataio.encode_dataset(constructs)
        print(f"{len(dataset)} constructs, {dataset.layout.n_bits} bits, "
              f"{embedding.n_qubits(dataset.layout.n_bits)} qubits, "
              f"{args.splits} splits")
        report = run_experiment(dataset, config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return 4
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    report.save(outdir / "report.json")
    _write_report_tables(report, outdir, args.alpha)
    for arm in ("original", "pqk"):
        print(f"{arm}: median F1 {report.median_f1[arm]:.4f}, "
              f"max F1 {report.max_f1[arm]:.4f}, per split "
              f"{[f'{v:.3f}' for v in report.f1[arm]]}")
    print(f"wrote report.json, f1.csv, counts.csv, fisher.csv to {outdir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
