#!/usr/bin/env python3
"""Kernel-geometry screening over a regularization sweep.

For each lambda, reports the geometric difference g_cq between the
classical kernel on raw one-hot bits and the projected quantum kernel,
plus the model complexities of both kernels on the labels. g_cq well
above sqrt(N) with a complexity gap marks datasets where the projected
kernel has room to outperform; g_cq near or below sqrt(N) means the
classical kernel already spans the quantum one's geometry.
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import numpy as np

from motifqk import data as dataio
from motifqk.cli import _parse_gamma, _parse_scale
from motifqk.errors import BackendError, ConfigError, DataError
from motifqk.evaluation import screen_advantage
from motifqk.features import BackendConfig, EmbeddingConfig, project_features
from motifqk.kernels import KernelSpec

DEFAULT_LAMBDAS = (0.05, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data", required=True,
                        help="CSV with pos1,pos2,pos3,cytotoxicity columns")
    parser.add_argument("--output", default=None,
                        help="JSON path for the full sweep")
    parser.add_argument("--embedding", choices=("e1", "e2"), default="e1")
    parser.add_argument("--reps", type=int, default=8)
    parser.add_argument("--steps", type=int, default=4)
    parser.add_argument("--scale", default="pi2")
    parser.add_argument("--backend", default="obp:0.05")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--kernel", default="rbf",
                        choices=("linear", "poly", "rbf", "sigmoid"))
    parser.add_argument("--gamma", default="scale")
    parser.add_argument("--lambdas", type=float, nargs="+",
                        default=list(DEFAULT_LAMBDAS))
    parser.add_argument("--cache", default=None)
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
        backend = BackendConfig.parse(args.backend, seed=args.seed)
        constructs = dataio.load_constructs(args.data)
        dataset = dataio.encode_dataset(constructs)
        X = np.asarray(dataset.bits, dtype=float)
        feats = project_features(X, embedding, backend,
                                 cache_dir=args.cache, n_jobs=args.jobs)
        spec = KernelSpec(args.kernel, _parse_gamma(args.gamma))
        rows = []
        print(f"N = {len(dataset)}, sqrt(N) = {len(dataset) ** 0.5:.3f}")
        print(f"{'lambda':>8}  {'g_cq':>8}  {'s_classical':>12}  "
              f"{'s_pqk':>8}  verdict")
        for lam in args.lambdas:
            out = screen_advantage(X, dataset.y, feats, spec, lam=lam)
            rows.append(out)
            print(f"{lam:>8.3g}  {out['g_cq']:>8.3f}  "
                  f"{out['s_classical']:>12.3f}  {out['s_pqk']:>8.3f}  "
                  f"{out['verdict']}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return 4
    if args.output:
        Path(args.output).write_text(
            json.dumps(rows, indent=2, sort_keys=True) + "\n",
            encoding="utf-8")
        print(f"wrote {len(rows)} rows to {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
