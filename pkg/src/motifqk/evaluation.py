"""Evaluation protocol: shared splits, dual-arm experiments, significance.

One experiment compares two arms on identical train/test splits and
identical CV folds: a kernel SVM on the raw one-hot bits ("original") and
the same machinery on projected quantum-kernel features ("pqk"). Per-motif
accuracy counts feed an exact Fisher test so per-position annotation
effects can be called at a chosen significance level.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import math
from dataclasses import dataclass, field
from math import comb
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError
from .data import (ANNOTATION_AXES, EncodedDataset, annotate_category,
                   correlation_order, decode_one_hot)
from .features import BackendConfig, EmbeddingConfig, project_features
from .kernels import KernelSpec, geometric_difference, kernel_matrix, \
    model_complexity
from .svm import GridConfig, grid_search, predict, smo_train, weighted_f1

METHODS = ("original", "pqk")


@dataclass(frozen=True)
class SplitPlan:
    """Reusable train/test index plan; both experiment arms consume it."""

    n_samples: int
    train_frac: float
    seed: int
    splits: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]

    def to_dict(self) -> dict:
        return {"n_samples": self.n_samples, "train_frac": self.train_frac,
                "seed": self.seed,
                "splits": [{"train": list(tr), "test": list(te)}
                           for tr, te in self.splits]}


def make_splits(n_samples: int, n_splits: int = 10, train_frac: float = 0.7,
                seed: int = 0) -> SplitPlan:
    """Seeded random splits; indices are sorted within each side."""
    if n_samples < 2:
        raise ConfigError("need at least 2 samples to split")
    if not (0.0 < train_frac < 1.0):
        raise ConfigError("train_frac must be in (0, 1)")
    if n_splits < 1:
        raise ConfigError("n_splits must be >= 1")
    n_train = math.floor(train_frac * n_samples)
    if n_train < 1 or n_train >= n_samples:
        raise ConfigError("train_frac leaves an empty side")
    rng = np.random.default_rng(seed)
    splits = []
    for _ in range(n_splits):
        perm = rng.permutation(n_samples)
        tr = tuple(int(i) for i in np.sort(perm[:n_train]))
        te = tuple(int(i) for i in np.sort(perm[n_train:]))
        splits.append((tr, te))
    return SplitPlan(n_samples, train_frac, seed, tuple(splits))


def fisher_exact(table) -> float:
    """Two-sided Fisher exact p for a 2x2 table, in exact integer arithmetic.

    Sums hypergeometric point probabilities no larger than the observed
    one (with a relative slack of 1e-12 to absorb ties).
    """
    try:
        (a, b), (c, d) = table
    except (TypeError, ValueError):
        raise DataError("fisher_exact expects a 2x2 table") from None
    cells = [a, b, c, d]
    if any(not isinstance(v, (int, np.integer)) or v < 0 for v in cells):
        raise DataError("fisher_exact needs nonnegative integer counts")
    a, b, c, d = (int(v) for v in cells)
    r1, r2, c1 = a + b, c + d, a + c
    n = r1 + r2
    if n == 0:
        return 1.0
    lo, hi = max(0, c1 - r2), min(r1, c1)
    weights = {k: comb(r1, k) * comb(r2, c1 - k) for k in range(lo, hi + 1)}
    observed = weights[a]
    slack = 10 ** 12
    num = sum(w for w in weights.values()
              if w * slack <= observed * (slack + 1))
    return num / comb(n, c1)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a dual-arm run needs beyond the dataset itself."""

    embedding: EmbeddingConfig
    backend: BackendConfig
    n_splits: int = 10
    train_frac: float = 0.7
    split_seed: int = 0
    cv_folds: int = 10
    cv_seed: int = 0
    feature_order: str = "natural"
    grid: GridConfig = field(default_factory=GridConfig)
    smo_tol: float = 1e-3
    smo_max_passes: int = 200
    lam: float = 1.0
    screening_kernel: KernelSpec = KernelSpec("rbf", "scale")
    cache_dir: str | None = None
    n_jobs: int = 1

    def __post_init__(self):
        if self.feature_order not in ("natural", "correlation"):
            raise ConfigError(
                f"feature_order must be natural or correlation, "
                f"got {self.feature_order!r}")
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise ConfigError("lam must be finite and >= 0")

    def provenance(self) -> dict:
        return {
            "embedding": self.embedding.descriptor(),
            "backend": self.backend.descriptor(),
            "n_splits": self.n_splits,
            "train_frac": self.train_frac,
            "split_seed": self.split_seed,
            "cv_folds": self.cv_folds,
            "cv_seed": self.cv_seed,
            "feature_order": self.feature_order,
            "grid": {"kernels": list(self.grid.kernels),
                     "n_c": len(self.grid.c_values),
                     "n_gamma": len(self.grid.gamma_values),
                     "degree": self.grid.degree,
                     "coef0": self.grid.coef0},
            "smo_tol": self.smo_tol,
            "smo_max_passes": self.smo_max_passes,
            "lam": self.lam,
        }


@dataclass
class EvalReport:
    """JSON-ready experiment record: F1 per split, counts, Fisher p-values."""

    config: dict
    config_hash: str
    n_samples: int
    split_sizes: list
    f1: dict
    median_f1: dict
    max_f1: dict
    chosen: dict
    counts: dict
    fisher: dict

    def to_dict(self) -> dict:
        return {"config": self.config, "config_hash": self.config_hash,
                "n_samples": self.n_samples, "split_sizes": self.split_sizes,
                "f1": self.f1, "median_f1": self.median_f1,
                "max_f1": self.max_f1, "chosen": self.chosen,
                "counts": self.counts, "fisher": self.fisher}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())


def _config_hash(config: ExperimentConfig) -> str:
    text = json.dumps(config.provenance(), sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def fisher_from_counts(counts: dict) -> dict:
    """Per-(axis, position, value) Fisher p comparing the two methods'
    correct/incorrect counts, plus which method looked better."""
    out: dict = {}
    for axis, positions in counts.items():
        out[axis] = {}
        for pos, values in positions.items():
            out[axis][pos] = {}
            for value, per_method in values.items():
                cp, ip = per_method["pqk"]
                co, io = per_method["original"]
                p = fisher_exact(((cp, ip), (co, io)))
                acc_p = cp / (cp + ip) if cp + ip else 0.0
                acc_o = co / (co + io) if co + io else 0.0
                better = ("pqk" if acc_p > acc_o
                          else "original" if acc_o > acc_p else "tie")
                out[axis][pos][value] = {"p_value": p, "better": better}
    return out


def per_motif_analysis(report: EvalReport, alpha: float = 0.01) -> list[dict]:
    """Flat significance table from a report, sorted for stable output."""
    if not (0.0 < alpha < 1.0):
        raise ConfigError("alpha must be in (0, 1)")
    rows = []
    for axis in sorted(report.fisher):
        for pos in sorted(report.fisher[axis], key=int):
            for value in sorted(report.fisher[axis][pos]):
                cell = report.fisher[axis][pos][value]
                rows.append({"axis": axis, "position": int(pos),
                             "value": value, "p_value": cell["p_value"],
                             "better": cell["better"],
                             "significant": cell["p_value"] < alpha})
    return rows


def screen_advantage(bits, y, pqk_features, spec: KernelSpec,
                     lam: float = 1.0) -> dict:
    """Geometry screening: can a classical kernel on the raw bits mimic the
    quantum-projected one, and do the labels look hard for it?

    The two Gram matrices use the same kernel spec, one on the raw bits and
    one on the projected features. g near sqrt(N) with a large classical
    complexity but small quantum complexity is the interesting regime.
    """
    Xc = np.asarray(bits, dtype=np.float64)
    Fq = np.asarray(pqk_features, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if Xc.shape[0] != Fq.shape[0] or y.shape != (Xc.shape[0],):
        raise DataError("bits, features, and labels must align")
    Kc = kernel_matrix(Xc, spec)
    Kq = kernel_matrix(Fq, spec)
    g = geometric_difference(Kc, Kq, lam)
    s_c = model_complexity(Kc, y, lam)
    s_q = model_complexity(Kq, y, lam)
    root_n = math.sqrt(Xc.shape[0])
    geometry_separated = g >= 0.5 * root_n
    complexity_gap = s_c >= 0.5 * root_n and s_q <= 0.5 * s_c
    if not geometry_separated:
        verdict = ("no separation: a classical kernel can match the "
                   "projected quantum geometry")
    elif complexity_gap:
        verdict = "potential for the projected quantum kernel to outperform"
    else:
        verdict = ("geometries differ but the labels look easy for both "
                   "kernels")
    return {"n": int(Xc.shape[0]), "lam": float(lam),
            "kernel": {"kind": spec.kind, "gamma": spec.gamma,
                       "degree": spec.degree, "coef0": spec.coef0},
            "g_cq": float(g), "sqrt_n": root_n,
            "s_classical": float(s_c), "s_pqk": float(s_q),
            "geometry_separated": bool(geometry_separated),
            "complexity_gap": bool(complexity_gap), "verdict": verdict}


def _accumulate(counts: dict, categories: list[tuple[str, ...]],
                test_idx, ok_flags: np.ndarray, method: str) -> None:
    for local, sample_idx in enumerate(test_idx):
        cats = categories[sample_idx]
        ok = bool(ok_flags[local])
        for pos, category in enumerate(cats):
            for axis in ANNOTATION_AXES:
                value = annotate_category(category, axis)
                cell = counts.setdefault(axis, {}) \
                             .setdefault(str(pos), {}) \
                             .setdefault(value, {m: [0, 0] for m in METHODS})
                cell[method][0 if ok else 1] += 1


def _run_arm(X, y, tr, te, config: ExperimentConfig):
    gs = grid_search(X[list(tr)], y[list(tr)], config.grid,
                     folds=config.cv_folds, seed=config.cv_seed,
                     tol=config.smo_tol, max_passes=config.smo_max_passes)
    spec, C = gs.best_model_inputs()
    model = smo_train(X[list(tr)], y[list(tr)], spec, C, tol=config.smo_tol,
                      max_passes=config.smo_max_passes)
    preds = predict(model, X[list(te)])
    kind, c_val, g_val = gs.best
    chosen = {"kernel": kind, "C": c_val,
              "gamma": g_val if isinstance(g_val, str) else float(g_val),
              "mean_cv_f1": float(gs.means[gs.best_index]),
              "folds": gs.folds}
    return preds, chosen


def run_experiment(dataset: EncodedDataset,
                   config: ExperimentConfig) -> EvalReport:
    """Run both arms over every split and assemble the full report."""
    X_bits = dataset.bits.astype(np.float64)
    y = dataset.y
    N = len(dataset)
    if len(np.unique(y)) < 2:
        raise DataError("experiment needs both labels present")
    plan = make_splits(N, config.n_splits, config.train_frac,
                       config.split_seed)
    categories = [decode_one_hot(s.bits, dataset.layout)
                  for s in dataset.samples]
    natural_features = None
    if config.feature_order == "natural":
        natural_features = project_features(
            dataset.bits, config.embedding, config.backend,
            cache_dir=config.cache_dir, n_jobs=config.n_jobs)
    f1 = {m: [] for m in METHODS}
    chosen = {m: [] for m in METHODS}
    counts: dict = {}
    split_sizes = []
    for tr, te in plan.splits:
        split_sizes.append([len(tr), len(te)])
        y_te = y[list(te)]
        preds_o, chose_o = _run_arm(X_bits, y, tr, te, config)
        f1["original"].append(weighted_f1(y_te, preds_o))
        chosen["original"].append(chose_o)
        _accumulate(counts, categories, te, preds_o == y_te, "original")
        if config.feature_order == "correlation":
            order = correlation_order(dataset.bits[list(tr)])
            F = project_features(dataset.bits[:, order], config.embedding,
                                 config.backend, cache_dir=config.cache_dir,
                                 n_jobs=config.n_jobs)
        else:
            F = natural_features
        preds_q, chose_q = _run_arm(F, y, tr, te, config)
        f1["pqk"].append(weighted_f1(y_te, preds_q))
        chosen["pqk"].append(chose_q)
        _accumulate(counts, categories, te, preds_q == y_te, "pqk")
    report = EvalReport(
        config=config.provenance(),
        config_hash=_config_hash(config),
        n_samples=N,
        split_sizes=split_sizes,
        f1={m: [float(v) for v in f1[m]] for m in METHODS},
        median_f1={m: float(np.median(f1[m])) for m in METHODS},
        max_f1={m: float(max(f1[m])) for m in METHODS},
        chosen=chosen,
        counts=counts,
        fisher=fisher_from_counts(counts),
    )
    return report


def _parse_scale(text: str) -> float:
    if text == "pi":
        return math.pi
    if text == "pi2":
        return math.pi / 2
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"scale must be pi, pi2, or a float, got {text!r}") \
            from None


def _require(section, key: str, where: str) -> str:
    if key not in section:
        raise ConfigError(f"config is missing {where}.{key}")
    return section[key]


def _parse_grid(section) -> GridConfig:
    preset = section.get("preset", "full")
    if preset == "full" and "kernels" not in section:
        return GridConfig()
    kernels = tuple(k.strip() for k in
                    _require(section, "kernels", "grid").split(","))
    c_values = tuple(float(v) for v in
                     _require(section, "c_values", "grid").split(","))
    gammas = []
    for tok in _require(section, "gamma_values", "grid").split(","):
        tok = tok.strip()
        gammas.append(tok if tok in ("scale", "auto") else float(tok))
    return GridConfig(kernels, c_values, tuple(gammas),
                      degree=section.getint("degree", 3),
                      coef0=section.getfloat("coef0", 0.0))


def config_from_ini(path) -> tuple[str, ExperimentConfig]:
    """Parse the flat sectioned config format used by the report command.

    Seeds are mandatory wherever randomness is consumed: split_seed and
    cv_seed always, the embedding seed for e2, the backend seed for shots.
    """
    cp = configparser.ConfigParser()
    if not Path(path).exists():
        raise ConfigError(f"config file {path} does not exist")
    cp.read(path)
    for sec in ("dataset", "embedding", "backend", "protocol"):
        if sec not in cp:
            raise ConfigError(f"config is missing the [{sec}] section")
    dataset_path = _require(cp["dataset"], "path", "dataset")
    emb_sec = cp["embedding"]
    kind = _require(emb_sec, "kind", "embedding")
    test_mode = emb_sec.getboolean("test_mode", False)
    scale = _parse_scale(emb_sec.get("scale", "pi2"))
    if kind == "e1":
        embedding = EmbeddingConfig(
            "e1", reps=int(_require(emb_sec, "reps", "embedding")),
            scale=scale, entanglement=emb_sec.get("entanglement", "linear"),
            test_mode=test_mode)
    elif kind == "e2":
        embedding = EmbeddingConfig(
            "e2", steps=int(_require(emb_sec, "steps", "embedding")),
            scale=scale, seed=int(_require(emb_sec, "seed", "embedding")),
            test_mode=test_mode)
    else:
        raise ConfigError(f"embedding kind must be e1 or e2, got {kind!r}")
    backend_text = _require(cp["backend"], "backend", "backend")
    if backend_text.startswith("shots"):
        backend = BackendConfig.parse(
            backend_text, seed=int(_require(cp["backend"], "seed", "backend")))
    else:
        backend = BackendConfig.parse(backend_text)
    proto = cp["protocol"]
    screening = cp["screening"] if "screening" in cp else {}
    grid = _parse_grid(cp["grid"]) if "grid" in cp else GridConfig()
    gamma_tok = screening.get("gamma", "scale") if screening else "scale"
    screening_gamma = gamma_tok if gamma_tok in ("scale", "auto") \
        else float(gamma_tok)
    config = ExperimentConfig(
        embedding=embedding,
        backend=backend,
        n_splits=proto.getint("n_splits", 10),
        train_frac=proto.getfloat("train_frac", 0.7),
        split_seed=int(_require(proto, "split_seed", "protocol")),
        cv_folds=proto.getint("cv_folds", 10),
        cv_seed=int(_require(proto, "cv_seed", "protocol")),
        feature_order=proto.get("feature_order", "natural"),
        grid=grid,
        smo_tol=proto.getfloat("smo_tol", 1e-3),
        smo_max_passes=proto.getint("smo_max_passes", 200),
        lam=float(screening.get("lam", 1.0)) if screening else 1.0,
        screening_kernel=KernelSpec(
            screening.get("kernel", "rbf") if screening else "rbf",
            screening_gamma),
        cache_dir=cp["cache"].get("dir") if "cache" in cp else None,
        n_jobs=cp["cache"].getint("n_jobs", 1) if "cache" in cp else 1,
    )
    return dataset_path, config
