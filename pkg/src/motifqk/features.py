"""Projected-feature extraction: embed each sample, read out every 1-RDM.

For an n-qubit embedding the feature row is (X_0, Y_0, Z_0, X_1, ...): all
3n single-qubit Pauli expectations of the embedded state. Backends: dense
statevector (exact or with binomial shot noise) for small n, operator
backpropagation for chain embeddings at any width up to 64 qubits.

Truncated backpropagation estimates each expectation with bounded error,
which can leave a per-qubit triple slightly outside the unit Bloch ball;
such triples are projected radially back onto the ball, which never moves
an estimate away from the true reduced state.
"""

from __future__ import annotations

import csv
import hashlib
import logging
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BackendError, ConfigError, DataError
from . import statevector as sv
from .circuits import Circuit
from .circuits import build_heisenberg_embedding, build_zz_feature_map
from .pauliprop import ObservableSum, PauliString, backpropagate_observable, \
    obp_expectation

logger = logging.getLogger(__name__)

BASES = ("X", "Y", "Z")
PRODUCTION_REPS = (4, 6, 8, 12)
PRODUCTION_STEPS = (4, 6)
PRODUCTION_SCALES = (math.pi, math.pi / 2)
BLOCH_TOL = 1e-9


@dataclass(frozen=True)
class EmbeddingConfig:
    """Which embedding to build and with what parameters.

    Production settings are enforced unless ``test_mode`` is set: E1 repetitions
    in {4, 6, 8, 12}, E2 Trotter steps in {4, 6}, scale pi or pi/2, linear
    chain entanglement. ``test_mode`` additionally allows ``reps=0``, the
    identity embedding (features are the fixed |0> Bloch vectors).
    """

    kind: str
    reps: int = 0
    steps: int = 0
    scale: float = math.pi / 2
    seed: int = 0
    entanglement: str = "linear"
    test_mode: bool = False

    def __post_init__(self):
        if self.kind not in ("e1", "e2"):
            raise ConfigError(f"embedding kind must be e1 or e2, got {self.kind!r}")
        if self.kind == "e1":
            if self.reps < 0 or (self.reps == 0 and not self.test_mode):
                raise ConfigError("e1 needs reps >= 1")
            if not self.test_mode and self.reps not in PRODUCTION_REPS:
                raise ConfigError(
                    f"e1 reps must be one of {PRODUCTION_REPS} (or set test_mode)")
        else:
            if self.steps < 1:
                raise ConfigError("e2 needs steps >= 1")
            if not self.test_mode and self.steps not in PRODUCTION_STEPS:
                raise ConfigError(
                    f"e2 steps must be one of {PRODUCTION_STEPS} (or set test_mode)")
        if not self.test_mode and self.scale not in PRODUCTION_SCALES:
            raise ConfigError("scale must be pi or pi/2 (or set test_mode)")
        if not self.test_mode and self.entanglement != "linear":
            raise ConfigError("only linear entanglement outside test_mode")

    def n_qubits(self, n_features: int) -> int:
        return n_features if self.kind == "e1" else n_features + 1

    def build(self, x) -> Circuit:
        if self.kind == "e1":
            if self.reps == 0:
                return Circuit(len(x), (), {"embedding": "identity"})
            return build_zz_feature_map(x, self.reps, self.scale,
                                        self.entanglement)
        return build_heisenberg_embedding(x, self.steps, self.scale, self.seed)

    def descriptor(self) -> str:
        if self.kind == "e1":
            return (f"e1:reps={self.reps}:scale={self.scale!r}"
                    f":ent={self.entanglement}")
        return f"e2:steps={self.steps}:scale={self.scale!r}:seed={self.seed}"


@dataclass(frozen=True)
class BackendConfig:
    """Readout backend: ``exact``, ``shots:<n>``, or ``obp:<threshold>``."""

    kind: str
    shots: int = 0
    seed: int = 0
    threshold: float = 0.0
    qubit_cap: int = sv.DEFAULT_QUBIT_CAP

    def __post_init__(self):
        if self.kind not in ("exact", "shots", "obp"):
            raise ConfigError(f"unknown backend kind {self.kind!r}")
        if self.kind == "shots" and self.shots < 1:
            raise ConfigError("shots backend needs shots >= 1")
        if self.kind == "obp":
            if not (math.isfinite(self.threshold) and self.threshold >= 0):
                raise ConfigError("obp threshold must be finite and >= 0")
            if self.shots < 0:
                raise ConfigError("obp shot emulation needs shots >= 0")

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> "BackendConfig":
        parts = text.split(":")
        try:
            if parts[0] == "exact" and len(parts) == 1:
                return cls("exact")
            if parts[0] == "shots" and len(parts) == 2:
                return cls("shots", shots=int(parts[1]), seed=seed)
            if parts[0] == "obp" and len(parts) == 2:
                return cls("obp", threshold=float(parts[1]))
        except ValueError:
            pass
        raise ConfigError(
            f"backend must be exact, shots:<n>, or obp:<threshold>, got {text!r}")

    def descriptor(self) -> str:
        if self.kind == "exact":
            return "exact"
        if self.kind == "shots":
            return f"shots:{self.shots}:seed={self.seed}"
        desc = f"obp:{self.threshold!r}"
        if self.shots:
            desc += f":shots={self.shots}:seed={self.seed}"
        return desc


def feature_names(n_qubits: int) -> list[str]:
    return [f"q{q}_{b}" for q in range(n_qubits) for b in BASES]


def _shot_seed(master: int, bits_key: str, qubit: int, basis: str) -> int:
    digest = hashlib.sha256(
        f"{master}|{bits_key}|{qubit}|{basis}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _binomial_estimate(value: float, shots: int, seed: int) -> float:
    p_up = min(max((1.0 + value) / 2.0, 0.0), 1.0)
    ups = int(np.random.default_rng(seed).binomial(shots, p_up))
    return (2 * ups - shots) / shots


def _check_bits(bits) -> np.ndarray:
    X = np.asarray(bits)
    if X.ndim != 2 or X.size == 0:
        raise DataError("expected a nonempty 2-D bit matrix")
    if not np.isin(X, (0, 1)).all():
        raise DataError("bit matrix entries must be 0/1")
    return X.astype(np.float64)


def _sample_features(row: np.ndarray, embedding: EmbeddingConfig,
                     backend: BackendConfig) -> np.ndarray:
    bits_key = "".join(str(int(b)) for b in row)
    circuit = embedding.build(row)
    n = circuit.n_qubits
    out = np.empty(3 * n, dtype=np.float64)
    if backend.kind in ("exact", "shots"):
        psi = sv.simulate(circuit, qubit_cap=backend.qubit_cap)
        for q in range(n):
            for k, b in enumerate(BASES):
                val = sv.pauli_expectation(psi, q, b)
                if backend.kind == "shots":
                    val = _binomial_estimate(
                        val, backend.shots,
                        _shot_seed(backend.seed, bits_key, q, b))
                out[3 * q + k] = val
    else:
        for q in range(n):
            for k, b in enumerate(BASES):
                obs = ObservableSum({PauliString.single(q, b): 1.0})
                back = backpropagate_observable(circuit, obs,
                                                backend.threshold)
                val = obp_expectation(back)
                if backend.shots:
                    val = _binomial_estimate(
                        val, backend.shots,
                        _shot_seed(backend.seed, bits_key, q, b))
                out[3 * q + k] = val
        if not backend.shots:
            # truncation can push a triple off the Bloch ball; the true
            # value lies inside, so radial projection only shrinks error
            vecs = out.reshape(n, 3)
            radii = np.sqrt((vecs ** 2).sum(axis=1))
            off_ball = radii > 1.0
            if off_ball.any():
                vecs[off_ball] /= radii[off_ball, None]
    exact_readout = backend.kind == "exact" or (
        backend.kind == "obp" and backend.threshold == 0 and not backend.shots)
    if exact_readout:
        norms = out.reshape(n, 3) ** 2
        assert norms.sum(axis=1).max() <= 1.0 + BLOCH_TOL, \
            "single-qubit Bloch bound violated"
    return out


def _cache_path(cache_dir: Path, bits_key: str, embedding: EmbeddingConfig,
                backend: BackendConfig) -> Path:
    key = hashlib.sha256(
        f"{bits_key}|{embedding.descriptor()}|{backend.descriptor()}"
        .encode()).hexdigest()
    return cache_dir / key[:2] / f"{key}.npy"


def _worker(args):
    row, embedding, backend = args
    return _sample_features(row, embedding, backend)


def project_features(bits, embedding: EmbeddingConfig,
                     backend: BackendConfig, cache_dir=None,
                     n_jobs: int = 1) -> np.ndarray:
    """Feature matrix of shape (N, 3 * n_qubits) for a bit matrix.

    With ``cache_dir`` set, per-sample rows are memoized on disk keyed by
    the sample bits plus embedding and backend descriptors; cache writes
    are atomic so concurrent runs can share a directory.
    """
    X = _check_bits(bits)
    n = embedding.n_qubits(X.shape[1])
    if backend.kind in ("exact", "shots") and n > backend.qubit_cap:
        raise BackendError(
            f"{backend.kind} backend capped at {backend.qubit_cap} qubits "
            f"but the embedding needs {n}; use obp:<threshold>")
    width = 3 * n
    out = np.empty((X.shape[0], width), dtype=np.float64)
    todo = []
    paths = {}
    for i, row in enumerate(X):
        if cache_dir is not None:
            bits_key = "".join(str(int(b)) for b in row)
            path = _cache_path(Path(cache_dir), bits_key, embedding, backend)
            paths[i] = path
            if path.exists():
                cached = np.load(path)
                if cached.shape != (width,):
                    raise DataError(f"corrupt feature cache entry {path}")
                out[i] = cached
                continue
        todo.append(i)
    if todo and n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            rows = pool.map(_worker,
                            [(X[i], embedding, backend) for i in todo],
                            chunksize=8)
            for i, row_out in zip(todo, rows):
                out[i] = row_out
    else:
        for i in todo:
            out[i] = _sample_features(X[i], embedding, backend)
    if cache_dir is not None:
        for i in todo:
            path = paths[i]
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
            try:
                with os.fdopen(fd, "wb") as fh:
                    np.save(fh, out[i])
                os.replace(tmp, path)
            finally:
                if os.path.exists(tmp):
                    os.unlink(tmp)
        logger.info("features: %d computed, %d from cache",
                    len(todo), X.shape[0] - len(todo))
    return out


def write_feature_csv(path, features: np.ndarray, labels=None) -> None:
    """Write a feature matrix (optionally with a trailing label column)."""
    F = np.asarray(features, dtype=np.float64)
    if F.ndim != 2 or F.shape[1] % 3:
        raise DataError("feature matrix must be 2-D with width 3 * n_qubits")
    header = feature_names(F.shape[1] // 3)
    if labels is not None:
        labels = np.asarray(labels)
        if labels.shape != (F.shape[0],):
            raise DataError("labels length must match feature rows")
        header = header + ["label"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i, row in enumerate(F):
            cells = [f"{v:.17g}" for v in row]
            if labels is not None:
                cells.append(str(int(labels[i])))
            writer.writerow(cells)


def load_feature_csv(path):
    """Read a feature CSV; returns (features, labels-or-None)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: empty feature file")
        has_label = header and header[-1] == "label"
        cols = header[:-1] if has_label else header
        if cols != feature_names(len(cols) // 3) or len(cols) % 3:
            raise DataError(f"{path}: malformed feature header")
        feats, labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: wrong column count")
            try:
                feats.append([float(v) for v in row[:len(cols)]])
                if has_label:
                    labels.append(int(row[-1]))
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
    if not feats:
        raise DataError(f"{path}: no feature rows")
    F = np.array(feats, dtype=np.float64)
    if not np.isfinite(F).all():
        raise DataError(f"{path}: non-finite feature values")
    y = np.array(labels, dtype=np.int64) if has_label else None
    return F, y
