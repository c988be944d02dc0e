"""Gate-level circuit representation and the two data-embedding builders.

The gate alphabet is deliberately small (H, RX, RY, RZ, CX); both embeddings
and every simulation backend speak exactly this set. Entangling blocks are
emitted in even/odd brickwork order so blocks on disjoint qubit pairs stack
in parallel layers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError

ROTATION_KINDS = ("RX", "RY", "RZ")
GATE_KINDS = ("H", "CX") + ROTATION_KINDS


@dataclass(frozen=True)
class Gate:
    """One gate: kind, qubit operands (control first for CX), rotation angle."""

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ConfigError(f"unknown gate kind {self.kind!r}")
        want = 2 if self.kind == "CX" else 1
        if len(self.qubits) != want or any(
                not isinstance(q, int) or q < 0 for q in self.qubits):
            raise ConfigError(f"{self.kind} needs {want} qubit operand(s)")
        if self.kind == "CX" and self.qubits[0] == self.qubits[1]:
            raise ConfigError("CX control and target must differ")
        if self.kind in ROTATION_KINDS:
            if self.angle is None or not math.isfinite(self.angle):
                raise ConfigError(f"{self.kind} needs a finite angle")
        elif self.angle is not None:
            raise ConfigError(f"{self.kind} takes no angle")


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ConfigError("circuit needs at least one qubit")
        for g in self.gates:
            if max(g.qubits) >= self.n_qubits:
                raise ConfigError(
                    f"gate {g.kind} on {g.qubits} exceeds {self.n_qubits} qubits")


@dataclass(frozen=True)
class CircuitStats:
    total_gates: int
    two_qubit_gates: int
    two_qubit_depth: int


def circuit_stats(circuit: Circuit) -> CircuitStats:
    """Gate counts plus greedy ASAP two-qubit depth (CX layers only)."""
    depth = [0] * circuit.n_qubits
    n_two = 0
    for g in circuit.gates:
        if g.kind == "CX":
            n_two += 1
            layer = max(depth[g.qubits[0]], depth[g.qubits[1]]) + 1
            depth[g.qubits[0]] = depth[g.qubits[1]] = layer
    return CircuitStats(len(circuit.gates), n_two, max(depth, default=0))


def _chain_pairs(n: int) -> list[tuple[int, int]]:
    # even-index pairs first, then odd: disjoint pairs share a depth layer
    return ([(j, j + 1) for j in range(0, n - 1, 2)]
            + [(j, j + 1) for j in range(1, n - 1, 2)])


def _check_features(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0 or not np.isfinite(x).all():
        raise DataError("feature vector must be 1-D, nonempty, finite")
    return x


def build_zz_feature_map(x, reps: int, scale: float,
                         entanglement: str = "linear") -> Circuit:
    """ZZ feature map: per rep, H on all, RZ(2*scale*x_j) on all, then a
    CX-RZ-CX block per qubit pair with angle 2*scale^2*x_j*x_k.

    ``entanglement`` picks the pair set: ``linear`` couples the chain
    (j, j+1), ``full`` couples every pair j < k.
    """
    x = _check_features(x)
    n = x.size
    if not (isinstance(reps, int) and reps >= 1):
        raise ConfigError("reps must be an integer >= 1")
    if not (math.isfinite(scale) and scale > 0):
        raise ConfigError("scale must be positive and finite")
    if entanglement == "linear":
        pairs = _chain_pairs(n)
    elif entanglement == "full":
        pairs = [(j, k) for j in range(n) for k in range(j + 1, n)]
    else:
        raise ConfigError(f"unknown entanglement {entanglement!r}")
    gates = []
    for _ in range(reps):
        gates.extend(Gate("H", (q,)) for q in range(n))
        gates.extend(Gate("RZ", (q,), float(2.0 * scale * x[q]))
                     for q in range(n))
        for a, b in pairs:
            gates.append(Gate("CX", (a, b)))
            gates.append(Gate("RZ", (b,),
                              float(2.0 * scale * scale * x[a] * x[b])))
            gates.append(Gate("CX", (a, b)))
    meta = {"embedding": "e1", "reps": reps, "scale": scale,
            "entanglement": entanglement}
    return Circuit(n, tuple(gates), meta)


def build_heisenberg_embedding(x, steps: int, scale: float,
                               seed: int) -> Circuit:
    """Trotterized 1-D Heisenberg evolution on a chain of len(x)+1 qubits.

    A seeded random RY layer prepares the initial state; each Trotter step
    applies RXX, RYY, RZZ blocks per chain edge with angle
    scale * x_edge / steps, edges in brickwork order.
    """
    x = _check_features(x)
    n = x.size + 1
    if not (isinstance(steps, int) and steps >= 1):
        raise ConfigError("steps must be an integer >= 1")
    if not (math.isfinite(scale) and scale > 0):
        raise ConfigError("scale must be positive and finite")
    if not isinstance(seed, int):
        raise ConfigError("seed must be an integer")
    rng = np.random.default_rng(seed)
    thetas = rng.uniform(0.0, 2.0 * math.pi, n)
    gates = [Gate("RY", (q,), float(thetas[q])) for q in range(n)]
    half = math.pi / 2
    for _ in range(steps):
        for a, b in _chain_pairs(n):
            angle = float(scale * x[a] / steps)
            # RXX
            gates += [Gate("H", (a,)), Gate("H", (b,)), Gate("CX", (a, b)),
                      Gate("RZ", (b,), angle), Gate("CX", (a, b)),
                      Gate("H", (a,)), Gate("H", (b,))]
            # RYY
            gates += [Gate("RX", (a,), half), Gate("RX", (b,), half),
                      Gate("CX", (a, b)), Gate("RZ", (b,), angle),
                      Gate("CX", (a, b)),
                      Gate("RX", (a,), -half), Gate("RX", (b,), -half)]
            # RZZ
            gates += [Gate("CX", (a, b)), Gate("RZ", (b,), angle),
                      Gate("CX", (a, b))]
    meta = {"embedding": "e2", "steps": steps, "scale": scale, "seed": seed}
    return Circuit(n, tuple(gates), meta)


def to_text(circuit: Circuit) -> str:
    """Serialize to the line format ``KIND q0 [q1] [angle]`` with a header."""
    lines = [f"qubits={circuit.n_qubits} "
             f"meta={json.dumps(circuit.meta, sort_keys=True)}"]
    for g in circuit.gates:
        parts = [g.kind, *map(str, g.qubits)]
        if g.angle is not None:
            parts.append(repr(float(g.angle)))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Circuit:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("qubits="):
        raise DataError("circuit text must start with a qubits= header")
    head, _, meta_part = lines[0].partition(" meta=")
    try:
        n = int(head.split("=", 1)[1])
        meta = json.loads(meta_part) if meta_part else {}
    except (ValueError, json.JSONDecodeError) as exc:
        raise DataError(f"bad circuit header: {exc}") from None
    gates = []
    for ln in lines[1:]:
        parts = ln.split()
        kind = parts[0]
        try:
            if kind == "CX":
                gates.append(Gate(kind, (int(parts[1]), int(parts[2]))))
            elif kind == "H":
                gates.append(Gate(kind, (int(parts[1]),)))
            elif kind in ROTATION_KINDS:
                gates.append(Gate(kind, (int(parts[1]),), float(parts[2])))
            else:
                raise DataError(f"unknown gate line {ln!r}")
        except (IndexError, ValueError):
            raise DataError(f"bad gate line {ln!r}") from None
    return Circuit(n, tuple(gates), meta)
