"""Verification engines: statevector simulation and basis evaluation.

States are stored sparsely as {basis int: amplitude}; this is an exact
statevector representation that only pays for the occupied support, so
wide circuits whose states stay close to basis states (the QROM
builders on basis inputs) simulate quickly regardless of width.  Dense
amplitude vectors are available via `to_dense` up to a width cap.

Basis-int convention: bit q of the integer is the state of qubit q.
Register values map via pack_register/unpack_register with the
register's first qubit as the most significant bit.

Measurement handling:
    - MEASURE_Z records the Z outcome and collapses the qubit.
    - MEASURE_X applies H, records the Z outcome, and resets the qubit
      to |0> (measure-and-discard convention used by the builders).
    - Policies: sampled(seed), forced(record->bit), enumerate_all.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field

import numpy as np

from .ir import Circuit, Gate, GateKind

NORM_TOL = 1e-8
BRANCH_SUM_TOL = 1e-7
PRUNE_TOL = 1e-12
DENSE_WIDTH_LIMIT = 24

State = dict[int, complex]


@dataclass(frozen=True, slots=True)
class MeasurementPolicy:
    mode: str  # "sampled" | "forced" | "enumerate_all"
    seed: int | None = None
    forced: dict[int, int] | None = None  # record id -> outcome bit

    @staticmethod
    def sampled(seed: int) -> "MeasurementPolicy":
        return MeasurementPolicy("sampled", seed=seed)

    @staticmethod
    def force(outcomes: dict[int, int]) -> "MeasurementPolicy":
        return MeasurementPolicy("forced", forced=dict(outcomes))

    @staticmethod
    def enumerate_all() -> "MeasurementPolicy":
        return MeasurementPolicy("enumerate_all")


@dataclass(slots=True)
class RunRecord:
    state: State
    outcomes: dict[int, int] = field(default_factory=dict)
    probability: float = 1.0

    def basis_word(self) -> int:
        """The single occupied basis state; error if the state is not basis."""
        if len(self.state) != 1:
            raise ValueError(f"state has support {len(self.state)}, not a basis state")
        return next(iter(self.state))

    def amplitude(self, word: int) -> complex:
        return self.state.get(word, 0j)


def pack_register(value: int, qubits: tuple[int, ...] | list[int]) -> int:
    """Place a big-endian register value onto qubit id bit positions."""
    word = 0
    width = len(qubits)
    for i, q in enumerate(qubits):
        if (value >> (width - 1 - i)) & 1:
            word |= 1 << q
    return word


def unpack_register(word: int, qubits: tuple[int, ...] | list[int]) -> int:
    value = 0
    for q in qubits:
        value = (value << 1) | ((word >> q) & 1)
    return value


def _check_norm(state: State):
    norm = math.fsum(abs(a) * abs(a) for a in state.values())
    if abs(norm - 1.0) > NORM_TOL:
        raise AssertionError(f"norm drifted to {norm}")


def _apply_unitary(state: State, gate: Gate) -> State:
    kind = gate.kind
    if kind == GateKind.X:
        mask = 1 << gate.targets[0]
        return {k ^ mask: a for k, a in state.items()}
    if kind == GateKind.CNOT:
        cmask = 1 << gate.controls[0]
        tmask = 1 << gate.targets[0]
        return {(k ^ tmask if k & cmask else k): a for k, a in state.items()}
    if kind == GateKind.TOFFOLI:
        c1 = 1 << gate.controls[0]
        c2 = 1 << gate.controls[1]
        tmask = 1 << gate.targets[0]
        return {(k ^ tmask if (k & c1 and k & c2) else k): a for k, a in state.items()}
    if kind == GateKind.SWAP:
        a_mask = 1 << gate.targets[0]
        b_mask = 1 << gate.targets[1]
        both = a_mask | b_mask
        out: State = {}
        for k, amp in state.items():
            bits = k & both
            if bits == a_mask or bits == b_mask:
                k ^= both
            out[k] = amp
        return out
    if kind == GateKind.CSWAP:
        cmask = 1 << gate.controls[0]
        a_mask = 1 << gate.targets[0]
        b_mask = 1 << gate.targets[1]
        both = a_mask | b_mask
        out = {}
        for k, amp in state.items():
            if k & cmask:
                bits = k & both
                if bits == a_mask or bits == b_mask:
                    k ^= both
            out[k] = amp
        return out
    if kind == GateKind.H:
        mask = 1 << gate.targets[0]
        inv = 1 / math.sqrt(2)
        out = {}
        for k, amp in state.items():
            base = k & ~mask
            hi = base | mask
            if k & mask:
                out[base] = out.get(base, 0j) + amp * inv
                out[hi] = out.get(hi, 0j) - amp * inv
            else:
                out[base] = out.get(base, 0j) + amp * inv
                out[hi] = out.get(hi, 0j) + amp * inv
        return {k: a for k, a in out.items() if abs(a) > PRUNE_TOL}
    if kind == GateKind.Z:
        mask = 1 << gate.targets[0]
        return {k: (-a if k & mask else a) for k, a in state.items()}
    if kind == GateKind.S:
        mask = 1 << gate.targets[0]
        return {k: (a * 1j if k & mask else a) for k, a in state.items()}
    if kind == GateKind.CZ:
        a_mask = 1 << gate.targets[0]
        b_mask = 1 << gate.targets[1]
        both = a_mask | b_mask
        return {k: (-a if (k & both) == both else a) for k, a in state.items()}
    raise ValueError(f"not a unitary gate: {kind}")


def _apply_classical(state: State, gate: Gate, outcomes: dict[int, int]) -> State:
    if gate.condition not in outcomes:
        raise ValueError(f"classical gate references unknown record {gate.condition}")
    if outcomes[gate.condition] == 0:
        return state
    if gate.kind == GateKind.CLASSICAL_X:
        mask = 1 << gate.targets[0]
        return {k ^ mask: a for k, a in state.items()}
    if len(gate.targets) == 1:  # classically controlled Z
        mask = 1 << gate.targets[0]
        return {k: (-a if k & mask else a) for k, a in state.items()}
    both = (1 << gate.targets[0]) | (1 << gate.targets[1])
    return {k: (-a if (k & both) == both else a) for k, a in state.items()}


def _branch(state: State, qubit: int) -> tuple[float, State, State]:
    """(p1, state given 0, state given 1); branch states unnormalized."""
    mask = 1 << qubit
    zero: State = {}
    one: State = {}
    p1 = 0.0
    for k, amp in state.items():
        if k & mask:
            one[k] = amp
            p1 += abs(amp) * abs(amp)
        else:
            zero[k] = amp
    return p1, zero, one


def _renorm(state: State, prob: float) -> State:
    inv = 1 / math.sqrt(prob)
    return {k: a * inv for k, a in state.items()}


def run(circuit: Circuit, input_word: int | State,
        policy: MeasurementPolicy) -> RunRecord | list[RunRecord]:
    """Simulate; returns one RunRecord, or a branch list for enumerate_all."""
    if isinstance(input_word, dict):
        initial: State = dict(input_word)
    else:
        initial = {int(input_word): 1.0 + 0j}
    rng = random.Random(policy.seed) if policy.mode == "sampled" else None
    enumerate_mode = policy.mode == "enumerate_all"

    # Work items: (gate index, state, outcomes, probability)
    pending: list[tuple[int, State, dict[int, int], float]] = [(0, initial, {}, 1.0)]
    done: list[RunRecord] = []
    gates = circuit.gates
    while pending:
        idx, state, outcomes, prob = pending.pop()
        while idx < len(gates):
            gate = gates[idx]
            kind = gate.kind
            if kind in (GateKind.MEASURE_Z, GateKind.MEASURE_X):
                qubit = gate.targets[0]
                if kind == GateKind.MEASURE_X:
                    state = _apply_unitary(state, Gate(GateKind.H, (qubit,)))
                p1, zero, one = _branch(state, qubit)
                p0 = 1.0 - p1
                mask = 1 << qubit
                branches = []
                if p0 > PRUNE_TOL:
                    branches.append((0, _renorm(zero, p0), p0))
                if p1 > PRUNE_TOL:
                    state1 = _renorm(one, p1)
                    if kind == GateKind.MEASURE_X:  # reset to |0>
                        state1 = {k & ~mask: a for k, a in state1.items()}
                    branches.append((1, state1, p1))
                elif kind == GateKind.MEASURE_X and branches:
                    pass  # outcome 0 already leaves the qubit in |0>
                if policy.mode == "forced" and gate.record in (policy.forced or {}):
                    want = policy.forced[gate.record]
                    chosen = [b for b in branches if b[0] == want]
                    if not chosen:
                        raise ValueError(
                            f"forced outcome {want} for record {gate.record} "
                            "has zero amplitude")
                    branches = chosen
                    branches = [(branches[0][0], branches[0][1], 1.0)]
                elif policy.mode == "forced" or policy.mode == "sampled":
                    if rng is not None:
                        pick = 1 if rng.random() < p1 else 0
                        chosen = [b for b in branches if b[0] == pick] or branches
                    else:  # forced policy without a forced value: take likeliest
                        chosen = [max(branches, key=lambda b: b[2])]
                    branches = [(chosen[0][0], chosen[0][1], 1.0)]
                if enumerate_mode and len(branches) > 1:
                    # Defer the 1-branch; continue with the 0-branch.
                    out1, state1, p1b = branches[1]
                    pending.append((idx + 1, state1,
                                    {**outcomes, gate.record: out1}, prob * p1b))
                out0, state0, p0b = branches[0]
                outcomes = {**outcomes, gate.record: out0}
                if enumerate_mode:
                    prob *= p0b
                state = state0
            elif kind in (GateKind.CLASSICAL_CZ, GateKind.CLASSICAL_X):
                state = _apply_classical(state, gate, outcomes)
            else:
                state = _apply_unitary(state, gate)
                _check_norm(state)
            idx += 1
        done.append(RunRecord(state=state, outcomes=outcomes, probability=prob))
    if not enumerate_mode:
        assert len(done) == 1
        return done[0]
    done.sort(key=lambda r: tuple(sorted(r.outcomes.items())))
    total = math.fsum(r.probability for r in done)
    if abs(total - 1.0) > BRANCH_SUM_TOL:
        raise AssertionError(f"branch probabilities sum to {total}")
    return done


_PERMUTATION_KINDS = (GateKind.X, GateKind.CNOT, GateKind.SWAP,
                      GateKind.CSWAP, GateKind.TOFFOLI)


def run_basis(circuit: Circuit, input_word: int) -> int:
    """Exact bit-twiddling evaluation of a permutation-gate circuit."""
    word = int(input_word)
    for gate in circuit.gates:
        kind = gate.kind
        if kind == GateKind.X:
            word ^= 1 << gate.targets[0]
        elif kind == GateKind.CNOT:
            if word & (1 << gate.controls[0]):
                word ^= 1 << gate.targets[0]
        elif kind == GateKind.TOFFOLI:
            if word & (1 << gate.controls[0]) and word & (1 << gate.controls[1]):
                word ^= 1 << gate.targets[0]
        elif kind == GateKind.SWAP:
            a = 1 << gate.targets[0]
            b = 1 << gate.targets[1]
            bits = word & (a | b)
            if bits == a or bits == b:
                word ^= a | b
        elif kind == GateKind.CSWAP:
            if word & (1 << gate.controls[0]):
                a = 1 << gate.targets[0]
                b = 1 << gate.targets[1]
                bits = word & (a | b)
                if bits == a or bits == b:
                    word ^= a | b
        else:
            raise ValueError(f"run_basis cannot evaluate {kind}")
    return word


def to_dense(state: State, width: int,
             limit: int = DENSE_WIDTH_LIMIT) -> np.ndarray:
    if width > limit:
        raise ValueError(f"width {width} exceeds dense limit {limit}")
    vec = np.zeros(1 << width, dtype=np.complex128)
    for k, a in state.items():
        vec[k] = a
    return vec


def fidelity(state: State, other: State) -> float:
    overlap = 0j
    for k, a in state.items():
        b = other.get(k)
        if b is not None:
            overlap += a.conjugate() * b
    return abs(overlap) ** 2


# ---------------------------------------------------------------------------
# Clustered product-state fast path.
#
# On basis inputs the circuits built here keep the state a tensor
# product of small clusters: two-control gates fire from basis-state
# controls and the measurement-based uncomputations only entangle a
# qubit pair transiently between a CNOT and the following X
# measurement.  Tracking per-cluster statevectors therefore simulates
# wide circuits in time linear in the gate count, avoiding the
# exponential support of the |+>^k ancilla banks.


class EntangledError(Exception):
    """Raised when the clustered representation grows beyond its cap."""


MAX_CLUSTER_QUBITS = 12

_SQ = 1 / math.sqrt(2)
_MAT_1Q = {
    GateKind.H: np.array([[_SQ, _SQ], [_SQ, -_SQ]], dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
}


def _perm_matrix(size: int, pairs: list[tuple[int, int]]) -> np.ndarray:
    mat = np.eye(size, dtype=complex)
    for a, b in pairs:
        mat[[a, b]] = mat[[b, a]]
    return mat


# Joint matrices indexed over (controls + targets), first qubit = MSB.
_MAT_NQ = {
    GateKind.CNOT: _perm_matrix(4, [(2, 3)]),
    GateKind.CZ: np.diag([1, 1, 1, -1]).astype(complex),
    GateKind.SWAP: _perm_matrix(4, [(1, 2)]),
    GateKind.CSWAP: _perm_matrix(8, [(5, 6)]),
    GateKind.TOFFOLI: _perm_matrix(8, [(6, 7)]),
}

_FACTOR_TOL = 1e-9


class _Cluster:
    __slots__ = ("qubits", "tensor")

    def __init__(self, qubits: list[int], tensor: np.ndarray):
        self.qubits = qubits  # axis order of the tensor
        self.tensor = tensor  # shape (2,) * len(qubits)


class _ClusterState:
    def __init__(self, width: int, input_word: int):
        self.by_qubit: dict[int, _Cluster] = {}
        for q in range(width):
            bit = (input_word >> q) & 1
            vec = np.array([1 - bit, bit], dtype=complex)
            self.by_qubit[q] = _Cluster([q], vec)

    def _merged(self, wires: tuple[int, ...]) -> _Cluster:
        clusters: list[_Cluster] = []
        for w in wires:
            c = self.by_qubit[w]
            if c not in clusters:
                clusters.append(c)
        merged = clusters[0]
        for other in clusters[1:]:
            tensor = np.multiply.outer(merged.tensor, other.tensor)
            merged = _Cluster(merged.qubits + other.qubits, tensor)
        if len(merged.qubits) > MAX_CLUSTER_QUBITS:
            raise EntangledError(
                f"cluster grew past {MAX_CLUSTER_QUBITS} qubits")
        for q in merged.qubits:
            self.by_qubit[q] = merged
        return merged

    def _try_split(self, cluster: _Cluster) -> None:
        # Peel off any qubit whose axis factors out (Schmidt rank 1).
        changed = True
        while changed and len(cluster.qubits) > 1:
            changed = False
            for axis, q in enumerate(cluster.qubits):
                mat = np.moveaxis(cluster.tensor, axis, 0).reshape(2, -1)
                u, s, vh = np.linalg.svd(mat, full_matrices=False)
                if s[1] > _FACTOR_TOL:
                    continue
                self.by_qubit[q] = _Cluster([q], u[:, 0] * np.sqrt(s[0]))
                rest_qubits = cluster.qubits[:axis] + cluster.qubits[axis + 1:]
                rest = (vh[0, :] * np.sqrt(s[0])).reshape((2,) * len(rest_qubits))
                cluster = _Cluster(rest_qubits, rest)
                for qq in rest_qubits:
                    self.by_qubit[qq] = cluster
                changed = True
                break

    def apply_1q(self, mat: np.ndarray, q: int) -> None:
        cluster = self.by_qubit[q]
        axis = cluster.qubits.index(q)
        cluster.tensor = np.moveaxis(
            np.tensordot(mat, cluster.tensor, axes=([1], [axis])), 0, axis)

    def apply_nq(self, mat: np.ndarray, wires: tuple[int, ...]) -> None:
        cluster = self._merged(wires)
        k = len(wires)
        axes = [cluster.qubits.index(w) for w in wires]
        tensor = np.moveaxis(cluster.tensor, axes, range(k))
        shape = tensor.shape
        flat = tensor.reshape(1 << k, -1)
        flat = mat @ flat
        cluster.tensor = np.moveaxis(flat.reshape(shape), range(k), axes)
        self._try_split(cluster)

    def prob_one(self, q: int) -> float:
        cluster = self.by_qubit[q]
        axis = cluster.qubits.index(q)
        sliced = np.moveaxis(cluster.tensor, axis, 0)[1]
        return float(np.sum(np.abs(sliced) ** 2))

    def collapse(self, q: int, outcome: int, prob: float) -> None:
        cluster = self.by_qubit[q]
        axis = cluster.qubits.index(q)
        tensor = np.moveaxis(cluster.tensor, axis, 0).copy()
        tensor[1 - outcome] = 0
        cluster.tensor = np.moveaxis(tensor, 0, axis) / math.sqrt(prob)
        self._try_split(cluster)

    def reset_zero(self, q: int) -> None:
        # Only valid immediately after collapsing q; keeps any phase.
        cluster = self.by_qubit[q]
        axis = cluster.qubits.index(q)
        tensor = np.moveaxis(cluster.tensor, axis, 0)
        merged = tensor[0] + tensor[1]
        stacked = np.stack([merged, np.zeros_like(merged)])
        cluster.tensor = np.moveaxis(stacked, 0, axis)
        self._try_split(cluster)

    def to_sparse(self, cap: int = 1 << 20) -> State:
        state: State = {0: 1.0 + 0j}
        seen: list[_Cluster] = []
        for cluster in self.by_qubit.values():
            if cluster in seen:
                continue
            seen.append(cluster)
            addition: State = {}
            flat = cluster.tensor.reshape(-1)
            for idx, amp in enumerate(flat):
                if abs(amp) <= PRUNE_TOL:
                    continue
                word = 0
                for pos, q in enumerate(cluster.qubits):
                    if (idx >> (len(cluster.qubits) - 1 - pos)) & 1:
                        word |= 1 << q
                for key, base in state.items():
                    addition[key | word] = base * amp
                    if len(addition) > cap:
                        raise EntangledError("final support too large to expand")
            state = addition
        return state


def run_product(circuit: Circuit, input_word: int,
                policy: MeasurementPolicy) -> RunRecord:
    """Simulate with the clustered product representation.

    Raises EntangledError if a cluster outgrows the cap; enumerate_all
    is not supported here (use `run`).
    """
    if policy.mode == "enumerate_all":
        raise ValueError("run_product does not enumerate branches")
    rng = random.Random(policy.seed) if policy.mode == "sampled" else None
    cs = _ClusterState(circuit.width, input_word)
    outcomes: dict[int, int] = {}
    probability = 1.0

    for gate in circuit.gates:
        kind = gate.kind
        if kind in (GateKind.MEASURE_Z, GateKind.MEASURE_X):
            q = gate.targets[0]
            if kind == GateKind.MEASURE_X:
                cs.apply_1q(_MAT_1Q[GateKind.H], q)
            p1 = cs.prob_one(q)
            if policy.mode == "forced" and gate.record in (policy.forced or {}):
                pick = policy.forced[gate.record]
                if (p1 if pick else 1 - p1) < PRUNE_TOL:
                    raise ValueError(
                        f"forced outcome {pick} for record {gate.record} "
                        "has zero amplitude")
            elif rng is not None:
                pick = 1 if rng.random() < p1 else 0
            else:  # forced policy without a forced value: take likeliest
                pick = 1 if p1 > 0.5 else 0
            p_pick = p1 if pick else 1 - p1
            probability *= p_pick
            cs.collapse(q, pick, p_pick)
            if kind == GateKind.MEASURE_X:
                cs.reset_zero(q)
            outcomes[gate.record] = pick
        elif kind in (GateKind.CLASSICAL_CZ, GateKind.CLASSICAL_X):
            if outcomes.get(gate.condition, 0):
                if kind == GateKind.CLASSICAL_X:
                    cs.apply_1q(_MAT_1Q[GateKind.X], gate.targets[0])
                elif len(gate.targets) == 1:
                    cs.apply_1q(_MAT_1Q[GateKind.Z], gate.targets[0])
                else:
                    cs.apply_nq(_MAT_NQ[GateKind.CZ], gate.targets)
        elif kind in _MAT_1Q:
            cs.apply_1q(_MAT_1Q[kind], gate.targets[0])
        else:
            cs.apply_nq(_MAT_NQ[kind], gate.controls + gate.targets)

    return RunRecord(state=cs.to_sparse(), outcomes=outcomes,
                     probability=probability)


def run_auto(circuit: Circuit, input_word: int,
             policy: MeasurementPolicy) -> RunRecord | list[RunRecord]:
    """run_product when possible, falling back to the sparse engine."""
    if policy.mode != "enumerate_all":
        try:
            return run_product(circuit, input_word, policy)
        except EntangledError:
            pass
    return run(circuit, input_word, policy)
