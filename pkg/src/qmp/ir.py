"""Gate-level circuit IR with registers and exact cost accounting.

The gate set is Clifford + Toffoli + measurement.  Measurements carry a
record id; classically controlled gates reference a record id.  Cost
accounting expands Toffoli/CSWAP/SWAP per a CostModel and reports
Clifford/T/Toffoli/measurement tallies with total = Clifford + Xi * T.

Conventions (fixed so closed-form and builder counts match exactly):
    - SWAP = 3 CNOTs; CSWAP = 1 Toffoli + 2 CNOTs.
    - Toffoli = 4 T gates + 11 Clifford gates (both configurable).
    - Measurements cost 0 gates; each classically controlled CZ/X/Z
      counts as 1 Clifford regardless of whether it fires.
    - MEASURE_X measures the X observable, records the outcome, and
      leaves the qubit in |0>.  MEASURE_Z records the Z outcome and
      leaves the qubit in the measured basis state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum


class GateKind(str, Enum):
    H = "H"
    X = "X"
    Z = "Z"
    S = "S"
    CNOT = "CNOT"
    CZ = "CZ"
    SWAP = "SWAP"
    CSWAP = "CSWAP"
    TOFFOLI = "TOFFOLI"
    MEASURE_X = "MEASURE_X"
    MEASURE_Z = "MEASURE_Z"
    CLASSICAL_CZ = "CLASSICAL_CZ"
    CLASSICAL_X = "CLASSICAL_X"


# Expected (n_controls, n_targets) per kind; None means "1 or 2 targets"
# (CLASSICAL_CZ with one target acts as a classically controlled Z).
_ARITY: dict[GateKind, tuple[int, int | None]] = {
    GateKind.H: (0, 1),
    GateKind.X: (0, 1),
    GateKind.Z: (0, 1),
    GateKind.S: (0, 1),
    GateKind.CNOT: (1, 1),
    GateKind.CZ: (0, 2),
    GateKind.SWAP: (0, 2),
    GateKind.CSWAP: (1, 2),
    GateKind.TOFFOLI: (2, 1),
    GateKind.MEASURE_X: (0, 1),
    GateKind.MEASURE_Z: (0, 1),
    GateKind.CLASSICAL_CZ: (0, None),
    GateKind.CLASSICAL_X: (0, 1),
}

_MEASUREMENTS = (GateKind.MEASURE_X, GateKind.MEASURE_Z)
_CLASSICAL = (GateKind.CLASSICAL_CZ, GateKind.CLASSICAL_X)

# Provenance tags: data-loading lookups vs everything else.
TAG_LOOKUP = "lookup"
TAG_FLOW = "flow"


@dataclass(frozen=True, slots=True)
class Gate:
    kind: GateKind
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    record: int | None = None  # produced by MEASURE_*
    condition: int | None = None  # consumed by CLASSICAL_*
    tag: str = TAG_FLOW

    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets


class RegisterRole(str, Enum):
    INPUT = "input"
    OUTPUT = "output"
    ANCILLA_CLEAN = "ancilla_clean"
    CONTROL = "control"
    JUNK = "junk"


@dataclass(frozen=True, slots=True)
class Register:
    name: str
    start: int
    size: int
    role: RegisterRole

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(range(self.start, self.start + self.size))


@dataclass(slots=True)
class Circuit:
    width: int
    registers: list[Register] = field(default_factory=list)
    gates: list[Gate] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def register(self, name: str) -> Register:
        for reg in self.registers:
            if reg.name == name:
                return reg
        raise KeyError(f"no register named {name!r}")


@dataclass(frozen=True, slots=True)
class CostModel:
    xi: float = 1.0
    toffoli_t_count: int = 4
    toffoli_clifford_overhead: int = 11
    cswap_toffolis: int = 1
    cswap_cnots: int = 2
    swap_cnots: int = 3
    counting_mode: str = "upper_bound"  # or "data_exact"

    def __post_init__(self):
        if not (self.xi >= 1 or math.isinf(self.xi)):
            raise ValueError("xi must be >= 1")
        for name in ("toffoli_t_count", "toffoli_clifford_overhead",
                     "cswap_toffolis", "cswap_cnots", "swap_cnots"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.counting_mode not in ("upper_bound", "data_exact"):
            raise ValueError("counting_mode must be upper_bound or data_exact")


@dataclass(frozen=True, slots=True)
class CostSummary:
    clifford_count: int = 0  # includes Toffoli expansion overhead
    t_count: int = 0  # includes Toffoli expansion T gates
    toffoli_count: int = 0
    measurement_count: int = 0
    qubit_count: int = 0

    def total(self, xi: float) -> float:
        if self.t_count == 0:
            return float(self.clifford_count)
        return self.clifford_count + xi * self.t_count

    def __add__(self, other: "CostSummary") -> "CostSummary":
        return CostSummary(
            clifford_count=self.clifford_count + other.clifford_count,
            t_count=self.t_count + other.t_count,
            toffoli_count=self.toffoli_count + other.toffoli_count,
            measurement_count=self.measurement_count + other.measurement_count,
            qubit_count=max(self.qubit_count, other.qubit_count),
        )

    def scaled(self, factor: int) -> "CostSummary":
        return CostSummary(
            clifford_count=self.clifford_count * factor,
            t_count=self.t_count * factor,
            toffoli_count=self.toffoli_count * factor,
            measurement_count=self.measurement_count * factor,
            qubit_count=self.qubit_count,
        )

    def as_dict(self) -> dict:
        return {
            "clifford_count": self.clifford_count,
            "t_count": self.t_count,
            "toffoli_count": self.toffoli_count,
            "measurement_count": self.measurement_count,
            "qubit_count": self.qubit_count,
        }


def raw_counts(kind: GateKind, model: CostModel) -> tuple[int, int, int]:
    """(clifford, toffoli, measurement) contribution of one gate pre-expansion."""
    if kind in (GateKind.H, GateKind.X, GateKind.Z, GateKind.S,
                GateKind.CNOT, GateKind.CZ):
        return (1, 0, 0)
    if kind == GateKind.SWAP:
        return (model.swap_cnots, 0, 0)
    if kind == GateKind.CSWAP:
        return (model.cswap_cnots, model.cswap_toffolis, 0)
    if kind == GateKind.TOFFOLI:
        return (0, 1, 0)
    if kind in _MEASUREMENTS:
        return (0, 0, 1)
    if kind in _CLASSICAL:
        return (1, 0, 0)
    raise ValueError(f"unknown gate kind {kind}")


class CountAccumulator:
    """Mutable tally used by count_costs and by counting-mode builders."""

    __slots__ = ("clifford", "toffoli", "measurement")

    def __init__(self):
        self.clifford = 0
        self.toffoli = 0
        self.measurement = 0

    def add_gate(self, kind: GateKind, model: CostModel, times: int = 1):
        cliff, toff, meas = raw_counts(kind, model)
        self.clifford += cliff * times
        self.toffoli += toff * times
        self.measurement += meas * times

    def add_summary(self, summary: CostSummary, model: CostModel, times: int = 1):
        # Invert the Toffoli expansion so summaries compose pre-expansion.
        raw_cliff = summary.clifford_count - summary.toffoli_count * model.toffoli_clifford_overhead
        self.clifford += raw_cliff * times
        self.toffoli += summary.toffoli_count * times
        self.measurement += summary.measurement_count * times

    def summary(self, model: CostModel, qubit_count: int) -> CostSummary:
        return CostSummary(
            clifford_count=self.clifford + self.toffoli * model.toffoli_clifford_overhead,
            t_count=self.toffoli * model.toffoli_t_count,
            toffoli_count=self.toffoli,
            measurement_count=self.measurement,
            qubit_count=qubit_count,
        )


def count_costs(circuit: Circuit, model: CostModel,
                tag: str | None = None) -> CostSummary:
    """Tally circuit costs under the model.

    With `tag` set, only gates carrying that provenance tag are counted
    (qubit_count still reports the full circuit width).
    """
    acc = CountAccumulator()
    for gate in circuit.gates:
        if tag is not None and gate.tag != tag:
            continue
        acc.add_gate(gate.kind, model)
    return acc.summary(model, circuit.width)


def validate(circuit: Circuit) -> list[str]:
    """Structural diagnostics; empty list means ok.  Never raises."""
    diags: list[str] = []
    seen_records: set[int] = set()
    covered: list[bool] = [False] * circuit.width
    for reg in circuit.registers:
        if reg.start < 0 or reg.start + reg.size > circuit.width:
            diags.append(f"register {reg.name!r} out of range")
            continue
        for q in reg.qubits:
            if covered[q]:
                diags.append(f"register {reg.name!r} overlaps at qubit {q}")
            covered[q] = True
    if circuit.registers and not all(covered):
        missing = [i for i, c in enumerate(covered) if not c]
        diags.append(f"qubits not covered by any register: {missing[:8]}")
    for idx, gate in enumerate(circuit.gates):
        exp_controls, exp_targets = _ARITY[gate.kind]
        if len(gate.controls) != exp_controls:
            diags.append(f"gate {idx} ({gate.kind.value}): bad control count")
        if exp_targets is not None and len(gate.targets) != exp_targets:
            diags.append(f"gate {idx} ({gate.kind.value}): bad target count")
        if gate.kind == GateKind.CLASSICAL_CZ and len(gate.targets) not in (1, 2):
            diags.append(f"gate {idx}: CLASSICAL_CZ takes 1 or 2 targets")
        qubits = gate.qubits()
        if len(set(qubits)) != len(qubits):
            diags.append(f"gate {idx} ({gate.kind.value}): repeated qubit")
        for q in qubits:
            if not (0 <= q < circuit.width):
                diags.append(f"gate {idx} ({gate.kind.value}): qubit {q} out of range")
        if gate.kind in _MEASUREMENTS:
            if gate.record is None:
                diags.append(f"gate {idx}: measurement without record id")
            elif gate.record in seen_records:
                diags.append(f"gate {idx}: duplicate record id {gate.record}")
            else:
                seen_records.add(gate.record)
        if gate.kind in _CLASSICAL:
            if gate.condition is None:
                diags.append(f"gate {idx}: classical gate without condition")
            elif gate.condition not in seen_records:
                diags.append(f"gate {idx}: dangling condition id {gate.condition}")
    return diags


def concat(a: Circuit, b: Circuit,
           register_map: dict[str, str] | None = None) -> Circuit:
    """Append b's gates after a's, mapping b's registers onto a's by name.

    Registers of b not present in the map get fresh qubits appended.
    Record ids of b are shifted past a's to stay unique.
    """
    register_map = register_map or {}
    qubit_map: dict[int, int] = {}
    new_width = a.width
    new_registers = list(a.registers)
    for reg in b.registers:
        if reg.name in register_map:
            target = a.register(register_map[reg.name])
            if target.size != reg.size:
                raise ValueError(
                    f"register size mismatch: {reg.name} ({reg.size}) -> "
                    f"{target.name} ({target.size})")
            for src, dst in zip(reg.qubits, target.qubits):
                qubit_map[src] = dst
        else:
            for i, src in enumerate(reg.qubits):
                qubit_map[src] = new_width + i
            new_registers.append(replace(reg, name=f"b.{reg.name}", start=new_width))
            new_width += reg.size
    # Qubits of b outside any register map positionally past a's width.
    for q in range(b.width):
        if q not in qubit_map:
            qubit_map[q] = new_width
            new_width += 1
    record_offset = 0
    for gate in a.gates:
        if gate.record is not None:
            record_offset = max(record_offset, gate.record + 1)
    gates = list(a.gates)
    for gate in b.gates:
        gates.append(replace(
            gate,
            targets=tuple(qubit_map[q] for q in gate.targets),
            controls=tuple(qubit_map[q] for q in gate.controls),
            record=None if gate.record is None else gate.record + record_offset,
            condition=None if gate.condition is None else gate.condition + record_offset,
        ))
    return Circuit(width=new_width, registers=new_registers, gates=gates,
                   metadata=dict(a.metadata))


# ---------------------------------------------------------------------------
# Line-oriented text serialization: header lines then one gate per line,
#   width <w>
#   register <name> <role> <start> <size>
#   KIND c1,c2;t1,t2[;rec=<id>][;cond=<id>][;tag=<tag>]


def to_text(circuit: Circuit) -> str:
    lines = [f"width {circuit.width}"]
    for reg in circuit.registers:
        lines.append(f"register {reg.name} {reg.role.value} {reg.start} {reg.size}")
    for gate in circuit.gates:
        controls = ",".join(str(q) for q in gate.controls)
        targets = ",".join(str(q) for q in gate.targets)
        parts = [f"{gate.kind.value} {controls};{targets}"]
        if gate.record is not None:
            parts.append(f"rec={gate.record}")
        if gate.condition is not None:
            parts.append(f"cond={gate.condition}")
        if gate.tag != TAG_FLOW:
            parts.append(f"tag={gate.tag}")
        lines.append(";".join(parts))
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Circuit:
    width = None
    registers: list[Register] = []
    gates: list[Gate] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("width "):
            width = int(line.split()[1])
            continue
        if line.startswith("register "):
            _, name, role, start, size = line.split()
            registers.append(Register(name, int(start), int(size), RegisterRole(role)))
            continue
        parts = line.split(";")
        head = parts[0].split(" ", 1)
        kind = GateKind(head[0])
        controls_str = head[1] if len(head) > 1 else ""
        targets_str = parts[1] if len(parts) > 1 else ""
        record = None
        condition = None
        tag = TAG_FLOW
        for extra in parts[2:]:
            key, _, value = extra.partition("=")
            if key == "rec":
                record = int(value)
            elif key == "cond":
                condition = int(value)
            elif key == "tag":
                tag = value
            else:
                raise ValueError(f"line {lineno}: unknown field {key!r}")
        controls = tuple(int(q) for q in controls_str.split(",") if q != "")
        targets = tuple(int(q) for q in targets_str.split(",") if q != "")
        gates.append(Gate(kind, targets, controls, record, condition, tag))
    if width is None:
        raise ValueError("missing width header")
    return Circuit(width=width, registers=registers, gates=gates)
