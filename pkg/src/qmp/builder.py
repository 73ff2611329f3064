"""Circuit builder with qubit allocation, running in emit or count mode.

Both the materializing builders and the closed-form cost evaluator run
the same emitter functions through this interface; in count mode gates
become counter increments (grouped by provenance tag) and the allocator
still tracks peak width, so gate tallies and qubit counts mirror the
emitted circuits by construction.
"""

from __future__ import annotations

import heapq

from .ir import (Circuit, CostModel, CostSummary, CountAccumulator, Gate,
                 GateKind, Register, RegisterRole, TAG_FLOW, TAG_LOOKUP)


class Builder:
    def __init__(self, model: CostModel, counting: bool = False):
        self.model = model
        self.counting = counting
        self.gates: list[Gate] = []
        self.registers: list[Register] = []
        self._free: list[int] = []
        self._width = 0
        self._peak = 0
        self._records = 0
        self.tag = TAG_FLOW
        self.accs: dict[str, CountAccumulator] = {}

    # -- allocation ---------------------------------------------------

    def alloc(self, size: int) -> list[int]:
        qubits = []
        for _ in range(size):
            if self._free:
                qubits.append(heapq.heappop(self._free))
            else:
                qubits.append(self._width)
                self._width += 1
        self._peak = max(self._peak, self._width - len(self._free))
        return qubits

    def free(self, qubits: list[int]) -> None:
        for q in qubits:
            heapq.heappush(self._free, q)

    def add_register(self, name: str, size: int, role: RegisterRole) -> list[int]:
        qubits = self.alloc(size)
        start = qubits[0]
        if qubits != list(range(start, start + size)):
            raise AssertionError("register allocation not contiguous")
        self.registers.append(Register(name, start, size, role))
        return qubits

    @property
    def width(self) -> int:
        return self._width

    @property
    def peak(self) -> int:
        return self._peak

    # -- gate emission ------------------------------------------------

    def _acc(self) -> CountAccumulator:
        acc = self.accs.get(self.tag)
        if acc is None:
            acc = self.accs[self.tag] = CountAccumulator()
        return acc

    def _emit(self, kind: GateKind, targets: tuple[int, ...],
              controls: tuple[int, ...] = ()) -> None:
        if self.counting:
            self._acc().add_gate(kind, self.model)
        else:
            self.gates.append(Gate(kind, targets, controls, tag=self.tag))

    def h(self, q: int):
        self._emit(GateKind.H, (q,))

    def x(self, q: int):
        self._emit(GateKind.X, (q,))

    def cnot(self, c: int, t: int):
        self._emit(GateKind.CNOT, (t,), (c,))

    def swap(self, a: int, b: int):
        self._emit(GateKind.SWAP, (a, b))

    def cswap(self, c: int, a: int, b: int):
        self._emit(GateKind.CSWAP, (a, b), (c,))

    def toffoli(self, c1: int, c2: int, t: int):
        self._emit(GateKind.TOFFOLI, (t,), (c1, c2))

    def measure_x(self, q: int) -> int:
        rec = self._records
        self._records += 1
        if self.counting:
            self._acc().add_gate(GateKind.MEASURE_X, self.model)
        else:
            self.gates.append(Gate(GateKind.MEASURE_X, (q,), record=rec, tag=self.tag))
        return rec

    def classical_cz(self, rec: int, a: int, b: int):
        if self.counting:
            self._acc().add_gate(GateKind.CLASSICAL_CZ, self.model)
        else:
            self.gates.append(Gate(GateKind.CLASSICAL_CZ, (a, b),
                                   condition=rec, tag=self.tag))

    # -- composite helpers shared by the builders ----------------------

    def and_uncompute(self, parent_a: int, parent_b: int, flag: int):
        """Measurement-based uncompute of flag = parent_a AND parent_b."""
        rec = self.measure_x(flag)
        self.classical_cz(rec, parent_a, parent_b)

    def add_summary(self, summary: CostSummary, times: int = 1):
        """Count-mode shortcut: absorb a precomputed (expanded) summary."""
        assert self.counting
        self._acc().add_summary(summary, self.model, times)

    # -- results --------------------------------------------------------

    def finish(self, metadata: dict | None = None) -> Circuit:
        assert not self.counting
        # Cover any unregistered (scratch) qubits so registers partition.
        covered = set()
        for reg in self.registers:
            covered.update(reg.qubits)
        leftover = [q for q in range(self._width) if q not in covered]
        if leftover:
            start = leftover[0]
            if leftover != list(range(start, start + len(leftover))):
                raise AssertionError("scratch qubits not contiguous")
            self.registers.append(Register("scratch", start, len(leftover),
                                           RegisterRole.ANCILLA_CLEAN))
        return Circuit(width=self._width, registers=list(self.registers),
                       gates=self.gates, metadata=dict(metadata or {}))

    def summaries(self) -> dict[str, CostSummary]:
        assert self.counting
        return {tag: acc.summary(self.model, self._peak)
                for tag, acc in self.accs.items()}

    def total_summary(self) -> CostSummary:
        assert self.counting
        total = CountAccumulator()
        for acc in self.accs.values():
            total.clifford += acc.clifford
            total.toffoli += acc.toffoli
            total.measurement += acc.measurement
        return total.summary(self.model, self._peak)
