"""Simulator tests: sparse runner, clustered product runner, packing."""

from __future__ import annotations

import math
import random

import pytest

from qmp import (Circuit, CostModel, FunctionTable, Gate, GateKind,
                 MeasurementPolicy, build_plain_qrom, fidelity,
                 pack_register, random_table, run, run_auto, run_basis,
                 run_product, unpack_register)

DATA_EXACT = CostModel(counting_mode="data_exact")


def test_pack_unpack_big_endian():
    qubits = (3, 5, 7)
    word = pack_register(0b101, qubits)
    assert word == (1 << 3) | (1 << 7)
    assert unpack_register(word, qubits) == 0b101


def test_pack_unpack_round_trip():
    qubits = (0, 2, 4, 6)
    for value in range(16):
        assert unpack_register(pack_register(value, qubits), qubits) == value


def _ghz_circuit() -> Circuit:
    gates = (Gate(GateKind.H, (0,)),
             Gate(GateKind.CNOT, (1,), controls=(0,)),
             Gate(GateKind.CNOT, (2,), controls=(0,)))
    return Circuit(width=3, registers=(), gates=gates, metadata={})


def test_run_superposition_amplitudes():
    rec = run(_ghz_circuit(), 0, MeasurementPolicy.sampled(0))
    amp = 1 / math.sqrt(2)
    assert rec.amplitude(0b000) == pytest.approx(amp)
    assert rec.amplitude(0b111) == pytest.approx(amp)
    assert rec.probability == pytest.approx(1.0)


def test_run_basis_matches_run_on_permutation_circuit():
    gates = (Gate(GateKind.X, (0,)),
             Gate(GateKind.CNOT, (2,), controls=(0,)),
             Gate(GateKind.TOFFOLI, (1,), controls=(0, 2)),
             Gate(GateKind.SWAP, (1, 2)))
    circuit = Circuit(width=3, registers=(), gates=gates, metadata={})
    for word in range(8):
        fast = run_basis(circuit, word)
        full = run(circuit, word, MeasurementPolicy.sampled(0)).basis_word()
        assert fast == full


def test_measurement_branches_cover_unit_probability():
    gates = (Gate(GateKind.H, (0,)),
             Gate(GateKind.MEASURE_Z, (0,), record=0))
    circuit = Circuit(width=1, registers=(), gates=gates, metadata={})
    total = 0.0
    seen = set()
    for rec in run(circuit, 0, MeasurementPolicy.enumerate_all()):
        total += rec.probability
        seen.add(rec.outcomes[0])
    assert total == pytest.approx(1.0)
    assert seen == {0, 1}


def test_forced_outcome_selects_branch():
    gates = (Gate(GateKind.H, (0,)),
             Gate(GateKind.MEASURE_Z, (0,), record=0))
    circuit = Circuit(width=1, registers=(), gates=gates, metadata={})
    # Forced and sampled runs renormalise and report probability 1;
    # only enumerate_all carries branch weights.
    for forced in (0, 1):
        rec = run(circuit, 0, MeasurementPolicy.force({0: forced}))
        assert rec.outcomes[0] == forced
        assert rec.probability == pytest.approx(1.0)


def test_sampled_policy_is_seed_deterministic():
    f = random_table(3, 2, seed=4)
    circuit = build_plain_qrom(f, model=DATA_EXACT)
    addr = circuit.register("addr").qubits
    a = run_auto(circuit, pack_register(5, addr),
                 MeasurementPolicy.sampled(42))
    b = run_auto(circuit, pack_register(5, addr),
                 MeasurementPolicy.sampled(42))
    assert a.outcomes == b.outcomes
    assert a.basis_word() == b.basis_word()


def test_product_runner_matches_sparse_runner():
    rng = random.Random(6)
    f = random_table(4, 2, seed=8)
    circuit = build_plain_qrom(f, model=DATA_EXACT)
    addr = circuit.register("addr").qubits
    out = circuit.register("out").qubits
    for _ in range(10):
        x = rng.randrange(16)
        seed = rng.randrange(1 << 30)
        sparse = run(circuit, pack_register(x, addr),
                     MeasurementPolicy.sampled(seed))
        product = run_product(circuit, pack_register(x, addr),
                              MeasurementPolicy.sampled(seed))
        for rec in (sparse, product):
            word = rec.basis_word()
            assert unpack_register(word, addr) == x
            assert unpack_register(word, out) == f(x)


def test_fidelity_of_identical_and_orthogonal_states():
    plus = {0: 1 / math.sqrt(2), 1: 1 / math.sqrt(2)}
    minus = {0: 1 / math.sqrt(2), 1: -1 / math.sqrt(2)}
    assert fidelity(plus, plus) == pytest.approx(1.0)
    assert fidelity(plus, minus) == pytest.approx(0.0, abs=1e-12)


def test_run_auto_handles_wide_product_circuits():
    # 30 qubits is past the dense-width limit; the clustered runner
    # must take over without changing results.
    f = FunctionTable(2, 1, [0, 1, 1, 0])
    base = build_plain_qrom(f, model=DATA_EXACT)
    shifted = Circuit(
        width=base.width + 26, registers=base.registers,
        gates=base.gates, metadata=base.metadata)
    addr = base.register("addr").qubits
    out = base.register("out").qubits
    for x in range(4):
        rec = run_auto(shifted, pack_register(x, addr),
                       MeasurementPolicy.sampled(1))
        assert unpack_register(rec.basis_word(), out) == f(x)
