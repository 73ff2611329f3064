"""Gate IR, cost model, and text round-trip tests."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmp import (Circuit, CostModel, CostSummary, Gate, GateKind, Register,
                 RegisterRole, concat, count_costs, from_text, raw_counts,
                 to_text, validate)
from qmp.ir import CountAccumulator


def _toy_circuit() -> Circuit:
    regs = (Register("a", 0, 2, RegisterRole.INPUT),
            Register("b", 2, 1, RegisterRole.OUTPUT))
    gates = (
        Gate(GateKind.H, (0,)),
        Gate(GateKind.CNOT, (1,), controls=(0,)),
        Gate(GateKind.TOFFOLI, (2,), controls=(0, 1), tag="lookup"),
        Gate(GateKind.MEASURE_X, (0,), record=0),
        Gate(GateKind.CLASSICAL_CZ, (1, 2), condition=0),
    )
    return Circuit(width=3, registers=regs, gates=gates,
                   metadata={"kind": "toy"})


def test_toffoli_expansion_defaults():
    # raw_counts is pre-expansion: (clifford, toffoli, measurement).
    model = CostModel()
    assert raw_counts(GateKind.TOFFOLI, model) == (0, 1, 0)
    acc = CountAccumulator()
    acc.add_gate(GateKind.TOFFOLI, model)
    summary = acc.summary(model, qubit_count=3)
    assert (summary.clifford_count, summary.t_count,
            summary.toffoli_count) == (11, 4, 1)
    assert summary.total(1.0) == 15.0


def test_measurements_cost_no_gates():
    model = CostModel()
    for kind in (GateKind.MEASURE_X, GateKind.MEASURE_Z):
        assert raw_counts(kind, model) == (0, 0, 1)


def test_classical_corrections_are_single_cliffords():
    model = CostModel()
    for kind in (GateKind.CLASSICAL_CZ, GateKind.CLASSICAL_X):
        assert raw_counts(kind, model) == (1, 0, 0)


def test_swap_and_cswap_decompositions():
    model = CostModel()
    assert raw_counts(GateKind.SWAP, model) == (3, 0, 0)
    # CSWAP is 1 Toffoli plus 2 CNOTs pre-expansion.
    assert raw_counts(GateKind.CSWAP, model) == (2, 1, 0)


def test_total_is_clifford_only_when_no_t_gates():
    assert CostSummary(clifford_count=7).total(1e9) == 7.0
    assert CostSummary(clifford_count=3, t_count=2).total(10.0) == 23.0


def test_summary_add_and_scale():
    a = CostSummary(1, 2, 3, 4, 5)
    b = CostSummary(10, 20, 30, 40, 2)
    assert a + b == CostSummary(11, 22, 33, 44, 5)
    assert a.scaled(3) == CostSummary(3, 6, 9, 12, 5)


def test_count_costs_tag_filter():
    model = CostModel()
    circuit = _toy_circuit()
    total = count_costs(circuit, model)
    lookup = count_costs(circuit, model, tag="lookup")
    assert lookup.toffoli_count == 1
    assert total.toffoli_count == 1
    assert total.clifford_count > lookup.clifford_count
    assert total.measurement_count == 1


def test_text_round_trip():
    circuit = _toy_circuit()
    restored = from_text(to_text(circuit))
    assert restored.width == circuit.width
    assert tuple(restored.gates) == tuple(circuit.gates)
    assert [r.name for r in restored.registers] == ["a", "b"]


def test_validate_accepts_toy_circuit():
    assert validate(_toy_circuit()) == []


def test_validate_rejects_out_of_range_target():
    bad = Circuit(width=2, registers=(), gates=(Gate(GateKind.X, (5,)),),
                  metadata={})
    assert validate(bad)


def test_validate_rejects_control_target_overlap():
    bad = Circuit(width=2, registers=(),
                  gates=(Gate(GateKind.CNOT, (0,), controls=(0,)),),
                  metadata={})
    assert validate(bad)


def test_concat_appends_gates():
    a = _toy_circuit()
    joined = concat(a, a)
    assert len(joined.gates) == 2 * len(a.gates)
    assert validate(joined) == []


def test_cost_model_rejects_bad_counting_mode():
    with pytest.raises(ValueError):
        CostModel(counting_mode="exactish")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50),
       st.floats(0.0, 100.0))
def test_total_matches_linear_combination(cliffords, ts, toffolis, xi):
    summary = CostSummary(clifford_count=cliffords, t_count=ts,
                          toffoli_count=toffolis)
    if ts == 0:
        assert summary.total(xi) == float(cliffords)
    else:
        assert summary.total(xi) == cliffords + xi * ts


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 20), st.integers(1, 20))
def test_scaled_distributes_over_total(cliffords, factor):
    summary = CostSummary(clifford_count=cliffords, t_count=2,
                          toffoli_count=1)
    assert summary.scaled(factor).total(3.0) == \
        pytest.approx(factor * summary.total(3.0))
