"""Resource-state protocol tests: shifts, consumption, serial queries."""

from __future__ import annotations

import random

import pytest

from qmp import (BitString, CostModel, MeasurementPolicy, QromResourceState,
                 amortized_cost, classify_shift, consume, correct,
                 pack_register, prepare_batch, random_table, run_auto,
                 serial_query, unpack_register, worst_correction_cost)

UPPER = CostModel()


def test_classify_shift_cases():
    assert classify_shift(BitString(4, 0b0000)).case == 1
    assert classify_shift(BitString(4, 0b1000)).case == 2
    assert classify_shift(BitString(4, 0b1010)).case == 3
    sc = classify_shift(BitString(4, 0b0010))
    assert sc.case == 4
    # Relabeling moves the first set bit to the front.
    assert sc.b_eff.bit(0) == 1


def test_ideal_state_is_uniform_over_pairs():
    f = random_table(3, 2, seed=1)
    state = QromResourceState.ideal(f)
    assert len(state.state) == 8
    for y in range(8):
        word = (pack_register(y, state.addr_qubits)
                | pack_register(f(y), state.out_qubits))
        assert state.state[word] == pytest.approx(8 ** -0.5)


def test_consume_enumerates_uniform_branches():
    f = random_table(3, 1, seed=2)
    state = QromResourceState.ideal(f)
    outcomes = consume(state, 5, MeasurementPolicy.enumerate_all())
    assert len(outcomes) == 8
    assert sorted(o.b.value for o in outcomes) == list(range(8))
    for o in outcomes:
        assert o.probability == pytest.approx(1 / 8)


def test_consume_keeps_shifted_branch():
    f = random_table(3, 2, seed=3)
    state = QromResourceState.ideal(f)
    x = 6
    for o in consume(state, x, MeasurementPolicy.enumerate_all()):
        y = x ^ o.b.value
        word = next(iter(o.state))
        assert unpack_register(word, state.addr_qubits) == x
        assert unpack_register(word, state.out_qubits) == f(y)


def test_correction_circuit_fixes_every_branch():
    # upper_bound mode emits counting proxies for the data layer, so
    # semantic checks need an exact model.
    exact = CostModel(counting_mode="data_exact")
    rng = random.Random(4)
    for n, m in [(2, 1), (3, 2), (4, 1)]:
        f = random_table(n, m, seed=rng.randrange(1 << 30))
        for b in range(1, 1 << n):
            circuit = correct(f, BitString(n, b), model=exact)
            inp = circuit.register("input").qubits
            out = circuit.register("output").qubits
            for x in range(1 << n):
                word = (pack_register(x, inp)
                        | pack_register(f(x ^ b), out))
                rec = run_auto(circuit, word,
                               MeasurementPolicy.sampled(x))
                final = rec.basis_word()
                assert unpack_register(final, inp) == x
                assert unpack_register(final, out) == f(x), (n, b, x)


def test_serial_query_exhaustive():
    rng = random.Random(5)
    for n in (1, 2, 3, 4):
        for m in (1, 2):
            f = random_table(n, m, seed=rng.randrange(1 << 30))
            state = QromResourceState.ideal(f)
            for x in range(1 << n):
                for b in range(1 << n):
                    res = serial_query(state, x, forced_b=b)
                    assert res.output == f(x), (n, m, x, b)
                    assert res.input_value == x


def test_serial_query_sampled_branch():
    f = random_table(4, 2, seed=6)
    state = QromResourceState.ideal(f)
    for x in range(16):
        res = serial_query(state, x, seed=x)
        assert res.output == f(x)


def test_prepare_batch_materializes_ideal_states():
    f = random_table(3, 2, seed=7)
    states, cost = prepare_batch(f, 2)
    assert len(states) == 2
    ideal = QromResourceState.ideal(f)
    for s in states:
        assert s.state.keys() == ideal.state.keys()
    assert cost.t_count > 0


def test_prepare_batch_requires_power_of_two():
    f = random_table(3, 1, seed=8)
    with pytest.raises(ValueError):
        prepare_batch(f, 3)


def test_amortized_ratio_decreases_with_batch_size():
    # Lookup sizes where batching wins; amortized_cost is cost-only, so
    # wide tables stay cheap.
    f = random_table(16, 40, seed=9)
    ratios = [amortized_cost(f, c, 1.0, UPPER).ratio
              for c in (1, 16, 256)]
    assert all(a > b for a, b in zip(ratios, ratios[1:]))
    assert ratios[0] > 1.0  # a single amortised query cannot win


def test_worst_correction_is_cheaper_than_full_lookup():
    from qmp import QroamParams, optimize_qrom
    for n, m in [(8, 4), (12, 8)]:
        correction = worst_correction_cost(n, m, 1.0, UPPER)
        _, full = optimize_qrom(n, m, 1.0, UPPER)
        assert correction.total(1.0) < full.total(1.0)
