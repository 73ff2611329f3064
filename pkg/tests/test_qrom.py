"""Lookup builder tests: semantics, count mirror, closed-form counts."""

from __future__ import annotations

import math
import random

import pytest

from qmp import (CostModel, MeasurementPolicy, QroamParams,
                 build_plain_qrom, build_qroam_controlled,
                 build_qroam_modified, count_costs,
                 measurement_uncompute_cost, pack_register, qroam_cost,
                 qroam_width, random_table, run_auto, unpack_register,
                 validate)

UPPER = CostModel()
DATA_EXACT = CostModel(counting_mode="data_exact")


def _lam_values(n: int):
    lam = 1
    while lam <= 1 << (n - 1):
        yield lam
        lam *= 2


def _mirror_grid():
    for n in range(2, 13):
        for m in (1, 3, 8, 16):
            for lam in _lam_values(n):
                for controlled in (False, True):
                    yield n, m, lam, controlled


def test_mirror_grid_has_enough_points():
    assert sum(1 for _ in _mirror_grid()) >= 200


def test_cost_mirror_matches_builder_field_wise():
    for n, m, lam, controlled in _mirror_grid():
        f = random_table(n, m, seed=n * 100 + m)
        if controlled:
            circuit = (build_plain_qrom(f, controlled=True, model=UPPER)
                       if lam == 1
                       else build_qroam_controlled(f, lam, model=UPPER))
        else:
            circuit = (build_plain_qrom(f, model=UPPER) if lam == 1
                       else build_qroam_modified(f, lam, model=UPPER))
        params = QroamParams(n, m, lam, controlled=controlled)
        assert count_costs(circuit, UPPER) == qroam_cost(params, UPPER), \
            (n, m, lam, controlled)


def test_qroam_toffoli_count_closed_form():
    for n, m, lam, controlled in _mirror_grid():
        if lam == 1:
            continue
        params = QroamParams(n, m, lam, controlled=controlled)
        got = qroam_cost(params, UPPER).toffoli_count
        blocks = math.ceil((1 << n) / lam)
        expected = blocks + m * (lam - 1)
        assert got == expected, (n, m, lam, controlled)


def test_qroam_clean_ancilla_budget():
    for n, m, lam, _ in _mirror_grid():
        if lam == 1:
            continue
        params = QroamParams(n, m, lam)
        internal = qroam_width(params) - n - m - 1  # minus the anchor
        budget = (lam - 1) * m + (n - int(math.log2(lam)))
        assert internal <= budget, (n, m, lam)


def test_plain_qrom_toffoli_counts():
    for n in range(2, 10):
        assert qroam_cost(QroamParams(n, 1, 1), UPPER).toffoli_count \
            == (1 << n) - 1
        assert qroam_cost(QroamParams(n, 1, 1, controlled=True),
                          UPPER).toffoli_count == 1 << n


def test_pinned_reference_counts():
    pins = {
        (6, 4, 4, False): (692, 112, 28, 28, 27),
        (8, 8, 8, False): (3464, 352, 88, 88, 78),
        (6, 4, 1, False): (1140, 252, 63, 63, 17),
        (6, 4, 4, True): (690, 112, 28, 28, 27),
    }
    for (n, m, lam, ctl), expected in pins.items():
        got = qroam_cost(QroamParams(n, m, lam, controlled=ctl), UPPER)
        assert (got.clifford_count, got.t_count, got.toffoli_count,
                got.measurement_count, got.qubit_count) == expected


def test_measurement_uncompute_closed_form():
    for n in range(3, 12):
        for lam in _lam_values(n):
            got = measurement_uncompute_cost(n, lam, UPPER)
            blocks = (1 << n) // lam
            assert got.toffoli_count == blocks + lam
            assert got.clifford_count == \
                3 * blocks + (1 << n) + 3 * lam \
                + UPPER.toffoli_clifford_overhead * got.toffoli_count


def test_plain_qrom_semantics_exhaustive():
    for n, m in [(2, 1), (3, 2), (4, 3)]:
        f = random_table(n, m, seed=n + m)
        circuit = build_plain_qrom(f, model=DATA_EXACT)
        assert validate(circuit) == []
        addr = circuit.register("addr").qubits
        out = circuit.register("out").qubits
        for x in range(1 << n):
            rec = run_auto(circuit, pack_register(x, addr),
                           MeasurementPolicy.sampled(x))
            word = rec.basis_word()
            assert unpack_register(word, addr) == x
            assert unpack_register(word, out) == f(x)


def test_qroam_semantics_exhaustive_all_branches():
    rng = random.Random(2)
    for n, m, lam in [(3, 2, 2), (4, 2, 2), (4, 2, 4), (5, 1, 4)]:
        f = random_table(n, m, seed=rng.randrange(1 << 30))
        circuit = build_qroam_modified(f, lam, model=DATA_EXACT)
        assert validate(circuit) == []
        addr = (circuit.register("h").qubits
                + circuit.register("l").qubits)
        out = circuit.register("out").qubits
        mask = (pack_register((1 << n) - 1, addr)
                | pack_register((1 << m) - 1, out))
        for x in range(1 << n):
            rec = run_auto(circuit, pack_register(x, addr),
                           MeasurementPolicy.sampled(rng.randrange(1 << 30)))
            word = rec.basis_word()
            assert unpack_register(word, addr) == x
            assert unpack_register(word, out) == f(x)
            assert word & ~mask == 0  # ancilla restored to zero


def test_controlled_qroam_respects_control_bit():
    f = random_table(3, 2, seed=14)
    circuit = build_qroam_controlled(f, 2, model=DATA_EXACT)
    ctl = circuit.register("ctl").qubits
    addr = circuit.register("h").qubits + circuit.register("l").qubits
    out = circuit.register("out").qubits
    for x in range(8):
        for c in (0, 1):
            word = pack_register(x, addr) | pack_register(c, ctl)
            rec = run_auto(circuit, word, MeasurementPolicy.sampled(x))
            final = rec.basis_word()
            assert unpack_register(final, out) == (f(x) if c else 0)
            assert unpack_register(final, addr) == x
            assert unpack_register(final, ctl) == c


def test_controlled_qroam_adds_no_toffolis():
    for n, m, lam in [(4, 2, 2), (6, 4, 4), (8, 8, 8)]:
        plainc = qroam_cost(QroamParams(n, m, lam), UPPER)
        ctl = qroam_cost(QroamParams(n, m, lam, controlled=True), UPPER)
        assert ctl.toffoli_count == plainc.toffoli_count
        assert ctl.t_count == plainc.t_count


def test_lambda_must_be_power_of_two_and_bounded():
    f = random_table(4, 2, seed=0)
    with pytest.raises(ValueError):
        build_qroam_modified(f, 3, model=UPPER)
    with pytest.raises(ValueError):
        build_qroam_modified(f, 16, model=UPPER)
