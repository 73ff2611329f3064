"""Batched-lookup cell tests: semantics, routing, count mirror."""

from __future__ import annotations

import random

import pytest

from qmp import (CostModel, MassProductionPlan, MeasurementPolicy,
                 build_advance, build_mass_production, build_two_copy,
                 cost_only, count_costs, pack_register, plan_width,
                 random_table, routing_states, run_auto, unpack_register,
                 validate)
from qmp.massprod import _advance_summary, _cell_flow_summary

UPPER = CostModel()
DATA_EXACT = CostModel(counting_mode="data_exact")


def _check_copies(circuit, f, plan, xs, seed):
    word = 0
    for i, x in enumerate(xs):
        word |= pack_register(x, circuit.register(f"addr{i}").qubits)
    rec = run_auto(circuit, word, MeasurementPolicy.sampled(seed))
    final = rec.basis_word()
    for i, x in enumerate(xs):
        assert unpack_register(final, circuit.register(f"addr{i}").qubits) \
            == x
        assert unpack_register(final, circuit.register(f"out{i}").qubits) \
            == f(x)


def test_plan_validation():
    with pytest.raises(ValueError):
        MassProductionPlan(4, 1, 2, (2, 2), 1)  # schedule sums to n
    with pytest.raises(ValueError):
        MassProductionPlan(4, 1, 1, (1, 1), 1)  # t != len(schedule)
    plan = MassProductionPlan(6, 2, 2, (1, 2), 2)
    assert plan.copies == 4
    assert plan.leaf_bits == 3


def test_two_copy_semantics_exhaustive():
    rng = random.Random(3)
    for n, m, k, lam in [(3, 1, 1, 1), (3, 2, 2, 1), (4, 1, 1, 2),
                         (4, 2, 2, 2)]:
        f = random_table(n, m, seed=rng.randrange(1 << 30))
        circuit = build_two_copy(f, k, lam, model=DATA_EXACT)
        assert validate(circuit) == []
        for x in range(1 << n):
            for y in range(1 << n):
                plan = MassProductionPlan(n, m, 1, (k,), lam)
                _check_copies(circuit, f, plan, [x, y],
                              rng.randrange(1 << 30))


def test_four_copy_semantics_sampled():
    rng = random.Random(5)
    for n, m, ks, lam in [(4, 1, (1, 1), 2), (5, 2, (1, 2), 2)]:
        f = random_table(n, m, seed=rng.randrange(1 << 30))
        plan = MassProductionPlan(n, m, 2, ks, lam)
        circuit = build_mass_production(f, plan, DATA_EXACT)
        assert validate(circuit) == []
        for _ in range(25):
            xs = [rng.randrange(1 << n) for _ in range(4)]
            _check_copies(circuit, f, plan, xs, rng.randrange(1 << 30))


def test_routing_invariant_all_rounds():
    # Between advances, the two local addresses differ and the cell's
    # invariant relating them to the round index holds.
    for k in (1, 2, 3):
        for x_l in range(1 << k):
            for y_l in range(x_l, 1 << k):
                states = routing_states(x_l, y_l, k)
                assert len(states) == (1 << k) + 1
                for state in states:
                    assert state.invariant_holds(x_l, y_l)


def test_advance_circuit_validates():
    for k in (1, 2, 3):
        for ell in range(1 << k):
            circuit = build_advance(ell, k, 2, 2, UPPER)
            assert validate(circuit) == []


def test_advance_count_depends_only_on_zero_bits():
    # The binomial scaling in the flow mirror relies on this.
    for k in (2, 3, 4):
        for n_p, m in [(6, 2), (8, 4)]:
            by_zeros = {}
            for ell in range(1 << k):
                zeros = k - bin(ell).count("1")
                got = _advance_summary(ell, n_p, k, m, UPPER)
                by_zeros.setdefault(zeros, got)
                assert got == by_zeros[zeros], (k, ell)


def test_flow_mirror_matches_round_by_round_oracle():
    for k in range(1, 7):
        for n_p, m, interior in [(8, 2, False), (8, 2, True), (10, 5, True)]:
            mirrored = _cell_flow_summary(n_p, k, m, interior, UPPER)
            oracle = _cell_flow_summary.__wrapped__(n_p, k, m, interior,
                                                    UPPER)
            assert mirrored == oracle
            # Independently re-derive the advance share without the
            # binomial shortcut.
            per_zero = {z: _advance_summary((1 << (k - z)) - 1, n_p, k, m,
                                            UPPER) for z in range(k + 1)}
            direct = None
            for ell in range(1 << k):
                zeros = k - bin(ell).count("1")
                part = _advance_summary(ell, n_p, k, m, UPPER)
                assert part == per_zero[zeros]
                direct = part if direct is None else direct + part
            shortcut = None
            for zeros, part in per_zero.items():
                from math import comb
                scaled = part.scaled(comb(k, zeros))
                shortcut = scaled if shortcut is None else shortcut + scaled
            assert direct == shortcut


def _mirror_plans():
    rng = random.Random(9)
    plans = []
    for n in range(4, 13):
        for m in (1, 4, 16):
            for ks in [(1,), (2,), (1, 1), (2, 1), (1, 2), (1, 1, 1)]:
                if sum(ks) >= n:
                    continue
                leaf = n - sum(ks)
                for lam in (1, 2, 4):
                    if lam > 1 << (leaf - 1):
                        continue
                    plans.append((n, m, ks, lam,
                                  rng.randrange(1 << 30)))
    return plans


def test_cost_only_mirrors_builder_field_wise():
    plans = _mirror_plans()
    assert len(plans) >= 200
    for n, m, ks, lam, seed in plans:
        plan = MassProductionPlan(n, m, len(ks), ks, lam)
        f = random_table(n, m, seed=seed)
        circuit = build_mass_production(f, plan, UPPER)
        built = count_costs(circuit, UPPER)
        closed = cost_only(plan, UPPER)
        assert built == closed, (n, m, ks, lam)
        assert circuit.width == plan_width(plan)


def test_cost_only_by_tag_sums_to_total():
    plan = MassProductionPlan(10, 4, 2, (1, 2), 2)
    total, tagged = cost_only(plan, UPPER, by_tag=True)
    summed = None
    for part in tagged.values():
        summed = part if summed is None else summed + part
    assert summed == total


def test_cost_only_rejects_data_exact():
    plan = MassProductionPlan(6, 2, 1, (1,), 2)
    with pytest.raises(ValueError):
        cost_only(plan, DATA_EXACT)
