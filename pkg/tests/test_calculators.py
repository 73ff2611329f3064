"""Application calculator tests."""

from __future__ import annotations

import math

import pytest

from qmp import (AmpAmpParams, ChemistryModel, CostModel,
                 alias_sampling_prep_cost, amp_amp_cost, kretschmer_counts,
                 max_copies_cost, max_copies_improvement_exponent,
                 mps_prep_cost, p_r, parallel_qpe_compare,
                 sparse_fraction_curve)

UPPER = CostModel()


def test_p_r_complement_identity():
    for p in (1e-6, 1e-4, 0.3):
        for r in (1, 4, 64, 1024):
            assert abs((1.0 - p_r(p, r)) - (1.0 - p) ** r) < 1e-12


def test_p_r_single_attempt_is_p():
    assert abs(p_r(0.3, 1) - 0.3) < 1e-15


def test_amp_amp_speedup_tracks_sqrt_r():
    for r in (4, 16, 64):
        rep = amp_amp_cost(AmpAmpParams(p=1e-4, r=r, delta=1e-6),
                           n=10, m=8, xi=1.0)
        assert 0.8 <= rep.speedup / math.sqrt(r) <= 1.25, r


def test_amp_amp_saturation_flag():
    assert AmpAmpParams(p=0.5, r=4, delta=1e-3).saturated
    assert not AmpAmpParams(p=1e-4, r=4, delta=1e-3).saturated


def test_amp_amp_params_validation():
    with pytest.raises(ValueError):
        AmpAmpParams(p=0.0, r=4, delta=1e-3)
    with pytest.raises(ValueError):
        AmpAmpParams(p=0.1, r=0, delta=1e-3)


def test_alias_sampling_is_lookup_dominated():
    for big_n in (2000, 20000, 200000):
        total, lookup = alias_sampling_prep_cost(big_n, 10, 1.0, UPPER)
        fraction = 1.0 - lookup.total(1.0) / total.total(1.0)
        assert fraction < 0.05, big_n


def test_sparse_curve_input_bits_window():
    for a, b in [(2.5, 1.78), (3e-4, 3.83)]:
        rows = sparse_fraction_curve(ChemistryModel(a, b),
                                     [100, 125, 150, 175, 200], UPPER)
        for row in rows:
            assert 14 <= row.input_bits <= 18, (a, b, row.n_orb)
            assert 0.0 <= row.fraction_non_lookup < 0.05


def test_qpe_comparison_favours_batching_at_scale():
    chem = ChemistryModel(2.5, 1.78)
    cmp_ = parallel_qpe_compare(chem, 16, "sparse", 150)
    assert cmp_.ratio > 1.0
    assert cmp_.batched < cmp_.direct


def test_max_copies_growth_ratio_near_three():
    prev = None
    for n in range(12, 21):
        cost = max_copies_cost(n, 8, 4, 1.0).total(1.0)
        if prev is not None:
            assert 2.7 <= cost / prev <= 3.3, n
        prev = cost


def test_max_copies_improvement_exponent_window():
    slope = max_copies_improvement_exponent(range(12, 21), 8, 4, 1.0)
    assert 0.35 <= slope <= 0.48


def test_kretschmer_counts_formulas():
    n, eps = 6, 1e-3
    assert kretschmer_counts(n, eps, "state") == pytest.approx(
        24 * 2 ** n * (n + math.log2(6 / eps)))
    assert kretschmer_counts(n, eps, "unitary") == pytest.approx(
        60 * 4 ** n * (2 * n + math.log2(15 / eps)))
    with pytest.raises(ValueError):
        kretschmer_counts(n, 2.0, "state")


def test_mps_prep_cost_formula():
    assert mps_prep_cost(30, 8, 1e-4) == pytest.approx(
        30 * (64 + 8 * math.log2(1e4)))
    with pytest.raises(ValueError):
        mps_prep_cost(0, 8, 1e-4)
