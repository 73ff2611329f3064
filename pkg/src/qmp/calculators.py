"""Leading-term cost calculators for downstream applications.

Every function here evaluates a closed-form model estimate: amplitude
amplification over batched state preparation, coherent alias sampling
PREP, sparse-Hamiltonian cost fractions, parallel phase-estimation
scaling, maximal-copy-count batches, and literature gate counts for
generic state and unitary synthesis.  Suppressed subleading factors
are dropped throughout; outputs are model estimates, not measurements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .builder import Builder
from .ir import CostModel, CostSummary
from .massprod import MassProductionPlan, cost_only, emit_comparator
from .optimize import optimize_qrom, _objective

_DEFAULT_MODEL = CostModel()

# Scaling exponents of the batched phase-estimation analysis: per-copy
# lookup cost ~ N^log2(3/2); amortized walk cost ~ R^log2(9/4).
EXP_LOOKUP_AMORTIZED = math.log2(3 / 2)
EXP_WALK_AMORTIZED = math.log2(9 / 4)


def p_r(p: float, r: int) -> float:
    """Success probability of at least one of r independent tries."""
    if not 0 < p < 1:
        raise ValueError("need 0 < p < 1")
    if r < 1:
        raise ValueError("need r >= 1")
    return 1.0 - (1.0 - p) ** r


@dataclass(frozen=True, slots=True)
class AmpAmpParams:
    p: float  # per-copy success probability
    r: int  # copies amplified together
    delta: float  # target failure probability
    q: int = 1  # lookup queries per reflection round
    c: float = 0.0  # extra per-copy gates per round

    def __post_init__(self):
        if not 0 < self.p < 1 or not 0 < self.delta < 1:
            raise ValueError("p and delta must lie in (0, 1)")
        if self.r < 1 or self.q < 1 or self.c < 0:
            raise ValueError("need r, q >= 1 and c >= 0")

    @property
    def saturated(self) -> bool:
        """True when r*p is not small and the linear regime breaks."""
        return self.r * self.p >= 1.0


@dataclass(frozen=True, slots=True)
class AmpAmpReport:
    queries_single: int
    queries_batched: int
    cost_single: float
    cost_batched: float
    speedup: float
    saturated: bool


def _fp_queries(p_succ: float, delta: float, kappa: float) -> int:
    return max(1, math.ceil(kappa * math.log(1.0 / delta)
                            / math.sqrt(p_succ)))


def amp_amp_cost(params: AmpAmpParams, n: int, m: int, xi: float,
                 kappa: float = 1.0,
                 model: CostModel = _DEFAULT_MODEL) -> AmpAmpReport:
    """Amplifying r parallel attempts vs amplifying one attempt.

    With r attempts a round succeeds with probability p_r ~ r*p, so
    about sqrt(r) fewer rounds reach the same failure bound; mass
    production shares the round's lookups across attempts (q lookup
    queries plus r*c per-attempt gates), keeping rounds near the
    single-attempt price.
    """
    _, lookup = optimize_qrom(n, m, xi, model)
    base = params.q * _objective(lookup, xi)
    q1 = _fp_queries(params.p, params.delta, kappa)
    qr = _fp_queries(p_r(params.p, params.r), params.delta, kappa)
    cost_single = q1 * (base + params.c)
    cost_batched = qr * (base + params.r * params.c)
    return AmpAmpReport(
        queries_single=q1, queries_batched=qr,
        cost_single=cost_single, cost_batched=cost_batched,
        speedup=cost_single / cost_batched,
        saturated=params.saturated)


def alias_sampling_prep_cost(N: int, mu: int, xi: float,
                             model: CostModel = _DEFAULT_MODEL
                             ) -> tuple[CostSummary, CostSummary]:
    """(total, lookup share) of a coherent alias sampling PREP.

    One lookup loads (alt index, keep threshold) pairs: n = ceil(log2 N)
    address bits, n + mu output bits.  Around it: n Hadamards for the
    uniform superposition, a mu-bit comparator against the sampled
    threshold, and n controlled swaps onto the alt register.
    """
    if N < 2 or mu < 1:
        raise ValueError("need N >= 2 and mu >= 1")
    n = max(1, math.ceil(math.log2(N)))
    _, lookup = optimize_qrom(n, n + mu, xi, model)
    b = Builder(model, counting=True)
    sigma, keep = b.alloc(mu), b.alloc(mu)
    flag, carry = b.alloc(2)
    idx, alt = b.alloc(n), b.alloc(n)
    for q in sigma:
        b.h(q)
    for q in idx:
        b.h(q)
    emit_comparator(b, sigma, keep, flag, carry)
    for i in range(n):
        b.cswap(flag, idx[i], alt[i])
    wrap = b.total_summary()
    return lookup + wrap, lookup


@dataclass(frozen=True, slots=True)
class ChemistryModel:
    """Term-count fit N = a * N_orb^b plus costing knobs."""
    fit_a: float
    fit_b: float
    mu: int = 10
    xi: float = 1.0
    c_sel: float = 1.0  # SELECT cost per spin-orbital
    c_other: float = 0.0  # additive non-lookup cost

    def n_terms(self, n_orb: float) -> int:
        return max(1, round(self.fit_a * n_orb ** self.fit_b))


@dataclass(frozen=True, slots=True)
class SparseRow:
    n_orb: float
    n_terms: int
    input_bits: int
    fraction_non_lookup: float


def sparse_fraction_curve(model: ChemistryModel, n_orb_values,
                          cost_model: CostModel = _DEFAULT_MODEL
                          ) -> list[SparseRow]:
    """Non-lookup cost fraction of a sparse block encoding per size."""
    rows = []
    for n_orb in n_orb_values:
        n_terms = model.n_terms(n_orb)
        bits = max(1, math.ceil(math.log2(n_terms)))
        _, lookup = optimize_qrom(bits, bits + model.mu, model.xi,
                                  cost_model)
        other = model.c_sel * n_orb + model.c_other
        frac = other / (_objective(lookup, model.xi) + other)
        rows.append(SparseRow(n_orb, n_terms, bits, frac))
    return rows


@dataclass(frozen=True, slots=True)
class QpeComparison:
    batched: float
    direct: float
    ratio: float


def parallel_qpe_compare(model: ChemistryModel, r: float, mode: str,
                         n_orb: float,
                         lam_over_eps: float = 1.0) -> QpeComparison:
    """Leading-term cost of batched vs direct phase estimation.

    sparse: per-run cost with amortized lookups scales as
    N_orb + N_orb^(b*log2(3/2)) against the direct N_orb^b.
    thc: amortized walk cost R^log2(9/4) + R^log2(3/2)*N_orb + N_orb
    against R^2 + R*N_orb + N_orb, with R = r.
    """
    if mode == "sparse":
        batched = lam_over_eps * (
            n_orb + n_orb ** (model.fit_b * EXP_LOOKUP_AMORTIZED))
        direct = lam_over_eps * n_orb ** model.fit_b
    elif mode == "thc":
        batched = (r ** EXP_WALK_AMORTIZED
                   + r ** EXP_LOOKUP_AMORTIZED * n_orb + n_orb)
        direct = r ** 2 + r * n_orb + n_orb
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return QpeComparison(batched, direct, direct / batched)


def max_copies_cost(n: int, m: int, a: int, xi: float, lam: int = 2,
                    model: CostModel = _DEFAULT_MODEL) -> CostSummary:
    """Cost of the deepest all-ones schedule: r = 2^(n-a) copies."""
    if not 1 <= a < n:
        raise ValueError("need n > a >= 1")
    t = n - a
    plan = MassProductionPlan(n, m, t, (1,) * t, lam)
    return cost_only(plan, model)


def max_copies_improvement_exponent(n_values, m: int, a: int, xi: float,
                                    lam: int = 2,
                                    model: CostModel = _DEFAULT_MODEL
                                    ) -> float:
    """Log-log slope of the improvement factor of max_copies_cost."""
    logs = []
    for n in n_values:
        r = 1 << (n - a)
        _, single = optimize_qrom(n, m, xi, model)
        batch = max_copies_cost(n, m, a, xi, lam, model)
        improvement = r * _objective(single, xi) / _objective(batch, xi)
        logs.append(math.log2(improvement))
    slope, _ = np.polyfit(list(n_values), logs, 1)
    return float(slope)


def kretschmer_counts(n: int, eps: float, kind: str) -> float:
    """Leading-term gate counts for generic synthesis.

    state: 24 * 2^n * (n + log2(6/eps)) gates for an n-qubit state;
    unitary: 60 * 4^n * (2n + log2(15/eps)).  The vanishing correction
    factor is dropped.
    """
    if not 0 < eps < 1:
        raise ValueError("need eps in (0, 1)")
    if kind == "state":
        return 24.0 * 2 ** n * (n + math.log2(6.0 / eps))
    if kind == "unitary":
        return 60.0 * 4 ** n * (2 * n + math.log2(15.0 / eps))
    raise ValueError(f"unknown kind {kind!r}")


def mps_prep_cost(n_sites: int, chi: int, eps: float,
                  c: float = 1.0) -> float:
    """Leading-term cost of preparing a bond-dimension-chi MPS."""
    if n_sites < 1 or chi < 1 or not 0 < eps < 1:
        raise ValueError("need n_sites, chi >= 1 and eps in (0, 1)")
    return c * n_sites * (chi ** 2 + chi * math.log2(1.0 / eps))
