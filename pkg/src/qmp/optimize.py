"""Parameter search over lookup and mass-production plans.

optimize_qrom scans the swap-network width lambda for a single lookup.
optimize_plan runs a dynamic program over (remaining address bits,
remaining recursion depth): each level picks the round count k that
minimizes control flow at that level plus (2^k + 1) copies of the best
sub-plan, and the leaf level additionally picks lambda.  The objective
is the weighted total clifford + xi * t_count; xi = inf switches to a
Toffoli-count objective with a Clifford tie-break.  If the best
recursive plan is worse than repeating the single-lookup optimum, the
result falls back to that naive plan, so improvement >= 1 always.

run_sweep evaluates a grid of (n, xi, r) points, optionally in
parallel (QMP_THREADS), and returns rows in lexicographic axis order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

from .ir import CostModel, CostSummary, TAG_LOOKUP
from .massprod import MassProductionPlan, _cell_flow_summary, cost_only
from .qrom import QroamParams, qroam_cost

_DEFAULT_MODEL = CostModel()


def lam_domain(n: int, lam_cap: int | None = None) -> tuple[int, ...]:
    """Power-of-two lambdas valid for n address bits, capped at
    2^ceil(n/2) by default (the cap is configurable)."""
    if n < 1:
        raise ValueError("need n >= 1")
    cap = lam_cap if lam_cap is not None else 1 << ((n + 1) // 2)
    # The swap network needs at least one high address bit, so
    # lambda <= 2^(n-1) regardless of the cap.
    cap = min(cap, 1 << (n - 1)) if n > 1 else 1
    lams, lam = [1], 2
    while lam <= cap:
        lams.append(lam)
        lam <<= 1
    return tuple(lams)


def _objective(summary: CostSummary, xi: float) -> float:
    """Scalar objective; xi = inf means count Toffolis only."""
    if math.isinf(xi):
        return float(summary.toffoli_count)
    return summary.total(xi)


def _key(summary: CostSummary, xi: float) -> tuple[float, float]:
    if math.isinf(xi):
        return (float(summary.toffoli_count), float(summary.clifford_count))
    return (summary.total(xi), float(summary.toffoli_count))


def optimize_qrom(n: int, m: int, xi: float,
                  model: CostModel = _DEFAULT_MODEL,
                  lam_cap: int | None = None) -> tuple[int, CostSummary]:
    """Exhaustive lambda scan for a single uncontrolled lookup."""
    best = None
    for lam in lam_domain(n, lam_cap):
        cost = qroam_cost(QroamParams(n, m, lam), model)
        key = _key(cost, xi)
        if best is None or key < best[0]:
            best = (key, lam, cost)
    return best[1], best[2]


@dataclass(frozen=True, slots=True)
class OptimizationResult:
    plan: MassProductionPlan
    cost_mp: CostSummary
    cost_naive: CostSummary
    improvement: float


@lru_cache(maxsize=None)
def _best_level(n_p: int, depth: int, m: int, xi: float, model: CostModel,
                lam_cap: int | None, k_cap: int | None
                ) -> tuple[tuple[float, float], CostSummary,
                           tuple[int, ...], int]:
    """Cheapest batch serving 2^depth lookups over n_p address bits.

    Returns (comparison key, cost, k schedule, leaf lambda).  The k
    range keeps at least one address bit per remaining level.
    """
    best = None
    k_hi = n_p - depth
    if k_cap is not None:
        k_hi = min(k_hi, k_cap)
    cells = 1 << (depth - 1)
    for k in range(1, k_hi + 1):
        if depth == 1:
            flow = _cell_flow_summary(n_p, k, m, False, model)
            for lam in lam_domain(n_p - k, lam_cap):
                plain = qroam_cost(QroamParams(n_p - k, m, lam), model)
                ctl = qroam_cost(
                    QroamParams(n_p - k, m, lam, controlled=True), model)
                cost = flow + plain.scaled(2) + ctl.scaled((1 << k) - 1)
                cand = (_key(cost, xi), cost, (k,), lam)
                if best is None or cand[0] < best[0]:
                    best = cand
        else:
            flow = _cell_flow_summary(n_p, k, m, True, model).scaled(cells)
            sub = _best_level(n_p - k, depth - 1, m, xi, model, lam_cap,
                              k_cap)
            cost = flow + sub[1].scaled((1 << k) + 1)
            cand = (_key(cost, xi), cost, (k,) + sub[2], sub[3])
            if best is None or cand[0] < best[0]:
                best = cand
    if best is None:
        raise ValueError(f"no feasible schedule for n'={n_p} depth={depth}")
    return best


def optimize_plan(n: int, m: int, xi: float, r: int,
                  model: CostModel = _DEFAULT_MODEL,
                  lam_cap: int | None = None,
                  k_cap: int | None = None) -> OptimizationResult:
    """Best plan for r parallel lookups, r a power of two.

    Falls back to repeating the single-lookup optimum when recursion
    does not pay, so the returned improvement is always >= 1.
    """
    if r < 1 or r & (r - 1):
        raise ValueError("r must be a power of two")
    t = r.bit_length() - 1
    if t >= n:
        raise ValueError(f"infeasible: log2(r)={t} needs fewer than n={n} "
                         "address bits")
    lam_single, single = optimize_qrom(n, m, xi, model, lam_cap)
    naive = single.scaled(r)
    naive_plan = MassProductionPlan(n, m, 0, (), lam_single)
    if t == 0:
        cost = cost_only(naive_plan, model)
        return OptimizationResult(naive_plan, cost, cost, 1.0)
    _, best_cost, ks, lam = _best_level(n, t, m, xi, model, lam_cap, k_cap)
    if _key(best_cost, xi) >= _key(naive, xi):
        return OptimizationResult(naive_plan, naive, naive, 1.0)
    plan = MassProductionPlan(n, m, t, ks, lam)
    cost_mp = cost_only(plan, model)
    improvement = _objective(naive, xi) / _objective(cost_mp, xi)
    return OptimizationResult(plan, cost_mp, naive, improvement)


def fraction_non_lookup(plan: MassProductionPlan,
                        model: CostModel = _DEFAULT_MODEL,
                        xi: float | None = None) -> float:
    """Share of the plan's cost not spent in lookup kernels."""
    if xi is None:
        xi = model.xi
    total, tagged = cost_only(plan, model, by_tag=True)
    lookup = tagged.get(TAG_LOOKUP)
    if lookup is None:
        return 1.0
    return 1.0 - _objective(lookup, xi) / _objective(total, xi)


@dataclass(frozen=True, slots=True)
class SweepSpec:
    n_values: tuple[int, ...]
    m: int
    xi_values: tuple[float, ...]
    r_values: tuple[int, ...]
    lam_cap: int | None = None
    k_cap: int | None = None

    def __post_init__(self):
        if not (self.n_values and self.xi_values and self.r_values):
            raise ValueError("all sweep axes must be non-empty")

    @staticmethod
    def from_dict(data: dict) -> "SweepSpec":
        return SweepSpec(
            n_values=tuple(int(v) for v in data["n_values"]),
            m=int(data["m"]),
            xi_values=tuple(float(v) for v in data["xi_values"]),
            r_values=tuple(int(v) for v in data["r_values"]),
            lam_cap=(None if data.get("lam_cap") is None
                     else int(data["lam_cap"])),
            k_cap=(None if data.get("k_cap") is None
                   else int(data["k_cap"])),
        )


@dataclass(frozen=True, slots=True)
class SweepRow:
    n: int
    m: int
    xi: float
    r: int
    lam_star: int
    k_schedule: tuple[int, ...]
    clifford: int
    t_count: int
    toffoli: int
    cost_naive: float
    cost_mp: float
    improvement: float
    fraction_non_lookup: float

    FIELDS = ("n", "m", "xi", "r", "lam_star", "k_schedule", "clifford",
              "t_count", "toffoli", "cost_naive", "cost_mp", "improvement",
              "fraction_non_lookup")

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.FIELDS}


def _sweep_point(args: tuple) -> SweepRow:
    n, m, xi, r, model, lam_cap, k_cap = args
    res = optimize_plan(n, m, xi, r, model, lam_cap, k_cap)
    return SweepRow(
        n=n, m=m, xi=xi, r=r,
        lam_star=res.plan.lam_leaf,
        k_schedule=res.plan.k_schedule,
        clifford=res.cost_mp.clifford_count,
        t_count=res.cost_mp.t_count,
        toffoli=res.cost_mp.toffoli_count,
        cost_naive=_objective(res.cost_naive, xi),
        cost_mp=_objective(res.cost_mp, xi),
        improvement=res.improvement,
        fraction_non_lookup=fraction_non_lookup(res.plan, model, xi),
    )


def run_sweep(spec: SweepSpec,
              model: CostModel = _DEFAULT_MODEL) -> list[SweepRow]:
    """One row per (n, xi, r) point, in lexicographic axis order."""
    points = [(n, spec.m, xi, r, model, spec.lam_cap, spec.k_cap)
              for n in spec.n_values
              for xi in spec.xi_values
              for r in spec.r_values]
    workers = int(os.environ.get("QMP_THREADS", "0")) or (os.cpu_count() or 1)
    workers = min(workers, len(points))
    if workers <= 1:
        return [_sweep_point(p) for p in points]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_point, points))
