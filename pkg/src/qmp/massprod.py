"""Mass production of parallel lookups: builders and cost evaluator.

A two-copy cell answers two queries (x, alpha) and (y, beta) with one
pass over the shared lookups g_0..g_{2^k}: a comparator orders the
registers so x <= y, a control qubit c tracks which of three cases the
round index is in (l <= x_L: write to the x side; x_L < l <= y_L: idle;
y_L < l: write to the y side after a register swap done by A_{y_L}),
and the telescoping g family makes the accumulated XORs equal f on each
side.  Recursion replaces the 2^{t-1} parallel calls to each g_l with a
single mass-produced batch one level down.

Interior levels share one uncontrolled recursive lookup per round; each
cell applies its own control by routing its output register to an m-bit
|+> sink while c = 0 (the sink absorbs XORs invariantly), rather than
threading a control qubit into the recursive problem.  Leaf levels call
the QROAM builder directly, controlled on c for the middle rounds.

cost_only composes per-cell control-flow tallies (emitted through the
same gate emitters into a counting builder) with the closed-form lookup
kernels, so it mirrors the materialized circuits exactly in
upper_bound mode, including the qubit count.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from math import comb

from .builder import Builder
from .ir import Circuit, CostModel, CostSummary, RegisterRole, TAG_FLOW, \
    TAG_LOOKUP
from .qrom import QroamParams, _internal_width, emit_qroam, qroam_cost, \
    qroam_width
from .tables import FunctionTable, build_g_family


@dataclass(frozen=True, slots=True)
class MassProductionPlan:
    n: int
    m: int
    t: int
    k_schedule: tuple[int, ...]
    lam_leaf: int

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("t must be >= 0")
        if len(self.k_schedule) != self.t:
            raise ValueError("k_schedule must have one entry per level")
        if any(k < 1 for k in self.k_schedule):
            raise ValueError("every k must be >= 1")
        if sum(self.k_schedule) >= self.n:
            raise ValueError("sum(k_schedule) must be < n")
        # Validates lambda against the leaf address width.
        QroamParams(self.leaf_bits, self.m, self.lam_leaf)

    @property
    def copies(self) -> int:
        return 1 << self.t

    @property
    def leaf_bits(self) -> int:
        return self.n - sum(self.k_schedule)

    def as_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "t": self.t,
                "k_schedule": list(self.k_schedule),
                "lam_leaf": self.lam_leaf}

    @staticmethod
    def from_dict(data: dict) -> "MassProductionPlan":
        return MassProductionPlan(
            n=int(data["n"]), m=int(data["m"]), t=int(data["t"]),
            k_schedule=tuple(int(k) for k in data["k_schedule"]),
            lam_leaf=int(data["lam_leaf"]))


# ---------------------------------------------------------------------------
# Classical routing model (verification without simulation).


@dataclass(frozen=True, slots=True)
class RoutingState:
    round: int
    control: int  # c as seen by G_round
    swapped: bool  # registers currently exchanged by an A_l

    def invariant_holds(self, x_l: int, y_l: int) -> bool:
        want_c = 1 if (self.round <= x_l or self.round > y_l) else 0
        want_swapped = self.round > y_l
        return self.control == want_c and self.swapped == want_swapped


def routing_states(x_l: int, y_l: int, k: int) -> list[RoutingState]:
    """States at each G_l call for ordered halves x_l <= y_l."""
    if not 0 <= x_l <= y_l < (1 << k):
        raise ValueError("need 0 <= x_l <= y_l < 2^k")
    states = []
    c, swapped = 1, False
    for rnd in range((1 << k) + 1):
        states.append(RoutingState(rnd, c, swapped))
        if rnd == x_l:
            c ^= 1
        if rnd == y_l:
            c ^= 1
            swapped = not swapped
    return states


# ---------------------------------------------------------------------------
# Flow emitters (shared between the builder and the cost evaluator).


def emit_comparator(b: Builder, x: list[int], y: list[int], cmp_wire: int,
                    carry: int) -> None:
    """Toggle cmp_wire by [x > y]; all other wires restored.

    Computes the carry of y + ~x + 1 with a MAJ chain ([x > y] is its
    complement); self-inverse, so the same call uncomputes.
    """
    for q in x:
        b.x(q)
    b.x(carry)
    prev = carry
    chain = []
    for idx in reversed(range(len(x))):
        xa, yb = x[idx], y[idx]
        b.cnot(xa, yb)
        b.cnot(xa, prev)
        b.toffoli(prev, yb, xa)
        chain.append((prev, yb, xa))
        prev = xa
    b.cnot(prev, cmp_wire)
    b.x(cmp_wire)
    for p, yb, xa in reversed(chain):
        b.toffoli(p, yb, xa)
        b.cnot(xa, p)
        b.cnot(xa, yb)
    b.x(carry)
    for q in x:
        b.x(q)


def emit_cond_swap(b: Builder, ctrl: int, left: list[int],
                   right: list[int]) -> None:
    for a, bb in zip(left, right):
        b.cswap(ctrl, a, bb)


def _emit_eq_flip(b: Builder, bits: list[int], value: int, target: int,
                  flags: list[int]) -> None:
    """Flip target iff the k-bit register equals value (AND ladder)."""
    k = len(bits)
    zeros = [i for i in range(k) if not (value >> (k - 1 - i)) & 1]
    for i in zeros:
        b.x(bits[i])
    if k == 1:
        b.cnot(bits[0], target)
    else:
        b.toffoli(bits[0], bits[1], flags[0])
        for i in range(2, k):
            b.toffoli(flags[i - 2], bits[i], flags[i - 1])
        b.cnot(flags[k - 2], target)
        for i in reversed(range(2, k)):
            b.and_uncompute(flags[i - 2], bits[i], flags[i - 1])
        b.and_uncompute(bits[0], bits[1], flags[0])
    for i in zeros:
        b.x(bits[i])


def emit_advance(b: Builder, ell: int, x_l: list[int], y_l: list[int],
                 x_r: list[int], y_r: list[int], alpha: list[int],
                 beta: list[int], c: int, aux: int,
                 flags: list[int]) -> None:
    """A_l: flip c when x_L = l; flip c and swap registers when y_L = l."""
    _emit_eq_flip(b, x_l, ell, c, flags)
    _emit_eq_flip(b, y_l, ell, aux, flags)
    b.cnot(aux, c)
    for a, bb in zip(y_r, x_r):
        b.cswap(aux, a, bb)
    for a, bb in zip(alpha, beta):
        b.cswap(aux, a, bb)
    _emit_eq_flip(b, y_l, ell, aux, flags)


def _emit_sink_toggle(b: Builder, c: int, alpha: list[int],
                      sink: list[int]) -> None:
    """Exchange output register and |+> sink on the c = 0 branch."""
    b.x(c)
    for a, s in zip(alpha, sink):
        b.cswap(c, a, s)
    b.x(c)


def emit_final_unswap(b: Builder, x_r: list[int], y_r: list[int],
                      alpha: list[int], beta: list[int]) -> None:
    for a, bb in zip(x_r, y_r):
        b.swap(a, bb)
    for a, bb in zip(alpha, beta):
        b.swap(a, bb)


# ---------------------------------------------------------------------------
# Recursive builder.

Pair = tuple[list[int], list[int]]  # (address wires, output wires)


def _emit_level(b: Builder, f: FunctionTable, ks: tuple[int, ...], lam: int,
                pairs: list[Pair], lookup=emit_qroam) -> None:
    if not ks:
        assert len(pairs) == 1
        lookup(b, f, lam, pairs[0][0], pairs[0][1], None)
        return
    k = ks[0]
    interior = len(ks) > 1
    m = f.m
    rounds = 1 << k
    fam = build_g_family(f, k)
    cells = [(pairs[i], pairs[i + 1]) for i in range(0, len(pairs), 2)]
    blocks = []
    for (x, alpha), (y, beta) in cells:
        cmp_wire, carry, c, aux = b.alloc(4)
        flags = b.alloc(k - 1)
        sink = b.alloc(m) if interior else []
        blocks.append((cmp_wire, carry, c, aux, flags, sink))
        emit_comparator(b, x, y, cmp_wire, carry)
        emit_cond_swap(b, cmp_wire, x + alpha, y + beta)
        b.x(c)
        for s in sink:
            b.h(s)
    for ell in range(rounds + 1):
        middle = 1 <= ell <= rounds - 1
        if interior:
            if middle:
                for ((x, alpha), (y, beta)), blk in zip(cells, blocks):
                    _emit_sink_toggle(b, blk[2], alpha, blk[5])
            sub_pairs = [(x[k:], alpha) for (x, alpha), _ in cells]
            _emit_level(b, fam.members[ell], ks[1:], lam, sub_pairs, lookup)
            if middle:
                for ((x, alpha), (y, beta)), blk in zip(cells, blocks):
                    _emit_sink_toggle(b, blk[2], alpha, blk[5])
        else:
            for ((x, alpha), (y, beta)), blk in zip(cells, blocks):
                lookup(b, fam.members[ell], lam, x[k:], alpha,
                       blk[2] if middle else None)
        if ell < rounds:
            for ((x, alpha), (y, beta)), blk in zip(cells, blocks):
                cmp_wire, carry, c, aux, flags, sink = blk
                emit_advance(b, ell, x[:k], y[:k], x[k:], y[k:], alpha,
                             beta, c, aux, flags)
    for ((x, alpha), (y, beta)), blk in zip(cells, blocks):
        cmp_wire, carry, c, aux, flags, sink = blk
        emit_final_unswap(b, x[k:], y[k:], alpha, beta)
        b.x(c)
        for s in sink:
            b.h(s)
        emit_cond_swap(b, cmp_wire, x + alpha, y + beta)
        emit_comparator(b, x, y, cmp_wire, carry)
        b.free([cmp_wire, carry, c, aux] + flags + sink)


def build_mass_production(f: FunctionTable, plan: MassProductionPlan,
                          model: CostModel | None = None) -> Circuit:
    if (f.n, f.m) != (plan.n, plan.m):
        raise ValueError("plan does not match the table dimensions")
    model = model or CostModel()
    b = Builder(model)
    pairs: list[Pair] = []
    for i in range(plan.copies):
        addr = b.add_register(f"addr{i}", plan.n, RegisterRole.INPUT)
        out = b.add_register(f"out{i}", plan.m, RegisterRole.OUTPUT)
        pairs.append((addr, out))
    _emit_level(b, f, plan.k_schedule, plan.lam_leaf, pairs)
    return b.finish(metadata={"kind": "massprod", "plan": plan.as_dict()})


def build_two_copy(f: FunctionTable, k: int, lam: int,
                   lookup_builder=emit_qroam,
                   model: CostModel | None = None) -> Circuit:
    if not 1 <= k < f.n:
        raise ValueError("k out of range")
    model = model or CostModel()
    b = Builder(model)
    pairs: list[Pair] = []
    for i in range(2):
        addr = b.add_register(f"addr{i}", f.n, RegisterRole.INPUT)
        out = b.add_register(f"out{i}", f.m, RegisterRole.OUTPUT)
        pairs.append((addr, out))
    _emit_level(b, f, (k,), lam, pairs, lookup_builder)
    return b.finish(metadata={"kind": "two_copy", "n": f.n, "m": f.m,
                              "k": k, "lambda": lam})


def build_advance(ell: int, k: int, n_r: int, m: int,
                  model: CostModel | None = None) -> Circuit:
    """Standalone A_l over explicit registers (for direct verification)."""
    if not 0 <= ell < (1 << k):
        raise ValueError("need 0 <= l < 2^k")
    b = Builder(model or CostModel())
    x_l = b.add_register("x_l", k, RegisterRole.INPUT)
    y_l = b.add_register("y_l", k, RegisterRole.INPUT)
    x_r = b.add_register("x_r", n_r, RegisterRole.INPUT) if n_r else []
    y_r = b.add_register("y_r", n_r, RegisterRole.INPUT) if n_r else []
    alpha = b.add_register("alpha", m, RegisterRole.OUTPUT)
    beta = b.add_register("beta", m, RegisterRole.OUTPUT)
    c = b.add_register("c", 1, RegisterRole.CONTROL)[0]
    aux = b.add_register("aux", 1, RegisterRole.ANCILLA_CLEAN)[0]
    flags = b.add_register("flags", k - 1, RegisterRole.ANCILLA_CLEAN) \
        if k > 1 else []
    emit_advance(b, ell, x_l, y_l, x_r, y_r, alpha, beta, c, aux, flags)
    return b.finish(metadata={"kind": "advance", "ell": ell, "k": k})


# ---------------------------------------------------------------------------
# Cost-only evaluation (exact mirror of the builder in upper_bound mode).


def _advance_summary(ell: int, n_p: int, k: int, m: int,
                     model: CostModel) -> CostSummary:
    b = Builder(model, counting=True)
    x, y = b.alloc(n_p), b.alloc(n_p)
    alpha, beta = b.alloc(m), b.alloc(m)
    c, aux = b.alloc(2)
    flags = b.alloc(k - 1)
    emit_advance(b, ell, x[:k], y[:k], x[k:], y[k:], alpha, beta, c, aux,
                 flags)
    return b.total_summary()


@lru_cache(maxsize=None)
def _cell_flow_summary(n_p: int, k: int, m: int, interior: bool,
                       model: CostModel) -> CostSummary:
    """Control-flow gates of one two-copy cell at one level.

    Advances are tallied once per distinct gate shape (their counts
    depend on ell only through its zero-bit count) and scaled by the
    binomial multiplicity, so this stays exact without iterating all
    2^k rounds.
    """
    b = Builder(model, counting=True)
    x, y = b.alloc(n_p), b.alloc(n_p)
    alpha, beta = b.alloc(m), b.alloc(m)
    cmp_wire, carry, c, aux = b.alloc(4)
    sink = b.alloc(m) if interior else []
    rounds = 1 << k
    for _ in range(2):
        emit_comparator(b, x, y, cmp_wire, carry)
        emit_cond_swap(b, cmp_wire, x + alpha, y + beta)
        b.x(c)
        for s in sink:
            b.h(s)
    emit_final_unswap(b, x[k:], y[k:], alpha, beta)
    if interior:
        toggle = Builder(model, counting=True)
        ta, ts = toggle.alloc(m), toggle.alloc(m)
        _emit_sink_toggle(toggle, toggle.alloc(1)[0], ta, ts)
        b.add_summary(toggle.total_summary(), times=2 * (rounds - 1))
    for zeros in range(k + 1):
        ell = (1 << (k - zeros)) - 1  # representative with that many 0 bits
        b.add_summary(_advance_summary(ell, n_p, k, m, model),
                      times=comb(k, zeros))
    return b.total_summary()


_ZERO = CostSummary()


@lru_cache(maxsize=None)
def _cost_level(n_p: int, ks: tuple[int, ...], lam: int, m: int,
                model: CostModel) -> tuple[tuple[str, CostSummary], ...]:
    if not ks:
        return ((TAG_LOOKUP, qroam_cost(QroamParams(n_p, m, lam), model)),)
    k = ks[0]
    cells = 1 << (len(ks) - 1)
    interior = len(ks) > 1
    out = {TAG_FLOW: _cell_flow_summary(n_p, k, m, interior, model).scaled(cells)}
    if interior:
        for tag, summary in _cost_level(n_p - k, ks[1:], lam, m, model):
            out[tag] = out.get(tag, _ZERO) + summary.scaled((1 << k) + 1)
    else:
        plain = qroam_cost(QroamParams(n_p - k, m, lam), model)
        ctl = qroam_cost(QroamParams(n_p - k, m, lam, controlled=True), model)
        out[TAG_LOOKUP] = (plain.scaled(2) + ctl.scaled((1 << k) - 1)).scaled(cells)
    return tuple(sorted(out.items()))


def plan_width(plan: MassProductionPlan) -> int:
    """Qubit count of the materialized circuit (exact mirror)."""
    if plan.t == 0:
        return qroam_width(QroamParams(plan.n, plan.m, plan.lam_leaf))
    width = plan.copies * (plan.n + plan.m)
    for i, k in enumerate(plan.k_schedule):
        cells = 1 << (plan.t - 1 - i)
        interior = i < plan.t - 1
        width += cells * (4 + (k - 1) + (plan.m if interior else 0))
    leaf_n = plan.leaf_bits
    width += max(
        _internal_width(QroamParams(leaf_n, plan.m, plan.lam_leaf)),
        _internal_width(QroamParams(leaf_n, plan.m, plan.lam_leaf,
                                    controlled=True)))
    return width


def cost_only(plan: MassProductionPlan, model: CostModel,
              by_tag: bool = False):
    """Exact cost of build_mass_production without materializing it."""
    if model.counting_mode != "upper_bound":
        raise ValueError("cost_only supports upper_bound counting only")
    width = plan_width(plan)
    tagged = {tag: replace(summary, qubit_count=width)
              for tag, summary in
              _cost_level(plan.n, plan.k_schedule, plan.lam_leaf, plan.m,
                          model)}
    total = _ZERO
    for summary in tagged.values():
        total = total + summary
    total = replace(total, qubit_count=width)
    if by_tag:
        return total, tagged
    return total
