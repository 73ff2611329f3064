"""Lookup resource states: batch preparation, consumption, correction.

A resource state is O_f applied to |+>^n |0>^m, i.e. the uniform
superposition 2^{-n/2} sum_y |y>|f(y)>.  A serial query consumes one
copy: CNOT the input register onto the state's address half, measure
that half to learn a uniformly random shift b, discard it, and repair
the leftover f(x xor b) with a lookup O_g over n-1 address bits.  The
shift falls into four classes; a leading-zero shift is reduced to the
leading-one case by classically relabeling input bits, so every
nontrivial correction costs one half-size lookup plus O(n) Cliffords.

Batches of resource states come from the mass-production planner, so
c serial queries amortize toward (prep + c * half-lookup) instead of
c full lookups.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .builder import Builder
from .ir import Circuit, CostModel, CostSummary, CountAccumulator, \
    Register, RegisterRole
from .massprod import MassProductionPlan, cost_only
from .optimize import optimize_plan, optimize_qrom, _objective
from .qrom import QroamParams, build_plain_qrom, emit_qroam, \
    measurement_uncompute_cost, qroam_cost
from .sim import MeasurementPolicy, State, fidelity, pack_register, \
    run_auto, unpack_register
from .tables import BitString, FunctionTable, correction_table, \
    permute_input_bits

_DEFAULT_MODEL = CostModel()

# Widest system the materializing paths will simulate (n + m qubits).
MATERIALIZE_LIMIT = 14


@dataclass(frozen=True, slots=True)
class QromResourceState:
    """One copy of 2^{-n/2} sum_y |y>|f(y)>.

    state maps basis words to amplitudes with the address on qubits
    0..n-1 and the output on qubits n..n+m-1 (big-endian registers);
    state=None is a cost-only descriptor.
    """
    f: FunctionTable
    state: State | None = None

    @property
    def n(self) -> int:
        return self.f.n

    @property
    def m(self) -> int:
        return self.f.m

    @property
    def addr_qubits(self) -> tuple[int, ...]:
        return tuple(range(self.n))

    @property
    def out_qubits(self) -> tuple[int, ...]:
        return tuple(range(self.n, self.n + self.m))

    @staticmethod
    def ideal(f: FunctionTable) -> "QromResourceState":
        amp = 2.0 ** (-f.n / 2)
        addr = tuple(range(f.n))
        out = tuple(range(f.n, f.n + f.m))
        state = {pack_register(y, addr) | pack_register(f(y), out): amp + 0j
                 for y in range(1 << f.n)}
        return QromResourceState(f, state)


@dataclass(frozen=True, slots=True)
class ShiftClass:
    case: int  # 1..4
    perm: tuple[int, ...] | None  # input-bit relabeling, case 4 only
    b_eff: BitString  # shift after relabeling (leading bit 1 or b = 0)


def classify_shift(b: BitString) -> ShiftClass:
    """Which correction a measured shift b needs.

    Case 1: b = 0 (none).  Case 2: b = 10..0.  Case 3: leading bit 1,
    rest nonzero.  Case 4: leading bit 0, reduced to case 3 by
    swapping the first set bit into the leading position.
    """
    n = b.width
    if b.value == 0:
        return ShiftClass(1, None, b)
    if b.bit(0) == 1:
        rest = b.value & ((1 << (n - 1)) - 1)
        return ShiftClass(2 if rest == 0 else 3, None, b)
    i = next(j for j in range(1, n) if b.bit(j))
    perm = tuple(0 if j == i else (i if j == 0 else j) for j in range(n))
    b_eff = 0
    for j in range(n):
        b_eff = (b_eff << 1) | b.bit(perm[j])
    return ShiftClass(4, perm, BitString(n, b_eff))


@dataclass(frozen=True, slots=True)
class ConsumptionOutcome:
    b: BitString
    case: int
    state: State  # post-discard |x>|f(x xor b)> on input+output qubits
    probability: float


def consume(resource: QromResourceState, x: int,
            policy: MeasurementPolicy
            ) -> ConsumptionOutcome | list[ConsumptionOutcome]:
    """CNOT-copy x onto the address half, measure it as b, discard.

    Operates on the materialized amplitudes.  Every shift is equally
    likely; forced policies select b via forced={0: b}.
    """
    if resource.state is None:
        raise ValueError("resource state is cost-only, not materialized")
    n, m = resource.n, resource.m
    addr, out = resource.addr_qubits, resource.out_qubits
    # After CNOTs the address half holds y xor x, so the branch with
    # outcome b keeps exactly the y = x xor b term.
    branch_amp = {}
    for word, amp in resource.state.items():
        b_val = unpack_register(word, addr) ^ x
        branch_amp[b_val] = (amp, unpack_register(word, out))
    if len(branch_amp) != 1 << n:
        raise AssertionError("resource state does not cover every shift")

    def branch(b_val: int) -> ConsumptionOutcome:
        amp, f_val = branch_amp[b_val]
        prob = abs(amp) ** 2
        word = pack_register(x, addr) | pack_register(f_val, out)
        return ConsumptionOutcome(
            b=BitString(n, b_val),
            case=classify_shift(BitString(n, b_val)).case,
            state={word: amp / abs(amp)},
            probability=prob,
        )

    if policy.mode == "enumerate_all":
        return [branch(b_val) for b_val in range(1 << n)]
    if policy.mode == "forced":
        b_val = (policy.forced or {}).get(0, 0)
        if b_val not in branch_amp:
            raise ValueError(f"forced shift {b_val} out of range")
        return branch(b_val)
    rng = random.Random(policy.seed)
    return branch(rng.randrange(1 << n))


def correct(f: FunctionTable, b: BitString,
            model: CostModel | None = None,
            xi: float | None = None) -> Circuit:
    """Correction circuit mapping |x>|f(x xor b)> to |x>|f(x)>.

    Registers: input (n), output (m), plus lookup ancillas.  Case 1 is
    an empty circuit.  Otherwise: XOR the shift's low bits into the
    input conditioned on the (relabeled) leading bit, apply the
    half-size lookup O_g with its own optimized lambda, and uncompute
    the conditional XOR.  Case 4's relabeling only permutes which
    physical input qubits feed the lookup; no swaps are emitted.
    """
    model = model or _DEFAULT_MODEL
    if xi is None:
        xi = model.xi
    if b.width != f.n:
        raise ValueError("shift width must equal n")
    n, m = f.n, f.m
    bld = Builder(model)
    inp = bld.add_register("input", n, RegisterRole.INPUT)
    out = bld.add_register("output", m, RegisterRole.OUTPUT)
    sc = classify_shift(b)
    if sc.case == 1:
        return bld.finish(metadata={"kind": "correction", "case": 1,
                                    "n": n, "m": m})
    order = sc.perm if sc.perm is not None else tuple(range(n))
    lead = inp[order[0]]
    rest = [inp[order[j]] for j in range(1, n)]
    f_eff = permute_input_bits(f, sc.perm) if sc.perm is not None else f
    g = correction_table(f_eff, sc.b_eff)
    if n == 1:
        # g is a constant; no lookup needed.
        for j in range(m):
            if (g(0) >> (m - 1 - j)) & 1:
                bld.x(out[j])
        return bld.finish(metadata={"kind": "correction", "case": sc.case,
                                    "n": n, "m": m})
    cost_model = (model if model.counting_mode == "upper_bound"
                  else _DEFAULT_MODEL)
    lam, _ = optimize_qrom(n - 1, m, xi, cost_model)
    xor_bits = [rest[j - 1] for j in range(1, n) if sc.b_eff.bit(j)]
    for q in xor_bits:
        bld.cnot(lead, q)
    groups = emit_qroam(bld, g, lam, rest, out)
    for q in xor_bits:
        bld.cnot(lead, q)
    ancilla = groups.get("bank", []) + groups["flags"]
    if ancilla:
        bld.registers.append(Register("ancilla", ancilla[0], len(ancilla),
                                      RegisterRole.ANCILLA_CLEAN))
    if groups["anchor"]:
        bld.registers.append(Register("anchor", groups["anchor"][0], 1,
                                      RegisterRole.CONTROL))
    return bld.finish(metadata={"kind": "correction", "case": sc.case,
                                "n": n, "m": m, "lambda": lam})


@dataclass(frozen=True, slots=True)
class SerialQueryResult:
    b: BitString
    case: int
    output: int
    input_value: int


def serial_query(resource: QromResourceState, x: int,
                 forced_b: int | None = None, seed: int = 0,
                 model: CostModel | None = None) -> SerialQueryResult:
    """Consume one resource state and correct, returning f(x)."""
    model = model or CostModel(counting_mode="data_exact")
    if forced_b is None:
        outcome = consume(resource, x, MeasurementPolicy.sampled(seed))
    else:
        outcome = consume(resource, x, MeasurementPolicy.force({0: forced_b}))
    circuit = correct(resource.f, outcome.b, model)
    inp_reg = circuit.registers[0].qubits
    out_reg = circuit.registers[1].qubits
    (word,) = outcome.state  # basis for basis x
    f_shift = unpack_register(word, resource.out_qubits)
    input_word = (pack_register(x, inp_reg)
                  | pack_register(f_shift, out_reg))
    rec = run_auto(circuit, input_word, MeasurementPolicy.sampled(seed))
    final = rec.basis_word()
    x_out = unpack_register(final, inp_reg)
    f_out = unpack_register(final, out_reg)
    leftover = final & ~(pack_register((1 << len(inp_reg)) - 1, inp_reg)
                         | pack_register((1 << len(out_reg)) - 1, out_reg))
    if leftover:
        raise AssertionError("correction left ancilla qubits set")
    return SerialQueryResult(outcome.b, outcome.case, f_out, x_out)


def prepare_batch(f: FunctionTable, c: int,
                  plan: MassProductionPlan | None = None,
                  model: CostModel | None = None,
                  materialize: bool | None = None
                  ) -> tuple[list[QromResourceState], CostSummary]:
    """c resource-state copies plus the batch preparation cost.

    The cost charges one mass-produced batch (or one lookup at c=1).
    When materializing, each copy is assembled by simulating the
    lookup circuit on every basis address with measurement outcomes
    forced consistently, and checked against the ideal state.
    """
    model = model or _DEFAULT_MODEL
    if c < 1 or c & (c - 1):
        raise ValueError("c must be a power of two")
    if plan is None:
        if c == 1:
            lam, _ = optimize_qrom(f.n, f.m, model.xi, model)
            plan = MassProductionPlan(f.n, f.m, 0, (), lam)
        else:
            plan = optimize_plan(f.n, f.m, model.xi, c, model).plan
    if (plan.n, plan.m) != (f.n, f.m):
        raise ValueError("plan shape does not match the table")
    cost = cost_only(plan, model)
    if plan.t == 0 and c > plan.copies:
        cost = cost.scaled(c)
    if materialize is None:
        materialize = f.n + f.m <= MATERIALIZE_LIMIT
    if not materialize:
        return [QromResourceState(f) for _ in range(c)], cost
    sim_model = CostModel(counting_mode="data_exact")
    circuit = build_plain_qrom(f, model=sim_model)
    addr = circuit.registers[0].qubits
    out = circuit.registers[1].qubits
    state: State = {}
    amp = 2.0 ** (-f.n / 2)
    canon_addr = tuple(range(f.n))
    canon_out = tuple(range(f.n, f.n + f.m))
    for y in range(1 << f.n):
        rec = run_auto(circuit, pack_register(y, addr),
                       MeasurementPolicy.force({}))
        word = rec.basis_word()
        y_out = unpack_register(word, addr)
        f_out = unpack_register(word, out)
        if y_out != y or f_out != f(y):
            raise AssertionError(f"lookup simulation wrong at y={y}")
        state[pack_register(y, canon_addr)
              | pack_register(f_out, canon_out)] = amp + 0j
    copy = QromResourceState(f, state)
    if fidelity(state, QromResourceState.ideal(f).state) < 1 - 1e-9:
        raise AssertionError("materialized state strays from ideal")
    return [copy for _ in range(c)], cost


@dataclass(frozen=True, slots=True)
class AmortizationReport:
    n: int
    m: int
    c: int
    plan: MassProductionPlan
    prep_cost: CostSummary
    per_query_cost: CostSummary
    total_cost: CostSummary
    naive_cost: CostSummary
    ratio: float


def worst_correction_cost(n: int, m: int, xi: float,
                          model: CostModel = _DEFAULT_MODEL) -> CostSummary:
    """Cost ceiling over the four shift classes (cases 3 and 4 bind)."""
    lam, lookup = optimize_qrom(n - 1, m, xi, model)
    acc = CountAccumulator()
    acc.clifford = 2 * (n - 1)  # conditional XOR in and out
    return lookup + acc.summary(model, lookup.qubit_count)


def amortized_cost(f: FunctionTable, c: int, xi: float,
                   model: CostModel = _DEFAULT_MODEL) -> AmortizationReport:
    """Batch prep plus c worst-case serial queries vs c direct lookups."""
    if c < 1 or c & (c - 1):
        raise ValueError("c must be a power of two")
    n, m = f.n, f.m
    _, prep = prepare_batch(f, c, model=model, materialize=False)
    plan = (optimize_plan(n, m, xi, c, model).plan if c > 1
            else MassProductionPlan(n, m, 0, (),
                                    optimize_qrom(n, m, xi, model)[0]))
    acc = CountAccumulator()
    acc.clifford = n  # CNOT transversal onto the address half
    acc.measurement = n
    per_query = acc.summary(model, 0) + worst_correction_cost(n, m, xi, model)
    total = prep + per_query.scaled(c)
    _, single = optimize_qrom(n, m, xi, model)
    naive = single.scaled(c)
    ratio = _objective(total, xi) / _objective(naive, xi)
    return AmortizationReport(n, m, c, plan, prep, per_query, total, naive,
                              ratio)


def general_alpha_wrap_cost(n: int, m: int, lam: int,
                            model: CostModel = _DEFAULT_MODEL
                            ) -> CostSummary:
    """Overhead turning a zero-state query into a full XOR oracle.

    Look up into a fresh register, CNOT it onto the real output, then
    erase the copy with the measurement-based uncompute, whose cost
    does not scale with m.
    """
    acc = CountAccumulator()
    acc.clifford = m
    return acc.summary(model, 0) + measurement_uncompute_cost(n, lam, model)
