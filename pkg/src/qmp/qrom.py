"""Lookup-circuit builders and their closed-form cost kernels.

Two constructions are provided:

  - plain QROM: unary iteration over all 2^n addresses, XORing the data
    word for each address into the output register;
  - modified clean-ancilla SelectSwap QROAM: a controlled-swap network S
    routes the output register to bank position l, a block lookup T
    writes one data word per bank position for block index h, an H layer
    plus measurement-based S^dagger return every ancilla to |0> with
    Clifford gates only, and a final H layer fixes the output basis.

Count conventions (fixed; the closed forms below must match the builders
gate for gate, which is enforced by tests):

  - Address iteration uses a unary-iteration tree with one flag qubit
    per depth.  An AND is one Toffoli to compute and one X-basis
    measurement plus one classically controlled CZ to uncompute.
  - With a known-|1> anchor wire at the root, a node's second child is
    reached by a single CNOT (flag flips between root&w and root&~w).
    With an arbitrary control wire at the root this shortcut is invalid
    at depth 1, so both depth-1 children are computed by explicit ANDs
    (X-conjugated for the negated polarity).
  - Plain QROM roots the tree at an X-prepped anchor: 2^n - 1 Toffolis
    uncontrolled; an external control replaces the anchor and forces the
    depth-1 block form, giving 2^n (overhead 1 for n >= 2).
  - QROAM's T always uses the depth-1 block form (its shape is then
    identical for controlled and uncontrolled variants): 2^a Toffolis
    over a = n - log2(lambda) address bits, so the circuit totals
    ceil(2^n / lambda) + m(lambda - 1) Toffolis.
  - Data loading: upper_bound mode emits one CNOT per output bit per
    address; data_exact emits CNOTs only for set bits.
"""

from __future__ import annotations

from dataclasses import dataclass

from .builder import Builder
from .ir import Circuit, CostModel, CostSummary, CountAccumulator, Register, \
    RegisterRole, TAG_LOOKUP
from .tables import FunctionTable


@dataclass(frozen=True, slots=True)
class QroamParams:
    n: int
    m: int
    lam: int
    controlled: bool = False

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be >= 1")
        if self.lam < 1 or self.lam & (self.lam - 1):
            raise ValueError("lambda must be a power of two")
        if self.lam > 1 and self.lam > 1 << (self.n - 1):
            # The swap network needs at least one block-select bit.
            raise ValueError("lambda must be <= 2^(n-1)")

    @property
    def block_bits(self) -> int:
        return self.n - (self.lam.bit_length() - 1)


# ---------------------------------------------------------------------------
# Unary-iteration trees.


def _xor_tree(b: Builder, root: int, addr: list[int], flags: list[int],
              prefix: int, leaf) -> None:
    """Iterate all completions of `prefix`; root must hold root&(bits so far).

    Uses the CNOT shortcut between the two children, valid because the
    tree is rooted at a known-|1> anchor.
    """
    if not addr:
        leaf(prefix, root)
        return
    w, flag = addr[0], flags[0]
    b.toffoli(root, w, flag)
    _xor_tree(b, flag, addr[1:], flags[1:], (prefix << 1) | 1, leaf)
    b.cnot(root, flag)
    _xor_tree(b, flag, addr[1:], flags[1:], prefix << 1, leaf)
    b.cnot(root, flag)
    b.and_uncompute(root, w, flag)


def _block_tree(b: Builder, root: int, addr: list[int], flags: list[int],
                leaf) -> None:
    """Iterate all addresses with an arbitrary control wire at the root.

    Depth 1 computes both polarities by explicit ANDs; deeper levels use
    the XOR shortcut (their roots are genuine flag qubits).
    """
    w, flag = addr[0], flags[0]
    b.toffoli(root, w, flag)
    _xor_tree(b, flag, addr[1:], flags[1:], 1, leaf)
    b.and_uncompute(root, w, flag)
    b.x(w)
    b.toffoli(root, w, flag)
    _xor_tree(b, flag, addr[1:], flags[1:], 0, leaf)
    b.and_uncompute(root, w, flag)
    b.x(w)


# ---------------------------------------------------------------------------
# Emitters (shared by standalone wrappers and the mass-production builder).


def emit_plain_qrom(b: Builder, f: FunctionTable, addr: list[int],
                    out: list[int], control: int | None = None) -> dict:
    """XOR f(addr) into out; returns the internal wire groups used."""
    n, m = f.n, f.m
    assert len(addr) == n and len(out) == m
    prev_tag, b.tag = b.tag, TAG_LOOKUP
    groups: dict[str, list[int]] = {"flags": [], "anchor": []}
    try:
        if b.counting:
            params = QroamParams(n, m, 1, controlled=control is not None)
            internals = b.alloc(_internal_width(params))
            b.add_summary(qroam_cost(params, b.model, table=f))
            b.free(internals)
            return groups

        def leaf(value: int, wire: int) -> None:
            _write_word(b, f(value), wire, out)

        if control is None and n == 1:
            b.x(addr[0])
            _write_word(b, f(0), addr[0], out)
            b.x(addr[0])
            _write_word(b, f(1), addr[0], out)
        elif control is None:
            flags = b.alloc(n)
            anchor = b.alloc(1)[0]
            groups = {"flags": flags, "anchor": [anchor]}
            b.x(anchor)
            _xor_tree(b, anchor, addr, flags, 0, leaf)
            b.x(anchor)
            b.free(flags + [anchor])
        else:
            flags = b.alloc(n)
            groups = {"flags": flags, "anchor": []}
            _block_tree(b, control, addr, flags, leaf)
            b.free(flags)
        return groups
    finally:
        b.tag = prev_tag


def _write_word(b: Builder, word: int, wire: int, out: list[int]) -> None:
    m = len(out)
    for i in range(m):
        if b.model.counting_mode == "upper_bound" or (word >> (m - 1 - i)) & 1:
            b.cnot(wire, out[i])


def emit_qroam(b: Builder, f: FunctionTable, lam: int, addr: list[int],
               out: list[int], control: int | None = None) -> dict:
    """XOR f(addr) into out via the modified SelectSwap construction."""
    if lam == 1:
        return emit_plain_qrom(b, f, addr, out, control)
    n, m = f.n, f.m
    params = QroamParams(n, m, lam, controlled=control is not None)
    j = lam.bit_length() - 1
    a = params.block_bits
    assert len(addr) == n and len(out) == m
    prev_tag, b.tag = b.tag, TAG_LOOKUP
    try:
        if b.counting:
            internals = b.alloc(_internal_width(params))
            b.add_summary(qroam_cost(params, b.model, table=f))
            b.free(internals)
            return {"bank": [], "flags": [], "anchor": []}

        high, low = addr[:a], addr[a:]
        bank = b.alloc((lam - 1) * m)
        flags = b.alloc(a)
        anchor: list[int] = []
        if control is None:
            anchor = b.alloc(1)
        positions = [out] + [bank[p * m:(p + 1) * m] for p in range(lam - 1)]

        # Bank preparation: every non-output position starts in |+>^m.
        for q in bank:
            b.h(q)
        # S: route the output register to position l, doubling per layer.
        for i in range(j):
            c = low[j - 1 - i]
            for q in range(1 << i):
                for bit in range(m):
                    b.cswap(c, positions[q][bit], positions[q + (1 << i)][bit])

        # T: block lookup over the high address bits; for block value v,
        # position p receives f(v * lambda + p).  The |+> positions absorb
        # the XORs unchanged.
        def leaf(value: int, wire: int) -> None:
            for p in range(lam):
                _write_word(b, f((value << j) | p), wire, positions[p])

        root = control if control is not None else anchor[0]
        if control is None:
            b.x(root)
        _block_tree(b, root, high, flags, leaf)
        if control is None:
            b.x(root)

        # H layer on every position, then measurement-based S^dagger:
        # per pair (keep A, drop B) and bit, CNOT B->A, X-measure B, and a
        # CZ(c, A) correction when the outcome is odd.
        for p in range(lam):
            for bit in range(m):
                b.h(positions[p][bit])
        for i in reversed(range(j)):
            c = low[j - 1 - i]
            for q in range(1 << i):
                keep, drop = positions[q], positions[q + (1 << i)]
                for bit in range(m):
                    b.cnot(drop[bit], keep[bit])
                    rec = b.measure_x(drop[bit])
                    b.classical_cz(rec, c, keep[bit])
        for bit in out:
            b.h(bit)

        b.free(bank + flags + anchor)
        return {"bank": bank, "flags": flags, "anchor": anchor}
    finally:
        b.tag = prev_tag


# ---------------------------------------------------------------------------
# Closed-form costs.


def _internal_width(params: QroamParams) -> int:
    """Scratch wires a lookup allocates beyond address/output/control."""
    n, lam = params.n, params.lam
    if lam == 1:
        if n == 1:
            return 1 if params.controlled else 0
        return n if params.controlled else n + 1
    return (lam - 1) * params.m + params.block_bits + (0 if params.controlled else 1)


def qroam_width(params: QroamParams) -> int:
    """Total standalone circuit width including address, output, control."""
    return params.n + params.m + _internal_width(params) + (1 if params.controlled else 0)


def _data_cliffords(params: QroamParams, model: CostModel,
                    table: FunctionTable | None) -> int:
    if model.counting_mode == "upper_bound":
        return (1 << params.n) * params.m
    if table is None:
        raise ValueError("data_exact costing requires the function table")
    return sum(table(x).bit_count() for x in range(1 << params.n))


def qroam_cost(params: QroamParams, model: CostModel,
               table: FunctionTable | None = None) -> CostSummary:
    """Closed-form counts mirroring the builders gate for gate."""
    n, m, lam = params.n, params.m, params.lam
    acc = CountAccumulator()
    data = _data_cliffords(params, model, table)
    if lam == 1:
        if not params.controlled and n == 1:
            acc.clifford = 2 + data
        elif not params.controlled:
            nodes = (1 << n) - 1
            acc.toffoli = nodes
            acc.measurement = nodes
            acc.clifford = 2 + 2 * nodes + nodes + data
        else:
            acc.toffoli = 1 << n
            acc.measurement = 1 << n
            acc.clifford = 2 + 2 * ((1 << n) - 2) + (1 << n) + data
    else:
        a = params.block_bits
        blocks = 1 << a
        bank = (lam - 1) * m
        acc.toffoli = blocks + bank * model.cswap_toffolis
        acc.measurement = blocks + bank
        acc.clifford = (
            2 * lam * m                       # bank prep + post-T layer + final
            + bank * model.cswap_cnots        # S swap network
            + (0 if params.controlled else 2)  # anchor X prep/restore
            + 2                                # depth-1 polarity conjugation
            + 2 * (blocks - 2)                 # XOR shortcuts below depth 1
            + blocks                           # AND-uncompute corrections
            + data
            + bank                             # S^dagger copy CNOTs
            + bank                             # S^dagger CZ corrections
        )
    return acc.summary(model, qroam_width(params))


def measurement_uncompute_cost(n: int, lam: int, model: CostModel) -> CostSummary:
    """Cost of erasing a lookup output by X-measurement plus phase fixup.

    The output register is measured in the X basis and the induced phase
    is removed by a single-bit phase lookup over the n address bits,
    itself implemented with a swap network of width lam: Toffoli count
    2^n / lam + lam.  Clifford constant convention: 3 tree Cliffords per
    block, one phase correction per address, 3 Cliffords per swap-layer
    wire.
    """
    if lam < 1 or lam & (lam - 1) or lam > 1 << n:
        raise ValueError("lambda must be a power of two dividing 2^n")
    blocks = (1 << n) // lam
    acc = CountAccumulator()
    acc.toffoli = blocks + lam
    acc.measurement = blocks + lam
    acc.clifford = 3 * blocks + (1 << n) + 3 * lam
    width = n + lam + max(n - (lam.bit_length() - 1), 1)
    return acc.summary(model, width)


# ---------------------------------------------------------------------------
# Standalone circuit wrappers.


def _wrap(f: FunctionTable, lam: int, controlled: bool,
          model: CostModel) -> Circuit:
    params = QroamParams(f.n, f.m, lam, controlled)
    b = Builder(model)
    control = None
    if controlled:
        control = b.add_register("ctl", 1, RegisterRole.CONTROL)[0]
    a = params.block_bits
    if lam > 1:
        h = b.add_register("h", a, RegisterRole.INPUT)
        low = b.add_register("l", lam.bit_length() - 1, RegisterRole.INPUT)
        addr = h + low
    else:
        addr = b.add_register("addr", f.n, RegisterRole.INPUT)
    out = b.add_register("out", f.m, RegisterRole.OUTPUT)
    groups = emit_qroam(b, f, lam, addr, out, control)
    ancilla = groups.get("bank", []) + groups["flags"]
    if ancilla:
        b.registers.append(Register("ancilla", ancilla[0], len(ancilla),
                                    RegisterRole.ANCILLA_CLEAN))
    if groups["anchor"]:
        b.registers.append(Register("anchor", groups["anchor"][0], 1,
                                    RegisterRole.CONTROL))
    circuit = b.finish(metadata={
        "kind": "plain" if lam == 1 else "qroam",
        "n": f.n, "m": f.m, "lambda": lam, "controlled": controlled,
    })
    return circuit


def build_plain_qrom(f: FunctionTable, controlled: bool = False,
                     model: CostModel | None = None) -> Circuit:
    return _wrap(f, 1, controlled, model or CostModel())


def build_qroam_modified(f: FunctionTable, lam: int,
                         model: CostModel | None = None) -> Circuit:
    return _wrap(f, lam, False, model or CostModel())


def build_qroam_controlled(f: FunctionTable, lam: int,
                           model: CostModel | None = None) -> Circuit:
    return _wrap(f, lam, True, model or CostModel())
