"""Command-line entry point.

Subcommands: build, simulate, verify, cost, optimize, sweep,
resource-demo, apps, selftest.  Output is deterministic: JSON floats
carry 17 significant digits, CSV floats 6; rows and keys are emitted
in fixed order.  Exit codes: 0 success, 1 usage error, 2 verification
failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import random
import sys

from .calculators import (AmpAmpParams, ChemistryModel,
                          alias_sampling_prep_cost, amp_amp_cost,
                          kretschmer_counts, max_copies_cost,
                          mps_prep_cost, p_r, parallel_qpe_compare,
                          sparse_fraction_curve)
from .ir import CostModel, CostSummary, count_costs, to_text, validate
from .massprod import MassProductionPlan, build_mass_production, cost_only
from .optimize import (SweepRow, SweepSpec, fraction_non_lookup,
                       optimize_plan, optimize_qrom, run_sweep)
from .qrom import (QroamParams, build_plain_qrom, build_qroam_controlled,
                   build_qroam_modified, qroam_cost)
from .resource import (QromResourceState, amortized_cost, consume,
                       prepare_batch, serial_query)
from .sim import MeasurementPolicy, pack_register, run_auto, unpack_register
from .tables import FunctionTable, load_table, random_table


class UsageError(Exception):
    pass


class VerificationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # Usage problems must exit 1, not argparse's default 2.
    def error(self, message):
        raise UsageError(message)


def _fmt_json(obj, indent: int = 0) -> str:
    pad, pad_in = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f"{pad_in}{json.dumps(str(k))}: {_fmt_json(v, indent + 1)}"
            for k, v in obj.items())
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = ",\n".join(f"{pad_in}{_fmt_json(v, indent + 1)}"
                           for v in obj)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return format(obj, ".17g")
    return json.dumps(obj)


def _print_json(obj) -> None:
    print(_fmt_json(obj))


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return format(value, ".6g")
    if isinstance(value, tuple):
        return "-".join(str(v) for v in value)
    return str(value)


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_csv_cell(v) for v in row) + "\n")


def _model_from_args(args) -> CostModel:
    return CostModel(
        xi=getattr(args, "xi", 1.0),
        toffoli_t_count=getattr(args, "toffoli_t", 4),
        toffoli_clifford_overhead=getattr(args, "toffoli_cliff", 11),
        counting_mode=getattr(args, "counting_mode", "upper_bound"),
    )


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--xi", type=float, default=1.0)
    p.add_argument("--toffoli-t", type=int, default=4, dest="toffoli_t")
    p.add_argument("--toffoli-cliff", type=int, default=11,
                   dest="toffoli_cliff")
    p.add_argument("--counting-mode", default="upper_bound",
                   choices=["upper_bound", "data_exact"],
                   dest="counting_mode")


def _table_from_args(args) -> FunctionTable:
    if getattr(args, "table", None):
        return load_table(args.table)
    if args.n is None or args.m is None:
        raise UsageError("need --table or both --n and --m")
    return random_table(args.n, args.m, seed=args.seed)


def _parse_schedule(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(k) for k in text.split("-") if k != "")
    except ValueError as exc:
        raise UsageError(f"bad k-schedule {text!r}") from exc


def _summary_dict(summary: CostSummary) -> dict:
    return dataclasses.asdict(summary)


def _build_circuit(args, model: CostModel):
    f = _table_from_args(args)
    if args.kind == "plain":
        return build_plain_qrom(f, controlled=args.controlled, model=model), f
    if args.kind == "qroam":
        build = (build_qroam_controlled if args.controlled
                 else build_qroam_modified)
        return build(f, args.lam, model=model), f
    if args.kind == "massprod":
        ks = _parse_schedule(args.k_schedule)
        plan = MassProductionPlan(f.n, f.m, len(ks), ks, args.lam)
        return build_mass_production(f, plan, model), f
    raise UsageError(f"unknown kind {args.kind!r}")


def _cmd_build(args) -> int:
    model = _model_from_args(args)
    circuit, _ = _build_circuit(args, model)
    problems = validate(circuit)
    if problems:
        raise VerificationError("; ".join(problems))
    if args.emit:
        with open(args.emit, "w", encoding="utf-8") as fh:
            fh.write(to_text(circuit))
    report = {
        "width": circuit.width,
        "gates": len(circuit.gates),
        "registers": [[r.name, r.size, r.role.value]
                      for r in circuit.registers],
        "metadata": circuit.metadata,
        "cost": _summary_dict(count_costs(circuit, model)),
    }
    _print_json(report)
    return 0


def _cmd_simulate(args) -> int:
    model = _model_from_args(args)
    if model.counting_mode != "data_exact":
        model = CostModel(xi=model.xi, counting_mode="data_exact")
    circuit, f = _build_circuit(args, model)
    inputs = [int(x, 0) for x in args.input.split(",")]
    word = 0
    in_regs = [r for r in circuit.registers if r.role.value == "input"]
    out_regs = [r for r in circuit.registers if r.role.value == "output"]
    addr_groups = []
    if args.kind == "massprod":
        addr_groups = [circuit.register(f"addr{i}").qubits
                       for i in range(len(out_regs))]
    else:
        addr_groups = [tuple(q for r in in_regs for q in r.qubits)]
    if len(inputs) != len(addr_groups):
        raise UsageError(f"expected {len(addr_groups)} inputs")
    for val, qubits in zip(inputs, addr_groups):
        word |= pack_register(val, qubits)
    rec = run_auto(circuit, word, MeasurementPolicy.sampled(args.seed))
    final = rec.basis_word()
    outputs = [unpack_register(final, r.qubits) for r in out_regs]
    _print_json({
        "inputs": inputs,
        "outputs": outputs,
        "expected": [f(x) for x in inputs],
        "branch_probability": rec.probability,
    })
    return 0 if outputs == [f(x) for x in inputs] else 2


def _cmd_verify(args) -> int:
    model = CostModel(counting_mode="data_exact")
    ks = _parse_schedule(args.k_schedule) if args.k_schedule else ()
    f = _table_from_args(args)
    plan = MassProductionPlan(f.n, f.m, len(ks), ks, args.lam)
    circuit = build_mass_production(f, plan, model)
    rng = random.Random(args.seed)
    groups = [(circuit.register(f"addr{i}").qubits,
               circuit.register(f"out{i}").qubits)
              for i in range(plan.copies)]
    total = 1 << (f.n * plan.copies)
    checks = min(args.samples, total)
    exhaustive = total <= args.samples
    bad = 0
    for idx in range(checks):
        if exhaustive:
            xs = [(idx >> (f.n * i)) & ((1 << f.n) - 1)
                  for i in range(plan.copies)]
        else:
            xs = [rng.randrange(1 << f.n) for _ in range(plan.copies)]
        word = 0
        for x, (addr, _) in zip(xs, groups):
            word |= pack_register(x, addr)
        rec = run_auto(circuit, word,
                       MeasurementPolicy.sampled(rng.randrange(1 << 30)))
        final = rec.basis_word()
        for x, (addr, out) in zip(xs, groups):
            if (unpack_register(final, addr) != x
                    or unpack_register(final, out) != f(x)):
                bad += 1
    _print_json({"copies": plan.copies, "checked": checks,
                 "exhaustive": exhaustive, "mismatches": bad})
    return 0 if bad == 0 else 2


def _cmd_cost(args) -> int:
    model = _model_from_args(args)
    if args.kind == "massprod":
        ks = _parse_schedule(args.k_schedule)
        plan = MassProductionPlan(args.n, args.m, len(ks), ks, args.lam)
        total, tagged = cost_only(plan, model, by_tag=True)
        report = {"plan": plan.as_dict(),
                  "total": _summary_dict(total),
                  "by_tag": {tag: _summary_dict(s)
                             for tag, s in sorted(tagged.items())}}
    else:
        params = QroamParams(args.n, args.m, args.lam,
                             controlled=args.controlled)
        report = {"params": {"n": args.n, "m": args.m, "lambda": args.lam,
                             "controlled": args.controlled},
                  "total": _summary_dict(qroam_cost(params, model))}
    _print_json(report)
    return 0


def _cmd_optimize(args) -> int:
    model = _model_from_args(args)
    res = optimize_plan(args.n, args.m, args.xi, args.r, model)
    _print_json({
        "plan": res.plan.as_dict(),
        "cost_mp": _summary_dict(res.cost_mp),
        "cost_naive": _summary_dict(res.cost_naive),
        "improvement": res.improvement,
        "fraction_non_lookup": fraction_non_lookup(res.plan, model,
                                                   args.xi),
    })
    return 0


def _cmd_sweep(args) -> int:
    model = _model_from_args(args)
    with open(args.spec, encoding="utf-8") as fh:
        spec = SweepSpec.from_dict(json.load(fh))
    rows = run_sweep(spec, model)
    _write_csv(args.out, SweepRow.FIELDS,
               [[getattr(r, name) for name in SweepRow.FIELDS]
                for r in rows])
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_resource_demo(args) -> int:
    model = _model_from_args(args)
    f = random_table(args.n, args.m, seed=args.seed)
    report = amortized_cost(f, args.c, args.xi, model)
    branches = {"checked": 0, "mismatches": 0}
    if args.n + args.m <= 12:
        state = QromResourceState.ideal(f)
        rng = random.Random(args.seed)
        for _ in range(args.branches):
            x = rng.randrange(1 << args.n)
            b = rng.randrange(1 << args.n)
            r = serial_query(state, x, forced_b=b)
            branches["checked"] += 1
            if r.output != f(x) or r.input_value != x:
                branches["mismatches"] += 1
    _print_json({
        "n": args.n, "m": args.m, "c": args.c,
        "plan": report.plan.as_dict(),
        "prep_cost": _summary_dict(report.prep_cost),
        "per_query_cost": _summary_dict(report.per_query_cost),
        "total_cost": _summary_dict(report.total_cost),
        "naive_cost": _summary_dict(report.naive_cost),
        "ratio": report.ratio,
        "branch_check": branches,
    })
    return 0 if branches["mismatches"] == 0 else 2


def _cmd_apps(args) -> int:
    model = _model_from_args(args)
    if args.app == "ampamp":
        rep = amp_amp_cost(
            AmpAmpParams(p=args.p, r=args.r, delta=args.delta),
            args.n, args.m, args.xi, model=model)
        _print_json({"queries_single": rep.queries_single,
                     "queries_batched": rep.queries_batched,
                     "cost_single": rep.cost_single,
                     "cost_batched": rep.cost_batched,
                     "speedup": rep.speedup,
                     "saturated": rep.saturated})
    elif args.app == "alias":
        total, lookup = alias_sampling_prep_cost(args.N, args.mu, args.xi,
                                                 model)
        _print_json({"total": _summary_dict(total),
                     "lookup": _summary_dict(lookup)})
    elif args.app == "sparse":
        chem = ChemistryModel(args.fit_a, args.fit_b, mu=args.mu,
                              xi=args.xi)
        rows = sparse_fraction_curve(
            chem, [float(v) for v in args.n_orb.split(",")], model)
        if args.out:
            header = ("n_orb", "n_terms", "input_bits",
                      "fraction_non_lookup")
            _write_csv(args.out, header,
                       [[r.n_orb, r.n_terms, r.input_bits,
                         r.fraction_non_lookup] for r in rows])
        _print_json([{"n_orb": r.n_orb, "n_terms": r.n_terms,
                      "input_bits": r.input_bits,
                      "fraction_non_lookup": r.fraction_non_lookup}
                     for r in rows])
    elif args.app == "qpe":
        chem = ChemistryModel(args.fit_a, args.fit_b)
        cmp_ = parallel_qpe_compare(chem, args.r, args.mode, args.n_orb)
        _print_json({"batched": cmp_.batched, "direct": cmp_.direct,
                     "ratio": cmp_.ratio})
    elif args.app == "kretschmer":
        _print_json({"gates": kretschmer_counts(args.n, args.eps,
                                                args.kind)})
    elif args.app == "mps":
        _print_json({"gates": mps_prep_cost(args.sites, args.chi,
                                            args.eps)})
    else:
        raise UsageError(f"unknown app {args.app!r}")
    return 0


def _selftest_massprod(quick: bool) -> tuple[int, int]:
    model = CostModel(counting_mode="data_exact")
    rng = random.Random(11)
    plans = [(3, 1, 1, (1,), 1), (4, 1, 1, (2,), 2)]
    if not quick:
        plans += [(4, 2, 1, (1,), 2), (5, 1, 2, (1, 1), 2)]
    bad = checked = 0
    for n, m, t, ks, lam in plans:
        f = random_table(n, m, seed=rng.randrange(1 << 30))
        plan = MassProductionPlan(n, m, t, ks, lam)
        circuit = build_mass_production(f, plan, model)
        groups = [(circuit.register(f"addr{i}").qubits,
                   circuit.register(f"out{i}").qubits)
                  for i in range(plan.copies)]
        for _ in range(8 if quick else 20):
            xs = [rng.randrange(1 << n) for _ in range(plan.copies)]
            word = 0
            for x, (addr, _) in zip(xs, groups):
                word |= pack_register(x, addr)
            rec = run_auto(circuit, word,
                           MeasurementPolicy.sampled(rng.randrange(1 << 30)))
            final = rec.basis_word()
            checked += 1
            for x, (addr, out) in zip(xs, groups):
                if (unpack_register(final, addr) != x
                        or unpack_register(final, out) != f(x)):
                    bad += 1
    return checked, bad


def _selftest_qroam(quick: bool) -> tuple[int, int]:
    model = CostModel(counting_mode="data_exact")
    rng = random.Random(13)
    sizes = [(3, 2, 2), (4, 1, 2)] if quick else \
        [(3, 2, 2), (4, 1, 2), (4, 2, 4), (5, 2, 4)]
    bad = checked = 0
    for n, m, lam in sizes:
        f = random_table(n, m, seed=rng.randrange(1 << 30))
        circuit = build_qroam_modified(f, lam, model=model)
        addr = tuple(q for r in circuit.registers
                     if r.role.value == "input" for q in r.qubits)
        out = circuit.register("out").qubits
        for x in range(1 << n):
            rec = run_auto(circuit, pack_register(x, addr),
                           MeasurementPolicy.sampled(rng.randrange(1 << 30)))
            final = rec.basis_word()
            checked += 1
            if (unpack_register(final, addr) != x
                    or unpack_register(final, out) != f(x)
                    or final & ~(pack_register((1 << n) - 1, addr)
                                 | pack_register((1 << m) - 1, out))):
                bad += 1
    return checked, bad


def _selftest_resource(quick: bool) -> tuple[int, int]:
    rng = random.Random(17)
    ns = (2, 3) if quick else (2, 3, 4)
    bad = checked = 0
    for n in ns:
        f = random_table(n, 2, seed=rng.randrange(1 << 30))
        state = QromResourceState.ideal(f)
        for x in range(1 << n):
            for b in range(1 << n):
                r = serial_query(state, x, forced_b=b)
                checked += 1
                if r.output != f(x) or r.input_value != x:
                    bad += 1
    return checked, bad


def _selftest_mirror(quick: bool) -> tuple[int, int]:
    model = CostModel()
    plans = [(5, 1, 1, (1,), 1), (6, 2, 1, (2,), 2)]
    if not quick:
        plans += [(6, 1, 2, (1, 1), 2), (7, 2, 2, (2, 1), 2),
                  (8, 2, 2, (1, 2), 4)]
    bad = checked = 0
    for n, m, t, ks, lam in plans:
        plan = MassProductionPlan(n, m, t, ks, lam)
        f = random_table(n, m, seed=n)
        got = count_costs(build_mass_production(f, plan, model), model)
        checked += 1
        if got != cost_only(plan, model):
            bad += 1
    return checked, bad


def _cmd_selftest(args) -> int:
    suites = {
        "massprod_semantics": _selftest_massprod,
        "qroam_semantics": _selftest_qroam,
        "resource_branches": _selftest_resource,
        "count_mirror": _selftest_mirror,
    }
    failed = False
    rows = {}
    for name, fn in suites.items():
        checked, bad = fn(args.quick)
        rows[name] = {"checked": checked, "mismatches": bad,
                      "status": "pass" if bad == 0 else "FAIL"}
        failed = failed or bad > 0
    _print_json(rows)
    return 2 if failed else 0


def _make_parser() -> _Parser:
    parser = _Parser(prog="qmp")
    parser.add_argument("--json-errors", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, table=True):
        if table:
            p.add_argument("--n", type=int, default=None)
            p.add_argument("--m", type=int, default=None)
            p.add_argument("--table", default=None)
            p.add_argument("--seed", type=int, default=0)
        _add_model_args(p)

    for name in ("build", "simulate"):
        p = sub.add_parser(name)
        p.add_argument("--kind", default="qroam",
                       choices=["plain", "qroam", "massprod"])
        p.add_argument("--lambda", type=int, default=1, dest="lam")
        p.add_argument("--controlled", action="store_true")
        p.add_argument("--t", type=int, default=0)
        p.add_argument("--k-schedule", default="", dest="k_schedule")
        common(p)
        if name == "build":
            p.add_argument("--emit", default=None)
        else:
            p.add_argument("--input", required=True)

    p = sub.add_parser("verify")
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--k-schedule", default="1", dest="k_schedule")
    p.add_argument("--lambda", type=int, default=1, dest="lam")
    p.add_argument("--samples", type=int, default=64)
    common(p)

    p = sub.add_parser("cost")
    p.add_argument("--kind", default="qroam",
                   choices=["plain", "qroam", "massprod"])
    p.add_argument("--lambda", type=int, default=1, dest="lam")
    p.add_argument("--controlled", action="store_true")
    p.add_argument("--k-schedule", default="", dest="k_schedule")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    _add_model_args(p)

    p = sub.add_parser("optimize")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    _add_model_args(p)

    p = sub.add_parser("sweep")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    _add_model_args(p)

    p = sub.add_parser("resource-demo")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--branches", type=int, default=32)
    _add_model_args(p)

    p = sub.add_parser("apps")
    appsub = p.add_subparsers(dest="app", required=True)
    a = appsub.add_parser("ampamp")
    a.add_argument("--p", type=float, required=True)
    a.add_argument("--r", type=int, required=True)
    a.add_argument("--delta", type=float, default=1e-6)
    a.add_argument("--n", type=int, default=10)
    a.add_argument("--m", type=int, default=8)
    _add_model_args(a)
    a = appsub.add_parser("alias")
    a.add_argument("--N", type=int, required=True)
    a.add_argument("--mu", type=int, default=10)
    _add_model_args(a)
    a = appsub.add_parser("sparse")
    a.add_argument("--fit-a", type=float, required=True, dest="fit_a")
    a.add_argument("--fit-b", type=float, required=True, dest="fit_b")
    a.add_argument("--mu", type=int, default=10)
    a.add_argument("--n-orb", required=True, dest="n_orb")
    a.add_argument("--out", default=None)
    _add_model_args(a)
    a = appsub.add_parser("qpe")
    a.add_argument("--fit-a", type=float, default=1.0, dest="fit_a")
    a.add_argument("--fit-b", type=float, default=2.0, dest="fit_b")
    a.add_argument("--r", type=float, required=True)
    a.add_argument("--mode", choices=["sparse", "thc"], required=True)
    a.add_argument("--n-orb", type=float, required=True, dest="n_orb")
    _add_model_args(a)
    a = appsub.add_parser("kretschmer")
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--eps", type=float, required=True)
    a.add_argument("--kind", choices=["state", "unitary"], required=True)
    _add_model_args(a)
    a = appsub.add_parser("mps")
    a.add_argument("--sites", type=int, required=True)
    a.add_argument("--chi", type=int, required=True)
    a.add_argument("--eps", type=float, default=1e-3)
    _add_model_args(a)

    p = sub.add_parser("selftest")
    p.add_argument("--quick", action="store_true")
    return parser


_COMMANDS = {
    "build": _cmd_build,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
    "cost": _cmd_cost,
    "optimize": _cmd_optimize,
    "sweep": _cmd_sweep,
    "resource-demo": _cmd_resource_demo,
    "apps": _cmd_apps,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    json_errors = "--json-errors" in argv
    parser = _make_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        _emit_error("usage", str(exc), json_errors)
        return 1
    except VerificationError as exc:
        _emit_error("verification", str(exc), json_errors)
        return 2
    except (ValueError, OSError, KeyError) as exc:
        _emit_error("error", str(exc), json_errors)
        return 1


def _emit_error(kind: str, message: str, as_json: bool) -> None:
    if as_json:
        print(json.dumps({"error": kind, "message": message}),
              file=sys.stderr)
    else:
        print(f"qmp: {kind}: {message}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
