"""Lookup-circuit mass production: synthesis, costing, verification."""

from .ir import (Circuit, CostModel, CostSummary, Gate, GateKind, Register,
                 RegisterRole, TAG_FLOW, TAG_LOOKUP, concat, count_costs,
                 from_text, raw_counts, to_text, validate)
from .tables import (BitString, FunctionTable, GFamily, all_ones_table,
                     build_g_family, correction_table, load_table,
                     permute_input_bits, random_table, restrict_prefix,
                     save_table, shift_input)
from .builder import Builder
from .qrom import (QroamParams, build_plain_qrom, build_qroam_controlled,
                   build_qroam_modified, measurement_uncompute_cost,
                   qroam_cost, qroam_width)
from .sim import (MeasurementPolicy, RunRecord, fidelity, pack_register,
                  run, run_auto, run_basis, run_product, unpack_register)
from .massprod import (MassProductionPlan, RoutingState, build_advance,
                       build_mass_production, build_two_copy, cost_only,
                       emit_advance, plan_width, routing_states)
from .optimize import (OptimizationResult, SweepRow, SweepSpec,
                       fraction_non_lookup, lam_domain, optimize_plan,
                       optimize_qrom, run_sweep)
from .resource import (AmortizationReport, ConsumptionOutcome,
                       QromResourceState, ShiftClass, amortized_cost,
                       classify_shift, consume, correct,
                       general_alpha_wrap_cost, prepare_batch, serial_query,
                       worst_correction_cost)
from .calculators import (AmpAmpParams, AmpAmpReport, ChemistryModel,
                          QpeComparison, SparseRow, alias_sampling_prep_cost,
                          amp_amp_cost, kretschmer_counts, max_copies_cost,
                          max_copies_improvement_exponent, mps_prep_cost,
                          p_r, parallel_qpe_compare, sparse_fraction_curve)

__version__ = "0.1.0"
