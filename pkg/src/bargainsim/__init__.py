"""Curiosity-aware bilateral bargaining: agents, protocols, probes, experiments."""

from .agents import (
    Action,
    AgentSpec,
    CuriosityType,
    StrategyParams,
    decide,
    delta,
    planned_proposal,
    reserve_price,
    utility,
)
from .experiments import (
    BoundSweep,
    DistributionParams,
    Scenario,
    WelfareReport,
    draw_agent,
    run_fig2,
    run_scenario,
    sweep_bound,
    sweep_variants,
)
from .incentives import CaseTally, Theorem1Report, theorem1_probe, theorem2_check
from .protocol import (
    Declaration,
    Outcome,
    OutcomeKind,
    ProtocolConfig,
    RunResult,
    match_gate,
    run,
    run_alternating,
    run_mediated_rounds,
    settle_enforced,
)
from .records import (
    BargainingRecord,
    Ending,
    MessageLog,
    Role,
    ValidationResult,
    interleave,
    read_records,
    record_from_json,
    record_to_json,
    validate_record,
    write_records,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "AgentSpec",
    "BargainingRecord",
    "BoundSweep",
    "CaseTally",
    "CuriosityType",
    "Declaration",
    "DistributionParams",
    "Ending",
    "MessageLog",
    "Outcome",
    "OutcomeKind",
    "ProtocolConfig",
    "Role",
    "RunResult",
    "Scenario",
    "StrategyParams",
    "Theorem1Report",
    "ValidationResult",
    "WelfareReport",
    "decide",
    "delta",
    "draw_agent",
    "interleave",
    "match_gate",
    "planned_proposal",
    "read_records",
    "record_from_json",
    "record_to_json",
    "reserve_price",
    "run",
    "run_alternating",
    "run_fig2",
    "run_mediated_rounds",
    "run_scenario",
    "settle_enforced",
    "sweep_bound",
    "sweep_variants",
    "theorem1_probe",
    "theorem2_check",
    "utility",
    "validate_record",
    "write_records",
]
