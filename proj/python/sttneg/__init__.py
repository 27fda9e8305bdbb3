"""Multi-agent spatiotemporal tube planning with freeze-and-replan negotiation."""

from ._core import (
    CannotReplan,
    Error,
    FunnelViolation,
    InfeasibleScenario,
    InvalidArgument,
    NegotiationDidNotTerminate,
    ParseError,
    Plan,
    Scenario,
    ValidationError,
    control_input,
    export_plot_data,
    load_plan,
    load_scenario,
    normalized_error,
    parse_scenario,
    plan,
    save_plan,
    simulate,
    verify,
)

__all__ = [
    "CannotReplan",
    "Error",
    "FunnelViolation",
    "InfeasibleScenario",
    "InvalidArgument",
    "NegotiationDidNotTerminate",
    "ParseError",
    "Plan",
    "Scenario",
    "ValidationError",
    "control_input",
    "export_plot_data",
    "load_plan",
    "load_scenario",
    "normalized_error",
    "parse_scenario",
    "plan",
    "save_plan",
    "simulate",
    "verify",
]
