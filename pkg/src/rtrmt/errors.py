"""Exception hierarchy shared across the engine."""


class RtrmtError(Exception):
    """Base class for all engine errors."""

    code = "error"


class ParseError(RtrmtError):
    code = "parse_error"


class ValidationError(RtrmtError):
    code = "validation_error"


class UnknownNode(RtrmtError):
    code = "unknown_node"


class UnknownEdge(RtrmtError):
    code = "unknown_edge"


class NotSwitchable(RtrmtError):
    code = "not_switchable"


class EdgeFaulted(RtrmtError):
    code = "edge_faulted"


class MonotonicityError(RtrmtError):
    code = "monotonicity_error"


class DateOutOfRange(RtrmtError):
    code = "date_out_of_range"


class OutOfRange(RtrmtError):
    code = "out_of_range"


class NotReciprocal(RtrmtError):
    code = "not_reciprocal"


class NonPositiveEntry(RtrmtError):
    code = "non_positive_entry"


class NoConvergence(RtrmtError):
    code = "no_convergence"


class InconsistentJudgments(RtrmtError):
    """Pairwise matrix whose consistency ratio exceeds the policy limit."""

    code = "inconsistent_judgments"


class EmptyCandidateSet(RtrmtError):
    code = "empty_candidate_set"


class Unreachable(RtrmtError):
    code = "unreachable"


class AllTasksDeferred(RtrmtError):
    code = "all_tasks_deferred"


class InvalidTransition(RtrmtError):
    code = "invalid_transition"


class UnknownRoute(RtrmtError):
    code = "unknown_route"


class NoFeasiblePlan(RtrmtError):
    code = "no_feasible_plan"


class InvalidStageTransition(RtrmtError):
    code = "invalid_stage_transition"


class UnknownAsset(RtrmtError):
    code = "unknown_asset"


class ConfigError(RtrmtError):
    code = "config_error"


class IoError(RtrmtError):
    code = "io_error"


class SchemaVersionMismatch(RtrmtError):
    code = "schema_version_mismatch"
