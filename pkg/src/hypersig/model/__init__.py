"""Typed views over profile graphs."""

from hypersig.model.inputs import ValidationReport, Violation, read_input_schema, schema_to_json, single_value, validate_input
from hypersig.model.profiles import (
    closure,
    read_action_specification,
    read_agent_profile,
    read_artifact_profile,
    read_pddl_action,
    read_signifier,
    write_agent_profile,
    write_artifact_profile,
)
from hypersig.model.types import (
    ActionSpecification,
    AgentProfile,
    ArtifactProfile,
    Atom,
    Form,
    InputSchema,
    IntegerSchema,
    InteractionRecord,
    ModelError,
    ObjectSchema,
    PddlActionSpec,
    PddlParameter,
    Signifier,
    StringSchema,
    Workspace,
)

__all__ = [
    "ActionSpecification",
    "AgentProfile",
    "ArtifactProfile",
    "Atom",
    "Form",
    "InputSchema",
    "IntegerSchema",
    "InteractionRecord",
    "ModelError",
    "ObjectSchema",
    "PddlActionSpec",
    "PddlParameter",
    "Signifier",
    "StringSchema",
    "ValidationReport",
    "Violation",
    "Workspace",
    "closure",
    "read_action_specification",
    "read_agent_profile",
    "read_artifact_profile",
    "read_input_schema",
    "read_pddl_action",
    "read_signifier",
    "schema_to_json",
    "single_value",
    "validate_input",
    "write_agent_profile",
    "write_artifact_profile",
]
