"""JSON-schema-like input descriptions and a validator for JSON values."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from hypersig.model.types import InputSchema, IntegerSchema, ModelError, ObjectSchema, StringSchema
from hypersig.rdf import IRI, Graph, Literal, Term
from hypersig.vocab import JS, XSD_INTEGER, XSD_STRING


@dataclass(frozen=True)
class Violation:
    kind: str  # TypeMismatch | EnumMismatch | MissingProperty | BelowMinimum | AboveMaximum
    path: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def conforms(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _check(schema: InputSchema, value: Any, path: str, out: list) -> None:
    if isinstance(schema, ObjectSchema):
        if not isinstance(value, dict):
            out.append(Violation("TypeMismatch", path, f"expected object, got {type(value).__name__}"))
            return
        for name in sorted(schema.required):
            if name not in value:
                out.append(Violation("MissingProperty", f"{path}/{name}", f"missing required property {name!r}"))
        for name, sub in schema.properties:
            if name in value:
                _check(sub, value[name], f"{path}/{name}", out)
    elif isinstance(schema, IntegerSchema):
        if not _is_int(value):
            out.append(Violation("TypeMismatch", path, f"expected integer, got {value!r}"))
            return
        if schema.enum is not None and value not in schema.enum:
            out.append(Violation("EnumMismatch", path, f"{value!r} not in {sorted(schema.enum)}"))
        if schema.minimum is not None and value < schema.minimum:
            out.append(Violation("BelowMinimum", path, f"{value} < {schema.minimum}"))
        if schema.maximum is not None and value > schema.maximum:
            out.append(Violation("AboveMaximum", path, f"{value} > {schema.maximum}"))
    elif isinstance(schema, StringSchema):
        if not isinstance(value, str):
            out.append(Violation("TypeMismatch", path, f"expected string, got {value!r}"))
            return
        if schema.enum is not None and value not in schema.enum:
            out.append(Violation("EnumMismatch", path, f"{value!r} not in {sorted(schema.enum)}"))
    else:
        raise TypeError(f"not an input schema: {schema!r}")


def validate_input(schema: InputSchema, value: Any) -> ValidationReport:
    """Check a JSON-like value against ``schema``; violations are data, never raised."""
    out: list[Violation] = []
    _check(schema, value, "", out)
    return ValidationReport(tuple(out))


def single_value(schema: InputSchema):
    """The only value a schema admits, if its enum pins exactly one."""
    enum = getattr(schema, "enum", None)
    if enum is not None and len(enum) == 1:
        return next(iter(enum))
    return None


# -- graph reading ------------------------------------------------------------------


def _literal_int(term: Term, where: str) -> int:
    if not isinstance(term, Literal) or term.datatype != XSD_INTEGER:
        raise ModelError("InvalidSchema", f"{where}: expected xsd:integer literal, got {term}")
    value = term.to_python()
    if not _is_int(value):
        raise ModelError("InvalidSchema", f"{where}: malformed integer {term.lexical!r}")
    return value


def _literal_str(term: Term, where: str) -> str:
    if not isinstance(term, Literal) or term.datatype != XSD_STRING:
        raise ModelError("InvalidSchema", f"{where}: expected string literal, got {term}")
    return term.lexical


def read_input_schema(graph: Graph, node: Term) -> InputSchema:
    types = {t.value for t in graph.types(node)}
    if not graph.has_subject(node):
        raise ModelError("DanglingReference", f"schema {node} has no description")
    if JS.ObjectSchema in types:
        props = {}
        for pnode in graph.objects(node, IRI(JS.properties)):
            name = graph.value(pnode, IRI(JS.propertyName))
            if name is None:
                raise ModelError("InvalidSchema", f"property schema {pnode} lacks js:propertyName")
            props[_literal_str(name, "js:propertyName")] = read_input_schema(graph, pnode)
        required = {_literal_str(r, "js:required") for r in graph.objects(node, IRI(JS.required))}
        return ObjectSchema.of(props, required)
    if JS.IntegerSchema in types:
        enum = [_literal_int(v, f"enum of {node}") for v in graph.objects(node, IRI(JS.enum))]
        minimum = graph.value(node, IRI(JS.minimum))
        maximum = graph.value(node, IRI(JS.maximum))
        return IntegerSchema(
            enum=frozenset(enum) if enum else None,
            minimum=_literal_int(minimum, "js:minimum") if minimum is not None else None,
            maximum=_literal_int(maximum, "js:maximum") if maximum is not None else None,
        )
    if JS.StringSchema in types:
        enum = [_literal_str(v, f"enum of {node}") for v in graph.objects(node, IRI(JS.enum))]
        return StringSchema(enum=frozenset(enum) if enum else None)
    raise ModelError("InvalidSchema", f"{node} has no supported schema type")


def schema_to_json(schema: InputSchema) -> dict:
    if isinstance(schema, ObjectSchema):
        out = {"type": "object", "properties": {k: schema_to_json(v) for k, v in schema.properties}}
        if schema.required:
            out["required"] = sorted(schema.required)
        return out
    if isinstance(schema, IntegerSchema):
        out = {"type": "integer"}
        if schema.enum is not None:
            out["enum"] = sorted(schema.enum)
        if schema.minimum is not None:
            out["minimum"] = schema.minimum
        if schema.maximum is not None:
            out["maximum"] = schema.maximum
        return out
    out = {"type": "string"}
    if schema.enum is not None:
        out["enum"] = sorted(schema.enum)
    return out
