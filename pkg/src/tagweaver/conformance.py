"""Conformance checking of a tag model against its target model and schemas.

``check`` answers three questions about every tagged element:

* does the element exist in the target model (condition ``E1``)?
* is the tag's type declared, exactly once, across the referenced schemas
  (``E3_1`` per use, ``E2`` for duplicate declarations)?
* is the attachment admissible — element type within the tag type's scope
  (``E3_2``) and value within its domain (``E3_3``, with the finer-grained
  ``CardinalityViolation`` and ``UnknownSubtagName`` inside complex
  values)?

A statement that tags several elements with several tags is checked as
its full cross product, so its diagnostics equal those of the equivalent
single-element, single-tag statements.  An unresolved element suppresses
the per-pair type checks, and an unknown tag type suppresses the scope
and domain checks, so one root cause yields one diagnostic.  Re-tagging
an element with an identical tag is reported as a warning
(``DuplicateTagWarning``); using a ``private`` tag type directly on an
element is the error ``PrivateTopLevelUse``.

When no error is found, the checker also returns the resolved taggings:
one attachment per (element, tag) pair with the value normalized into
typed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .derivation import LanguageProfile
from .diagnostics import Diagnostic, Severity
from .statechart import (
    AmbiguousElement,
    ElementHandle,
    StatechartModel,
    UnresolvedElement,
    resolve_element,
)
from .tagmodel import Context, TagModel, TagStatement, TagUse, TagValue
from .tagschema import Cardinality, DomainSpec, TagSchema, TagTypeDef

__all__ = [
    "Condition",
    "NormalizedValue",
    "Attachment",
    "ResolvedTagging",
    "CheckInput",
    "check",
    "check_value_domain",
    "INT64_MIN",
    "INT64_MAX",
]

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


class Condition(str, Enum):
    """Identifiers for everything the conformance checker can report."""

    E1_UNRESOLVED_ELEMENT = "E1"
    E2_DUPLICATE_TAG_TYPE_NAME = "E2"
    E3_1_UNKNOWN_TAG_TYPE = "E3_1"
    E3_2_SCOPE_MISMATCH = "E3_2"
    E3_3_DOMAIN_MISMATCH = "E3_3"
    PRIVATE_TOP_LEVEL_USE = "PrivateTopLevelUse"
    CARDINALITY_VIOLATION = "CardinalityViolation"
    UNKNOWN_SUBTAG_NAME = "UnknownSubtagName"
    DUPLICATE_TAG_WARNING = "DuplicateTagWarning"


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NormalizedValue:
    """A tag value after domain checking, in typed form.

    ``kind`` is one of ``flag``, ``int``, ``string``, ``bool``, ``enum``,
    ``complex``; ``value`` carries the payload for the scalar kinds and
    ``children`` the named sub-values for ``complex``.
    """

    kind: str
    value: int | str | bool | None = None
    children: tuple[tuple[str, NormalizedValue], ...] = ()

    @classmethod
    def flag(cls) -> NormalizedValue:
        return cls("flag")

    @classmethod
    def of_int(cls, value: int) -> NormalizedValue:
        return cls("int", value=value)

    @classmethod
    def of_string(cls, value: str) -> NormalizedValue:
        return cls("string", value=value)

    @classmethod
    def of_bool(cls, value: bool) -> NormalizedValue:
        return cls("bool", value=value)

    @classmethod
    def of_enum(cls, value: str) -> NormalizedValue:
        return cls("enum", value=value)

    @classmethod
    def of_children(cls, children: tuple[tuple[str, NormalizedValue], ...]) -> NormalizedValue:
        return cls("complex", children=children)


@dataclass(frozen=True)
class Attachment:
    """One resolved (element, tag type, value) tagging."""

    element: ElementHandle
    tag_type: str
    schema: str  # qualified name of the defining schema
    value: NormalizedValue
    file: str | None = field(default=None, compare=False)
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ResolvedTagging:
    target: str  # qualified name of the target model
    attachments: tuple[Attachment, ...]


@dataclass(frozen=True)
class CheckInput:
    tag_model: TagModel
    target: StatechartModel
    schemas: tuple[TagSchema, ...]
    profile: LanguageProfile


# ---------------------------------------------------------------------------
# Check driver
# ---------------------------------------------------------------------------


def check(inp: CheckInput) -> tuple[list[Diagnostic], ResolvedTagging | None]:
    """Check one tag model; returns (diagnostics, resolved-or-None).

    The resolved taggings are returned only when there is no error
    diagnostic (warnings are fine), and then contain exactly one
    attachment per expanded (element, tag) pair.
    """

    _require_matching_inputs(inp)
    model = inp.tag_model
    diags: list[Diagnostic] = []

    def report(condition: Condition, message: str, line: int, col: int,
               severity: Severity = Severity.ERROR) -> None:
        diags.append(
            Diagnostic(
                condition=condition.value,
                severity=severity,
                message=message,
                file=model.source_name,
                line=line,
                col=col,
            )
        )

    # Tag type names must be unique across the union of referenced schemas;
    # uses resolve against the first definition in conforms-to order.
    types: dict[str, tuple[TagSchema, TagTypeDef]] = {}
    for schema in inp.schemas:
        for tt in schema.tag_types:
            if tt.name in types:
                report(
                    Condition.E2_DUPLICATE_TAG_TYPE_NAME,
                    f"tag type '{tt.name}' is defined by both "
                    f"'{types[tt.name][0].qualified_name}' and '{schema.qualified_name}'",
                    model.conforms_line,
                    model.conforms_col,
                )
            else:
                types[tt.name] = (schema, tt)

    pairs = _expand(model.body, "", inp, report)

    attachments: list[Attachment] = []
    seen: set[tuple[str, str, NormalizedValue]] = set()
    for element_ref, context_path, tag in pairs:
        try:
            handle = resolve_element(inp.target, element_ref, context_path)
        except (UnresolvedElement, AmbiguousElement) as exc:
            report(Condition.E1_UNRESOLVED_ELEMENT, str(exc), element_ref.line, element_ref.col)
            continue

        entry = types.get(tag.name)
        if entry is None:
            known = ", ".join(sorted(types)) or "none"
            report(
                Condition.E3_1_UNKNOWN_TAG_TYPE,
                f"'{tag.name}' is not a tag type of the referenced schemas "
                f"(known: {known})",
                tag.line,
                tag.col,
            )
            continue
        schema, tt = entry

        if tt.is_private:
            report(
                Condition.PRIVATE_TOP_LEVEL_USE,
                f"tag type '{tt.name}' is private and can only be used as a subtag",
                tag.line,
                tag.col,
            )

        if not tt.scope.admits(handle.element_type):
            allowed = ", ".join(tt.scope.keywords)
            report(
                Condition.E3_2_SCOPE_MISMATCH,
                f"'{handle.path}' is a {handle.element_type}, but tag type "
                f"'{tt.name}' only applies to: {allowed}",
                tag.line,
                tag.col,
            )

        value_diags, normalized = _check_value(tag, tt, schema, model.source_name)
        diags.extend(value_diags)
        if normalized is None:
            continue

        key = (handle.path, tt.name, normalized)
        if key in seen:
            report(
                Condition.DUPLICATE_TAG_WARNING,
                f"'{handle.path}' is already tagged with an identical '{tt.name}'",
                tag.line,
                tag.col,
                severity=Severity.WARNING,
            )
        seen.add(key)
        attachments.append(
            Attachment(
                element=handle,
                tag_type=tt.name,
                schema=schema.qualified_name,
                value=normalized,
                file=model.source_name,
                line=tag.line,
                col=tag.col,
            )
        )

    if any(d.severity is Severity.ERROR for d in diags):
        return diags, None
    return diags, ResolvedTagging(target=inp.target.qualified_name, attachments=tuple(attachments))


def _require_matching_inputs(inp: CheckInput) -> None:
    """Contract checks: conforms-to and target were matched by the caller."""

    if not inp.schemas:
        raise ValueError("check requires at least one schema")
    available = {schema.qualified_name for schema in inp.schemas}
    for ref in inp.tag_model.conforms_to:
        qualified = ref if "." in ref else f"{inp.tag_model.package}.{ref}"
        if qualified not in available:
            raise ValueError(f"conforms-to entry '{ref}' matches no supplied schema")
    target_ref = inp.tag_model.target_model
    qualified = target_ref if "." in target_ref else f"{inp.tag_model.package}.{target_ref}"
    if qualified != inp.target.qualified_name:
        raise ValueError(
            f"tag model targets '{qualified}' but the supplied model is "
            f"'{inp.target.qualified_name}'"
        )


def _expand(body, context_path: str, inp: CheckInput, report):
    """Flatten contexts into (element_ref, context_path, tag_use) triples."""

    pairs: list[tuple] = []
    for item in body:
        if isinstance(item, Context):
            try:
                handle = resolve_element(inp.target, item.identifier, context_path)
            except (UnresolvedElement, AmbiguousElement) as exc:
                # The whole block is unaddressable; one diagnostic, no cascade.
                report(
                    Condition.E1_UNRESOLVED_ELEMENT,
                    str(exc),
                    item.identifier.line,
                    item.identifier.col,
                )
                continue
            pairs.extend(_expand(item.body, handle.path, inp, report))
        elif isinstance(item, TagStatement):
            for element_ref in item.element_refs:
                for tag in item.tag_refs:
                    pairs.append((element_ref, context_path, tag))
    return pairs


# ---------------------------------------------------------------------------
# Value domain checking
# ---------------------------------------------------------------------------


def check_value_domain(
    value: TagValue, tag_type: TagTypeDef, schema: TagSchema
) -> tuple[list[Diagnostic], NormalizedValue | None]:
    """Check ``value`` against ``tag_type``'s domain and normalize it.

    Returns the diagnostics plus the normalized value, or ``None`` in
    place of the value when any diagnostic is an error.  Named references
    inside complex domains resolve within ``schema``; scopes play no role
    here.
    """

    return _check_value(TagUse(name=tag_type.name, value=value), tag_type, schema, None)


def _check_value(
    use: TagUse, tag_type: TagTypeDef, schema: TagSchema, file: str | None
) -> tuple[list[Diagnostic], NormalizedValue | None]:
    diags: list[Diagnostic] = []

    def mismatch(condition: Condition, message: str, at: TagUse) -> None:
        diags.append(
            Diagnostic(
                condition=condition.value,
                severity=Severity.ERROR,
                message=message,
                file=file,
                line=at.line,
                col=at.col,
            )
        )

    normalized = _check_value_inner(use, tag_type, schema, file, mismatch)
    if any(d.severity is Severity.ERROR for d in diags):
        return diags, None
    return diags, normalized


def _check_value_inner(
    use: TagUse, tag_type: TagTypeDef, schema: TagSchema, file, mismatch
) -> NormalizedValue | None:
    domain = tag_type.domain
    value = use.value
    name = tag_type.name

    if domain.kind == DomainSpec.SIMPLE:
        if value.kind != TagValue.SIMPLE:
            mismatch(
                Condition.E3_3_DOMAIN_MISMATCH,
                f"tag type '{name}' is a simple flag and takes no value",
                use,
            )
            return None
        return NormalizedValue.flag()

    if domain.kind == DomainSpec.NATIVE:
        if value.kind != TagValue.VALUED:
            mismatch(
                Condition.E3_3_DOMAIN_MISMATCH,
                f"tag type '{name}' needs a {domain.native} value",
                use,
            )
            return None
        return _check_native(domain.native, value.raw, name, use, mismatch)

    if domain.kind == DomainSpec.ENUM:
        if value.kind != TagValue.VALUED:
            mismatch(
                Condition.E3_3_DOMAIN_MISMATCH,
                f"tag type '{name}' needs one of its enumeration values",
                use,
            )
            return None
        if value.raw not in domain.values:
            options = ", ".join(domain.values)
            mismatch(
                Condition.E3_3_DOMAIN_MISMATCH,
                f'"{value.raw}" is not an enumeration value of \'{name}\' ({options})',
                use,
            )
            return None
        return NormalizedValue.of_enum(value.raw)

    # Complex domain.
    if value.kind != TagValue.COMPLEX:
        mismatch(
            Condition.E3_3_DOMAIN_MISMATCH,
            f"tag type '{name}' is complex and needs a '{{...}}' value",
            use,
        )
        return None

    children: list[tuple[str, NormalizedValue]] = []
    ok = True
    for sub in value.subtags:
        ref = domain.reference(sub.name)
        if ref is None:
            declared = ", ".join(r.name for r in domain.references)
            mismatch(
                Condition.UNKNOWN_SUBTAG_NAME,
                f"subtag '{sub.name}' is not declared by '{name}' (declared: {declared})",
                sub,
            )
            ok = False
            continue
        if ref.is_native:
            if sub.value.kind != TagValue.VALUED:
                mismatch(
                    Condition.E3_3_DOMAIN_MISMATCH,
                    f"subtag '{sub.name}' of '{name}' needs a {ref.type_name} value",
                    sub,
                )
                ok = False
                continue
            norm = _check_native(ref.type_name, sub.value.raw, sub.name, sub, mismatch)
        else:
            target = schema.tag_type(ref.type_name)
            if target is None:
                # Unresolved named references are schema well-formedness
                # problems; surface the use site as a domain mismatch.
                mismatch(
                    Condition.E3_3_DOMAIN_MISMATCH,
                    f"subtag '{sub.name}' references unknown tag type '{ref.type_name}'",
                    sub,
                )
                ok = False
                continue
            norm = _check_value_inner(sub, target, schema, file, mismatch)
        if norm is None:
            ok = False
            continue
        children.append((sub.name, norm))

    for ref in domain.references:
        count = sum(1 for sub in value.subtags if sub.name == ref.name)
        if not ref.cardinality.admits(count):
            mismatch(
                Condition.CARDINALITY_VIOLATION,
                f"'{name}' needs {_cardinality_phrase(ref.cardinality)} "
                f"'{ref.name}' subtag, found {count}",
                use,
            )
            ok = False

    if not ok:
        return None
    return NormalizedValue.of_children(tuple(children))


def _check_native(kind: str, raw: str, label: str, at: TagUse, mismatch) -> NormalizedValue | None:
    if kind == "String":
        return NormalizedValue.of_string(raw)
    if kind == "Boolean":
        if raw == "true":
            return NormalizedValue.of_bool(True)
        if raw == "false":
            return NormalizedValue.of_bool(False)
        mismatch(
            Condition.E3_3_DOMAIN_MISMATCH,
            f'"{raw}" is not a Boolean (\'{label}\' takes exactly "true" or "false")',
            at,
        )
        return None
    # int: optional minus, decimal digits, 64-bit signed range.
    body = raw[1:] if raw.startswith("-") else raw
    if not body or not body.isascii() or not body.isdigit():
        mismatch(
            Condition.E3_3_DOMAIN_MISMATCH,
            f'"{raw}" is not a decimal integer (\'{label}\' takes an int)',
            at,
        )
        return None
    parsed = int(raw)
    if not INT64_MIN <= parsed <= INT64_MAX:
        mismatch(
            Condition.E3_3_DOMAIN_MISMATCH,
            f'"{raw}" does not fit a signed 64-bit integer (\'{label}\' takes an int)',
            at,
        )
        return None
    return NormalizedValue.of_int(parsed)


def _cardinality_phrase(cardinality: Cardinality) -> str:
    return {
        Cardinality.REQUIRED: "exactly one",
        Cardinality.OPTIONAL: "at most one",
        Cardinality.AT_LEAST_ONE: "at least one",
        Cardinality.MANY: "any number of",
    }[cardinality]
