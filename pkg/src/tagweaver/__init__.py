"""tagweaver: tag models, tag schemas, and conformance checking for DSLs.

The package turns a compact grammar manifest of some DSL into the
language support needed to tag that DSL's models externally: identifier
forms for referencing model elements, scope keywords for schemas, parsers
for tag and schema files, a conformance checker, and a JSON exporter.
"""

from __future__ import annotations

from .conformance import (
    Attachment,
    CheckInput,
    Condition,
    NormalizedValue,
    ResolvedTagging,
    check,
    check_value_domain,
)
from .derivation import (
    DerivationError,
    IdentifierKind,
    IdentifierRule,
    LanguageProfile,
    ScopeKeyword,
    SkippedEverything,
    derive_profile,
    profile_from_json,
    profile_to_json,
    render_derived_grammar,
)
from .diagnostics import Diagnostic, Severity, format_diagnostic, has_errors
from .errors import ParseError, ResolutionError, TagweaverError
from .manifest import (
    DuplicateProduction,
    GrammarManifest,
    Production,
    RhsRef,
    UnknownNonterminalReference,
    parse_manifest,
    pretty_print_manifest,
)
from .statechart import (
    AmbiguousElement,
    AmbiguousTransition,
    DuplicateSiblingState,
    ElementHandle,
    StatechartModel,
    StateDef,
    TransitionDef,
    UnresolvedElement,
    UnresolvedTransitionEndpoint,
    enumerate_elements,
    normalize_expression,
    parse_statechart,
    pretty_print_statechart,
    resolve_element,
)
from .tagmodel import (
    Context,
    ElementIdentifier,
    MissingConformsTo,
    TagModel,
    TagStatement,
    TagUse,
    TagValue,
    UnknownIdentifierForm,
    parse_tag_model,
    pretty_print_tag_model,
)
from .tagschema import (
    Cardinality,
    DomainSpec,
    DuplicateTagTypeName,
    EmptyEnumDomain,
    Reference,
    ScopeSpec,
    TagSchema,
    TagTypeDef,
    UnknownScopeKeyword,
    UnresolvedNamedReference,
    parse_tag_schema,
    pretty_print_tag_schema,
    validate_schema_well_formedness,
)
from .workspace import (
    LoadedWorkspace,
    Workspace,
    WorkspaceError,
    build_export_report,
    check_workspace,
    load_workspace,
    render_export_report,
)

__version__ = "0.1.0"
