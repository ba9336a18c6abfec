"""Parser and element resolution for the statechart DSL (``.sc`` files).

The language is a small hierarchical statechart notation::

    package mobile;
    statechart Mobile {
        initial state Start;
        state Active {
            state Call {
                [status!=isActive];
            }
        }
        final state Done;
        Start -> Active : dial() ;
    }

States nest arbitrarily and may carry bracketed invariant expressions,
which are kept as opaque text.  Transitions connect states by (possibly
dotted) name and may carry opaque event text after ``:``.  A bare ``...``
inside a body is accepted as an elision marker and ignored.

Beyond parsing, this module answers the question "which model element
does this identifier denote?" for the element identifiers that appear in
tag files: dotted state paths, the chart's own name, ``[A -> B]`` for
transitions, and ``[expr]`` for invariants.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError, ResolutionError
from .parsing import ARROW, BRACKET, ELLIPSIS, EOF, IDENT, Token, TokenCursor, tokenize
from .tagmodel import ElementIdentifier

__all__ = [
    "STATECHART",
    "STATE",
    "TRANSITION",
    "INVARIANT",
    "StateDef",
    "TransitionDef",
    "StatechartModel",
    "ElementHandle",
    "DuplicateSiblingState",
    "UnresolvedTransitionEndpoint",
    "UnresolvedElement",
    "AmbiguousElement",
    "AmbiguousTransition",
    "parse_statechart",
    "resolve_element",
    "enumerate_elements",
    "pretty_print_statechart",
    "normalize_expression",
]

# Element-type names as they appear in schema scope clauses.
STATECHART = "Statechart"
STATE = "State"
TRANSITION = "Transition"
INVARIANT = "Invariant"


class DuplicateSiblingState(ParseError):
    """Two sibling states share a name."""


class UnresolvedTransitionEndpoint(ParseError):
    """A transition names a source or target state that does not exist."""


class UnresolvedElement(ResolutionError):
    """An element identifier matches nothing in the model."""


class AmbiguousElement(ResolutionError):
    """An element identifier matches more than one element."""


class AmbiguousTransition(AmbiguousElement):
    """Endpoints match several transitions, so ``[A -> B]`` cannot pick one."""


# ---------------------------------------------------------------------------
# Data model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StateDef:
    name: str
    initial: bool = False
    final: bool = False
    substates: tuple[StateDef, ...] = ()
    invariants_src: tuple[str, ...] = ()
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    @property
    def modifiers(self) -> frozenset[str]:
        mods = set()
        if self.initial:
            mods.add("initial")
        if self.final:
            mods.add("final")
        return frozenset(mods)


@dataclass(frozen=True)
class TransitionDef:
    source: tuple[str, ...]
    target: tuple[str, ...]
    event: str | None = None
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class StatechartModel:
    package: str
    name: str
    states: tuple[StateDef, ...]
    transitions: tuple[TransitionDef, ...]
    warnings: tuple[str, ...] = field(default=(), compare=False)
    source_name: str | None = field(default=None, compare=False)

    @property
    def qualified_name(self) -> str:
        return f"{self.package}.{self.name}"


@dataclass(frozen=True)
class ElementHandle:
    """A resolved, addressable element of a statechart model."""

    path: str
    element_type: str


def normalize_expression(text: str) -> str:
    """Collapse all whitespace runs so invariant text compares stably."""

    return " ".join(text.split())


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def parse_statechart(text: str, filename: str | None = None) -> StatechartModel:
    """Parse ``.sc`` source text into a :class:`StatechartModel`.

    Raises :class:`ParseError` on syntax errors,
    :class:`DuplicateSiblingState` when sibling states share a name, and
    :class:`UnresolvedTransitionEndpoint` when a transition endpoint does
    not name a state.
    """

    cur = TokenCursor(tokenize(text, raw_brackets=True, filename=filename), filename)

    cur.expect_keyword("package")
    package_parts, _ = cur.qualified_name()
    cur.expect(";")

    cur.expect_keyword("statechart")
    name_tok = cur.expect(IDENT)
    cur.expect("{")

    states: list[StateDef] = []
    transitions: list[TransitionDef] = []
    sibling_names: set[str] = set()

    while not cur.at("}"):
        if cur.match(ELLIPSIS):
            continue
        tok = cur.peek()
        if tok.kind == IDENT and tok.value in ("state", "initial", "final"):
            states.append(_parse_state(cur, text, sibling_names))
        elif tok.kind == IDENT:
            transitions.append(_parse_transition(cur, text))
        elif tok.kind == BRACKET:
            raise cur.error("invariants are only allowed inside a state body")
        elif tok.kind == EOF:
            raise cur.error("unexpected end of input: missing '}'")
        else:
            raise cur.error(f"unexpected '{tok.value}' in statechart body")
    cur.expect("}")
    cur.expect(EOF)

    model = StatechartModel(
        package=".".join(package_parts),
        name=name_tok.value,
        states=tuple(states),
        transitions=tuple(transitions),
        source_name=filename,
    )
    _check_transitions(model, filename)
    return _with_warnings(model)


def _parse_state(cur: TokenCursor, text: str, sibling_names: set[str]) -> StateDef:
    initial = False
    final = False
    first = cur.peek()
    while cur.peek().kind == IDENT and cur.peek().value in ("initial", "final"):
        word = cur.advance().value
        if word == "initial":
            if initial:
                raise cur.error("duplicate 'initial' modifier", first)
            initial = True
        else:
            if final:
                raise cur.error("duplicate 'final' modifier", first)
            final = True
    if initial and final:
        raise cur.error("a state cannot be both initial and final", first)
    cur.expect_keyword("state")
    name_tok = cur.expect(IDENT)
    if name_tok.value in sibling_names:
        raise DuplicateSiblingState(
            f"duplicate sibling state '{name_tok.value}'",
            name_tok.line,
            name_tok.col,
            cur.filename,
        )
    sibling_names.add(name_tok.value)

    substates: list[StateDef] = []
    invariants: list[str] = []
    if cur.match("{"):
        nested_names: set[str] = set()
        while not cur.at("}"):
            if cur.match(ELLIPSIS):
                continue
            tok = cur.peek()
            if tok.kind == IDENT and tok.value in ("state", "initial", "final"):
                substates.append(_parse_state(cur, text, nested_names))
            elif tok.kind == BRACKET:
                cur.advance()
                cur.expect(";")
                invariants.append(tok.value.strip())
            elif tok.kind == EOF:
                raise cur.error("unexpected end of input: missing '}'")
            else:
                raise cur.error(f"unexpected '{tok.value}' in state body")
        cur.expect("}")
    else:
        cur.expect(";")

    return StateDef(
        name=name_tok.value,
        initial=initial,
        final=final,
        substates=tuple(substates),
        invariants_src=tuple(invariants),
        line=name_tok.line,
        col=name_tok.col,
    )


def _parse_transition(cur: TokenCursor, text: str) -> TransitionDef:
    source, first = cur.qualified_name()
    cur.expect(ARROW)
    target, _ = cur.qualified_name()
    event: str | None = None
    if cur.at(":"):
        colon = cur.advance()
        # Event text is opaque: take the raw source slice up to ';'.
        while not cur.at(";") and not cur.at(EOF):
            cur.advance()
        if cur.at(EOF):
            raise cur.error("unterminated transition: missing ';'")
        semi = cur.peek()
        event = text[colon.end : semi.start].strip()
    cur.expect(";")
    return TransitionDef(
        source=source, target=target, event=event, line=first.line, col=first.col
    )


def _check_transitions(model: StatechartModel, filename: str | None) -> None:
    for tr in model.transitions:
        for label, endpoint in (("source", tr.source), ("target", tr.target)):
            if _find_state(model, endpoint) is None:
                raise UnresolvedTransitionEndpoint(
                    f"transition {label} '{'.'.join(endpoint)}' does not name a state",
                    tr.line,
                    tr.col,
                    filename,
                )


def _with_warnings(model: StatechartModel) -> StatechartModel:
    seen: dict[tuple[str, str, str | None], TransitionDef] = {}
    warnings: list[str] = []
    for tr in model.transitions:
        key = (_state_path(model, tr.source), _state_path(model, tr.target), tr.event)
        if key in seen:
            event = f" : {tr.event}" if tr.event is not None else ""
            warnings.append(
                f"duplicate transition {key[0]} -> {key[1]}{event} "
                f"(lines {seen[key].line} and {tr.line})"
            )
        else:
            seen[key] = tr
    if not warnings:
        return model
    return StatechartModel(
        package=model.package,
        name=model.name,
        states=model.states,
        transitions=model.transitions,
        warnings=tuple(warnings),
        source_name=model.source_name,
    )


# ---------------------------------------------------------------------------
# Element lookup
# ---------------------------------------------------------------------------


def _find_state(
    model: StatechartModel, segments: tuple[str, ...], base: StateDef | None = None
) -> StateDef | None:
    """Walk ``segments`` one nesting level at a time; None when any step fails."""

    if not segments:
        return None
    current = base
    for seg in segments:
        children = model.states if current is None else current.substates
        current = next((st for st in children if st.name == seg), None)
        if current is None:
            return None
    return current


def _state_path(model: StatechartModel, segments: tuple[str, ...]) -> str:
    return ".".join(segments)


def _walk_states(
    states: tuple[StateDef, ...], prefix: str = ""
) -> list[tuple[str, StateDef]]:
    out: list[tuple[str, StateDef]] = []
    for st in states:
        path = f"{prefix}{st.name}"
        out.append((path, st))
        out.extend(_walk_states(st.substates, prefix=f"{path}."))
    return out


def _transition_handle(model: StatechartModel, tr: TransitionDef) -> ElementHandle:
    src = _state_path(model, tr.source)
    tgt = _state_path(model, tr.target)
    return ElementHandle(path=f"[{src} -> {tgt}]", element_type=TRANSITION)


def enumerate_elements(model: StatechartModel) -> tuple[ElementHandle, ...]:
    """All addressable elements in a stable pre-order.

    Order: the chart itself, then each state in source order (each followed
    by its invariants, then its substates, recursively), then transitions
    in source order.
    """

    handles = [ElementHandle(path=model.name, element_type=STATECHART)]

    def visit(states: tuple[StateDef, ...], prefix: str) -> None:
        for st in states:
            path = f"{prefix}{st.name}"
            handles.append(ElementHandle(path=path, element_type=STATE))
            for inv in st.invariants_src:
                norm = normalize_expression(inv)
                handles.append(ElementHandle(path=f"{path}.[{norm}]", element_type=INVARIANT))
            visit(st.substates, prefix=f"{path}.")

    visit(model.states, prefix="")
    for tr in model.transitions:
        handles.append(_transition_handle(model, tr))
    return tuple(handles)


def resolve_element(
    model: StatechartModel, ident: ElementIdentifier, context_path: str = ""
) -> ElementHandle:
    """Resolve one element identifier against the model.

    Qualified names resolve relative to ``context_path`` first and fall
    back to the model root; the model's own name denotes the chart itself.
    Bracket identifiers of the shape ``[A -> B]`` denote the unique
    transition with those endpoints; any other bracket text denotes the
    invariant with the same (whitespace-normalized) expression.

    Raises :class:`UnresolvedElement`, :class:`AmbiguousElement`, or
    :class:`AmbiguousTransition`.
    """

    if ident.is_bracket:
        return _resolve_bracket(model, ident.raw, context_path)
    return _resolve_qualified(model, ident.path, context_path)


def _resolve_qualified(
    model: StatechartModel, segments: tuple[str, ...], context_path: str
) -> ElementHandle:
    # Context first (only when the context names an actual state; an empty
    # context and the chart's own name both mean the root level).
    base = _context_base(model, context_path)
    if base is not None and base is not _NO_CONTEXT:
        found = _find_state(model, segments, base)
        if found is not None:
            return ElementHandle(
                path=f"{context_path}.{'.'.join(segments)}", element_type=STATE
            )

    # Root: the chart's own name denotes the chart, and may also be used
    # as an explicit leading segment.
    if segments[0] == model.name:
        if len(segments) == 1:
            return ElementHandle(path=model.name, element_type=STATECHART)
        rest = segments[1:]
        if _find_state(model, rest) is not None:
            return ElementHandle(path=".".join(rest), element_type=STATE)
    elif _find_state(model, segments) is not None:
        return ElementHandle(path=".".join(segments), element_type=STATE)

    where = f" (context '{context_path}')" if context_path else ""
    raise UnresolvedElement(
        f"'{'.'.join(segments)}' does not name an element of '{model.name}'{where}"
    )


_NO_CONTEXT = object()


def _context_base(model: StatechartModel, context_path: str):
    """The state to search under for a context path, or ``_NO_CONTEXT``.

    ``""`` and the chart's own name mean the chart level (base ``None``);
    a dotted state path means that state; anything else — for example the
    path of a transition — offers no children, so context search is
    skipped entirely.
    """

    if context_path == "" or context_path == model.name:
        return None
    segments = tuple(context_path.split("."))
    base = _find_state(model, segments)
    if base is None:
        return _NO_CONTEXT
    return base


def _resolve_bracket(model: StatechartModel, raw: str, context_path: str) -> ElementHandle:
    endpoints = _parse_endpoints(raw)
    if endpoints is not None:
        source, target = endpoints
        if _find_state(model, source) is None or _find_state(model, target) is None:
            raise UnresolvedElement(
                f"'[{normalize_expression(raw)}]' endpoints do not name states of '{model.name}'"
            )
        src, tgt = _state_path(model, source), _state_path(model, target)
        matches = [
            tr
            for tr in model.transitions
            if _state_path(model, tr.source) == src and _state_path(model, tr.target) == tgt
        ]
        if not matches:
            raise UnresolvedElement(f"no transition {src} -> {tgt} in '{model.name}'")
        if len(matches) > 1:
            raise AmbiguousTransition(
                f"{len(matches)} transitions match {src} -> {tgt} in '{model.name}'"
            )
        return _transition_handle(model, matches[0])

    # Invariant lookup by normalized expression text, context subtree first.
    norm = normalize_expression(raw)

    def candidates(states: tuple[StateDef, ...], prefix: str) -> list[ElementHandle]:
        found: list[ElementHandle] = []
        for path, st in _walk_states(states, prefix):
            for inv in st.invariants_src:
                if normalize_expression(inv) == norm:
                    found.append(
                        ElementHandle(path=f"{path}.[{norm}]", element_type=INVARIANT)
                    )
        return found

    base = _context_base(model, context_path)
    matches: list[ElementHandle] = []
    if base is not None and base is not _NO_CONTEXT:
        if any(normalize_expression(inv) == norm for inv in base.invariants_src):
            matches.append(ElementHandle(f"{context_path}.[{norm}]", INVARIANT))
        matches.extend(candidates(base.substates, f"{context_path}."))
    if not matches:
        matches = candidates(model.states, "")
    if not matches:
        raise UnresolvedElement(f"no invariant '[{norm}]' in '{model.name}'")
    if len(matches) > 1:
        raise AmbiguousElement(f"{len(matches)} invariants match '[{norm}]' in '{model.name}'")
    return matches[0]


def _parse_endpoints(raw: str) -> tuple[tuple[str, ...], tuple[str, ...]] | None:
    """Parse ``A -> B`` endpoint text; None when the text is not that shape."""

    if "->" not in raw:
        return None
    left, _, right = raw.partition("->")
    source = _parse_dotted(left)
    target = _parse_dotted(right)
    if source is None or target is None:
        return None
    return source, target


def _parse_dotted(text: str) -> tuple[str, ...] | None:
    parts = [p.strip() for p in text.strip().split(".")]
    if not parts or any(not p.isidentifier() for p in parts):
        return None
    return tuple(parts)


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------


def pretty_print_statechart(model: StatechartModel) -> str:
    """Render a model back to canonical ``.sc`` text (round-trip safe)."""

    lines = [f"package {model.package};", "", f"statechart {model.name} {{"]

    def emit_state(st: StateDef, depth: int) -> None:
        pad = "    " * depth
        mods = ("initial " if st.initial else "") + ("final " if st.final else "")
        if not st.substates and not st.invariants_src:
            lines.append(f"{pad}{mods}state {st.name};")
            return
        lines.append(f"{pad}{mods}state {st.name} {{")
        for inv in st.invariants_src:
            lines.append(f"{pad}    [{inv}];")
        for sub in st.substates:
            emit_state(sub, depth + 1)
        lines.append(f"{pad}}}")

    for st in model.states:
        emit_state(st, 1)
    if model.transitions:
        lines.append("")
    for tr in model.transitions:
        src, tgt = ".".join(tr.source), ".".join(tr.target)
        if tr.event is not None:
            lines.append(f"    {src} -> {tgt} : {tr.event};")
        else:
            lines.append(f"    {src} -> {tgt};")
    lines.append("}")
    return "\n".join(lines) + "\n"
