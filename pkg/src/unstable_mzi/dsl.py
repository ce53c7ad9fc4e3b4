"""Text format for layouts: the ``.ifl`` interferometer layout file.

Grammar (``#`` comments run to end of line)::

    document := section*
    section  := name '{' item* '}'
    item     := key '=' value ';'
              | element '(' [arg (',' arg)*] ')' ';'
    arg      := key '=' value
    value    := number | identifier | "string"

Sections: ``particle`` (required), ``upper`` and ``lower`` (required, hold
ordered element calls ``segment(...)``, ``cavity(...)``, ``phase(...)``),
``splitter``, ``sweep``, ``oracle`` (optional).  The particle takes either
dimensionless ``k``/``ell`` or SI ``momentum_si``/``mass_si``/``gamma_si``
(converted at parse time, lengths then in meters); mixing the two forms is
an error.  ``ell = inf`` marks a stable particle.  Unknown keys are
rejected.

Parsing is total: :func:`parse` never raises, it returns either a
validated document or a list of positioned diagnostics.  Serialization is
canonical (fixed section order, sorted keys, shortest round-trip float
formatting) and ``parse(serialize(doc))`` reproduces ``doc`` exactly.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum

from .core import (
    PathSegment,
    TwoPathLayout,
    UnstableParticle,
    splitter_by_name,
)
from .errors import DomainError

__all__ = [
    "HBAR_SI",
    "DiagnosticCode",
    "Diagnostic",
    "ParseResult",
    "SegmentElement",
    "PhaseElement",
    "SweepSpec",
    "OracleOverrides",
    "LayoutDocument",
    "parse",
    "serialize",
]

HBAR_SI = 1.054571817e-34  # J*s

_SWEEP_PARAMETERS = ("gamma_ratio", "cavity_length_over_ell", "phase")
_SCALES = ("linear", "log")
_SPLITTER_NAMES = ("symmetric", "hadamard")
_SECTION_ORDER = ("particle", "upper", "lower", "splitter", "sweep", "oracle")


class DiagnosticCode(str, Enum):
    LEXICAL_ERROR = "LEXICAL_ERROR"
    SYNTAX_ERROR = "SYNTAX_ERROR"
    UNKNOWN_SECTION = "UNKNOWN_SECTION"
    UNKNOWN_KEY = "UNKNOWN_KEY"
    DUPLICATE_SECTION = "DUPLICATE_SECTION"
    DUPLICATE_KEY = "DUPLICATE_KEY"
    MISSING_SECTION = "MISSING_SECTION"
    MISSING_KEY = "MISSING_KEY"
    TYPE_MISMATCH = "TYPE_MISMATCH"
    UNIT_MIX = "UNIT_MIX"
    CONSTRAINT_NEGATIVE_LENGTH = "CONSTRAINT_NEGATIVE_LENGTH"
    CONSTRAINT_VIOLATION = "CONSTRAINT_VIOLATION"


@dataclass(frozen=True)
class Diagnostic:
    code: DiagnosticCode
    message: str
    hint: str
    line: int
    column: int
    offset: int
    token: str


# ---------------------------------------------------------------------------
# Document model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SegmentElement:
    """A ``segment(...)`` or ``cavity(...)`` call in a path section."""

    kind: str
    length: float
    gamma_ratio: float = 1.0


@dataclass(frozen=True)
class PhaseElement:
    """A ``phase(phi=...)`` call: a zero-length static phase shifter."""

    phi: float = 0.0


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter sweep request."""

    parameter: str
    start: float
    end: float
    steps: int
    scale: str = "linear"

    def __post_init__(self) -> None:
        if self.parameter not in _SWEEP_PARAMETERS:
            raise DomainError(f"unknown sweep parameter {self.parameter!r}")
        if self.scale not in _SCALES:
            raise DomainError(f"unknown sweep scale {self.scale!r}")
        if not (math.isfinite(self.start) and math.isfinite(self.end)):
            raise DomainError("sweep endpoints must be finite")
        if int(self.steps) < 2:
            raise DomainError("sweep needs at least 2 steps")
        if self.start == self.end:
            raise DomainError("sweep endpoints must differ")
        if self.scale == "log" and (self.start <= 0.0 or self.end <= 0.0):
            raise DomainError("log-scale sweep endpoints must be positive")
        object.__setattr__(self, "steps", int(self.steps))


@dataclass(frozen=True)
class OracleOverrides:
    """Grid and tolerance overrides for oracle runs; None keeps defaults."""

    packet_width: float | None = None
    points_per_wavelength: float | None = None
    oracle_tol: float | None = None


@dataclass(frozen=True)
class LayoutDocument:
    particle: UnstableParticle
    upper: tuple
    lower: tuple
    splitter: str = "symmetric"
    sweep: SweepSpec | None = None
    oracle: OracleOverrides | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "upper", tuple(self.upper))
        object.__setattr__(self, "lower", tuple(self.lower))

    def to_layout(self) -> TwoPathLayout:
        """Build the core layout this document describes."""
        return TwoPathLayout(
            upper=tuple(_element_to_segment(e) for e in self.upper),
            lower=tuple(_element_to_segment(e) for e in self.lower),
            splitter=splitter_by_name(self.splitter),
        )


def _element_to_segment(element) -> PathSegment:
    if isinstance(element, SegmentElement):
        return PathSegment(length=element.length, gamma_ratio=element.gamma_ratio,
                           cavity=(element.kind == "cavity"))
    if isinstance(element, PhaseElement):
        return PathSegment(length=0.0, phase_offset=element.phi)
    raise DomainError(f"unknown path element {element!r}")


@dataclass(frozen=True)
class ParseResult:
    document: LayoutDocument | None
    diagnostics: tuple[Diagnostic, ...]

    @property
    def ok(self) -> bool:
        return self.document is not None


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_PUNCT = {"{": "LBRACE", "}": "RBRACE", "(": "LPAREN", ")": "RPAREN",
          "=": "EQUALS", ";": "SEMI", ",": "COMMA"}
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER_RE = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int
    line: int
    column: int


def _clamp_offset(offset: int, text_length: int) -> int:
    return max(0, min(offset, max(0, text_length - 1)))


def _lex(text: str):
    tokens: list[_Token] = []
    diagnostics: list[Diagnostic] = []
    i, n = 0, len(text)
    line, line_start = 1, 0

    def make(kind: str, start: int, value: str) -> _Token:
        return _Token(kind, value, start, line, start - line_start + 1)

    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            line_start = i
            continue
        if c in " \t\r":
            i += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c in _PUNCT:
            tokens.append(make(_PUNCT[c], i, c))
            i += 1
            continue
        if c == '"':
            end = i + 1
            while end < n and text[end] not in '"\n':
                end += 1
            if end >= n or text[end] != '"':
                diagnostics.append(Diagnostic(
                    code=DiagnosticCode.LEXICAL_ERROR,
                    message="unterminated string literal",
                    hint='close the string with a `"` on the same line',
                    line=line, column=i - line_start + 1,
                    offset=_clamp_offset(i, n), token=text[i:end],
                ))
                i = end
                continue
            tokens.append(make("STRING", i, text[i:end + 1]))
            i = end + 1
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            tokens.append(make("IDENT", i, m.group()))
            i = m.end()
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            tokens.append(make("NUMBER", i, m.group()))
            i = m.end()
            continue
        diagnostics.append(Diagnostic(
            code=DiagnosticCode.LEXICAL_ERROR,
            message=f"unexpected character {c!r}",
            hint="remove the character; only identifiers, numbers, strings "
                 "and `{}()=;,` punctuation are allowed",
            line=line, column=i - line_start + 1,
            offset=_clamp_offset(i, n), token=c,
        ))
        i += 1
    tokens.append(_Token("EOF", "", _clamp_offset(n, n), line, n - line_start + 1))
    return tokens, diagnostics


# ---------------------------------------------------------------------------
# Syntactic pass
# ---------------------------------------------------------------------------

@dataclass
class _RawKeyValue:
    key: _Token
    value: _Token


@dataclass
class _RawElement:
    name: _Token
    args: list[tuple[_Token, _Token]]


@dataclass
class _RawSection:
    name: _Token
    items: list


class _Parser:
    def __init__(self, tokens: list[_Token], text_length: int):
        self.tokens = tokens
        self.pos = 0
        self.text_length = text_length
        self.diagnostics: list[Diagnostic] = []

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def error(self, token: _Token, message: str, hint: str,
              code: DiagnosticCode = DiagnosticCode.SYNTAX_ERROR) -> None:
        self.diagnostics.append(Diagnostic(
            code=code, message=message, hint=hint, line=token.line,
            column=token.column, offset=_clamp_offset(token.offset, self.text_length),
            token=token.text,
        ))

    def skip_item(self) -> None:
        """Panic recovery: drop tokens until after a `;` or before a `}`."""
        while True:
            tok = self.peek()
            if tok.kind in ("EOF", "RBRACE"):
                return
            self.advance()
            if tok.kind == "SEMI":
                return

    def skip_section(self) -> None:
        depth = 0
        while True:
            tok = self.peek()
            if tok.kind == "EOF":
                return
            self.advance()
            if tok.kind == "LBRACE":
                depth += 1
            elif tok.kind == "RBRACE":
                depth -= 1
                if depth <= 0:
                    return

    def parse_document(self) -> list[_RawSection]:
        sections: list[_RawSection] = []
        while self.peek().kind != "EOF":
            tok = self.peek()
            if tok.kind != "IDENT":
                self.error(tok, f"expected a section name, found {tok.text!r}",
                           "sections look like `name { ... }`")
                self.advance()
                continue
            name = self.advance()
            if self.peek().kind != "LBRACE":
                self.error(self.peek(),
                           f"expected '{{' after section name {name.text!r}",
                           "open the section with `{`")
                continue
            self.advance()  # {
            items = self.parse_items()
            sections.append(_RawSection(name=name, items=items))
        return sections

    def parse_items(self) -> list:
        items: list = []
        while True:
            tok = self.peek()
            if tok.kind == "RBRACE":
                self.advance()
                return items
            if tok.kind == "EOF":
                self.error(tok, "section is not closed",
                           "close the section with `}`")
                return items
            if tok.kind != "IDENT":
                self.error(tok, f"expected a key or element name, found {tok.text!r}",
                           "items are `key = value;` or `element(arg = value, ...);`")
                self.skip_item()
                continue
            name = self.advance()
            nxt = self.peek()
            if nxt.kind == "EQUALS":
                self.advance()
                value = self.parse_value()
                if value is None:
                    self.skip_item()
                    continue
                if not self.expect_semi():
                    continue
                items.append(_RawKeyValue(key=name, value=value))
            elif nxt.kind == "LPAREN":
                self.advance()
                args = self.parse_args()
                if args is None:
                    self.skip_item()
                    continue
                if not self.expect_semi():
                    continue
                items.append(_RawElement(name=name, args=args))
            else:
                self.error(nxt, f"expected '=' or '(' after {name.text!r}",
                           "write `key = value;` or `element(...);`")
                self.skip_item()
        return items

    def parse_value(self) -> _Token | None:
        tok = self.peek()
        if tok.kind in ("NUMBER", "IDENT", "STRING"):
            return self.advance()
        self.error(tok, f"expected a value, found {tok.text!r}",
                   "values are numbers, identifiers, or quoted strings")
        return None

    def parse_args(self) -> list[tuple[_Token, _Token]] | None:
        args: list[tuple[_Token, _Token]] = []
        if self.peek().kind == "RPAREN":
            self.advance()
            return args
        while True:
            key = self.peek()
            if key.kind != "IDENT":
                self.error(key, f"expected an argument name, found {key.text!r}",
                           "element arguments look like `name = value`")
                return None
            self.advance()
            if self.peek().kind != "EQUALS":
                self.error(self.peek(), "expected '=' in element argument",
                           "element arguments look like `name = value`")
                return None
            self.advance()
            value = self.parse_value()
            if value is None:
                return None
            args.append((key, value))
            tok = self.peek()
            if tok.kind == "COMMA":
                self.advance()
                continue
            if tok.kind == "RPAREN":
                self.advance()
                return args
            self.error(tok, f"expected ',' or ')', found {tok.text!r}",
                       "separate arguments with commas and close with `)`")
            return None

    def expect_semi(self) -> bool:
        tok = self.peek()
        if tok.kind == "SEMI":
            self.advance()
            return True
        self.error(tok, "expected ';' after the item",
                   "terminate every item with a semicolon")
        self.skip_item()
        return False


# ---------------------------------------------------------------------------
# Semantic pass
# ---------------------------------------------------------------------------

class _Validator:
    def __init__(self, text_length: int):
        self.diagnostics: list[Diagnostic] = []
        self.text_length = text_length

    def error(self, token: _Token, code: DiagnosticCode, message: str, hint: str) -> None:
        self.diagnostics.append(Diagnostic(
            code=code, message=message, hint=hint, line=token.line,
            column=token.column, offset=_clamp_offset(token.offset, self.text_length),
            token=token.text,
        ))

    # -- value conversion ---------------------------------------------------

    def as_float(self, key: str, token: _Token, allow_inf: bool = False) -> float | None:
        if token.kind == "IDENT" and token.text == "inf" and allow_inf:
            return math.inf
        if token.kind != "NUMBER":
            self.error(token, DiagnosticCode.TYPE_MISMATCH,
                       f"{key} expects a number, found {token.text!r}",
                       f"write e.g. `{key} = 1.0;`")
            return None
        value = float(token.text)
        if not math.isfinite(value):
            self.error(token, DiagnosticCode.TYPE_MISMATCH,
                       f"{key} must be finite", "use a finite numeric literal")
            return None
        return value

    def as_int(self, key: str, token: _Token) -> int | None:
        if token.kind != "NUMBER" or not re.fullmatch(r"[+-]?\d+", token.text):
            self.error(token, DiagnosticCode.TYPE_MISMATCH,
                       f"{key} expects an integer, found {token.text!r}",
                       f"write e.g. `{key} = 5;`")
            return None
        return int(token.text)

    def as_choice(self, key: str, token: _Token, choices) -> str | None:
        if token.kind != "IDENT" or token.text not in choices:
            self.error(token, DiagnosticCode.TYPE_MISMATCH,
                       f"{key} must be one of {', '.join(choices)}",
                       f"write e.g. `{key} = {choices[0]};`")
            return None
        return token.text

    def as_string(self, key: str, token: _Token) -> str | None:
        if token.kind != "STRING":
            self.error(token, DiagnosticCode.TYPE_MISMATCH,
                       f"{key} expects a quoted string", f'write `{key} = "...";`')
            return None
        return token.text[1:-1]

    # -- section plumbing ---------------------------------------------------

    def collect_keys(self, section: _RawSection, allowed) -> dict[str, tuple[_Token, _Token]]:
        out: dict[str, tuple[_Token, _Token]] = {}
        for item in section.items:
            if isinstance(item, _RawElement):
                self.error(item.name, DiagnosticCode.SYNTAX_ERROR,
                           f"section {section.name.text!r} takes `key = value;` "
                           "entries, not element calls",
                           "move element calls into the upper/lower sections")
                continue
            key = item.key.text
            if key not in allowed:
                self.error(item.key, DiagnosticCode.UNKNOWN_KEY,
                           f"unknown key {key!r} in section {section.name.text!r}",
                           f"allowed keys: {', '.join(sorted(allowed))}")
                continue
            if key in out:
                self.error(item.key, DiagnosticCode.DUPLICATE_KEY,
                           f"key {key!r} appears twice", "keep a single assignment")
                continue
            out[key] = (item.key, item.value)
        return out

    # -- sections -----------------------------------------------------------

    def particle(self, section: _RawSection) -> UnstableParticle | None:
        allowed = {"k", "ell", "momentum_si", "mass_si", "gamma_si", "label"}
        entries = self.collect_keys(section, allowed)
        label = ""
        if "label" in entries:
            label = self.as_string("label", entries["label"][1]) or ""
        plain = [k for k in ("k", "ell") if k in entries]
        si = [k for k in ("momentum_si", "mass_si", "gamma_si") if k in entries]
        if plain and si:
            self.error(entries[si[0]][0], DiagnosticCode.UNIT_MIX,
                       "particle mixes dimensionless (k/ell) and SI keys",
                       "give either `k` and `ell`, or the three *_si keys")
            return None
        if si or not plain:
            return self.particle_si(section, entries) if si else self.particle_missing(section)
        k = self.as_float("k", entries["k"][1]) if "k" in entries else self.missing_key(section, "k")
        ell = (self.as_float("ell", entries["ell"][1], allow_inf=True)
               if "ell" in entries else self.missing_key(section, "ell"))
        if k is None or ell is None:
            return None
        if k <= 0.0:
            self.error(entries["k"][1], DiagnosticCode.CONSTRAINT_VIOLATION,
                       "wavenumber k must be > 0", "use a positive value")
            return None
        if ell <= 0.0:
            self.error(entries["ell"][1], DiagnosticCode.CONSTRAINT_VIOLATION,
                       "decay length ell must be > 0", "use a positive value or inf")
            return None
        return UnstableParticle(k=k, ell=ell, label=label)

    def particle_missing(self, section: _RawSection) -> None:
        self.error(section.name, DiagnosticCode.MISSING_KEY,
                   "particle needs `k` and `ell` (or the three *_si keys)",
                   "add e.g. `k = 6.28; ell = 100.0;`")
        return None

    def missing_key(self, section: _RawSection, key: str) -> None:
        self.error(section.name, DiagnosticCode.MISSING_KEY,
                   f"section {section.name.text!r} is missing required key {key!r}",
                   f"add `{key} = ...;`")
        return None

    def particle_si(self, section: _RawSection, entries) -> UnstableParticle | None:
        values = {}
        ok = True
        for key in ("momentum_si", "mass_si", "gamma_si"):
            if key not in entries:
                self.missing_key(section, key)
                ok = False
                continue
            value = self.as_float(key, entries[key][1])
            if value is None:
                ok = False
                continue
            minimum = 0.0
            if key != "gamma_si" and value <= minimum:
                self.error(entries[key][1], DiagnosticCode.CONSTRAINT_VIOLATION,
                           f"{key} must be > 0", "use a positive value")
                ok = False
                continue
            if key == "gamma_si" and value < 0.0:
                self.error(entries[key][1], DiagnosticCode.CONSTRAINT_VIOLATION,
                           "gamma_si must be >= 0", "use a non-negative rate")
                ok = False
                continue
            values[key] = value
        if not ok:
            return None
        label = ""
        if "label" in entries:
            label = self.as_string("label", entries["label"][1]) or ""
        k = values["momentum_si"] / HBAR_SI
        if values["gamma_si"] == 0.0:
            ell = math.inf
        else:
            ell = values["momentum_si"] / (values["mass_si"] * values["gamma_si"])
        return UnstableParticle(k=k, ell=ell, label=label)

    def path(self, section: _RawSection) -> tuple | None:
        elements = []
        ok = True
        for item in section.items:
            if isinstance(item, _RawKeyValue):
                self.error(item.key, DiagnosticCode.SYNTAX_ERROR,
                           f"path section {section.name.text!r} holds element "
                           "calls, not key assignments",
                           "use `segment(length = ...);`, `cavity(...)` or `phase(...)`")
                ok = False
                continue
            element = self.element(item)
            if element is None:
                ok = False
                continue
            elements.append(element)
        if not elements and ok:
            self.error(section.name, DiagnosticCode.CONSTRAINT_VIOLATION,
                       f"path section {section.name.text!r} must not be empty",
                       "add at least one segment")
            ok = False
        return tuple(elements) if ok else None

    def element(self, item: _RawElement):
        kind = item.name.text
        schemas = {
            "segment": {"length": None, "gamma_ratio": 1.0},
            "cavity": {"length": None, "gamma_ratio": 1.0},
            "phase": {"phi": 0.0},
        }
        if kind not in schemas:
            self.error(item.name, DiagnosticCode.UNKNOWN_KEY,
                       f"unknown element {kind!r}",
                       "elements are segment(...), cavity(...), phase(...)")
            return None
        schema = schemas[kind]
        values = {}
        seen: set[str] = set()
        ok = True
        for key_tok, value_tok in item.args:
            key = key_tok.text
            if key not in schema:
                self.error(key_tok, DiagnosticCode.UNKNOWN_KEY,
                           f"element {kind!r} takes no argument {key!r}",
                           f"allowed arguments: {', '.join(sorted(schema))}")
                ok = False
                continue
            if key in seen:
                self.error(key_tok, DiagnosticCode.DUPLICATE_KEY,
                           f"argument {key!r} appears twice",
                           "keep a single assignment")
                ok = False
                continue
            seen.add(key)
            value = self.as_float(key, value_tok)
            if value is None:
                ok = False
                continue
            if key == "length" and value < 0.0:
                self.error(value_tok, DiagnosticCode.CONSTRAINT_NEGATIVE_LENGTH,
                           "length must be >= 0", "use a non-negative length")
                ok = False
                continue
            if key == "gamma_ratio" and value < 0.0:
                self.error(value_tok, DiagnosticCode.CONSTRAINT_VIOLATION,
                           "gamma_ratio must be >= 0", "use a non-negative ratio")
                ok = False
                continue
            values[key] = value
        for key, default in schema.items():
            if key in seen:
                continue
            if default is None:
                self.error(item.name, DiagnosticCode.MISSING_KEY,
                           f"element {kind!r} requires argument {key!r}",
                           f"write `{kind}({key} = ...);`")
                ok = False
            else:
                values[key] = default
        if not ok:
            return None
        if kind == "segment" and values["gamma_ratio"] != 1.0:
            self.error(item.name, DiagnosticCode.CONSTRAINT_VIOLATION,
                       "plain segments keep the free-space decay rate",
                       "use cavity(...) for a modified gamma_ratio")
            return None
        if kind == "phase":
            return PhaseElement(phi=values["phi"])
        return SegmentElement(kind=kind, length=values["length"],
                              gamma_ratio=values["gamma_ratio"])

    def splitter(self, section: _RawSection) -> str | None:
        entries = self.collect_keys(section, {"convention"})
        if "convention" not in entries:
            return self.missing_key(section, "convention")
        return self.as_choice("convention", entries["convention"][1], _SPLITTER_NAMES)

    def sweep(self, section: _RawSection) -> SweepSpec | None:
        entries = self.collect_keys(section, {"parameter", "start", "end", "steps", "scale"})
        parameter = (self.as_choice("parameter", entries["parameter"][1], _SWEEP_PARAMETERS)
                     if "parameter" in entries else self.missing_key(section, "parameter"))
        start = (self.as_float("start", entries["start"][1])
                 if "start" in entries else self.missing_key(section, "start"))
        end = (self.as_float("end", entries["end"][1])
               if "end" in entries else self.missing_key(section, "end"))
        steps = (self.as_int("steps", entries["steps"][1])
                 if "steps" in entries else self.missing_key(section, "steps"))
        scale = "linear"
        if "scale" in entries:
            scale = self.as_choice("scale", entries["scale"][1], _SCALES)
        if None in (parameter, start, end, steps, scale):
            return None
        anchor = entries.get("start", (section.name, section.name))[1]
        if steps < 2:
            self.error(entries["steps"][1], DiagnosticCode.CONSTRAINT_VIOLATION,
                       "steps must be >= 2", "use at least two grid points")
            return None
        if start == end:
            self.error(anchor, DiagnosticCode.CONSTRAINT_VIOLATION,
                       "sweep endpoints must differ", "make start != end")
            return None
        if scale == "log" and (start <= 0.0 or end <= 0.0):
            self.error(anchor, DiagnosticCode.CONSTRAINT_VIOLATION,
                       "log-scale endpoints must be positive",
                       "use positive endpoints or linear scale")
            return None
        return SweepSpec(parameter=parameter, start=start, end=end,
                         steps=steps, scale=scale)

    def oracle(self, section: _RawSection) -> OracleOverrides | None:
        entries = self.collect_keys(
            section, {"packet_width", "points_per_wavelength", "oracle_tol"})
        values: dict[str, float | None] = {
            "packet_width": None, "points_per_wavelength": None, "oracle_tol": None}
        ok = True
        for key in values:
            if key not in entries:
                continue
            value = self.as_float(key, entries[key][1])
            if value is None:
                ok = False
                continue
            floor = 2.0 if key == "points_per_wavelength" else 0.0
            if value <= floor:
                self.error(entries[key][1], DiagnosticCode.CONSTRAINT_VIOLATION,
                           f"{key} must be > {floor:g}", "use a larger value")
                ok = False
                continue
            values[key] = value
        return OracleOverrides(**values) if ok else None


def parse(text: str) -> ParseResult:
    """Parse layout text into a document, or report diagnostics.

    Total and deterministic: any input string yields either a document or
    a non-empty diagnostic list, never an exception.
    """
    tokens, diagnostics = _lex(text)
    parser = _Parser(tokens, len(text))
    raw_sections = parser.parse_document()
    diagnostics.extend(parser.diagnostics)

    validator = _Validator(len(text))
    sections: dict[str, _RawSection] = {}
    for section in raw_sections:
        name = section.name.text
        if name not in _SECTION_ORDER:
            validator.error(section.name, DiagnosticCode.UNKNOWN_SECTION,
                            f"unknown section {name!r}",
                            f"sections are: {', '.join(_SECTION_ORDER)}")
            continue
        if name in sections:
            validator.error(section.name, DiagnosticCode.DUPLICATE_SECTION,
                            f"section {name!r} appears twice",
                            "merge the two blocks")
            continue
        sections[name] = section

    anchor = _Token("IDENT", "", 0, 1, 1)
    for required in ("particle", "upper", "lower"):
        if required not in sections:
            validator.error(anchor, DiagnosticCode.MISSING_SECTION,
                            f"required section {required!r} is missing",
                            f"add a `{required} {{ ... }}` block")

    particle = upper = lower = None
    splitter = "symmetric"
    sweep = oracle = None
    if "particle" in sections:
        particle = validator.particle(sections["particle"])
    if "upper" in sections:
        upper = validator.path(sections["upper"])
    if "lower" in sections:
        lower = validator.path(sections["lower"])
    if "splitter" in sections:
        splitter = validator.splitter(sections["splitter"])
    if "sweep" in sections:
        sweep = validator.sweep(sections["sweep"])
    if "oracle" in sections:
        oracle = validator.oracle(sections["oracle"])

    diagnostics.extend(validator.diagnostics)
    if diagnostics or particle is None or upper is None or lower is None or splitter is None:
        return ParseResult(document=None, diagnostics=tuple(diagnostics))
    document = LayoutDocument(particle=particle, upper=upper, lower=lower,
                              splitter=splitter, sweep=sweep, oracle=oracle)
    return ParseResult(document=document, diagnostics=())


# ---------------------------------------------------------------------------
# Canonical serialization
# ---------------------------------------------------------------------------

def _fmt(value: float) -> str:
    """Shortest representation that round-trips the double exactly."""
    return repr(float(value))


def serialize(document: LayoutDocument) -> str:
    """Canonical text for a document: fixed section order, sorted keys,
    one item per line.  ``parse(serialize(d))`` reproduces ``d``."""
    lines: list[str] = []

    def block(name: str, items: list[str]) -> None:
        lines.append(f"{name} {{")
        lines.extend(f"  {item}" for item in items)
        lines.append("}")

    particle_items = [f"ell = {_fmt(document.particle.ell)};",
                      f"k = {_fmt(document.particle.k)};"]
    label = document.particle.label
    if label:
        if '"' in label or "\n" in label:
            raise DomainError("labels cannot contain quotes or newlines")
        particle_items.append(f'label = "{label}";')
    block("particle", particle_items)

    for name, elements in (("upper", document.upper), ("lower", document.lower)):
        items = []
        for element in elements:
            if isinstance(element, SegmentElement):
                items.append(
                    f"{element.kind}(gamma_ratio = {_fmt(element.gamma_ratio)}, "
                    f"length = {_fmt(element.length)});"
                )
            else:
                items.append(f"phase(phi = {_fmt(element.phi)});")
        block(name, items)

    block("splitter", [f"convention = {document.splitter};"])

    if document.sweep is not None:
        s = document.sweep
        block("sweep", [
            f"end = {_fmt(s.end)};",
            f"parameter = {s.parameter};",
            f"scale = {s.scale};",
            f"start = {_fmt(s.start)};",
            f"steps = {s.steps};",
        ])

    if document.oracle is not None:
        o = document.oracle
        items = []
        if o.oracle_tol is not None:
            items.append(f"oracle_tol = {_fmt(o.oracle_tol)};")
        if o.packet_width is not None:
            items.append(f"packet_width = {_fmt(o.packet_width)};")
        if o.points_per_wavelength is not None:
            items.append(f"points_per_wavelength = {_fmt(o.points_per_wavelength)};")
        block("oracle", items)

    return "\n".join(lines) + "\n"
