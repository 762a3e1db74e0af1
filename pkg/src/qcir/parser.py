r"""Tokenizer, parser and canonical pretty-printer for ``\Qcircuit`` source."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .model import (
    COMMANDS, CWire, CWireX, Cell, CellAddress, CircuitAst, ControlDot, ControlDotOpen,
    Ctrl, CtrlOpen, DStick, Diagnostic, Dimension, Element, FrameStyle, GateGroup, Ghost,
    Gate, LStick, Link, Measure, MeasureD, MeasureTab, Meter, MultiGate, MultiMeasure,
    MultiMeasureD, Node, Push, PureGhost, QWire, QWireX, QcircuitError, RStick, Severity,
    Spacing, Swap, Targ, UStick, format_number, normalize_label,
)


class TokenKind(str, Enum):
    COMMAND = "Command"
    GROUP = "Group"
    OPTARG = "OptArg"
    AMPERSAND = "Ampersand"
    ROWBREAK = "RowBreak"
    SPACING = "SpacingOpt"
    TEXT = "Text"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: tuple[int, int]
    key: str = ""

    @property
    def body_offset(self) -> int:
        """Offset of the first character inside a Group or OptArg."""
        return self.span[0] + 1


_LETTERS = re.compile(r"[A-Za-z]+")
_SPACING = re.compile(
    r"@(?:(?P<cr>[CR])=(?P<crv><[^>]*>|[^\s{@]+)"
    r"|\*=<(?P<star>[^>]*)>"
    r"|\*\[(?P<shape>[^\]]*)\]"
    r"|(?P<bang>!(?:R|C)?))")
_TEXT_STOP = set(" \t\r\n\\{}&%@")


def _skip_blank(source: str, i: int) -> int:
    n = len(source)
    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            i += 1
        elif ch == "%":
            nl = source.find("\n", i)
            i = n if nl < 0 else nl + 1
        else:
            break
    return i


def _match_delimited(source: str, start: int, open_ch: str, close_ch: str, base: int) -> int:
    """Index just past the delimiter closing the one at ``start``."""
    depth = 0
    i = start
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\\":
            i += 2
            continue
        if ch == "%":
            nl = source.find("\n", i)
            i = n if nl < 0 else nl + 1
            continue
        if open_ch == "[" and ch == "{":
            # braces hide brackets inside an optional argument
            i = _match_delimited(source, i, "{", "}", base)
            continue
        if ch == open_ch:
            depth += 1
        elif ch == close_ch:
            depth -= 1
            if depth == 0:
                return i + 1
        i += 1
    what = "brace" if open_ch == "{" else "bracket"
    raise QcircuitError(f"unbalanced {what}: '{open_ch}' is never closed", base + start,
                        "unbalanced-" + what)


def tokenize(source: str, base: int = 0) -> list[Token]:
    """Split TeX-like source into tokens.

    ``base`` is added to every span so nested bodies report offsets into the
    original input. Whitespace and ``%`` comments between tokens are skipped.
    """
    tokens: list[Token] = []
    i = _skip_blank(source, 0)
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\\":
            if i + 1 >= n:
                raise QcircuitError("'\\' at end of input", base + i, "bad-escape")
            m = _LETTERS.match(source, i + 1)
            if m:
                tokens.append(Token(TokenKind.COMMAND, m.group(0), (base + i, base + m.end())))
                i = m.end()
                j = _skip_blank(source, i)
                if j < n and source[j] == "[":
                    end = _match_delimited(source, j, "[", "]", base)
                    tokens.append(Token(TokenKind.OPTARG, source[j + 1:end - 1], (base + j, base + end)))
                    i = end
            elif source[i + 1] == "\\":
                tokens.append(Token(TokenKind.ROWBREAK, "\\\\", (base + i, base + i + 2)))
                i += 2
            else:
                tokens.append(Token(TokenKind.COMMAND, source[i + 1], (base + i, base + i + 2)))
                i += 2
        elif ch == "{":
            end = _match_delimited(source, i, "{", "}", base)
            tokens.append(Token(TokenKind.GROUP, source[i + 1:end - 1], (base + i, base + end)))
            i = end
        elif ch == "}":
            raise QcircuitError("unbalanced brace: unexpected '}'", base + i, "unbalanced-brace")
        elif ch == "&":
            tokens.append(Token(TokenKind.AMPERSAND, "&", (base + i, base + i + 1)))
            i += 1
        elif ch == "@" and (m := _SPACING.match(source, i)):
            if m.group("cr"):
                key, value = m.group("cr"), m.group("crv")
                if value.startswith("<"):
                    value = value[1:-1]
            elif m.group("star") is not None:
                key, value = "*=", m.group("star")
            elif m.group("shape") is not None:
                key, value = "*[]", m.group("shape")
            else:
                key, value = m.group("bang"), ""
            tokens.append(Token(TokenKind.SPACING, value, (base + i, base + m.end()), key))
            i = m.end()
        else:
            j = i + 1
            while j < n and source[j] not in _TEXT_STOP:
                j += 1
            tokens.append(Token(TokenKind.TEXT, source[i:j], (base + i, base + j)))
            i = j
        i = _skip_blank(source, i)
    return tokens


_DIMENSION = re.compile(r"\s*([+-]?(?:\d+\.?\d*|\.\d+))\s*(em|ex|pt)\s*")


def parse_dimension(text: str) -> Dimension:
    m = _DIMENSION.fullmatch(text)
    if m is None:
        if re.fullmatch(r"\s*[+-]?(?:\d+\.?\d*|\.\d+)\s*", text):
            raise ValueError(f"dimension {text.strip()!r} is missing a unit (em, ex or pt)")
        raise ValueError(f"invalid dimension {text.strip()!r}")
    return Dimension(float(m.group(1)), m.group(2))


_INTEGER = re.compile(r"\s*([+-]?\d+)\s*")


def _integer(tok: Token, command: str) -> int:
    m = _INTEGER.fullmatch(tok.text)
    if m is None:
        raise QcircuitError(f"\\{command} expects an integer argument, got {tok.text!r}",
                            tok.body_offset, "bad-integer")
    return int(m.group(1))


def _label(tok: Token):
    try:
        return normalize_label(tok.text)
    except QcircuitError as exc:
        exc.offset = tok.body_offset + (exc.offset or 0)
        raise


_LABEL_ONLY = {
    "gate": Gate, "measure": Measure, "measuretab": MeasureTab, "measureD": MeasureD,
    "ghost": Ghost, "pureghost": PureGhost, "push": Push,
    "lstick": LStick, "rstick": RStick, "ustick": UStick, "dstick": DStick,
}
_NO_ARGS = {"meter": Meter, "control": ControlDot, "controlo": ControlDotOpen,
            "targ": Targ, "qswap": Swap}
_OPTIONAL_OFFSET = {"qw": QWire, "qwx": QWireX, "cw": CWire, "cwx": CWireX}
_SPAN_LABEL = {"multigate": MultiGate, "multimeasure": MultiMeasure,
               "multimeasureD": MultiMeasureD}
_OFFSET = {"ctrl": Ctrl, "ctrlo": CtrlOpen}


def parse_element(tokens: list[Token], cursor: int) -> tuple[Element, int]:
    """Parse the macro call whose command token sits at ``cursor``.

    Returns the element and the index of the first token not consumed.
    """
    head = tokens[cursor]
    name = head.text
    if head.kind != TokenKind.COMMAND or name not in COMMANDS:
        raise QcircuitError(f"unknown command \\{name}", head.span[0], "unknown-command")
    pos = cursor + 1

    def optarg() -> Optional[Token]:
        nonlocal pos
        if pos < len(tokens) and tokens[pos].kind == TokenKind.OPTARG:
            pos += 1
            return tokens[pos - 1]
        return None

    def group(index: int) -> Token:
        nonlocal pos
        if pos >= len(tokens) or tokens[pos].kind != TokenKind.GROUP:
            at = tokens[pos].span[0] if pos < len(tokens) else head.span[1]
            raise QcircuitError(f"\\{name} is missing required braced argument #{index}",
                                at, "missing-argument")
        pos += 1
        return tokens[pos - 1]

    opt = optarg()
    if opt is not None and name not in _OPTIONAL_OFFSET and name != "node":
        raise QcircuitError(f"\\{name} takes no optional argument", opt.span[0], "unexpected-optarg")

    try:
        if name in _OPTIONAL_OFFSET:
            value = -1 if opt is None else _integer(opt, name)
            el = _OPTIONAL_OFFSET[name](value)
        elif name in _NO_ARGS:
            el = _NO_ARGS[name]()
        elif name in _LABEL_ONLY:
            el = _LABEL_ONLY[name](_label(group(1)))
        elif name in _OFFSET:
            el = _OFFSET[name](_integer(group(1), name))
        elif name in _SPAN_LABEL:
            span_tok = group(1)
            span = _integer(span_tok, name)
            el = _SPAN_LABEL[name](span, _label(group(2)))
        elif name == "gategroup":
            args = [group(k) for k in range(1, 7)]
            coords = [_integer(t, name) for t in args[:4]]
            try:
                pad = parse_dimension(args[4].text)
            except ValueError as exc:
                raise QcircuitError(f"\\gategroup padding: {exc}", args[4].body_offset,
                                    "bad-dimension") from None
            try:
                frame = FrameStyle.from_token(args[5].text)
            except ValueError as exc:
                raise QcircuitError(f"\\gategroup {exc}", args[5].body_offset,
                                    "bad-frame") from None
            el = GateGroup(*coords, pad, frame)
        elif name == "node":
            sup = _label(opt) if opt is not None and opt.text.strip() else None
            el = Node(_label(group(1)), sup)
        else:  # link
            el = Link(_integer(group(1), name), _integer(group(2), name))
    except ValueError as exc:
        if isinstance(exc, QcircuitError):
            raise
        raise QcircuitError(str(exc), head.span[0], "bad-argument") from None
    return el, pos


class _Parser:
    def __init__(self, source: str, lenient: bool):
        self.source = source
        self.lenient = lenient
        self.warnings: list[Diagnostic] = []

    def warn(self, code: str, message: str, offset: int, cell: CellAddress | None = None):
        self.warnings.append(Diagnostic(Severity.WARNING, code, message, cell, (offset, offset)))

    def parse(self) -> CircuitAst:
        tokens = tokenize(self.source)
        pos = 0
        while pos < len(tokens) and not (
                tokens[pos].kind == TokenKind.COMMAND and tokens[pos].text == "Qcircuit"):
            if not self.lenient:
                raise QcircuitError("expected \\Qcircuit", tokens[pos].span[0], "expected-qcircuit")
            pos += 1
        if pos == len(tokens):
            raise QcircuitError("no \\Qcircuit found", len(self.source), "expected-qcircuit")
        if pos:
            self.warn("skipped-text", "skipped input before \\Qcircuit", tokens[0].span[0])
        pos += 1

        col_sep, row_sep, margin = Dimension(1.0), Dimension(1.0), Dimension(0.05)
        equalize: list[str] = []
        while pos < len(tokens) and tokens[pos].kind in (TokenKind.OPTARG, TokenKind.SPACING):
            tok = tokens[pos]
            pos += 1
            if tok.kind == TokenKind.SPACING and tok.key in ("!", "!R", "!C"):
                equalize.append(tok.key)
                self.warn("equalize-ignored", f"spacing option @{tok.key} is recorded but ignored",
                          tok.span[0])
                continue
            if tok.kind == TokenKind.SPACING and tok.key == "*[]":
                continue
            try:
                dim = parse_dimension(tok.text)
            except ValueError as exc:
                raise QcircuitError(str(exc), tok.span[0], "bad-dimension") from None
            if tok.kind == TokenKind.OPTARG or tok.key == "*=":
                margin = dim
            elif tok.key == "C":
                col_sep = dim
            else:
                row_sep = dim

        if pos >= len(tokens) or tokens[pos].kind != TokenKind.GROUP:
            at = tokens[pos].span[0] if pos < len(tokens) else len(self.source)
            raise QcircuitError("\\Qcircuit is missing its braced body", at, "missing-argument")
        body = tokens[pos]
        pos += 1
        if pos < len(tokens):
            if not self.lenient:
                raise QcircuitError("unexpected input after \\Qcircuit body",
                                    tokens[pos].span[0], "trailing-input")
            self.warn("skipped-text", "skipped input after \\Qcircuit body", tokens[pos].span[0])

        rows = self.parse_body(body)
        return CircuitAst(rows, Spacing(col_sep, row_sep, margin, tuple(equalize)))

    def parse_body(self, body: Token) -> tuple[tuple[Cell, ...], ...]:
        tokens = tokenize(body.text, body.body_offset)
        rows: list[tuple[Cell, ...]] = []
        cells: list[Cell] = []
        elements: list[Element] = []
        start = end = None
        row_breaks = 0
        pending_tokens = 0

        def close_cell(at: int):
            nonlocal elements, start, end, pending_tokens
            span = (start, end) if start is not None else (at, at)
            cells.append(Cell(tuple(elements), span))
            elements, start, end, pending_tokens = [], None, None, 0

        pos = 0
        while pos < len(tokens):
            tok = tokens[pos]
            here = CellAddress(len(rows), len(cells))
            if tok.kind == TokenKind.AMPERSAND:
                close_cell(tok.span[0])
                pos += 1
                continue
            if tok.kind == TokenKind.ROWBREAK:
                close_cell(tok.span[0])
                rows.append(tuple(cells))
                cells = []
                row_breaks += 1
                pos += 1
                continue
            pending_tokens += 1
            if start is None:
                start = tok.span[0]
            if tok.kind == TokenKind.COMMAND and tok.text in COMMANDS:
                try:
                    el, pos = parse_element(tokens, pos)
                except QcircuitError as exc:
                    exc.cell = here
                    raise
                elements.append(el)
                end = tokens[pos - 1].span[1]
                continue
            if tok.kind == TokenKind.COMMAND:
                message = f"unknown command \\{tok.text} in cell {here}"
                code = "unknown-command"
            elif tok.kind == TokenKind.SPACING:
                message = "spacing options are only accepted before the \\Qcircuit body"
                code = "misplaced-spacing"
            else:
                message = f"unexpected {tok.kind.value} {tok.text!r} in cell {here}"
                code = "unexpected-token"
            if not self.lenient:
                raise QcircuitError(message, tok.span[0], code, here)
            self.warn(code, message + " (skipped)", tok.span[0], here)
            pos += 1
            if tok.kind == TokenKind.COMMAND:
                while pos < len(tokens) and tokens[pos].kind in (TokenKind.GROUP, TokenKind.OPTARG):
                    pos += 1

        trailing_blank = not elements and not cells and pending_tokens == 0
        if not (row_breaks and trailing_blank):
            close_cell(body.span[1] - 1)
            rows.append(tuple(cells))
        return tuple(rows)


def parse_with_diagnostics(source: str, *, lenient: bool = False) -> tuple[CircuitAst, list[Diagnostic]]:
    """Parse and also return the non-fatal warnings collected on the way."""
    parser = _Parser(source, lenient)
    ast = parser.parse()
    return ast, parser.warnings


def parse(source: str, *, lenient: bool = False) -> CircuitAst:
    r"""Parse ``\Qcircuit`` source into a :class:`CircuitAst`.

    Raises :class:`QcircuitError` carrying the byte offset of the problem.
    Unknown commands are errors unless ``lenient`` is set, in which case
    they are skipped (see :func:`parse_with_diagnostics` for the warnings).
    """
    return parse_with_diagnostics(source, lenient=lenient)[0]


# ---------------------------------------------------------------------------
# Pretty printer
# ---------------------------------------------------------------------------

def _offset(command: str, value: int) -> str:
    return f"\\{command}" if value == -1 else f"\\{command}[{value}]"


def format_element(el: Element) -> str:
    cmd = "\\" + el.command
    if isinstance(el, (QWire, CWire)):
        return _offset(el.command, el.dcol)
    if isinstance(el, (QWireX, CWireX)):
        return _offset(el.command, el.drow)
    if isinstance(el, (Ctrl, CtrlOpen)):
        return f"{cmd}{{{el.drow}}}"
    if isinstance(el, (MultiGate, MultiMeasure, MultiMeasureD)):
        return f"{cmd}{{{el.span}}}{{{el.label.raw}}}"
    if isinstance(el, GateGroup):
        return (f"{cmd}{{{el.row1}}}{{{el.col1}}}{{{el.row2}}}{{{el.col2}}}"
                f"{{{el.pad}}}{{{el.frame.token}}}")
    if isinstance(el, Node):
        sup = f"[{el.super.raw}]" if el.super is not None else ""
        return f"{cmd}{sup}{{{el.label.raw}}}"
    if isinstance(el, Link):
        return f"{cmd}{{{el.drow}}}{{{el.dcol}}}"
    label = getattr(el, "label", None)
    if label is not None:
        return f"{cmd}{{{label.raw}}}"
    return cmd


def format(ast: CircuitAst) -> str:  # noqa: A001 - mirrors parse()
    """Canonical source: one row per line, `` & `` between cells, ``\\\\`` after each row."""
    sp = ast.spacing
    head = "\\Qcircuit"
    if sp.object_margin != Spacing().object_margin:
        head += f"[{sp.object_margin}]"
    head += f" @C={sp.col_sep} @R={sp.row_sep}"
    for flag in sp.equalize:
        head += f" @{flag}"
    lines = [head + " {"]
    for row in ast.rows:
        cells = [" ".join(format_element(el) for el in cell.elements) for cell in row]
        lines.append(" & ".join(cells) + " \\\\")
    lines.append("}")
    return "\n".join(lines)


__all__ = [
    "Token", "TokenKind", "tokenize", "parse", "parse_with_diagnostics", "parse_element",
    "parse_dimension", "format", "format_element", "format_number",
]
