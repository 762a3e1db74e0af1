"""Circuit data model: dimensions, labels, element kinds, cells and validation."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import ClassVar, Iterator, Optional


class QcircuitError(ValueError):
    """A parse or label problem tied to a position in the source text."""

    def __init__(self, message: str, offset: int | None = None, code: str = "parse-error",
                 cell: "CellAddress | None" = None):
        super().__init__(message)
        self.message = message
        self.offset = offset
        self.code = code
        self.cell = cell

    def to_diagnostic(self) -> "Diagnostic":
        span = None if self.offset is None else (self.offset, self.offset)
        return Diagnostic(Severity.ERROR, self.code, self.message, self.cell, span)


ParseError = QcircuitError


# ---------------------------------------------------------------------------
# Dimensions
# ---------------------------------------------------------------------------

PT_PER_EM = 10.0
EM_PER_EX = 0.5


@dataclass(frozen=True)
class Dimension:
    value: float
    unit: str = "em"

    UNITS: ClassVar[tuple[str, ...]] = ("em", "ex", "pt")

    def __post_init__(self):
        if self.unit not in self.UNITS:
            raise ValueError(f"unknown unit {self.unit!r}")
        if not math.isfinite(self.value):
            raise ValueError("dimension value must be finite")

    def to_em(self, pt_per_em: float = PT_PER_EM, em_per_ex: float = EM_PER_EX) -> float:
        if self.unit == "em":
            return self.value
        if self.unit == "ex":
            return self.value * em_per_ex
        return self.value / pt_per_em

    def __str__(self) -> str:
        return format_number(self.value) + self.unit


def format_number(value: float) -> str:
    """Shortest decimal that reads back to exactly ``value``, never in exponent form."""
    value = float(value)
    if value == 0:
        return "0"
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    text = repr(value)
    if "e" in text or "E" in text:
        from decimal import Decimal
        text = format(Decimal(text), "f")
    return text


# ---------------------------------------------------------------------------
# Addresses, frames, labels
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class CellAddress:
    row: int
    col: int

    def __str__(self) -> str:
        return f"({self.row}, {self.col})"


class FrameStyle(str, Enum):
    SOLID = "solid"
    DASHED = "dashed"
    DOTTED = "dotted"
    BRACE_LEFT = "braceLeft"
    BRACE_RIGHT = "braceRight"
    BRACE_TOP = "braceTop"
    BRACE_BOTTOM = "braceBottom"

    @classmethod
    def from_token(cls, token: str) -> "FrameStyle":
        try:
            return _FRAME_TOKENS[token.strip()]
        except KeyError:
            raise ValueError(f"unknown frame style {token.strip()!r}") from None

    @property
    def token(self) -> str:
        return _FRAME_SOURCE[self]

    @property
    def is_brace(self) -> bool:
        return self.value.startswith("brace")


_FRAME_TOKENS = {
    "-": FrameStyle.SOLID,
    "--": FrameStyle.DASHED,
    ".": FrameStyle.DOTTED,
    "\\{": FrameStyle.BRACE_LEFT,
    "\\}": FrameStyle.BRACE_RIGHT,
    "^\\}": FrameStyle.BRACE_TOP,
    "_\\}": FrameStyle.BRACE_BOTTOM,
}
_FRAME_SOURCE = {v: k for k, v in _FRAME_TOKENS.items()}


class RunStyle(str, Enum):
    NORMAL = "normal"
    SUPERSCRIPT = "superscript"
    SUBSCRIPT = "subscript"
    SMALL = "small"


@dataclass(frozen=True)
class Run:
    text: str
    style: RunStyle = RunStyle.NORMAL


@dataclass(frozen=True)
class LabelText:
    raw: str
    runs: tuple[Run, ...] = ()

    @classmethod
    def parse(cls, raw: str) -> "LabelText":
        return normalize_label(raw)

    @property
    def plain(self) -> str:
        return "".join(run.text for run in self.runs)

    def __str__(self) -> str:
        return self.raw


# ---------------------------------------------------------------------------
# Label mini-language
# ---------------------------------------------------------------------------

_GREEK = {
    "alpha": "α", "beta": "β", "gamma": "γ", "delta": "δ", "epsilon": "ϵ",
    "varepsilon": "ε", "zeta": "ζ", "eta": "η", "theta": "θ", "vartheta": "ϑ",
    "iota": "ι", "kappa": "κ", "lambda": "λ", "mu": "μ", "nu": "ν", "xi": "ξ",
    "omicron": "ο", "pi": "π", "varpi": "ϖ", "rho": "ρ", "varrho": "ϱ",
    "sigma": "σ", "varsigma": "ς", "tau": "τ", "upsilon": "υ", "phi": "ϕ",
    "varphi": "φ", "chi": "χ", "psi": "ψ", "omega": "ω",
    "Alpha": "Α", "Beta": "Β", "Gamma": "Γ", "Delta": "Δ", "Epsilon": "Ε",
    "Zeta": "Ζ", "Eta": "Η", "Theta": "Θ", "Iota": "Ι", "Kappa": "Κ",
    "Lambda": "Λ", "Mu": "Μ", "Nu": "Ν", "Xi": "Ξ", "Omicron": "Ο", "Pi": "Π",
    "Rho": "Ρ", "Sigma": "Σ", "Tau": "Τ", "Upsilon": "Υ", "Phi": "Φ",
    "Chi": "Χ", "Psi": "Ψ", "Omega": "Ω",
}

_SYMBOLS = {
    "dagger": "†", "dag": "†", "langle": "⟨", "rangle": "⟩", "vert": "|",
    "lvert": "|", "rvert": "|", "otimes": "⊗", "oplus": "⊕", "times": "×",
    "cdot": "·", "pm": "±", "sqrt": "√", "backslash": "\\", "hbar": "ℏ",
}

# Sizing and font switches that only wrap their argument.
_TRANSPARENT = {"left", "right", "mathrm", "text", "textrm", "mathbf", "mathit",
                "textbf", "textit", "mathsf", "rm", "displaystyle"}

_SPACES = {";": " ", ",": " ", " ": " ", ":": " ", "!": ""}
_ESCAPES = {"{", "}", "$", "&", "%", "#", "_", "^"}


class _LabelReader:
    def __init__(self, raw: str):
        self.raw = raw
        self.pos = 0
        self.out: list[Run] = []

    def emit(self, text: str, style: RunStyle):
        if not text:
            return
        if self.out and self.out[-1].style == style:
            self.out[-1] = Run(self.out[-1].text + text, style)
        else:
            self.out.append(Run(text, style))

    def read_group(self, start: int) -> tuple[str, int]:
        """Return the body of the brace group opening at ``start`` and the index after it."""
        depth = 0
        i = start
        raw = self.raw
        while i < len(raw):
            ch = raw[i]
            if ch == "\\":
                i += 2
                continue
            if ch == "%":
                nl = raw.find("\n", i)
                i = len(raw) if nl < 0 else nl + 1
                continue
            if ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
                if depth == 0:
                    return raw[start + 1:i], i + 1
            i += 1
        raise QcircuitError("unbalanced braces in label", start, "label-braces")

    def read_argument(self, i: int) -> tuple[str, int]:
        """One TeX argument: a brace group or a single token."""
        raw = self.raw
        while i < len(raw) and raw[i] in " \t\n":
            i += 1
        if i >= len(raw):
            return "", i
        if raw[i] == "{":
            return self.read_group(i)
        if raw[i] == "\\":
            m = re.compile(r"\\([A-Za-z]+|.)").match(raw, i)
            if m is None:
                return "", len(raw)
            return m.group(0), m.end()
        return raw[i], i + 1

    def run(self, text: str, style: RunStyle, base: int = 0) -> None:
        saved_raw, saved_pos = self.raw, self.pos
        self.raw = text
        i = 0
        while i < len(text):
            ch = text[i]
            if ch == "%":
                nl = text.find("\n", i)
                i = len(text) if nl < 0 else nl + 1
            elif ch == "$":
                i += 1
            elif ch == "{":
                body, i2 = self.read_group(i)
                self.run(body, style)
                i = i2
            elif ch == "}":
                raise QcircuitError("unbalanced braces in label", base + i, "label-braces")
            elif ch in "^_":
                arg, i = self.read_argument(i + 1)
                self.run(arg, RunStyle.SUPERSCRIPT if ch == "^" else RunStyle.SUBSCRIPT)
            elif ch == "\\":
                i = self.control(i, style)
            else:
                self.emit(ch, style)
                i += 1
        self.raw, self.pos = saved_raw, saved_pos

    def control(self, i: int, style: RunStyle) -> int:
        text = self.raw
        if i + 1 >= len(text):
            self.emit("\\", style)
            return i + 1
        m = re.compile(r"[A-Za-z]+").match(text, i + 1)
        if m is None:
            sym = text[i + 1]
            if sym in _SPACES:
                self.emit(_SPACES[sym], style)
            elif sym in _ESCAPES:
                self.emit(sym, style)
            elif sym == "\\":
                self.emit(" ", style)
            else:
                self.emit(sym, style)
            return i + 2
        name = m.group(0)
        j = m.end()
        while j < len(text) and text[j] in " \t\n":
            j += 1
        if name in ("ket", "bra"):
            arg, j = self.read_argument(j)
            inner = _LabelReader(arg)
            inner.run(arg, RunStyle.NORMAL)
            body = "".join(r.text for r in inner.out)
            self.emit(f"|{body}⟩" if name == "ket" else f"⟨{body}|", style)
        elif name in _GREEK:
            self.emit(_GREEK[name], style)
        elif name in _SYMBOLS:
            self.emit(_SYMBOLS[name], style)
        elif name in _TRANSPARENT:
            pass
        else:
            self.emit(name, style)
        return j


def normalize_label(raw: str) -> LabelText:
    """Turn TeX-ish label source into styled runs.

    Raises QcircuitError when braces are unbalanced.
    """
    reader = _LabelReader(raw)
    reader.run(raw, RunStyle.NORMAL)
    return LabelText(raw, tuple(reader.out))


def _escape_label(text: str) -> str:
    out = []
    for ch in text:
        if ch == "\\":
            out.append("\\backslash{}")
        elif ch in _ESCAPES:
            out.append("\\" + ch)
        else:
            out.append(ch)
    return "".join(out)


def label_source(runs: tuple[Run, ...] | list[Run]) -> str:
    """Inverse of normalization: source text that normalizes back to ``runs``."""
    parts = []
    for run in runs:
        text = _escape_label(run.text)
        if run.style == RunStyle.SUPERSCRIPT:
            parts.append("^{" + text + "}")
        elif run.style == RunStyle.SUBSCRIPT:
            parts.append("_{" + text + "}")
        else:
            parts.append(text)
    return "".join(parts)


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------

class Element:
    """Base of every element kind; ``command`` is the macro name without backslash."""

    command: ClassVar[str] = ""
    # Whether the macro body ends in an implicit \qw back to the left neighbour.
    trailing_wire: ClassVar[bool] = False

    @property
    def kind(self) -> str:
        return type(self).__name__


@dataclass(frozen=True)
class QWire(Element):
    dcol: int = -1
    command: ClassVar[str] = "qw"


@dataclass(frozen=True)
class QWireX(Element):
    drow: int = -1
    command: ClassVar[str] = "qwx"


@dataclass(frozen=True)
class CWire(Element):
    dcol: int = -1
    command: ClassVar[str] = "cw"


@dataclass(frozen=True)
class CWireX(Element):
    drow: int = -1
    command: ClassVar[str] = "cwx"


@dataclass(frozen=True)
class Gate(Element):
    label: LabelText
    command: ClassVar[str] = "gate"
    trailing_wire: ClassVar[bool] = True


@dataclass(frozen=True)
class Meter(Element):
    command: ClassVar[str] = "meter"
    trailing_wire: ClassVar[bool] = True


@dataclass(frozen=True)
class Measure(Element):
    label: LabelText
    command: ClassVar[str] = "measure"
    trailing_wire: ClassVar[bool] = True


@dataclass(frozen=True)
class MeasureTab(Element):
    label: LabelText
    command: ClassVar[str] = "measuretab"
    trailing_wire: ClassVar[bool] = True


@dataclass(frozen=True)
class MeasureD(Element):
    label: LabelText
    command: ClassVar[str] = "measureD"
    trailing_wire: ClassVar[bool] = True


class _Spanning(Element):
    def __post_init__(self):
        if self.span < 1:
            raise ValueError(
                f"\\{self.command} span must be >= 1 (got {self.span}); "
                "use \\gate for a single-row box")


@dataclass(frozen=True)
class MultiMeasure(_Spanning):
    span: int
    label: LabelText
    command: ClassVar[str] = "multimeasure"
    trailing_wire: ClassVar[bool] = True


@dataclass(frozen=True)
class MultiMeasureD(_Spanning):
    span: int
    label: LabelText
    command: ClassVar[str] = "multimeasureD"
    trailing_wire: ClassVar[bool] = True


@dataclass(frozen=True)
class MultiGate(_Spanning):
    span: int
    label: LabelText
    command: ClassVar[str] = "multigate"
    trailing_wire: ClassVar[bool] = True


@dataclass(frozen=True)
class Ghost(Element):
    label: LabelText
    command: ClassVar[str] = "ghost"
    trailing_wire: ClassVar[bool] = True


@dataclass(frozen=True)
class PureGhost(Element):
    label: LabelText
    command: ClassVar[str] = "pureghost"


@dataclass(frozen=True)
class Push(Element):
    label: LabelText
    command: ClassVar[str] = "push"


@dataclass(frozen=True)
class ControlDot(Element):
    command: ClassVar[str] = "control"


@dataclass(frozen=True)
class ControlDotOpen(Element):
    command: ClassVar[str] = "controlo"


class _Controlled(Element):
    def __post_init__(self):
        if self.drow == 0:
            raise ValueError(f"\\{self.command} offset must be non-zero")


@dataclass(frozen=True)
class Ctrl(_Controlled):
    drow: int
    command: ClassVar[str] = "ctrl"
    trailing_wire: ClassVar[bool] = True


@dataclass(frozen=True)
class CtrlOpen(_Controlled):
    drow: int
    command: ClassVar[str] = "ctrlo"
    trailing_wire: ClassVar[bool] = True


@dataclass(frozen=True)
class Targ(Element):
    command: ClassVar[str] = "targ"
    trailing_wire: ClassVar[bool] = True


@dataclass(frozen=True)
class Swap(Element):
    command: ClassVar[str] = "qswap"
    trailing_wire: ClassVar[bool] = True


@dataclass(frozen=True)
class GateGroup(Element):
    row1: int
    col1: int
    row2: int
    col2: int
    pad: Dimension
    frame: FrameStyle
    command: ClassVar[str] = "gategroup"


@dataclass(frozen=True)
class LStick(Element):
    label: LabelText
    command: ClassVar[str] = "lstick"


@dataclass(frozen=True)
class RStick(Element):
    label: LabelText
    command: ClassVar[str] = "rstick"


@dataclass(frozen=True)
class UStick(Element):
    label: LabelText
    command: ClassVar[str] = "ustick"


@dataclass(frozen=True)
class DStick(Element):
    label: LabelText
    command: ClassVar[str] = "dstick"


@dataclass(frozen=True)
class Node(Element):
    label: LabelText
    super: Optional[LabelText] = None
    command: ClassVar[str] = "node"


@dataclass(frozen=True)
class Link(Element):
    drow: int
    dcol: int
    command: ClassVar[str] = "link"

    def __post_init__(self):
        if self.drow == 0 and self.dcol == 0:
            raise ValueError("\\link offset must not be (0, 0)")


ELEMENT_TYPES: tuple[type[Element], ...] = (
    QWire, QWireX, CWire, CWireX, Gate, Meter, Measure, MeasureTab, MeasureD,
    MultiMeasure, MultiMeasureD, MultiGate, Ghost, PureGhost, Push,
    ControlDot, ControlDotOpen, Ctrl, CtrlOpen, Targ, Swap, GateGroup,
    LStick, RStick, UStick, DStick, Node, Link,
)

COMMANDS: dict[str, type[Element]] = {cls.command: cls for cls in ELEMENT_TYPES}

SPANNING = (MultiGate, MultiMeasure, MultiMeasureD)
GHOSTS = (Ghost, PureGhost)


# ---------------------------------------------------------------------------
# Cells and the circuit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cell:
    elements: tuple[Element, ...] = ()
    span: Optional[tuple[int, int]] = field(default=None, compare=False)

    @property
    def empty(self) -> bool:
        return not self.elements


@dataclass(frozen=True)
class Spacing:
    col_sep: Dimension = Dimension(1.0)
    row_sep: Dimension = Dimension(1.0)
    object_margin: Dimension = Dimension(0.05)
    # Recorded equalize flags ("!", "!R", "!C"); layout ignores them.
    equalize: tuple[str, ...] = ()


DEFAULT_SPACING = Spacing()


@dataclass(frozen=True)
class CircuitAst:
    rows: tuple[tuple[Cell, ...], ...]
    spacing: Spacing = DEFAULT_SPACING

    def __post_init__(self):
        if not self.rows:
            raise ValueError("a circuit has at least one row")

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return max(len(row) for row in self.rows)

    def cell(self, row: int, col: int) -> Cell:
        """Cell at (row, col); missing trailing cells of short rows read as empty."""
        cells = self.rows[row]
        return cells[col] if col < len(cells) else Cell()

    def contains(self, row: int, col: int) -> bool:
        return 0 <= row < self.n_rows and 0 <= col < self.n_cols

    def iter_elements(self) -> Iterator[tuple[int, int, int, Element]]:
        for r, row in enumerate(self.rows):
            for c, cell in enumerate(row):
                for i, el in enumerate(cell.elements):
                    yield r, c, i, el

    @property
    def is_empty(self) -> bool:
        return all(cell.empty for row in self.rows for cell in row)


# ---------------------------------------------------------------------------
# Diagnostics and validation
# ---------------------------------------------------------------------------

class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    cell: Optional[CellAddress] = None
    span: Optional[tuple[int, int]] = None

    @property
    def is_error(self) -> bool:
        return self.severity == Severity.ERROR

    def __str__(self) -> str:
        where = f" at {self.cell}" if self.cell is not None else ""
        return f"{self.severity.value} {self.code}: {self.message}{where}"


def relative_targets(el: Element) -> list[tuple[int, int]]:
    """Explicit (drow, dcol) targets an element addresses."""
    if isinstance(el, (QWire, CWire)):
        return [(0, el.dcol)]
    if isinstance(el, (QWireX, CWireX, Ctrl, CtrlOpen)):
        return [(el.drow, 0)]
    if isinstance(el, Link):
        return [(el.drow, el.dcol)]
    if isinstance(el, SPANNING):
        return [(el.span, 0)]
    return []


def validate(ast: CircuitAst) -> list[Diagnostic]:
    """Check addressing, gategroup rectangles and multigate coverage.

    Returns diagnostics ordered by (row, col, element index); an empty list
    means the circuit is safe to lay out.
    """
    found: list[tuple[tuple, Diagnostic]] = []

    def add(key, severity, code, message, r, c, span):
        found.append((key, Diagnostic(severity, code, message, CellAddress(r, c), span)))

    if ast.is_empty:
        found.append(((-1, -1, -1, 0), Diagnostic(
            Severity.WARNING, "empty-circuit", "circuit body is empty")))

    for r, c, i, el in ast.iter_elements():
        span = ast.rows[r][c].span
        for seq, (dr, dc) in enumerate(relative_targets(el)):
            tr, tc = r + dr, c + dc
            if not 0 <= tr < ast.n_rows:
                what = "span row" if isinstance(el, SPANNING) else "target row"
                add((r, c, i, seq), Severity.ERROR, "off-grid-target",
                    f"{what} {tr} out of grid", r, c, span)
            elif not 0 <= tc < ast.n_cols:
                add((r, c, i, seq), Severity.ERROR, "off-grid-target",
                    f"target column {tc} out of grid", r, c, span)

        if isinstance(el, GateGroup):
            r1, c1, r2, c2 = el.row1, el.col1, el.row2, el.col2
            if not (1 <= r1 <= r2 <= ast.n_rows and 1 <= c1 <= c2 <= ast.n_cols):
                add((r, c, i, 0), Severity.ERROR, "bad-gategroup",
                    f"gategroup rectangle ({r1},{c1})-({r2},{c2}) is not inside the "
                    f"{ast.n_rows}x{ast.n_cols} grid with row1<=row2, col1<=col2", r, c, span)

        if isinstance(el, SPANNING):
            for k in range(1, el.span + 1):
                rr = r + k
                if rr >= ast.n_rows:
                    break
                covered = ast.cell(rr, c).elements
                if not any(isinstance(e, GHOSTS) for e in covered):
                    add((rr, c, i, 0), Severity.WARNING, "uncovered-span",
                        f"multigate span not covered by ghost (\\{el.command} at {CellAddress(r, c)})",
                        rr, c, ast.cell(rr, c).span)

    found.sort(key=lambda item: item[0])
    return [d for _, d in found]


def has_errors(diagnostics) -> bool:
    return any(d.is_error for d in diagnostics)
