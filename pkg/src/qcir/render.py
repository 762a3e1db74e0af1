"""SVG, ASCII and scene-text back ends."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from typing import Optional
from xml.sax.saxutils import escape, quoteattr

from .layout import (
    ArcSeg, Brace, CircleOutline, Cross, Disc, Line, LineSeg, MeterGlyph, OPlus, PathBox,
    Point, Rect, Scene, TextRun,
)
from .model import (
    CWire, CWireX, CircuitAst, ControlDot, ControlDotOpen, Ctrl, CtrlOpen, DStick, Gate,
    LabelText, Link, LStick, Measure, MeasureD, MeasureTab, Meter, Node, Push, QWire,
    QWireX, RStick, Run, RunStyle, SPANNING, Swap, Targ, UStick,
)


@dataclass(frozen=True)
class RenderConfig:
    px_per_em: float = 16.0
    stroke_width: float = 0.07
    font_family: str = "serif"
    background: str = "none"
    margin: float = 0.5
    fill: str = "white"
    script_size: float = 0.7
    ascii_gap: int = 2

    def __post_init__(self):
        if self.px_per_em <= 0:
            raise ValueError("px_per_em must be positive")
        if self.margin < 0:
            raise ValueError("margin must be non-negative")


DEFAULT_RENDER = RenderConfig()


def _fixed(value: float, places: int) -> str:
    text = f"{value:.{places}f}"
    if text.startswith("-") and float(text) == 0:
        text = text[1:]
    return text


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

def canvas_rect(scene: Scene) -> Rect:
    """Scene bounds widened to include the grid origin."""
    return scene.bounds.union(Rect(0.0, 0.0, 0.0, 0.0))


class _Svg:
    def __init__(self, scene: Scene, cfg: RenderConfig):
        self.cfg = cfg
        self.canvas = canvas_rect(scene)
        self.lines: list[str] = []

    def n(self, value: float) -> str:
        return _fixed(value, 3)

    def x(self, x: float) -> str:
        return self.n((x - self.canvas.left + self.cfg.margin) * self.cfg.px_per_em)

    def y(self, y: float) -> str:
        return self.n((y - self.canvas.top + self.cfg.margin) * self.cfg.px_per_em)

    def px(self, d: float) -> str:
        return self.n(d * self.cfg.px_per_em)

    def stroke(self, dash: str = "solid") -> str:
        attrs = f'stroke="black" stroke-width="{self.px(self.cfg.stroke_width)}"'
        if dash == "dashed":
            attrs += f' stroke-dasharray="{self.px(0.3)} {self.px(0.2)}"'
        elif dash == "dotted":
            attrs += f' stroke-dasharray="{self.px(0.07)} {self.px(0.15)}" stroke-linecap="round"'
        return attrs

    def line(self, p1: Point, p2: Point, dash: str = "solid") -> None:
        self.lines.append(f'<line x1="{self.x(p1.x)}" y1="{self.y(p1.y)}" '
                          f'x2="{self.x(p2.x)}" y2="{self.y(p2.y)}" {self.stroke(dash)}/>')

    def path(self, d: str, fill: str, dash: str = "solid") -> None:
        self.lines.append(f'<path d="{d}" fill="{fill}" {self.stroke(dash)}/>')

    def pt(self, p: Point) -> str:
        return f"{self.x(p.x)} {self.y(p.y)}"

    def arc_to(self, center: Point, radius: float, start: Point, end: Point) -> str:
        ax, ay = start.x - center.x, start.y - center.y
        bx, by = end.x - center.x, end.y - center.y
        sweep = 1 if ax * by - ay * bx > 0 else 0
        r = self.px(radius)
        return f"A {r} {r} 0 0 {sweep} {self.pt(end)}"

    def segments(self, outline) -> str:
        parts: list[str] = []
        cursor: Optional[Point] = None
        for seg in outline:
            p1, p2 = seg.p1, seg.p2
            if cursor is None or math.dist(cursor, p1) > 1e-9:
                parts.append(f"M {self.pt(p1)}")
            if isinstance(seg, ArcSeg):
                large = 1 if abs(seg.end - seg.start) > 180 else 0
                sweep = 1 if seg.end > seg.start else 0
                r = self.px(seg.radius)
                parts.append(f"A {r} {r} 0 {large} {sweep} {self.pt(p2)}")
            else:
                parts.append(f"L {self.pt(p2)}")
            cursor = p2
        if outline and math.dist(cursor, outline[0].p1) < 1e-9:
            parts.append("Z")
        return " ".join(parts)

    def text(self, prim: TextRun) -> None:
        cfg = self.cfg
        anchor = {"center": "middle", "left": "start", "right": "end"}[prim.align]
        size = prim.size * cfg.px_per_em
        spans = []
        for run in prim.runs.runs:
            body = escape(run.text)
            if run.style == RunStyle.NORMAL:
                spans.append(f"<tspan>{body}</tspan>")
            else:
                shift = {RunStyle.SUPERSCRIPT: ' baseline-shift="super"',
                         RunStyle.SUBSCRIPT: ' baseline-shift="sub"'}.get(run.style, "")
                spans.append(f'<tspan font-size="{self.n(size * cfg.script_size)}"{shift}>{body}</tspan>')
        self.lines.append(
            f'<text x="{self.x(prim.anchor.x)}" y="{self.y(prim.anchor.y)}" '
            f'font-family={quoteattr(cfg.font_family)} font-size="{self.n(size)}" '
            f'text-anchor="{anchor}" dominant-baseline="central" '
            f'textLength="{self.px(prim.width)}" lengthAdjust="spacingAndGlyphs">'
            + "".join(spans) + "</text>")

    def brace(self, prim: Brace) -> None:
        s, e, a = prim.start, prim.end, prim.amplitude
        length = math.dist(s, e)
        if length == 0:
            return
        tx, ty = (e.x - s.x) / length, (e.y - s.y) / length
        nx, ny = {"left": (-1, 0), "right": (1, 0), "top": (0, -1), "bottom": (0, 1)}[prim.side]
        h = min(a / 2, length / 4)
        mid = Point((s.x + e.x) / 2 + a * nx, (s.y + e.y) / 2 + a * ny)
        c1 = Point(s.x + h * nx, s.y + h * ny)
        p1 = Point(c1.x + h * tx, c1.y + h * ty)
        c2 = Point(e.x + h * nx, e.y + h * ny)
        p2 = Point(c2.x - h * tx, c2.y - h * ty)
        d = (f"M {self.pt(s)} {self.arc_to(c1, h, s, p1)} L {self.pt(mid)} "
             f"L {self.pt(p2)} {self.arc_to(c2, h, p2, e)}")
        self.path(d, "none")

    def primitive(self, prim) -> None:
        cfg = self.cfg
        if isinstance(prim, Line):
            if prim.style == "double":
                dx, dy = prim.p2.x - prim.p1.x, prim.p2.y - prim.p1.y
                length = math.hypot(dx, dy)
                ox, oy = -dy / length * prim.gap / 2, dx / length * prim.gap / 2
                for sign in (1, -1):
                    self.line(Point(prim.p1.x + sign * ox, prim.p1.y + sign * oy),
                              Point(prim.p2.x + sign * ox, prim.p2.y + sign * oy))
            else:
                dash = {"single": "solid"}.get(prim.style, prim.style)
                self.line(prim.p1, prim.p2, dash)
        elif isinstance(prim, PathBox):
            self.path(self.segments(prim.outline), cfg.fill if prim.fill else "none", prim.stroke)
        elif isinstance(prim, CircleOutline):
            self.lines.append(f'<circle cx="{self.x(prim.center.x)}" cy="{self.y(prim.center.y)}" '
                              f'r="{self.px(prim.radius)}" fill="{cfg.fill}" {self.stroke()}/>')
        elif isinstance(prim, Disc):
            self.lines.append(f'<circle cx="{self.x(prim.center.x)}" cy="{self.y(prim.center.y)}" '
                              f'r="{self.px(prim.radius)}" fill="black"/>')
        elif isinstance(prim, TextRun):
            self.text(prim)
        elif isinstance(prim, Cross):
            c, a = prim.center, prim.arm
            self.line(Point(c.x - a, c.y - a), Point(c.x + a, c.y + a))
            self.line(Point(c.x - a, c.y + a), Point(c.x + a, c.y - a))
        elif isinstance(prim, OPlus):
            c = prim.center
            self.lines.append(f'<circle cx="{self.x(c.x)}" cy="{self.y(c.y)}" '
                              f'r="{self.px(prim.radius)}" fill="{cfg.fill}" {self.stroke()}/>')
            self.line(Point(c.x - prim.arm_x, c.y), Point(c.x + prim.arm_x, c.y))
            self.line(Point(c.x, c.y - prim.arm_y), Point(c.x, c.y + prim.arm_y))
        elif isinstance(prim, MeterGlyph):
            c, r = prim.center, prim.radius
            left, right = Point(c.x - r, c.y), Point(c.x + r, c.y)
            rr = self.px(r)
            self.path(f"M {self.pt(left)} A {rr} {rr} 0 0 1 {self.pt(right)} Z", cfg.fill)
            self.line(prim.needle_from, prim.needle_to)
        elif isinstance(prim, Brace):
            self.brace(prim)
        else:  # pragma: no cover - exhaustive over Primitive
            raise TypeError(f"unknown primitive {prim!r}")

    def document(self, scene: Scene) -> str:
        cfg = self.cfg
        width = (self.canvas.width + 2 * cfg.margin) * cfg.px_per_em
        height = (self.canvas.height + 2 * cfg.margin) * cfg.px_per_em
        head = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{self.n(width)}" height="{self.n(height)}" '
            f'viewBox="0.000 0.000 {self.n(width)} {self.n(height)}">',
        ]
        if cfg.background == "white":
            head.append(f'<rect x="0.000" y="0.000" width="{self.n(width)}" '
                        f'height="{self.n(height)}" fill="white"/>')
        for _, prim in scene.primitives:
            self.primitive(prim)
        return "\n".join(head + self.lines + ["</svg>"]) + "\n"


def render_svg(scene: Scene, cfg: RenderConfig = DEFAULT_RENDER) -> str:
    """Standalone SVG 1.1 document; numbers carry exactly three decimals."""
    return _Svg(scene, cfg).document(scene)


# ---------------------------------------------------------------------------
# Scene text
# ---------------------------------------------------------------------------

def _f4(value: float) -> str:
    return _fixed(value, 4)


def _pts(*points: Point) -> list[str]:
    return [_f4(c) for p in points for c in p]


def _segment_fields(seg) -> list[str]:
    if isinstance(seg, LineSeg):
        return ["L", *_pts(seg.p1, seg.p2)]
    return ["A", *_pts(seg.center), _f4(seg.radius), _f4(seg.start), _f4(seg.end)]


def _label_fields(label: LabelText) -> list[str]:
    fields = [json.dumps(label.raw, ensure_ascii=False), str(len(label.runs))]
    for run in label.runs:
        fields += [run.style.value, json.dumps(run.text, ensure_ascii=False)]
    return fields


def primitive_fields(prim) -> list[str]:
    if isinstance(prim, Line):
        out = ["line", prim.style, *_pts(prim.p1, prim.p2)]
        if prim.style == "double":
            out.append(_f4(prim.gap))
        return out
    if isinstance(prim, PathBox):
        out = ["pathbox", "fill" if prim.fill else "nofill", prim.stroke, str(len(prim.outline))]
        for seg in prim.outline:
            out += _segment_fields(seg)
        return out
    if isinstance(prim, (Disc, CircleOutline)):
        return [prim.kind, *_pts(prim.center), _f4(prim.radius)]
    if isinstance(prim, TextRun):
        return ["text", prim.align, *_pts(prim.anchor), _f4(prim.size), _f4(prim.width),
                _f4(prim.height), *_label_fields(prim.runs)]
    if isinstance(prim, Cross):
        return ["cross", *_pts(prim.center), _f4(prim.arm)]
    if isinstance(prim, OPlus):
        return ["oplus", *_pts(prim.center), _f4(prim.radius), _f4(prim.arm_x), _f4(prim.arm_y)]
    if isinstance(prim, MeterGlyph):
        return ["meter", *_pts(prim.center), _f4(prim.radius), *_pts(prim.needle_from, prim.needle_to)]
    if isinstance(prim, Brace):
        return ["brace", prim.side, *_pts(prim.start, prim.end), _f4(prim.amplitude)]
    raise TypeError(f"unknown primitive {prim!r}")


def render_scene_text(scene: Scene) -> str:
    """One primitive per line after a ``bounds`` header, coordinates at 4 decimals."""
    b = scene.bounds
    lines = ["bounds " + " ".join(_f4(v) for v in b)]
    for layer, prim in scene.primitives:
        lines.append(f"{layer} " + " ".join(primitive_fields(prim)))
    return "\n".join(lines) + "\n"


_FIELD = re.compile(r'"(?:[^"\\]|\\.)*"|\S+')


class _Fields:
    def __init__(self, line: str):
        self.items = _FIELD.findall(line)
        self.pos = 0

    def word(self) -> str:
        self.pos += 1
        return self.items[self.pos - 1]

    def num(self) -> float:
        return float(self.word())

    def point(self) -> Point:
        return Point(self.num(), self.num())

    def string(self) -> str:
        return json.loads(self.word())

    def label(self) -> LabelText:
        raw = self.string()
        runs = []
        for _ in range(int(self.word())):
            style = RunStyle(self.word())
            runs.append(Run(self.string(), style))
        return LabelText(raw, tuple(runs))


def parse_scene_text(text: str) -> Scene:
    """Read back :func:`render_scene_text` output (floats at their printed precision)."""
    lines = text.splitlines()
    head = lines[0].split()
    if head[0] != "bounds":
        raise ValueError("scene text must start with a bounds line")
    bounds = Rect(*(float(v) for v in head[1:5]))
    prims = []
    for line in lines[1:]:
        f = _Fields(line)
        layer = int(f.word())
        kind = f.word()
        if kind == "line":
            style = f.word()
            p1, p2 = f.point(), f.point()
            prim = Line(p1, p2, style, f.num() if style == "double" else 0.0)
        elif kind == "pathbox":
            fill = f.word() == "fill"
            stroke = f.word()
            segs = []
            for _ in range(int(f.word())):
                if f.word() == "L":
                    segs.append(LineSeg(f.point(), f.point()))
                else:
                    segs.append(ArcSeg(f.point(), f.num(), f.num(), f.num()))
            prim = PathBox(tuple(segs), fill, stroke)
        elif kind in ("disc", "circle"):
            cls = Disc if kind == "disc" else CircleOutline
            prim = cls(f.point(), f.num())
        elif kind == "text":
            align, anchor = f.word(), f.point()
            size, width, height = f.num(), f.num(), f.num()
            prim = TextRun(anchor, align, f.label(), size, width, height)
        elif kind == "cross":
            prim = Cross(f.point(), f.num())
        elif kind == "oplus":
            prim = OPlus(f.point(), f.num(), f.num(), f.num())
        elif kind == "meter":
            prim = MeterGlyph(f.point(), f.num(), f.point(), f.point())
        elif kind == "brace":
            prim = Brace(f.word(), f.point(), f.point(), f.num())
        else:
            raise ValueError(f"unknown primitive kind {kind!r}")
        prims.append((layer, prim))
    return Scene(tuple(prims), bounds)


# ---------------------------------------------------------------------------
# ASCII
# ---------------------------------------------------------------------------

_CROSSINGS = {
    ("│", "─"): "┼", ("│", "═"): "╪", ("║", "─"): "╫", ("║", "═"): "╬",
    ("│", " "): "│", ("║", " "): "║",
}


def _core_glyph(el) -> str:
    label = getattr(el, "label", None)
    text = label.plain if label is not None else ""
    if isinstance(el, Gate):
        return f"[ {text} ]"
    if isinstance(el, Meter):
        return "[M]"
    if isinstance(el, Measure):
        return f"( {text} )"
    if isinstance(el, MeasureTab):
        return f"<[ {text} ]"
    if isinstance(el, MeasureD):
        return f"[ {text} )"
    if isinstance(el, (Ctrl, ControlDot)):
        return "●"
    if isinstance(el, (CtrlOpen, ControlDotOpen)):
        return "○"
    if isinstance(el, Targ):
        return "⊕"
    if isinstance(el, Swap):
        return "╳"
    if isinstance(el, Push):
        return text
    if isinstance(el, Node):
        return f"({text})"
    return ""


def render_ascii(ast: CircuitAst, cfg: RenderConfig = DEFAULT_RENDER) -> str:
    """Monospace picture on its own character grid.

    One text line per circuit row with a spacer line between rows for
    vertical wires. Diagonal links and gategroup frames are not drawn.
    """
    n_rows, n_cols = ast.n_rows, ast.n_cols
    left = [[""] * n_cols for _ in range(n_rows)]
    core = [[""] * n_cols for _ in range(n_rows)]
    right = [[""] * n_cols for _ in range(n_rows)]
    above: dict[tuple[int, int], str] = {}
    below: dict[tuple[int, int], str] = {}
    horizontal: list[tuple[int, int, int, str]] = []
    vertical: list[tuple[int, int, int, str]] = []
    boxes: list[tuple[int, int, int, str]] = []

    for r, c, _, el in ast.iter_elements():
        def hwire(tc, ch="─"):
            if ast.contains(r, tc) and tc != c:
                horizontal.append((r, min(c, tc), max(c, tc), ch))

        def vwire(tr, ch="│"):
            if ast.contains(tr, c) and tr != r:
                vertical.append((c, min(r, tr), max(r, tr), ch))

        if isinstance(el, QWire):
            hwire(c + el.dcol)
        elif isinstance(el, CWire):
            hwire(c + el.dcol, "═")
        elif isinstance(el, QWireX):
            vwire(r + el.drow)
        elif isinstance(el, CWireX):
            vwire(r + el.drow, "║")
        elif isinstance(el, (Ctrl, CtrlOpen)):
            vwire(r + el.drow)
        elif isinstance(el, Link):
            if el.drow == 0:
                hwire(c + el.dcol)
            elif el.dcol == 0:
                vwire(r + el.drow)
        if el.trailing_wire:
            hwire(c - 1)
        if isinstance(el, LStick):
            left[r][c] = el.label.plain + " " + left[r][c]
        elif isinstance(el, RStick):
            right[r][c] += " " + el.label.plain
        elif isinstance(el, UStick):
            above[(r, c)] = el.label.plain
        elif isinstance(el, DStick):
            below[(r, c)] = el.label.plain
        elif isinstance(el, SPANNING):
            boxes.append((r, c, min(r + el.span, n_rows - 1), el.label.plain))
        else:
            core[r][c] += _core_glyph(el)

    for r0, c, r1, text in boxes:
        inner = max(len(text) + 2, 3)
        label_row = r0 + (r1 - r0) // 2
        for rr in range(r0, r1 + 1):
            shown = text if rr == label_row else ""
            core[rr][c] = "┤" + shown.center(inner) + "├"

    L = [max(len(left[r][c]) for r in range(n_rows)) for c in range(n_cols)]
    K = [max(len(core[r][c]) for r in range(n_rows)) for c in range(n_cols)]
    R = [max(len(right[r][c]) for r in range(n_rows)) for c in range(n_cols)]
    for c, _, _, _ in vertical:
        K[c] = max(K[c], 1)
    for _, c in (*above, *below):
        K[c] = max(K[c], 1)

    start, x = [], 0
    for c in range(n_cols):
        start.append(x)
        x += L[c] + K[c] + R[c] + cfg.ascii_gap
    width = x
    anchor = [start[c] + L[c] + (K[c] - 1) // 2 for c in range(n_cols)]
    right_start = [anchor[c] if K[c] else start[c] + L[c] for c in range(n_cols)]
    left_end = [anchor[c] if K[c] else start[c] + L[c] - 1 for c in range(n_cols)]

    rows = [[" "] * width for _ in range(n_rows)]
    spacers = [[" "] * width for _ in range(max(n_rows - 1, 0))]

    for r, c0, c1, ch in horizontal:
        for i in range(right_start[c0], left_end[c1] + 1):
            rows[r][i] = ch
    for c, r0, r1, ch in vertical:
        x = anchor[c]
        for rr in range(r0, r1):
            spacers[rr][x] = ch
        for rr in range(r0 + 1, r1):
            rows[rr][x] = _CROSSINGS.get((ch, rows[rr][x]), rows[rr][x])

    def put(line: list[str], at: int, text: str) -> None:
        for i, ch in enumerate(text):
            if 0 <= at + i < len(line):
                line[at + i] = ch

    for r in range(n_rows):
        for c in range(n_cols):
            if left[r][c]:
                put(rows[r], start[c] + L[c] - len(left[r][c]), left[r][c])
            if core[r][c]:
                w = len(core[r][c])
                put(rows[r], anchor[c] - (w - 1) // 2, core[r][c])
            if right[r][c]:
                put(rows[r], start[c] + L[c] + K[c], right[r][c])
    for r0, c, r1, _ in boxes:
        w = len(core[r0][c])
        s = anchor[c] - (w - 1) // 2
        for rr in range(r0, r1):
            spacers[rr][s] = "│"
            spacers[rr][s + w - 1] = "│"
    for (r, c), text in above.items():
        if r > 0:
            put(spacers[r - 1], anchor[c] - (len(text) - 1) // 2, text)
    for (r, c), text in below.items():
        if r < n_rows - 1:
            put(spacers[r], anchor[c] - (len(text) - 1) // 2, text)

    out: list[str] = []
    for r in range(n_rows):
        out.append("".join(rows[r]).rstrip())
        if r < n_rows - 1:
            out.append("".join(spacers[r]).rstrip())
    while out and not out[-1]:
        out.pop()
    return "\n".join(out) + "\n" if out else ""
