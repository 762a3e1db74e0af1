"""Grid geometry and scene planning.

Coordinates are in em with y growing downward. Every cell has an anchor at
(col_x[c], row_y[r]); wires run anchor to anchor and boxes are drawn opaque
on top of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

from .model import (
    CWire, CWireX, CircuitAst, ControlDot, ControlDotOpen, Ctrl, CtrlOpen, DStick,
    Element, FrameStyle, Gate, GateGroup, Ghost, GHOSTS, LStick, LabelText, Link,
    Measure, MeasureD, MeasureTab, Meter, MultiGate, MultiMeasure, MultiMeasureD, Node,
    Push, PureGhost, QWire, QWireX, RStick, RunStyle, SPANNING, Swap, Targ, UStick,
)
from .style import DEFAULT_STYLE, StyleConfig


class Point(NamedTuple):
    x: float
    y: float


class Rect(NamedTuple):
    left: float
    top: float
    right: float
    bottom: float

    @property
    def width(self) -> float:
        return self.right - self.left

    @property
    def height(self) -> float:
        return self.bottom - self.top

    def union(self, other: "Rect") -> "Rect":
        return Rect(min(self.left, other.left), min(self.top, other.top),
                    max(self.right, other.right), max(self.bottom, other.bottom))

    def inflate(self, d: float) -> "Rect":
        return Rect(self.left - d, self.top - d, self.right + d, self.bottom + d)

    def contains(self, p: Point, tol: float = 0.0) -> bool:
        return (self.left - tol <= p.x <= self.right + tol
                and self.top - tol <= p.y <= self.bottom + tol)


EMPTY_RECT = Rect(0.0, 0.0, 0.0, 0.0)


def _points_rect(points) -> Rect:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return Rect(min(xs), min(ys), max(xs), max(ys))


# ---------------------------------------------------------------------------
# Primitives
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LineSeg:
    p1: Point
    p2: Point

    def rect(self) -> Rect:
        return _points_rect([self.p1, self.p2])


@dataclass(frozen=True)
class ArcSeg:
    """Circular arc from ``start`` to ``end`` degrees (screen angles, y down)."""

    center: Point
    radius: float
    start: float
    end: float

    def point(self, angle: float) -> Point:
        t = math.radians(angle)
        return Point(self.center.x + self.radius * math.cos(t),
                     self.center.y + self.radius * math.sin(t))

    @property
    def p1(self) -> Point:
        return self.point(self.start)

    @property
    def p2(self) -> Point:
        return self.point(self.end)

    def rect(self) -> Rect:
        lo, hi = sorted((self.start, self.end))
        pts = [self.p1, self.p2]
        for k in range(math.floor(lo / 90), math.ceil(hi / 90) + 1):
            if lo < 90 * k < hi:
                pts.append(self.point(90 * k))
        return _points_rect(pts)


Segment = Union[LineSeg, ArcSeg]


@dataclass(frozen=True)
class Line:
    p1: Point
    p2: Point
    style: str = "single"      # single | double | dashed | dotted
    gap: float = 0.0           # stroke separation of double lines

    kind = "line"

    def rect(self) -> Rect:
        r = _points_rect([self.p1, self.p2])
        if self.style != "double":
            return r
        dx, dy = self.p2.x - self.p1.x, self.p2.y - self.p1.y
        length = math.hypot(dx, dy)
        ox, oy = -dy / length * self.gap / 2, dx / length * self.gap / 2
        return Rect(r.left - abs(ox), r.top - abs(oy), r.right + abs(ox), r.bottom + abs(oy))


@dataclass(frozen=True)
class PathBox:
    outline: tuple[Segment, ...]
    fill: bool = True
    stroke: str = "solid"      # solid | dashed | dotted

    kind = "pathbox"

    def rect(self) -> Rect:
        out = self.outline[0].rect()
        for seg in self.outline[1:]:
            out = out.union(seg.rect())
        return out


@dataclass(frozen=True)
class Disc:
    center: Point
    radius: float

    kind = "disc"

    def rect(self) -> Rect:
        c, r = self.center, self.radius
        return Rect(c.x - r, c.y - r, c.x + r, c.y + r)


@dataclass(frozen=True)
class CircleOutline(Disc):
    kind = "circle"


@dataclass(frozen=True)
class TextRun:
    anchor: Point
    align: str                 # center | left | right
    runs: LabelText
    size: float
    width: float
    height: float

    kind = "text"

    def rect(self) -> Rect:
        x, y = self.anchor
        if self.align == "left":
            x0 = x
        elif self.align == "right":
            x0 = x - self.width
        else:
            x0 = x - self.width / 2
        return Rect(x0, y - self.height / 2, x0 + self.width, y + self.height / 2)


@dataclass(frozen=True)
class Cross:
    center: Point
    arm: float

    kind = "cross"

    def rect(self) -> Rect:
        c, a = self.center, self.arm
        return Rect(c.x - a, c.y - a, c.x + a, c.y + a)


@dataclass(frozen=True)
class OPlus:
    center: Point
    radius: float
    arm_x: float
    arm_y: float

    kind = "oplus"

    def rect(self) -> Rect:
        c = self.center
        ex, ey = max(self.radius, self.arm_x), max(self.radius, self.arm_y)
        return Rect(c.x - ex, c.y - ey, c.x + ex, c.y + ey)


@dataclass(frozen=True)
class MeterGlyph:
    """Half-disc opening downward: ``center`` is the middle of its flat side."""

    center: Point
    radius: float
    needle_from: Point
    needle_to: Point

    kind = "meter"

    def rect(self) -> Rect:
        c, r = self.center, self.radius
        return Rect(c.x - r, c.y - r, c.x + r, c.y).union(
            _points_rect([self.needle_from, self.needle_to]))


@dataclass(frozen=True)
class Brace:
    side: str                  # left | right | top | bottom: the direction it bulges
    start: Point
    end: Point
    amplitude: float

    kind = "brace"

    def rect(self) -> Rect:
        r = _points_rect([self.start, self.end])
        a = self.amplitude
        if self.side == "left":
            return Rect(r.left - a, r.top, r.right, r.bottom)
        if self.side == "right":
            return Rect(r.left, r.top, r.right + a, r.bottom)
        if self.side == "top":
            return Rect(r.left, r.top - a, r.right, r.bottom)
        return Rect(r.left, r.top, r.right, r.bottom + a)


Primitive = Union[Line, PathBox, Disc, CircleOutline, TextRun, Cross, OPlus, MeterGlyph, Brace]

LAYER_FRAMES = 0
LAYER_WIRES = 1
LAYER_BOXES = 2
LAYER_LABELS = 3
LAYER_STICKS = 4


@dataclass(frozen=True)
class Scene:
    primitives: tuple[tuple[int, Primitive], ...]
    bounds: Rect = EMPTY_RECT


def bounding_box(scene: Scene) -> Rect:
    """Smallest rectangle covering every primitive; (0, 0, 0, 0) when empty."""
    out: Optional[Rect] = None
    for _, prim in scene.primitives:
        r = prim.rect()
        out = r if out is None else out.union(r)
    return out if out is not None else EMPTY_RECT


# ---------------------------------------------------------------------------
# Measuring
# ---------------------------------------------------------------------------

class Extent(NamedTuple):
    width: float
    height: float


ZERO = Extent(0.0, 0.0)


def text_extent(label: LabelText, style: StyleConfig = DEFAULT_STYLE, size: float = 1.0) -> Extent:
    width = 0.0
    for run in label.runs:
        per_char = style.char_width if run.style == RunStyle.NORMAL else style.script_char_width
        width += len(run.text) * per_char
    height = style.line_height if label.runs else 0.0
    return Extent(width * size, height * size)


def _padded(label: LabelText, style: StyleConfig, px: float, py: float) -> Extent:
    w, h = text_extent(label, style)
    return Extent(w + 2 * px, h + 2 * py)


def measure_element(el: Element, style: StyleConfig = DEFAULT_STYLE) -> Extent:
    """Width and height an element reserves around its anchor."""
    if isinstance(el, Gate):
        return _padded(el.label, style, style.gate_pad, style.gate_pad)
    if isinstance(el, Meter):
        return Extent(2 * style.meter_radius, style.meter_radius)
    if isinstance(el, Measure):
        return _padded(el.label, style, style.measure_radius, style.measure_radius)
    if isinstance(el, MeasureTab):
        w, h = _padded(el.label, style, style.gate_pad, style.gate_pad)
        return Extent(w + style.tab_depth, h)
    if isinstance(el, MeasureD):
        w, h = _padded(el.label, style, style.measure_d_pad, style.measure_d_pad)
        return Extent(w + h / 2, h)
    if isinstance(el, (MultiGate, MultiMeasure, MultiMeasureD, Ghost, PureGhost)):
        return _padded(el.label, style, style.multi_pad_x, style.multi_pad_y)
    if isinstance(el, Push):
        return text_extent(el.label, style)
    if isinstance(el, (ControlDot, Ctrl)):
        return Extent(2 * style.ctrl_radius, 2 * style.ctrl_radius)
    if isinstance(el, (ControlDotOpen, CtrlOpen)):
        return Extent(style.open_dot_size, style.open_dot_size)
    if isinstance(el, Targ):
        return Extent(style.targ_width, style.targ_height)
    if isinstance(el, Node):
        w, h = text_extent(el.label, style)
        d = max(w, h) + 2 * style.node_pad
        return Extent(d, d)
    return ZERO


def cell_extent(elements, style: StyleConfig = DEFAULT_STYLE) -> Extent:
    w = h = 0.0
    for el in elements:
        ew, eh = measure_element(el, style)
        w, h = max(w, ew), max(h, eh)
    return Extent(w, h)


# ---------------------------------------------------------------------------
# Grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridGeometry:
    col_x: tuple[float, ...]
    row_y: tuple[float, ...]
    col_width: tuple[float, ...]
    row_height: tuple[float, ...]

    def anchor(self, row: int, col: int) -> Point:
        return Point(self.col_x[col], self.row_y[row])


def _anchors(sizes: list[float], sep: float) -> tuple[float, ...]:
    out = []
    for i, size in enumerate(sizes):
        if i == 0:
            out.append(size / 2)
        else:
            out.append(out[-1] + sizes[i - 1] / 2 + sep + size / 2)
    return tuple(out)


def grid_geometry(ast: CircuitAst, style: StyleConfig = DEFAULT_STYLE) -> GridGeometry:
    """Column and row anchors from the widest/tallest element per column/row.

    ``@C``/``@R`` are the edge-to-edge gaps between neighbouring columns/rows.
    """
    n_rows, n_cols = ast.n_rows, ast.n_cols
    widths = [0.0] * n_cols
    heights = [style.min_row_height] * n_rows
    for r, row in enumerate(ast.rows):
        for c, cell in enumerate(row):
            w, h = cell_extent(cell.elements, style)
            widths[c] = max(widths[c], w)
            heights[r] = max(heights[r], h)
    units = (style.pt_per_em, style.em_per_ex)
    col_sep = ast.spacing.col_sep.to_em(*units)
    row_sep = ast.spacing.row_sep.to_em(*units)
    return GridGeometry(_anchors(widths, col_sep), _anchors(heights, row_sep),
                        tuple(widths), tuple(heights))


# ---------------------------------------------------------------------------
# Scene planning
# ---------------------------------------------------------------------------

def _rect_outline(r: Rect) -> tuple[Segment, ...]:
    a, b = Point(r.left, r.top), Point(r.right, r.top)
    c, d = Point(r.right, r.bottom), Point(r.left, r.bottom)
    return (LineSeg(a, b), LineSeg(b, c), LineSeg(c, d), LineSeg(d, a))


def _rounded_outline(r: Rect, radius: float, left: bool = True, right: bool = True) -> tuple[Segment, ...]:
    """Rectangle with quarter-arc corners; ``left``/``right`` pick which sides are rounded."""
    rad = min(radius, r.width / 2, r.height / 2)
    rl = rad if left else 0.0
    rr = rad if right else 0.0
    segs: list[Segment] = [LineSeg(Point(r.left + rl, r.top), Point(r.right - rr, r.top))]
    if rr:
        segs.append(ArcSeg(Point(r.right - rr, r.top + rr), rr, -90.0, 0.0))
    segs.append(LineSeg(Point(r.right, r.top + rr), Point(r.right, r.bottom - rr)))
    if rr:
        segs.append(ArcSeg(Point(r.right - rr, r.bottom - rr), rr, 0.0, 90.0))
    segs.append(LineSeg(Point(r.right - rr, r.bottom), Point(r.left + rl, r.bottom)))
    if rl:
        segs.append(ArcSeg(Point(r.left + rl, r.bottom - rl), rl, 90.0, 180.0))
    segs.append(LineSeg(Point(r.left, r.bottom - rl), Point(r.left, r.top + rl)))
    if rl:
        segs.append(ArcSeg(Point(r.left + rl, r.top + rl), rl, 180.0, 270.0))
    return tuple(s for s in segs if not (isinstance(s, LineSeg) and s.p1 == s.p2))


def _centered(p: Point, ext: Extent) -> Rect:
    return Rect(p.x - ext.width / 2, p.y - ext.height / 2, p.x + ext.width / 2, p.y + ext.height / 2)


class _Planner:
    def __init__(self, ast: CircuitAst, grid: GridGeometry, style: StyleConfig):
        self.ast = ast
        self.grid = grid
        self.style = style
        # undirected wire keys shared across cells so A->B and B->A draw once
        self.wires: set = set()
        self.items: list[tuple[int, int, Primitive]] = []

    def emit(self, layer: int, prim: Primitive) -> None:
        self.items.append((layer, len(self.items), prim))

    def text(self, layer: int, at: Point, label: LabelText, align: str = "center",
             size: float = 1.0) -> None:
        if not label.runs:
            return
        w, h = text_extent(label, self.style, size)
        self.emit(layer, TextRun(at, align, label, size, w, h))

    def plan(self) -> Scene:
        for r, row in enumerate(self.ast.rows):
            for c, cell in enumerate(row):
                self.cell(r, c, cell.elements)
        self.items.sort(key=lambda item: (item[0], item[1]))
        prims = tuple((layer, prim) for layer, _, prim in self.items)
        scene = Scene(prims)
        return Scene(prims, bounding_box(scene))

    def cell(self, r: int, c: int, elements) -> None:
        grid, st = self.grid, self.style
        here = grid.anchor(r, c)
        seen = self.wires

        def wire(tr: int, tc: int, style: str = "single") -> None:
            if not self.ast.contains(tr, tc):
                return
            there = grid.anchor(tr, tc)
            key = (frozenset((here, there)), style)
            if there == here or key in seen:
                return
            seen.add(key)
            gap = st.double_gap if style == "double" else 0.0
            self.emit(LAYER_WIRES, Line(here, there, style, gap))

        for el in elements:
            ext = measure_element(el, st)
            if isinstance(el, QWire):
                wire(r, c + el.dcol)
            elif isinstance(el, CWire):
                wire(r, c + el.dcol, "double")
            elif isinstance(el, QWireX):
                wire(r + el.drow, c)
            elif isinstance(el, CWireX):
                wire(r + el.drow, c, "double")
            elif isinstance(el, Link):
                wire(r + el.drow, c + el.dcol)
            elif isinstance(el, (Ctrl, ControlDot)):
                self.emit(LAYER_BOXES, Disc(here, st.ctrl_radius))
                if isinstance(el, Ctrl):
                    wire(r + el.drow, c)
            elif isinstance(el, (CtrlOpen, ControlDotOpen)):
                self.emit(LAYER_BOXES, CircleOutline(here, st.open_dot_size / 2))
                if isinstance(el, CtrlOpen):
                    wire(r + el.drow, c)
            elif isinstance(el, Targ):
                self.emit(LAYER_BOXES, OPlus(here, st.targ_radius, st.targ_arm_x, st.targ_arm_y))
            elif isinstance(el, Swap):
                self.emit(LAYER_BOXES, Cross(here, st.swap_arm))
            elif isinstance(el, Meter):
                self.meter(here)
            elif isinstance(el, Gate):
                self.emit(LAYER_BOXES, PathBox(_rect_outline(_centered(here, ext))))
                self.text(LAYER_LABELS, here, el.label)
            elif isinstance(el, Measure):
                box = _centered(here, ext)
                self.emit(LAYER_BOXES, PathBox(_rounded_outline(box, st.measure_radius)))
                self.text(LAYER_LABELS, here, el.label)
            elif isinstance(el, MeasureTab):
                self.measure_tab(here, ext, el.label)
            elif isinstance(el, MeasureD):
                self.measure_d(here, ext, el.label)
            elif isinstance(el, SPANNING):
                self.multi(r, c, el, ext)
            elif isinstance(el, Push):
                self.text(LAYER_LABELS, here, el.label)
            elif isinstance(el, LStick):
                self.text(LAYER_STICKS, Point(here.x - st.stick_offset, here.y), el.label, "right")
            elif isinstance(el, RStick):
                self.text(LAYER_STICKS, Point(here.x + st.stick_offset, here.y), el.label, "left")
            elif isinstance(el, UStick):
                h = text_extent(el.label, st).height
                self.text(LAYER_STICKS, Point(here.x, here.y - st.stick_offset - h / 2), el.label)
            elif isinstance(el, DStick):
                h = text_extent(el.label, st).height
                self.text(LAYER_STICKS, Point(here.x, here.y + st.stick_offset + h / 2), el.label)
            elif isinstance(el, Node):
                self.node(here, ext, el)
            elif isinstance(el, GateGroup):
                self.gategroup(el)
            if el.trailing_wire:
                wire(r, c - 1)

    def meter(self, here: Point) -> None:
        st = self.style
        radius = st.meter_radius
        base = Point(here.x, here.y + radius / 2)
        top = base.y - radius
        start = Point(here.x, top + st.needle_drop)
        # the needle offset is written with y pointing up
        end = Point(start.x + st.needle_dx, start.y - st.needle_dy)
        self.emit(LAYER_BOXES, MeterGlyph(base, radius, start, end))

    def measure_tab(self, here: Point, ext: Extent, label: LabelText) -> None:
        box = _centered(here, ext)
        body_left = box.left + self.style.tab_depth
        tip = Point(box.left, here.y)
        pts = [Point(body_left, box.top), Point(box.right, box.top),
               Point(box.right, box.bottom), Point(body_left, box.bottom), tip]
        outline = tuple(LineSeg(a, b) for a, b in zip(pts, pts[1:] + pts[:1]))
        self.emit(LAYER_BOXES, PathBox(outline))
        self.text(LAYER_LABELS, Point((body_left + box.right) / 2, here.y), label)

    def measure_d(self, here: Point, ext: Extent, label: LabelText) -> None:
        box = _centered(here, ext)
        rad = box.height / 2
        flat_right = box.right - rad
        outline = (
            LineSeg(Point(box.left, box.top), Point(flat_right, box.top)),
            ArcSeg(Point(flat_right, here.y), rad, -90.0, 90.0),
            LineSeg(Point(flat_right, box.bottom), Point(box.left, box.bottom)),
            LineSeg(Point(box.left, box.bottom), Point(box.left, box.top)),
        )
        self.emit(LAYER_BOXES, PathBox(outline))
        self.text(LAYER_LABELS, Point((box.left + flat_right) / 2, here.y), label)

    def multi(self, r: int, c: int, el, ext: Extent) -> None:
        grid, st, ast = self.grid, self.style, self.ast
        last = min(r + el.span, ast.n_rows - 1)
        width = max(cell_extent(ast.cell(rr, c).elements, st).width for rr in range(r, last + 1))
        width = max(width, ext.width)
        ghosts = [e for e in ast.cell(last, c).elements if isinstance(e, GHOSTS)]
        bottom_h = max((measure_element(g, st).height for g in ghosts), default=ext.height)
        x = grid.col_x[c]
        box = Rect(x - width / 2, grid.row_y[r] - ext.height / 2,
                   x + width / 2, grid.row_y[last] + bottom_h / 2)
        if isinstance(el, MultiGate):
            outline = _rect_outline(box)
        elif isinstance(el, MultiMeasure):
            outline = _rounded_outline(box, st.measure_radius)
        else:
            outline = _rounded_outline(box, st.measure_radius, left=False)
        self.emit(LAYER_BOXES, PathBox(outline))
        mid = Point(x, (grid.row_y[r] + grid.row_y[last]) / 2)
        self.text(LAYER_LABELS, mid, el.label)

    def node(self, here: Point, ext: Extent, el: Node) -> None:
        st = self.style
        self.emit(LAYER_BOXES, CircleOutline(here, ext.width / 2))
        self.text(LAYER_LABELS, here, el.label)
        if el.super is not None:
            lh = text_extent(el.label, st).height or st.line_height
            sup_h = st.line_height * st.script_size
            at = Point(here.x, here.y - lh / 2 - sup_h / 2)
            self.text(LAYER_STICKS, at, el.super, size=st.script_size)

    def gategroup(self, el: GateGroup) -> None:
        ast, grid, st = self.ast, self.grid, self.style
        corners = [(el.row1 - 1, el.col1 - 1), (el.row2 - 1, el.col1 - 1),
                   (el.row1 - 1, el.col2 - 1), (el.row2 - 1, el.col2 - 1)]
        corners = [(r, c) for r, c in corners if ast.contains(r, c)]
        if not corners:
            return
        region: Optional[Rect] = None
        for r, c in corners:
            rect = _centered(grid.anchor(r, c), cell_extent(ast.cell(r, c).elements, st))
            region = rect if region is None else region.union(rect)
        region = region.inflate(el.pad.to_em(st.pt_per_em, st.em_per_ex))
        amp = st.brace_amplitude
        tl, tr = Point(region.left, region.top), Point(region.right, region.top)
        bl, br = Point(region.left, region.bottom), Point(region.right, region.bottom)
        if el.frame == FrameStyle.BRACE_LEFT:
            self.emit(LAYER_FRAMES, Brace("left", tl, bl, amp))
        elif el.frame == FrameStyle.BRACE_RIGHT:
            self.emit(LAYER_FRAMES, Brace("right", tr, br, amp))
        elif el.frame == FrameStyle.BRACE_TOP:
            self.emit(LAYER_FRAMES, Brace("top", tl, tr, amp))
        elif el.frame == FrameStyle.BRACE_BOTTOM:
            self.emit(LAYER_FRAMES, Brace("bottom", bl, br, amp))
        else:
            self.emit(LAYER_FRAMES, PathBox(_rect_outline(region), fill=False, stroke=el.frame.value))


def plan_scene(ast: CircuitAst, grid: Optional[GridGeometry] = None,
               style: StyleConfig = DEFAULT_STYLE) -> Scene:
    """Resolve every element to drawing primitives, ordered by (layer, emission index)."""
    if grid is None:
        grid = grid_geometry(ast, style)
    return _Planner(ast, grid, style).plan()


def layout(ast: CircuitAst, style: StyleConfig = DEFAULT_STYLE) -> Scene:
    return plan_scene(ast, grid_geometry(ast, style), style)
