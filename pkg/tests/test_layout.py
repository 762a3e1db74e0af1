import random
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from circuitgen import random_ast
from qcir.layout import (
    Brace, CircleOutline, Disc, Extent, Line, MeterGlyph, OPlus, PathBox, Point, Rect, Scene,
    TextRun, bounding_box, grid_geometry, layout, measure_element, plan_scene,
)
from qcir.model import (
    ControlDotOpen, Gate, Ghost, LStick, Meter, MultiGate, Swap, normalize_label,
)
from qcir.parser import parse
from qcir.style import DEFAULT_STYLE


def lab(text):
    return normalize_label(text)


def prims(scene, cls):
    return [p for _, p in scene.primitives if type(p) is cls]


class TestMeasure:
    def test_gate(self):
        w, h = measure_element(Gate(lab("H")))
        assert w == pytest.approx(1.8, abs=1e-12)
        assert h == pytest.approx(2.1, abs=1e-12)

    def test_lstick_has_no_extent(self):
        assert measure_element(LStick(lab("q_0"))) == Extent(0.0, 0.0)

    def test_open_dot(self):
        assert measure_element(ControlDotOpen()) == Extent(0.59, 0.59)

    def test_meter(self):
        assert measure_element(Meter()) == Extent(2.2, 1.1)

    def test_multigate_padding(self):
        w, h = measure_element(MultiGate(1, lab("U")))
        assert (w, h) == (pytest.approx(0.6 + 2.0), pytest.approx(0.9 + 1.8))

    def test_zero_extent_kinds(self):
        assert measure_element(Swap()) == Extent(0.0, 0.0)

    def test_script_runs_narrower(self):
        assert measure_element(Gate(lab("U^{\\dagger}"))).width == pytest.approx(0.6 + 0.45 + 1.2)


class TestGrid:
    def test_anchor_recurrence(self):
        # with 0.2em per character the pushes are 2.0, 1.2 and 1.0 em wide
        style = replace(DEFAULT_STYLE, char_width=0.2)
        ast = parse("\\Qcircuit { \\push{aaaaaaaaaa} & \\push{aaaaaa} & \\push{aaaaa} }")
        g = grid_geometry(ast, style)
        assert g.col_width == pytest.approx((2.0, 1.2, 1.0))
        assert g.col_x == pytest.approx((1.0, 3.6, 5.7), abs=1e-12)

    def test_single_empty_cell(self):
        g = grid_geometry(parse("\\Qcircuit { }"))
        assert g.col_x == (0.0,)
        assert g.row_y == (DEFAULT_STYLE.min_row_height / 2,)

    def test_identical_rows(self):
        g = grid_geometry(parse("\\Qcircuit @R=.7em { \\gate{H} \\\\ \\gate{H} }"))
        assert g.row_y[1] - g.row_y[0] == pytest.approx(g.row_height[0] + 0.7)

    def test_units_converted(self):
        g = grid_geometry(parse("\\Qcircuit @C=10pt { \\qw & \\qw }"))
        assert g.col_x[1] - g.col_x[0] == pytest.approx(1.0)


class TestPlanScene:
    def test_gate_row(self):
        ast = parse("\\Qcircuit { & \\gate{H} & \\qw }")
        scene = layout(ast)
        g = grid_geometry(ast)
        lines = prims(scene, Line)
        assert Line(g.anchor(0, 2), g.anchor(0, 1)) in lines
        boxes = prims(scene, PathBox)
        assert len(boxes) == 1
        r = boxes[0].rect()
        assert (r.left + r.right) / 2 == pytest.approx(g.col_x[1])
        # nothing is drawn at the empty cell itself
        for _, p in scene.primitives:
            if not isinstance(p, Line):
                assert not p.rect().contains(g.anchor(0, 0))

    def test_cnot(self):
        ast = parse("\\Qcircuit { \\ctrl{1} \\\\ \\targ }")
        scene = layout(ast)
        g = grid_geometry(ast)
        assert prims(scene, Disc)[0].center == g.anchor(0, 0)
        assert Line(g.anchor(0, 0), g.anchor(1, 0)) in prims(scene, Line)
        assert prims(scene, OPlus)[0].center == g.anchor(1, 0)

    def test_empty(self):
        scene = layout(parse("\\Qcircuit { \\\\ }"))
        assert scene.primitives == ()
        assert scene.bounds == Rect(0, 0, 0, 0)

    def test_targ_glyph(self):
        o = prims(layout(parse("\\Qcircuit { \\targ }")), OPlus)[0]
        assert (o.radius, o.arm_x, o.arm_y) == (0.4, 0.4, 0.36)

    def test_meter_glyph(self):
        ast = parse("\\Qcircuit { \\meter }")
        m = prims(layout(ast), MeterGlyph)[0]
        a = grid_geometry(ast).anchor(0, 0)
        assert m.radius == 1.1
        top = m.center.y - m.radius
        assert m.needle_from == pytest.approx((a.x, top + 0.4))
        assert (m.needle_to.x - m.needle_from.x, m.needle_from.y - m.needle_to.y) == pytest.approx((0.5, 0.9))

    def test_open_control(self):
        c = prims(layout(parse("\\Qcircuit { \\ctrlo{1} \\\\ \\qw }")), CircleOutline)[0]
        assert c.radius == pytest.approx(0.295)

    def test_sticks(self):
        ast = parse("\\Qcircuit { \\lstick{a} \\rstick{b} \\ustick{c} \\dstick{d} }")
        a = grid_geometry(ast).anchor(0, 0)
        texts = {t.runs.raw: t for t in prims(layout(ast), TextRun)}
        assert texts["a"].align == "right" and texts["a"].anchor == pytest.approx((a.x - 0.5, a.y))
        assert texts["b"].align == "left" and texts["b"].anchor == pytest.approx((a.x + 0.5, a.y))
        assert texts["c"].rect().bottom == pytest.approx(a.y - 0.5)
        assert texts["d"].rect().top == pytest.approx(a.y + 0.5)

    def test_layers(self):
        ast = parse("\\Qcircuit { \\lstick{a} & \\gate{H} \\gategroup{1}{2}{1}{2}{.5em}{--} & \\qw }")
        layers = {(type(p).__name__, layer) for layer, p in layout(ast).primitives}
        assert ("Line", 1) in layers and ("TextRun", 3) in layers and ("TextRun", 4) in layers
        order = [layer for layer, _ in layout(ast).primitives]
        assert order == sorted(order)
        frames = [p for layer, p in layout(ast).primitives if layer == 0]
        assert frames[0].stroke == "dashed" and not frames[0].fill

    def test_brace_frame(self):
        ast = parse("\\Qcircuit { \\gate{H} \\gategroup{1}{1}{1}{1}{.5em}{\\{} }")
        b = prims(layout(ast), Brace)[0]
        assert b.side == "left" and b.amplitude == 0.5

    def test_implicit_wire_deduplicated(self):
        ast = parse("\\Qcircuit { & \\qw & \\targ \\qw \\qw }")
        assert len(prims(layout(ast), Line)) == 2

    def test_multigate_box_covers_span(self):
        ast = parse("\\Qcircuit { \\multigate{2}{U} \\\\ \\ghost{U} \\\\ \\ghost{VVVV} }")
        g = grid_geometry(ast)
        box = prims(layout(ast), PathBox)[0].rect()
        for r in range(3):
            assert box.contains(g.anchor(r, 0))
        assert box.width == pytest.approx(measure_element(Ghost(lab("VVVV"))).width)
        label = prims(layout(ast), TextRun)[0]
        assert label.anchor.y == pytest.approx((g.row_y[0] + g.row_y[2]) / 2)

    @settings(max_examples=80, deadline=None)
    @given(st.integers(0, 10**9))
    def test_wire_invariants(self, seed):
        ast = random_ast(random.Random(seed))
        g = grid_geometry(ast)
        scene = plan_scene(ast, g)
        anchors = {(x, y) for x in g.col_x for y in g.row_y}
        for _, p in scene.primitives:
            if isinstance(p, Line):
                assert (p.p1.x, p.p1.y) in anchors and (p.p2.x, p.p2.y) in anchors
        assert all(b > a for a, b in zip(g.row_y, g.row_y[1:]))
        assert all(b > a for a, b in zip(g.col_x, g.col_x[1:]))
        lines = [p for _, p in scene.primitives if isinstance(p, Line)]
        keys = {(frozenset((l.p1, l.p2)), l.style) for l in lines}
        assert len(keys) == len(lines)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**9))
    def test_bounds_cover_everything(self, seed):
        scene = layout(random_ast(random.Random(seed)))
        for _, p in scene.primitives:
            r = p.rect()
            assert scene.bounds.left <= r.left + 1e-12 and r.right <= scene.bounds.right + 1e-12
            assert scene.bounds.top <= r.top + 1e-12 and r.bottom <= scene.bounds.bottom + 1e-12

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**9))
    def test_deterministic(self, seed):
        ast = random_ast(random.Random(seed))
        assert layout(ast) == layout(ast)


class TestBoundingBox:
    def test_empty(self):
        assert bounding_box(Scene(())) == Rect(0, 0, 0, 0)

    def test_disc(self):
        assert bounding_box(Scene(((2, Disc(Point(1, 1), 0.15)),))) == pytest.approx((0.85, 0.85, 1.15, 1.15))

    def test_lstick_escapes_grid(self):
        ast = parse("\\Qcircuit { \\lstick{abc} }")
        scene = layout(ast)
        assert scene.bounds.left == pytest.approx(-0.5 - 1.8)
        assert bounding_box(scene) == scene.bounds

    def test_double_line_includes_gap(self):
        line = Line(Point(0, 0), Point(2, 0), "double", 0.15)
        assert bounding_box(Scene(((1, line),))) == pytest.approx((0, -0.075, 2, 0.075))
