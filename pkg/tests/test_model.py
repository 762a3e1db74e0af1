import random

import pytest
from hypothesis import given, settings, strategies as st

from circuitgen import random_ast
from qcir.model import (
    Cell, CellAddress, CircuitAst, Ctrl, Dimension, FrameStyle, GateGroup, Ghost,
    LabelText, Link, MultiGate, PureGhost, QWire, QWireX, QcircuitError, Run, RunStyle,
    Severity, label_source, normalize_label, relative_targets, validate,
)


def grid(*rows):
    return CircuitAst(tuple(tuple(Cell(tuple(cell)) for cell in row) for row in rows))


class TestDimension:
    def test_units(self):
        assert Dimension(1.0, "em").to_em() == 1.0
        assert Dimension(10.0, "pt").to_em() == 1.0
        assert Dimension(1.0, "ex").to_em() == 0.5

    def test_rejects_bad_unit_and_nonfinite(self):
        with pytest.raises(ValueError):
            Dimension(1.0, "cm")
        with pytest.raises(ValueError):
            Dimension(float("inf"))

    def test_str(self):
        assert str(Dimension(0.7)) == "0.7em"
        assert str(Dimension(1.0)) == "1em"
        assert str(Dimension(-0.5, "pt")) == "-0.5pt"


class TestNormalizeLabel:
    def test_passthrough(self):
        assert normalize_label("H").runs == (Run("H", RunStyle.NORMAL),)

    def test_ket(self):
        assert normalize_label("\\ket{\\psi}").runs == (Run("|ψ⟩"),)

    def test_bra(self):
        assert normalize_label("\\bra{0}").runs == (Run("⟨0|"),)

    def test_dagger_superscript(self):
        assert normalize_label("U^{\\dagger}").runs == (
            Run("U"), Run("†", RunStyle.SUPERSCRIPT))

    def test_single_token_scripts(self):
        assert normalize_label("q_0").runs == (Run("q"), Run("0", RunStyle.SUBSCRIPT))
        assert normalize_label("U^\\dag").runs == (Run("U"), Run("†", RunStyle.SUPERSCRIPT))

    def test_math_delimiters_and_spaces(self):
        assert normalize_label("$\\alpha\\,\\beta$").plain == "α β"
        assert normalize_label("a\\;b\\ c").plain == "a b c"

    def test_greek_capitals(self):
        assert normalize_label("\\Psi\\Omega\\Alpha").plain == "ΨΩΑ"

    def test_unknown_command_kept_by_name(self):
        assert normalize_label("\\foo x").plain == "foox"

    def test_unbalanced(self):
        with pytest.raises(QcircuitError):
            normalize_label("U^{\\dagger")
        with pytest.raises(QcircuitError):
            normalize_label("a}")

    def test_deterministic(self):
        assert normalize_label("R_z(\\theta)") == normalize_label("R_z(\\theta)")

    @given(st.lists(st.sampled_from([
        "H", "x", " ", "\\ket{0}", "\\bra{\\phi}", "^{\\dagger}", "_0", "_{ab}", "$", "\\psi",
        "\\Gamma", "\\,", "\\{", "\\}", "\\_", "\\$", "{", "}", "\\foo", "^x", "|", "\\backslash",
    ]), max_size=8))
    def test_idempotent_on_plain_rendering(self, parts):
        raw = "".join(parts)
        try:
            first = normalize_label(raw)
        except QcircuitError:
            return
        again = normalize_label(label_source(first.runs))
        assert again.runs == first.runs


class TestFrameStyle:
    @pytest.mark.parametrize("token,style", [
        ("-", FrameStyle.SOLID), ("--", FrameStyle.DASHED), (".", FrameStyle.DOTTED),
        ("\\{", FrameStyle.BRACE_LEFT), ("\\}", FrameStyle.BRACE_RIGHT),
        ("^\\}", FrameStyle.BRACE_TOP), ("_\\}", FrameStyle.BRACE_BOTTOM),
    ])
    def test_tokens(self, token, style):
        assert FrameStyle.from_token(token) is style
        assert style.token == token

    def test_unknown(self):
        with pytest.raises(ValueError):
            FrameStyle.from_token("~")


class TestElementInvariants:
    def test_span_at_least_one(self):
        with pytest.raises(ValueError, match="gate"):
            MultiGate(0, LabelText("U"))

    def test_ctrl_nonzero(self):
        with pytest.raises(ValueError):
            Ctrl(0)

    def test_link_nonzero(self):
        with pytest.raises(ValueError):
            Link(0, 0)
        Link(0, 1)


class TestValidate:
    def test_wire_off_grid(self):
        diags = validate(grid([[QWire(-1)]]))
        assert len(diags) == 1
        d = diags[0]
        assert d.severity == Severity.ERROR
        assert d.message == "target column -1 out of grid"
        assert d.cell == CellAddress(0, 0)

    def test_covered_multigate(self):
        ast = grid([[MultiGate(1, normalize_label("U"))]], [[Ghost(normalize_label("U"))]])
        assert validate(ast) == []

    def test_pureghost_covers(self):
        ast = grid([[MultiGate(1, normalize_label("U"))]], [[PureGhost(normalize_label("U"))]])
        assert validate(ast) == []

    def test_uncovered_multigate(self):
        ast = grid([[MultiGate(1, normalize_label("U"))]], [[QWire()]])
        diags = [d for d in validate(ast) if d.code == "uncovered-span"]
        assert len(diags) == 1
        assert diags[0].severity == Severity.WARNING
        assert diags[0].message.startswith("multigate span not covered by ghost")
        assert diags[0].cell == CellAddress(1, 0)

    def test_span_off_grid(self):
        ast = grid([[MultiGate(2, normalize_label("U"))]], [[Ghost(normalize_label("U"))]])
        assert any(d.is_error and "span row 2" in d.message for d in validate(ast))

    def test_gategroup(self):
        ok = grid([[GateGroup(1, 1, 2, 2, Dimension(0.7), FrameStyle.DASHED)], []], [[], []])
        assert validate(ok) == []
        swapped = grid([[GateGroup(2, 1, 1, 2, Dimension(0.7), FrameStyle.DASHED)], []], [[], []])
        assert [d.code for d in validate(swapped)] == ["bad-gategroup"]
        outside = grid([[GateGroup(1, 1, 3, 1, Dimension(0.7), FrameStyle.SOLID)]])
        assert [d.code for d in validate(outside)] == ["bad-gategroup"]

    def test_empty_body_warns(self):
        diags = validate(grid([[]]))
        assert [(d.severity, d.code) for d in diags] == [(Severity.WARNING, "empty-circuit")]

    def test_ragged_rows_address_missing_cells(self):
        ast = grid([[], [], [QWire()]], [[QWireX(-1)]])
        # row 1 has one cell; (1, 2) still exists for addressing
        ast2 = grid([[], [], [QWireX(1)]], [[]])
        assert validate(ast) == []
        assert validate(ast2) == []

    def test_sorted_by_position(self):
        ast = grid([[QWire(5), QWire(-1)], [QWireX(-3)]])
        cells = [(d.cell.row, d.cell.col) for d in validate(ast)]
        assert cells == sorted(cells)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**6))
    def test_pure(self, seed):
        ast = random_ast(random.Random(seed), valid=False)
        assert validate(ast) == validate(ast)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10**6))
    def test_no_errors_means_targets_resolve(self, seed):
        ast = random_ast(random.Random(seed), max_rows=4, max_cols=4, valid=False)
        if any(d.is_error for d in validate(ast)):
            return
        cells = {(r, c) for r in range(ast.n_rows) for c in range(ast.n_cols)}
        for r, c, _, el in ast.iter_elements():
            for dr, dc in relative_targets(el):
                assert (r + dr, c + dc) in cells
