"""Random circuit generation over the full element vocabulary."""

from __future__ import annotations

import random

from qcir.model import (
    CWire, CWireX, Cell, CircuitAst, ControlDot, ControlDotOpen, Ctrl, CtrlOpen, DStick,
    Dimension, FrameStyle, Gate, GateGroup, Ghost, LStick, Link, Measure, MeasureD,
    MeasureTab, Meter, MultiGate, MultiMeasure, MultiMeasureD, Node, Push, PureGhost, QWire,
    QWireX, RStick, Spacing, Swap, Targ, UStick, normalize_label,
)

LABELS = ["H", "X", "U", "\\ket{0}", "\\bra{\\phi}", "U^{\\dagger}", "R_z(\\theta)",
          "$\\alpha$", "q_0", "", "\\sqrt{X}", "CNOT", "\\ket{\\psi}", "e^{i\\pi/4}"]
DIMENSIONS = [Dimension(v, u) for v in (0.3, 0.5, 0.7, 1.0, 1.5, 2.0) for u in ("em",)] + [
    Dimension(5.0, "pt"), Dimension(1.0, "ex")]


def label(rng: random.Random):
    return normalize_label(rng.choice(LABELS))


def _offset(rng: random.Random, pos: int, size: int, valid: bool, nonzero: bool = True) -> int | None:
    if not valid:
        d = rng.randint(-3, 3)
        return d if d or not nonzero else 1
    choices = [t - pos for t in range(size) if t != pos or not nonzero]
    return rng.choice(choices) if choices else None


def random_element(rng: random.Random, r: int, c: int, n_rows: int, n_cols: int,
                   valid: bool = True):
    kind = rng.randrange(28)
    if kind == 0:
        d = _offset(rng, c, n_cols, valid, nonzero=False)
        return None if d is None else QWire(d)
    if kind == 1:
        d = _offset(rng, r, n_rows, valid, nonzero=False)
        return None if d is None else QWireX(d)
    if kind == 2:
        d = _offset(rng, c, n_cols, valid, nonzero=False)
        return None if d is None else CWire(d)
    if kind == 3:
        d = _offset(rng, r, n_rows, valid, nonzero=False)
        return None if d is None else CWireX(d)
    if kind in (17, 18):
        d = _offset(rng, r, n_rows, valid)
        if d is None:
            return None
        return Ctrl(d) if kind == 17 else CtrlOpen(d)
    if kind == 27:
        dr = _offset(rng, r, n_rows, valid, nonzero=False)
        dc = _offset(rng, c, n_cols, valid, nonzero=False)
        if dr is None or dc is None or (dr, dc) == (0, 0):
            return None
        return Link(dr, dc)
    if kind in (9, 10, 11):
        room = n_rows - 1 - r
        if valid and room < 1:
            return None
        span = rng.randint(1, room) if valid else rng.randint(1, 3)
        cls = (MultiMeasure, MultiMeasureD, MultiGate)[kind - 9]
        return cls(span, label(rng))
    if kind == 21:
        if valid:
            r1, r2 = sorted(rng.randint(1, n_rows) for _ in range(2))
            c1, c2 = sorted(rng.randint(1, n_cols) for _ in range(2))
        else:
            r1, c1, r2, c2 = (rng.randint(0, 7) for _ in range(4))
        return GateGroup(r1, c1, r2, c2, rng.choice(DIMENSIONS), rng.choice(list(FrameStyle)))
    if kind == 26:
        sup = label(rng) if rng.random() < 0.5 else None
        return Node(label(rng), sup if sup is not None and sup.raw else None)
    simple = {
        4: lambda: Gate(label(rng)), 5: Meter, 6: lambda: Measure(label(rng)),
        7: lambda: MeasureTab(label(rng)), 8: lambda: MeasureD(label(rng)),
        12: lambda: Ghost(label(rng)), 13: lambda: PureGhost(label(rng)),
        14: lambda: Push(label(rng)), 15: ControlDot, 16: ControlDotOpen, 19: Targ, 20: Swap,
        22: lambda: LStick(label(rng)), 23: lambda: RStick(label(rng)),
        24: lambda: UStick(label(rng)), 25: lambda: DStick(label(rng)),
    }
    return simple[kind]()


def random_ast(rng: random.Random, max_rows: int = 6, max_cols: int = 8, valid: bool = True,
               density: float = 0.7) -> CircuitAst:
    """A random circuit; with ``valid`` every relative target lands inside the grid."""
    n_rows = rng.randint(1, max_rows)
    n_cols = rng.randint(1, max_cols)
    rows = []
    for r in range(n_rows):
        length = n_cols if r == 0 or rng.random() < 0.7 else rng.randint(1, n_cols)
        cells = []
        for c in range(length):
            elements = []
            if rng.random() < density:
                for _ in range(rng.randint(1, 3)):
                    el = random_element(rng, r, c, n_rows, n_cols, valid)
                    if el is not None:
                        elements.append(el)
            cells.append(Cell(tuple(elements)))
        rows.append(tuple(cells))
    spacing = Spacing(rng.choice(DIMENSIONS), rng.choice(DIMENSIONS),
                      rng.choice([Dimension(0.05)] + DIMENSIONS),
                      tuple(rng.sample(["!", "!R", "!C"], rng.randint(0, 1))))
    return CircuitAst(tuple(rows), spacing)
