"""Style knobs and the ``key=value`` style file.

Geometry defaults are the constants written into the Qcircuit macro bodies;
all lengths are in em.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, fields, replace
from pathlib import Path

log = logging.getLogger(__name__)


class StyleError(ValueError):
    pass


@dataclass(frozen=True)
class StyleConfig:
    # box padding, per side
    gate_pad: float = 0.6            # \gate  *+<.6em>
    multi_pad_x: float = 1.0         # \multigate, \ghost  *+<1em,.9em>
    multi_pad_y: float = 0.9
    measure_radius: float = 0.9      # \measure  [F-:<.9em>], also its padding
    measure_d_pad: float = 0.5       # \measureD  *+=+<.5em>
    tab_depth: float = 0.5           # \measuretab  +LC-<.5em,0em>
    # glyphs
    meter_radius: float = 1.1        # \cir<1.1em>
    needle_drop: float = 0.4         # !U-<0em,.4em>
    needle_dx: float = 0.5           # p+<.5em,.9em>
    needle_dy: float = 0.9
    ctrl_radius: float = 0.15
    open_dot_size: float = 0.59      # *=<.59em>
    targ_radius: float = 0.4         # *+<.8em>\frm{o}
    targ_arm_x: float = 0.4          # +<.4em,0em>
    targ_arm_y: float = 0.36         # +<0em,.36em>
    targ_width: float = 0.79         # =<.79em,.68em>
    targ_height: float = 0.68
    swap_arm: float = 0.3
    stick_offset: float = 0.5        # \lstick  !<.5em,0em>
    node_pad: float = 0.3
    brace_amplitude: float = 0.5
    double_gap: float = 0.15
    min_row_height: float = 1.2
    # text metrics
    char_width: float = 0.6
    script_char_width: float = 0.45
    script_size: float = 0.7
    line_height: float = 0.9
    # unit conversion
    pt_per_em: float = 10.0
    em_per_ex: float = 0.5
    # rendering
    px_per_em: float = 16.0
    stroke_width: float = 0.07
    font_family: str = "serif"
    background: str = "none"
    fill: str = "white"
    margin: float = 0.5
    ascii_gap: int = 2

    def __post_init__(self):
        if self.px_per_em <= 0:
            raise StyleError("pxPerEm must be positive")
        if self.margin < 0:
            raise StyleError("margin must be non-negative")
        if self.background not in ("none", "white"):
            raise StyleError("background must be 'none' or 'white'")

    def render_config(self):
        from .render import RenderConfig
        return RenderConfig(px_per_em=self.px_per_em, stroke_width=self.stroke_width,
                            font_family=self.font_family, background=self.background,
                            margin=self.margin, fill=self.fill, ascii_gap=self.ascii_gap)


DEFAULT_STYLE = StyleConfig()


def _camel(name: str) -> str:
    head, *rest = name.split("_")
    return head + "".join(part.capitalize() for part in rest)


_KEYS = {_camel(f.name): f for f in fields(StyleConfig)}
_NUMBER = re.compile(r"\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(em|pt|ex)?\s*")


def _convert(key: str, raw: str, lineno: int, units: tuple[float, float]):
    f = _KEYS[key]
    value = raw.strip()
    if f.type in ("str", str):
        return value
    m = _NUMBER.fullmatch(value)
    if m is None:
        raise StyleError(f"line {lineno}: {key}={value!r} is not a number")
    number = float(m.group(1))
    if not math.isfinite(number):
        raise StyleError(f"line {lineno}: {key} must be finite")
    unit = m.group(2)
    if unit == "pt":
        number /= units[0]
    elif unit == "ex":
        number *= units[1]
    if f.type in ("int", int):
        if not number.is_integer() or unit:
            raise StyleError(f"line {lineno}: {key} must be an integer")
        return int(number)
    return number


def parse_style(text: str, base: StyleConfig = DEFAULT_STYLE) -> tuple[StyleConfig, list[str]]:
    """Parse style text; returns the config and warnings about unknown keys."""
    warnings: list[str] = []
    pairs: list[tuple[int, str, str]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise StyleError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            warnings.append(f"line {lineno}: unknown style key {key!r} ignored")
            continue
        pairs.append((lineno, key, value))
    # unit factors apply to every other length, wherever they appear in the file
    units = [base.pt_per_em, base.em_per_ex]
    for lineno, key, value in pairs:
        if key == "ptPerEm":
            units[0] = _convert(key, value, lineno, (1.0, 1.0))
        elif key == "emPerEx":
            units[1] = _convert(key, value, lineno, (1.0, 1.0))
    updates = {_KEYS[key].name: _convert(key, value, lineno, tuple(units))
               for lineno, key, value in pairs}
    return replace(base, **updates), warnings


def load_style(path: str | Path) -> StyleConfig:
    """Read a style file. Unknown keys are logged and ignored.

    Raises OSError if the file cannot be read and StyleError on bad values.
    """
    text = Path(path).read_text(encoding="utf-8")
    config, warnings = parse_style(text)
    for message in warnings:
        log.warning("%s: %s", path, message)
    return config
