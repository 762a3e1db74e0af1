"""Coordinate extraction for SVG viewport checks."""

import re


def svg_numbers(root):
    """Every coordinate-like attribute, grouped as x-ish or y-ish values."""
    xs, ys = [], []
    for el in root.iter():
        for key in ("x", "x1", "x2", "cx"):
            if key in el.attrib:
                xs.append(float(el.attrib[key]))
        for key in ("y", "y1", "y2", "cy"):
            if key in el.attrib:
                ys.append(float(el.attrib[key]))
        if "d" in el.attrib:
            tokens = re.findall(r"[MLAZ]|-?\d+\.\d+|\d+", el.attrib["d"])
            i = 0
            while i < len(tokens):
                cmd = tokens[i]
                if cmd in "ML":
                    xs.append(float(tokens[i + 1]))
                    ys.append(float(tokens[i + 2]))
                    i += 3
                elif cmd == "A":
                    xs.append(float(tokens[i + 6]))
                    ys.append(float(tokens[i + 7]))
                    i += 8
                else:
                    i += 1
    return xs, ys
