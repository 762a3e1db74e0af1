"""``qcir``: parse, validate and render Qcircuit sources."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, TextIO

from .layout import layout
from .model import Diagnostic, QcircuitError, Severity, validate
from .parser import parse_with_diagnostics
from .render import render_ascii, render_scene_text, render_svg
from .style import DEFAULT_STYLE, StyleConfig, StyleError, load_style

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2

EXTENSIONS = {"svg": "svg", "ascii": "txt", "scene": "scene"}

log = logging.getLogger("qcir")


@dataclass
class CliOptions:
    inputs: list[str]
    format: str = "svg"
    output: Optional[str] = None
    lenient: bool = False
    style_file: Optional[str] = None
    px_per_em: Optional[float] = None
    check_only: bool = False
    extra: dict = field(default_factory=dict)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qcir", description="Render Qcircuit diagrams to SVG, ASCII or scene text.")
    p.add_argument("inputs", nargs="+", metavar="INPUT", help="source files ('-' for stdin)")
    p.add_argument("-f", "--format", choices=sorted(EXTENSIONS), default="svg")
    p.add_argument("-o", "--output", help="output file, or a directory for <stem>.<ext> files")
    p.add_argument("--lenient", action="store_true", help="skip unknown commands with a warning")
    p.add_argument("--style", dest="style_file", help="key=value style file (default $QCIR_STYLE)")
    p.add_argument("--px-per-em", type=float, help="SVG scale override")
    p.add_argument("--check-only", action="store_true", help="validate only, write nothing")
    return p


def _byte_offset(source: str, offset: Optional[int]) -> int:
    if offset is None:
        return 0
    return len(source[:offset].encode("utf-8"))


def _report(name: str, source: str, diag: Diagnostic, err: TextIO) -> None:
    offset = diag.span[0] if diag.span else None
    where = f" at cell {diag.cell}" if diag.cell is not None else ""
    err.write(f"{name}:{_byte_offset(source, offset)}: {diag.severity.value} "
              f"{diag.code}: {diag.message}{where}\n")


def compile_source(source: str, fmt: str, style: StyleConfig = DEFAULT_STYLE, *,
                   lenient: bool = False, check_only: bool = False
                   ) -> tuple[Optional[str], list[Diagnostic]]:
    """Run the whole pipeline on one source; output is None when there are errors."""
    try:
        ast, diagnostics = parse_with_diagnostics(source, lenient=lenient)
    except QcircuitError as exc:
        return None, [exc.to_diagnostic()]
    diagnostics = diagnostics + validate(ast)
    if any(d.is_error for d in diagnostics) or check_only:
        return None, diagnostics
    if fmt == "ascii":
        return render_ascii(ast, style.render_config()), diagnostics
    scene = layout(ast, style)
    if fmt == "scene":
        return render_scene_text(scene), diagnostics
    return render_svg(scene, style.render_config()), diagnostics


def _write_atomic(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(options: CliOptions, stdin: TextIO = sys.stdin, stdout: TextIO = sys.stdout,
        stderr: TextIO = sys.stderr) -> int:
    style_path = options.style_file or os.environ.get("QCIR_STYLE")
    style = DEFAULT_STYLE
    if style_path:
        try:
            style = load_style(style_path)
        except OSError as exc:
            stderr.write(f"{style_path}: error: cannot read style file: {exc.strerror}\n")
            return EXIT_USAGE
        except StyleError as exc:
            stderr.write(f"{style_path}: error: {exc}\n")
            return EXIT_USAGE
    if options.px_per_em is not None:
        if options.px_per_em <= 0:
            stderr.write("error: --px-per-em must be positive\n")
            return EXIT_USAGE
        style = replace(style, px_per_em=options.px_per_em)

    out_dir: Optional[Path] = None
    if options.output and not options.check_only:
        target = Path(options.output)
        if target.is_dir() or options.output.endswith(("/", os.sep)):
            out_dir = target
            out_dir.mkdir(parents=True, exist_ok=True)
        elif len(options.inputs) > 1:
            stderr.write("error: several inputs need --output to be a directory\n")
            return EXIT_USAGE

    status = EXIT_OK
    for name in options.inputs:
        try:
            if name == "-":
                source = stdin.read()
            else:
                source = Path(name).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            stderr.write(f"{name}: error: cannot read input: {exc}\n")
            status = max(status, EXIT_USAGE)
            continue
        label = "<stdin>" if name == "-" else name
        text, diagnostics = compile_source(source, options.format, style,
                                           lenient=options.lenient,
                                           check_only=options.check_only)
        for diag in diagnostics:
            _report(label, source, diag, stderr)
        if any(d.severity == Severity.ERROR for d in diagnostics):
            status = max(status, EXIT_INVALID)
            continue
        if text is None:
            continue
        try:
            if out_dir is not None:
                stem = "stdin" if name == "-" else Path(name).stem
                _write_atomic(out_dir / f"{stem}.{EXTENSIONS[options.format]}", text)
            elif options.output:
                _write_atomic(Path(options.output), text)
            else:
                stdout.write(text)
        except OSError as exc:
            stderr.write(f"{name}: error: cannot write output: {exc}\n")
            status = max(status, EXIT_USAGE)
    return status


def main(argv: Optional[list[str]] = None) -> int:
    logging.basicConfig(format="%(message)s", level=logging.WARNING)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    options = CliOptions(inputs=args.inputs, format=args.format, output=args.output,
                         lenient=args.lenient, style_file=args.style_file,
                         px_per_em=args.px_per_em, check_only=args.check_only)
    return run(options)


if __name__ == "__main__":
    sys.exit(main())
