#!/usr/bin/env python3
"""Regenerates src/bench/unicode_tables.inc (code point ranges for \\p{L}, \\p{N}, White_Space)."""
import sys

import regex

CLASSES = {
    "kLetterRanges": r"\p{L}",
    "kNumberRanges": r"\p{N}",
    "kSpaceRanges": r"\p{White_Space}",
}


def ranges(pattern):
    compiled = regex.compile(pattern)
    out, start, prev = [], None, None
    for cp in range(0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        if compiled.match(chr(cp)):
            if start is None:
                start = cp
            elif prev != cp - 1:
                out.append((start, prev))
                start = cp
            prev = cp
    if start is not None:
        out.append((start, prev))
    return out


def main(path):
    lines = ["// Generated by tools/scripts/gen_unicode_tables.py (regex module " + regex.__version__ + "). Do not edit.", ""]
    for name, pattern in CLASSES.items():
        table = ranges(pattern)
        lines.append(f"inline constexpr CodeRange {name}[] = {{")
        row = []
        for lo, hi in table:
            row.append(f"{{0x{lo:X}, 0x{hi:X}}}")
            if len(row) == 6:
                lines.append("    " + ", ".join(row) + ",")
                row = []
        if row:
            lines.append("    " + ", ".join(row) + ",")
        lines.append("};")
        lines.append("")
    with open(path, "w") as f:
        f.write("\n".join(lines))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/bench/unicode_tables.inc")
