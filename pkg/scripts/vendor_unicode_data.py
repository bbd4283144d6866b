#!/usr/bin/env python3
"""Regenerate the vendored Unicode data files under src/emojinize/data/unicode/.

Four files are produced:

  grapheme_break_properties.txt  - grapheme cluster break categories (UAX #29),
                                   extended-pictographic and Indic-conjunct
                                   classes, as ``LO..HI ; Class`` ranges
  grapheme_break_test.txt        - the official GraphemeBreakTest cases in the
                                   standard "÷ XXXX × YYYY ÷" notation
                                   (extended grapheme clusters)
  emoji-test.txt                 - verbatim copy of the official emoji-test.txt
                                   (RGI sequences, qualification status, CLDR
                                   names and ordering)
  emoji_properties.txt           - UTS #51 emoji character properties as
                                   ``LO..HI ; Property`` ranges, swept from the
                                   `regex` package's bundled Unicode tables

Sources (see data/unicode/README.md for the pinned versions):

  --segmentation-crate  path to an unpacked unicode-segmentation crate, whose
                        src/tables.rs and tests/testdata/mod.rs are generated
                        from the official UCD (GraphemeBreakProperty.txt,
                        DerivedCoreProperties.txt, GraphemeBreakTest.txt)
  --emoji-test          path to an official emoji-test.txt

Run from the repository root:

    python scripts/vendor_unicode_data.py \
        --segmentation-crate /path/to/unicode-segmentation-1.13.3 \
        --emoji-test /path/to/emoji-test.txt
"""

from __future__ import annotations

import argparse
import re
import shutil
import sys
from pathlib import Path

import regex as regex_mod

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "emojinize" / "data" / "unicode"

# regex module property name -> vendored property name
EMOJI_PROPERTIES = [
    "Emoji",
    "Emoji_Presentation",
    "Emoji_Modifier",
    "Emoji_Modifier_Base",
    "Emoji_Component",
    "Extended_Pictographic",
]

GCB_CLASSES = {
    "GC_CR": "CR",
    "GC_LF": "LF",
    "GC_Control": "Control",
    "GC_Extend": "Extend",
    "GC_ZWJ": "ZWJ",
    "GC_Regional_Indicator": "Regional_Indicator",
    "GC_Prepend": "Prepend",
    "GC_SpacingMark": "SpacingMark",
    "GC_L": "L",
    "GC_V": "V",
    "GC_T": "T",
    "GC_LV": "LV",
    "GC_LVT": "LVT",
    "GC_Extended_Pictographic": "Extended_Pictographic",
    "GC_InCB_Consonant": "InCB_Consonant",
}

CHAR_ESCAPE = re.compile(r"'\\u\{([0-9a-fA-F]+)\}'")


def parse_tables_rs(path: Path) -> list[str]:
    """Extract break classes from a generated tables.rs into LO..HI ; Class lines."""
    text = path.read_text()
    lines = []

    m = re.search(r"const grapheme_cat_table[^=]*=\s*&\[(.*?)\n\s*\];", text, re.S)
    if not m:
        sys.exit("grapheme_cat_table not found")
    body = m.group(1)
    for lo, hi, cat in re.findall(
        CHAR_ESCAPE.pattern + r"\s*,\s*" + CHAR_ESCAPE.pattern + r"\s*,\s*(GC_\w+)", body
    ):
        lines.append(f"{int(lo, 16):04X}..{int(hi, 16):04X} ; {GCB_CLASSES[cat]}")

    m = re.search(r"const InCB_Extend_table[^=]*=\s*&\[(.*?)\n\s*\];", text, re.S)
    if not m:
        sys.exit("InCB_Extend_table not found")
    for lo, hi in re.findall(CHAR_ESCAPE.pattern + r"\s*,\s*" + CHAR_ESCAPE.pattern, m.group(1)):
        lines.append(f"{int(lo, 16):04X}..{int(hi, 16):04X} ; InCB_Extend")

    m = re.search(r"fn is_incb_linker.*?matches!\(c,(.*?)\)\n", text, re.S)
    if not m:
        sys.exit("is_incb_linker not found")
    for cp in CHAR_ESCAPE.findall(m.group(1)):
        lines.append(f"{int(cp, 16):04X}..{int(cp, 16):04X} ; InCB_Linker")

    return lines


RUST_STR = re.compile(r'"((?:\\u\{[0-9a-fA-F]+\}|[^"\\])*)"')


def decode_rust_str(s: str) -> str:
    return re.sub(r"\\u\{([0-9a-fA-F]+)\}", lambda m: chr(int(m.group(1), 16)), s)


def parse_testdata_rs(path: Path) -> list[tuple[str, list[str]]]:
    """Recover (input, extended clusters) pairs from the crate's test data."""
    text = path.read_text()
    cases: list[tuple[str, list[str]]] = []

    def block(name: str) -> str:
        m = re.search(name + r".*?=\s*&\[(.*?)\n\s*\];", text, re.S)
        if not m:
            sys.exit(f"{name} not found")
        return m.group(1)

    # TEST_SAME: (input, clusters); TEST_DIFF: (input, extended, legacy)
    for tup in re.findall(r"\(\s*" + RUST_STR.pattern + r"\s*,\s*&\[(.*?)\]\s*\)", block("TEST_SAME"), re.S):
        inp = decode_rust_str(tup[0])
        clusters = [decode_rust_str(c) for c in RUST_STR.findall(tup[1])]
        cases.append((inp, clusters))
    for tup in re.findall(
        r"\(\s*" + RUST_STR.pattern + r"\s*,\s*&\[(.*?)\]\s*,\s*&\[.*?\]\s*\)", block("TEST_DIFF"), re.S
    ):
        inp = decode_rust_str(tup[0])
        clusters = [decode_rust_str(c) for c in RUST_STR.findall(tup[1])]
        cases.append((inp, clusters))
    return cases


def format_break_test(cases: list[tuple[str, list[str]]]) -> list[str]:
    lines = []
    for inp, clusters in cases:
        assert "".join(clusters) == inp, (inp, clusters)
        parts = ["÷"]
        for ci, cluster in enumerate(clusters):
            for ki, ch in enumerate(cluster):
                parts.append(f"{ord(ch):04X}")
                parts.append("×" if ki + 1 < len(cluster) else "÷")
        lines.append(" ".join(parts))
    return lines


def sweep_emoji_properties() -> list[str]:
    """Extract UTS #51 property ranges from the regex module's Unicode tables."""
    lines = []
    for prop in EMOJI_PROPERTIES:
        pat = regex_mod.compile(rf"\p{{{prop}}}")
        ranges: list[tuple[int, int]] = []
        for cp in range(0x110000):
            if 0xD800 <= cp <= 0xDFFF:
                continue
            if pat.match(chr(cp)):
                if ranges and ranges[-1][1] == cp - 1:
                    ranges[-1] = (ranges[-1][0], cp)
                else:
                    ranges.append((cp, cp))
        for lo, hi in ranges:
            lines.append(f"{lo:04X}..{hi:04X} ; {prop}")
    return lines


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--segmentation-crate", type=Path, required=True)
    ap.add_argument("--emoji-test", type=Path, required=True)
    args = ap.parse_args()

    OUT_DIR.mkdir(parents=True, exist_ok=True)

    props = parse_tables_rs(args.segmentation_crate / "src" / "tables.rs")
    (OUT_DIR / "grapheme_break_properties.txt").write_text(
        "# Grapheme cluster break classes (UAX #29) with Extended_Pictographic\n"
        "# and Indic_Conjunct_Break classes. Format: LO..HI ; Class\n"
        + "\n".join(props)
        + "\n"
    )
    print(f"grapheme_break_properties.txt: {len(props)} ranges")

    cases = parse_testdata_rs(args.segmentation_crate / "tests" / "testdata" / "mod.rs")
    (OUT_DIR / "grapheme_break_test.txt").write_text(
        "# GraphemeBreakTest (extended grapheme clusters)\n"
        "# ÷ = break permitted here, × = no break\n" + "\n".join(format_break_test(cases)) + "\n"
    )
    print(f"grapheme_break_test.txt: {len(cases)} cases")

    shutil.copyfile(args.emoji_test, OUT_DIR / "emoji-test.txt")
    print("emoji-test.txt copied")

    lines = sweep_emoji_properties()
    (OUT_DIR / "emoji_properties.txt").write_text(
        "# UTS #51 emoji character properties. Format: LO..HI ; Property\n" + "\n".join(lines) + "\n"
    )
    print(f"emoji_properties.txt: {len(lines)} ranges")


if __name__ == "__main__":
    main()
