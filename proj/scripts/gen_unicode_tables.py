#!/usr/bin/env python3
"""Regenerates src/unicode_tables.inc from the Python unicodedata module.

The output holds three sorted arrays used by the NFC normalizer:
  - full canonical decompositions (Hangul excluded, handled algorithmically)
  - nonzero canonical combining classes
  - primary composition pairs (exclusions already filtered out)

Run from the repository root:  python3 scripts/gen_unicode_tables.py
"""

import sys
import unicodedata

HANGUL_S_BASE = 0xAC00
HANGUL_S_COUNT = 11172


def is_hangul_syllable(cp: int) -> bool:
    return HANGUL_S_BASE <= cp < HANGUL_S_BASE + HANGUL_S_COUNT


def main() -> None:
    decomp_entries = []   # (cp, [cps...]) fully expanded NFD
    ccc_entries = []      # (cp, ccc)
    comp_entries = []     # (first, second, composed)

    for cp in range(0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        ch = chr(cp)

        ccc = unicodedata.combining(ch)
        if ccc != 0:
            ccc_entries.append((cp, ccc))

        if is_hangul_syllable(cp):
            continue

        nfd = unicodedata.normalize("NFD", ch)
        if nfd != ch:
            decomp_entries.append((cp, [ord(c) for c in nfd]))

        raw = unicodedata.decomposition(ch)
        if raw and not raw.startswith("<"):
            parts = [int(p, 16) for p in raw.split()]
            if len(parts) == 2:
                a, b = parts
                # A pair is a primary composite iff NFC recombines it.
                if unicodedata.normalize("NFC", chr(a) + chr(b)) == ch:
                    comp_entries.append((a, b, cp))

    pool = []
    index = []
    for cp, seq in decomp_entries:
        index.append((cp, len(pool), len(seq)))
        pool.extend(seq)

    comp_entries.sort()

    out = sys.stdout
    out.write("// Generated by scripts/gen_unicode_tables.py -- do not edit.\n")
    out.write(f"// Unicode {unicodedata.unidata_version}\n\n")

    out.write("struct DecompEntry { char32_t cp; uint32_t offset; uint32_t length; };\n")
    out.write(f"static constexpr DecompEntry kDecompIndex[{len(index)}] = {{\n")
    for cp, off, ln in index:
        out.write(f"  {{0x{cp:04X}, {off}, {ln}}},\n")
    out.write("};\n\n")

    out.write(f"static constexpr char32_t kDecompPool[{len(pool)}] = {{\n")
    for i in range(0, len(pool), 12):
        out.write("  " + ", ".join(f"0x{c:04X}" for c in pool[i:i + 12]) + ",\n")
    out.write("};\n\n")

    out.write("struct CccEntry { char32_t cp; uint8_t ccc; };\n")
    out.write(f"static constexpr CccEntry kCccTable[{len(ccc_entries)}] = {{\n")
    for cp, ccc in ccc_entries:
        out.write(f"  {{0x{cp:04X}, {ccc}}},\n")
    out.write("};\n\n")

    out.write("struct CompEntry { char32_t first; char32_t second; char32_t composed; };\n")
    out.write(f"static constexpr CompEntry kCompTable[{len(comp_entries)}] = {{\n")
    for a, b, c in comp_entries:
        out.write(f"  {{0x{a:04X}, 0x{b:04X}, 0x{c:04X}}},\n")
    out.write("};\n")


if __name__ == "__main__":
    main()
