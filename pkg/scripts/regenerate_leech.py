"""Rebuild src/niemeier/data/leech.json from the Golay-code lattice.

The Leech lattice is the 2-neighbour of NiemeierA1_24 along the image of
(-3, 1, ..., 1); the result is LLL-reduced and written with its minimal
denominator.  Run with --check to compare against the stored file instead.
"""

import argparse
import sys
from pathlib import Path

from niemeier.catalog import derive_leech
from niemeier.lattice import read_lattice, write_lattice
from niemeier.reduction import minimum_norm

DATA = Path(__file__).resolve().parents[1] / "src" / "niemeier" / "data" / "leech.json"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="compare with the stored basis")
    args = ap.parse_args()
    L = derive_leech()
    if L.determinant != 1 or minimum_norm(L) != 4:
        print("derived lattice is not the Leech lattice", file=sys.stderr)
        return 2
    if args.check:
        stored = read_lattice(DATA)
        same = stored.same_lattice(L) and stored.gram == L.gram
        print("stored basis matches" if same else "stored basis differs")
        return 0 if same else 1
    write_lattice(L, DATA)
    print(f"wrote {DATA}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
