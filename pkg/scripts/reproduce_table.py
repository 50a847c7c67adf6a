"""Rebuild the four-variable catalogue table and the canonical-basis summary.

Usage: python3 scripts/reproduce_table.py [--out-dir DIR] [--workers K] [--skip-bases]

With --out-dir the catalogues are also written as hex model files, which the
acceptance suite picks up via CIFRAMES_CATALOGUE_DIR.
"""

import argparse
import sys
import time
from pathlib import Path

from ciframes.lattice import (MooreOracle, basis_types, canonical_basis, enumerate_family,
                              is_implicatively_perfect, summary_csv, write_catalogue)
from ciframes.parallel import default_workers

ROWS = [
    ("semigraphoid", False), ("semigraphoid", True),
    ("structural", False), ("structural", True),
    ("graphoid", False), ("graphoid", True),
    ("comp-semigraphoid", False), ("comp-semigraphoid", True),
    ("comp-graphoid", False), ("comp-graphoid", True),
]
BASES = ["semigraphoid", "structural", "semigraphoid^sa", "structural^sa"]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", type=Path)
    ap.add_argument("--workers", type=int, default=default_workers())
    ap.add_argument("--skip-bases", action="store_true")
    args = ap.parse_args(argv)

    cats, rows = {}, []
    for frame, sa in ROWS:
        t0 = time.perf_counter()
        cat = enumerate_family(frame, 4, selfadhesive=sa, workers=args.workers)
        row = cat.summary()
        rows.append(row)
        cats[cat.name] = cat
        print(f"{cat.name}: {time.perf_counter() - t0:.1f}s", file=sys.stderr, flush=True)
        if args.out_dir:
            args.out_dir.mkdir(parents=True, exist_ok=True)
            (args.out_dir / f"{cat.name.replace('^', '_')}.models").write_text(write_catalogue(cat))
    sys.stdout.write(summary_csv(rows))

    if args.skip_bases:
        return
    print("\nfamily,implications,types,implicatively_perfect")
    for name in BASES:
        t0 = time.perf_counter()
        oracle = MooreOracle.from_catalogue(cats[name])
        basis = canonical_basis(oracle)
        perfect = is_implicatively_perfect(oracle, basis)
        print(f"{name},{len(basis)},{basis_types(basis, 4)},{str(perfect).lower()}", flush=True)
        print(f"  basis of {name}: {time.perf_counter() - t0:.1f}s", file=sys.stderr, flush=True)


if __name__ == "__main__":
    main()
