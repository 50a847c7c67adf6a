"""Screen coatom records (ray functions or models) for self-adhesivity.

Usage: python3 scripts/screen_coatoms.py RAYS [--frame F] [--workers K] [--csv FILE]

RAYS may hold supermodular functions or CI models; records that fall into
the same permutation orbit are merged before screening.  Prints the summary
line and, with --csv, writes one row per orbit type.
"""

import argparse
import sys
import time
from pathlib import Path

from ciframes.entropic import ingest_rays, screen
from ciframes.parallel import default_workers
from ciframes.selfadhesion import SAConfig


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("rays", type=Path)
    ap.add_argument("--frame", default="semigraphoid")
    ap.add_argument("--workers", type=int, default=default_workers())
    ap.add_argument("--csv", type=Path)
    args = ap.parse_args(argv)

    t0 = time.perf_counter()
    records = ingest_rays(args.rays)
    print(f"{len(records)} orbit types read in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    report = screen(records, SAConfig(args.frame), workers=args.workers)
    if args.csv:
        args.csv.write_text(report.to_csv())
    print(report.summary())
    print(f"elapsed {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
