"""Check that second-order self-adhesive closure fixes every semigraphoid^sa type on 4 variables.

Usage: python3 scripts/sa2_check.py [--catalogue FILE] [--limit K] [--workers K] [--log FILE]

Without --catalogue the family is enumerated first (a few seconds).  Each
orbit representative is closed with sa2_closure and compared with itself;
the exit status is 0 when all of them are fixed.  Expect hours on one core.
"""

import argparse
import sys
import time
from pathlib import Path

from ciframes.core import CIModel
from ciframes.lattice import enumerate_family, read_catalogue
from ciframes.parallel import default_workers, pmap
from ciframes.selfadhesion import SAConfig, sa2_closure

CONFIG = SAConfig("semigraphoid")


def _fixed(job):
    ground, rep = job
    return sa2_closure(CIModel(ground, rep), CONFIG).bits == rep


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--catalogue", type=Path, help="hex catalogue of semigraphoid^sa")
    ap.add_argument("--limit", type=int)
    ap.add_argument("--workers", type=int, default=default_workers())
    ap.add_argument("--log", type=Path, help="append one line per representative")
    args = ap.parse_args(argv)

    if args.catalogue:
        cat = read_catalogue(args.catalogue.read_text(), "semigraphoid^sa")
    else:
        cat = enumerate_family("semigraphoid", 4, selfadhesive=True, workers=args.workers)
    reps = sorted(set(cat.rep_of.values()))[: args.limit]
    t0 = time.perf_counter()
    bad = []
    batch = max(1, args.workers) * 8
    for start in range(0, len(reps), batch):
        chunk = reps[start:start + batch]
        for rep, ok in zip(chunk, pmap(_fixed, [(cat.ground, r) for r in chunk], args.workers)):
            if not ok:
                bad.append(rep)
            if args.log:
                with args.log.open("a") as fh:
                    fh.write(f"{rep:x} {'fixed' if ok else 'MOVED'}\n")
        print(f"{start + len(chunk)}/{len(reps)} done, {len(bad)} moved, "
              f"{time.perf_counter() - t0:.0f}s", file=sys.stderr, flush=True)
    print(f"types checked: {len(reps)}; fixed by sa2: {len(reps) - len(bad)}")
    for rep in bad:
        print(CIModel(cat.ground, rep).to_text(), end="")
    return 0 if not bad else 1


if __name__ == "__main__":
    sys.exit(main())
