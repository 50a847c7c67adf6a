"""Command-line interface.  Data goes to stdout (or --out), logs to stderr.

Exit codes: 0 ok, 2 bad input, 3 backend or resource failure, 4 cap exceeded.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

from .closure import check_implication, format_transcript, frame_closure, is_member
from .core import (
    CIModel,
    GroundMismatch,
    GroundSet,
    ParseError,
    UndirectedGraph,
    dualize,
    expand_global,
    graph_separation_model,
    lift,
    tight_replicate,
)
from .entropic import CoatomRecord, ingest_rays, merge_orbits, screen
from .frames import get_frame, read_basis, write_basis
from .lattice import (
    MooreOracle,
    basis_types,
    canonical_basis,
    enumerate_family,
    is_implicatively_perfect,
    summary_csv,
    to_implications,
    write_catalogue,
)
from .lp import ResourceLimit
from .parallel import default_workers
from .sat import SOLVER_ENV, BackendError, CapExceeded
from .selfadhesion import SAConfig, is_self_adhesive, kfold_sa_closure_at, sa2_closure, sa_closure, sa_closure_at

log = logging.getLogger("ciframes")

EXIT_OK, EXIT_INPUT, EXIT_BACKEND, EXIT_CAP = 0, 2, 3, 4


def _read_model(path) -> CIModel:
    if path is None:
        raise ParseError("--in is required")
    text = sys.stdin.read() if str(path) == "-" else Path(path).read_text()
    return CIModel.from_text(text)


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _ground(args) -> GroundSet:
    if getattr(args, "ground", None):
        return GroundSet.of(args.ground)
    if getattr(args, "n", None):
        return GroundSet.of(args.n)
    raise ParseError("--ground or --n is required")


def _labels(text: str) -> list[str]:
    if text in ("", "-"):
        return []
    parts = text.replace(",", " ").split()
    return list(parts[0]) if len(parts) == 1 and len(parts[0]) > 1 and "'" not in parts[0] else parts


def _sa_config(args) -> SAConfig:
    return SAConfig(get_frame(args.frame), policy=args.policy, iteration=args.iteration,
                    backend=args.backend)


def _solver(args):
    if getattr(args, "solver_exe", None):
        os.environ[SOLVER_ENV] = args.solver_exe


# --------------------------------------------------------------------------
# commands


def cmd_closure(args) -> int:
    M = _read_model(args.inp)
    if get_frame(args.frame).backend == "structural" and M.ground.n > 4 and args.backend != "lp":
        raise ResourceLimit("structural closure beyond 4 variables needs the LP; pass --backend lp")
    tr = [] if args.transcript else None
    cl = frame_closure(args.frame, M, backend=args.backend, transcript=tr)
    _emit(args, cl.to_text())
    if tr is not None:
        Path(args.transcript).write_text(format_transcript(tr, M.ground))
    return EXIT_OK


def cmd_sa_closure(args) -> int:
    M = _read_model(args.inp)
    if args.at is not None:
        r = sa_closure_at(args.frame, M, _labels(args.at), backend=args.backend)
    else:
        r = sa_closure(M, _sa_config(args))
    _emit(args, r.to_text())
    return EXIT_OK


def cmd_sa2_closure(args) -> int:
    M = _read_model(args.inp)
    _emit(args, sa2_closure(M, _sa_config(args)).to_text())
    return EXIT_OK


def cmd_kfold(args) -> int:
    M = _read_model(args.inp)
    if args.at is None:
        raise ParseError("--at is required")
    _emit(args, kfold_sa_closure_at(args.frame, M, _labels(args.at), args.k, args.backend).to_text())
    return EXIT_OK


def cmd_member(args) -> int:
    M = _read_model(args.inp)
    if args.selfadhesive:
        v = is_self_adhesive(M, _sa_config(args))
        line = "yes" if v.ok else "no" + (f" (fails at L = {' '.join(v.witness) or '-'})" if v.witness is not None else "")
    else:
        line = "yes" if is_member(args.frame, M, args.backend) else "no"
    _emit(args, line + "\n")
    return EXIT_OK


def cmd_implication(args) -> int:
    if args.inp:
        ground, imps = read_basis(Path(args.inp).read_text())
    else:
        from .frames import parse_implication
        ground = _ground(args)
        if not args.rule:
            raise ParseError("--rule or --in is required")
        imps = [parse_implication(args.rule, ground)]
    lines = []
    for imp in imps:
        ok = check_implication(args.frame, CIModel(ground, imp.antecedent),
                               CIModel(ground, imp.consequent), args.backend)
        lines.append(f"{'valid' if ok else 'invalid'}: {imp.format()}")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _progress(label):
    t0 = time.time()

    def report(k, total):
        if k % 100 == 0 or k == total:
            log.info("%s: %d/%d types checked (%.0fs)", label, k, total, time.time() - t0)
    return report


def cmd_catalogue(args) -> int:
    ground = _ground(args)
    if ground.n > 4:
        raise ParseError("full catalogues are limited to n <= 4")
    frame = get_frame(args.frame)
    try:
        cat = enumerate_family(frame, ground.n, selfadhesive=args.selfadhesive,
                               config=_sa_config(args) if args.selfadhesive else None,
                               cap=args.cap, progress=_progress(frame.name), workers=args.workers)
    except CapExceeded as exc:
        if args.out_dir:
            d = Path(args.out_dir)
            d.mkdir(parents=True, exist_ok=True)
            (d / "PARTIAL").write_text(f"cap {exc.cap} exceeded; {len(exc.partial)} models kept\n")
        raise
    row = cat.summary()
    _emit(args, summary_csv([row]))
    if args.out_dir:
        d = Path(args.out_dir)
        d.mkdir(parents=True, exist_ok=True)
        stem = cat.name.replace("^", "_")
        (d / f"{stem}.models").write_text(write_catalogue(cat))
        for kind, models in (("irreducibles", cat.irreducibles()), ("coatoms", cat.coatoms())):
            sub = type(cat)(cat.name, cat.ground, models, {m: cat.rep_of[m] for m in models})
            (d / f"{stem}.{kind}").write_text(write_catalogue(sub))
    return EXIT_OK


def cmd_basis(args) -> int:
    ground = _ground(args)
    if ground.n > 4:
        raise ParseError("canonical bases are limited to n <= 4")
    cat = enumerate_family(args.frame, ground.n, selfadhesive=args.selfadhesive,
                           config=_sa_config(args) if args.selfadhesive else None,
                           cap=args.cap, progress=_progress(args.frame), workers=args.workers)
    oracle = MooreOracle.from_catalogue(cat)
    basis = canonical_basis(oracle)
    perfect = is_implicatively_perfect(oracle, basis)
    _emit(args, write_basis(cat.ground, to_implications(basis, cat.ground)))
    sys.stderr.write(f"{cat.name}: {len(basis)} implications, {basis_types(basis, ground.n)} types, "
                     f"implicatively perfect: {'yes' if perfect else 'no'}\n")
    return EXIT_OK


def cmd_screen(args) -> int:
    if args.inp:
        records = ingest_rays(args.inp)
    else:
        ground = _ground(args)
        cat = enumerate_family(args.frame, ground.n, cap=args.cap)
        records = merge_orbits(CoatomRecord(f"coatom:{k}", "model-file", CIModel(cat.ground, m))
                               for k, m in enumerate(cat.coatoms(), 1))
    cfg = SAConfig(get_frame(args.frame), policy=args.policy, backend=args.backend)
    report = screen(records, cfg, workers=args.workers)
    if args.out:
        Path(args.out).write_text(report.to_csv())
    else:
        sys.stdout.write(report.to_csv())
    ok = report.passing()
    print(f"{sum(r.orbit_size for r in ok)} self-adhesive / {report.n_models} "
          f"({len(ok)} of {report.n_types} types)")
    return EXIT_OK


def cmd_expand(args) -> int:
    ground = _ground(args)
    spec = args.statement
    if "|" not in spec or "," not in spec.split("|")[0]:
        raise ParseError("global statement must look like 'I,J|K'")
    left, K = spec.split("|", 1)
    I, J = left.split(",", 1)
    _emit(args, expand_global(ground, _labels(I), _labels(J), _labels(K)).to_text())
    return EXIT_OK


def cmd_dual(args) -> int:
    _emit(args, dualize(_read_model(args.inp)).to_text())
    return EXIT_OK


def cmd_lift(args) -> int:
    M = _read_model(args.inp)
    _emit(args, lift(M, _ground(args)).to_text())
    return EXIT_OK


def cmd_replicate(args) -> int:
    M = _read_model(args.inp)
    _emit(args, tight_replicate(M, args.var, args.new).to_text())
    return EXIT_OK


def cmd_graph_model(args) -> int:
    G = UndirectedGraph.parse(_ground(args), args.edges)
    _emit(args, graph_separation_model(G).to_text())
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ciframes", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, *, frame=True, inp=True, ground=False, sa=False, help=None):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(fn=fn)
        if frame:
            sp.add_argument("--frame", default="semigraphoid")
        if inp:
            sp.add_argument("--in", dest="inp")
        if ground:
            sp.add_argument("--ground")
            sp.add_argument("--n", type=int)
        sp.add_argument("--out")
        sp.add_argument("--backend", choices=("auto", "sat", "lp"), default="auto")
        sp.add_argument("--solver-exe")
        sp.add_argument("--workers", type=int, default=default_workers())
        sp.add_argument("--cap", type=int, default=10**8)
        sp.add_argument("--policy", choices=("auto", "reduced", "full"), default="auto")
        sp.add_argument("--iteration", choices=("restart", "sweep"), default="restart")
        if sa:
            sp.add_argument("--selfadhesive", action="store_true")
        return sp

    sp = add("closure", cmd_closure, help="frame closure of a model")
    sp.add_argument("--transcript", help="write per-candidate verdicts here")
    sp = add("sa-closure", cmd_sa_closure, help="self-adhesive closure (or one step with --at)")
    sp.add_argument("--at", help="gluing set L, e.g. 'b,d' or '-' for empty")
    add("sa2-closure", cmd_sa2_closure, help="second-order self-adhesive closure")
    sp = add("kfold", cmd_kfold, help="k-fold self-adhesive closure step at L")
    sp.add_argument("--at")
    sp.add_argument("--k", type=int, default=2)
    add("member", cmd_member, sa=True, help="membership in F or F^sa")
    sp = add("implication", cmd_implication, ground=True, help="validity of implications")
    sp.add_argument("--rule", help="'a b | ; a c | b => a c |'")
    sp = add("catalogue", cmd_catalogue, inp=False, ground=True, sa=True, help="enumerate a family")
    sp.add_argument("--out-dir")
    add("basis", cmd_basis, inp=False, ground=True, sa=True, help="canonical implication basis")
    add("screen", cmd_screen, ground=True, help="screen coatoms for self-adhesivity")
    sp = add("expand", cmd_expand, frame=False, inp=False, ground=True, help="expand 'I,J|K'")
    sp.add_argument("statement")
    add("dual", cmd_dual, frame=False, help="dual model")
    add("lift", cmd_lift, frame=False, ground=True, help="lift to a larger ground set")
    sp = add("replicate", cmd_replicate, frame=False, help="tight replication of a variable")
    sp.add_argument("--var", required=True)
    sp.add_argument("--new")
    sp = add("graph-model", cmd_graph_model, frame=False, inp=False, ground=True,
             help="separation model of an undirected graph")
    sp.add_argument("--edges", required=True, help="'a-b,a-c'")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    _solver(args)
    try:
        if getattr(args, "frame", None):
            get_frame(args.frame)
        return args.fn(args)
    except CapExceeded as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CAP
    except (BackendError, ResourceLimit) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_BACKEND
    except (ParseError, GroundMismatch, ValueError, KeyError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
