"""Screening candidate models (e.g. coatoms of the structural frame) for
self-adhesivity, with a CSV report."""

from __future__ import annotations

import csv
import io
import logging
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable

from .core import CIModel, GroundSet, ParseError, read_models
from .lattice import orbit
from .parallel import pmap
from .lp import SetFunction, check_supermodular, induced_model, read_functions
from .selfadhesion import SAConfig, is_self_adhesive

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoatomRecord:
    id: str
    source: str  # "model-file" or "supermodular-file"
    model: CIModel
    function: SetFunction | None = None
    multiplicity: int = 1
    # induced models are structural by construction
    trusted: bool = False

    @property
    def orbit_rep(self) -> CIModel:
        return CIModel(self.model.ground, min(orbit(self.model.bits, self.model.ground.n)))


@dataclass
class ScreenRow:
    id: str
    orbit_size: int
    verdict: bool
    witness_L: tuple[str, ...] | None
    millis: float


@dataclass
class ScreenReport:
    rows: list[ScreenRow] = field(default_factory=list)

    @property
    def n_types(self) -> int:
        return len(self.rows)

    @property
    def n_models(self) -> int:
        return sum(r.orbit_size for r in self.rows)

    def passing(self) -> list[ScreenRow]:
        return [r for r in self.rows if r.verdict]

    def summary(self) -> str:
        ok = self.passing()
        return (f"self-adhesive types: {len(ok)} of {self.n_types}; "
                f"models: {sum(r.orbit_size for r in ok)} of {self.n_models}")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "orbit_size", "verdict", "witness_L", "millis"])
        for r in self.rows:
            w.writerow([r.id, r.orbit_size, "sa" if r.verdict else "not-sa",
                        " ".join(r.witness_L) if r.witness_L else "", f"{r.millis:.1f}"])
        return buf.getvalue()


def parse_records(text: str, source: str = "input") -> list[CoatomRecord]:
    """Records in the model text format or the supermodular-function format.

    The format is detected from the first non-comment line after a header.
    """
    body = [l.split("#", 1)[0].strip() for l in text.splitlines()]
    body = [l for l in body if l and not l.startswith(("ground:", "id:"))]
    if body and body[0].startswith("set "):
        out = []
        for k, (ident, m) in enumerate(read_functions(text), 1):
            if not m.is_standardized():
                m = standardize(m)
            if not check_supermodular(m):
                raise ParseError(f"record {ident or k}: function is not supermodular")
            M = induced_model(m)
            if M.bits == CIModel.full(M.ground).bits:
                raise ParseError(f"record {ident or k}: modular function induces the top model")
            out.append(CoatomRecord(ident or f"{source}:{k}", "supermodular-file", M, m, trusted=True))
        return out
    return [CoatomRecord(ident or f"{source}:{k}", "model-file", M)
            for k, (ident, M) in enumerate(read_models(text), 1)]


def standardize(m: SetFunction) -> SetFunction:
    """Subtract the modular part so the function vanishes on sets of size <= 1."""
    n = m.ground.n
    v = m.values
    out = []
    for S in range(1 << n):
        x = v[S] - v[0]
        for i in range(n):
            if S >> i & 1:
                x -= v[1 << i] - v[0]
        out.append(x)
    return SetFunction(m.ground, tuple(out))


def ingest_rays(path: str | Path, ground: GroundSet | None = None) -> list[CoatomRecord]:
    """Read records from a file and merge duplicates up to relabelling."""
    path = Path(path)
    recs = parse_records(path.read_text(), source=path.stem)
    if ground is not None:
        for r in recs:
            if r.model.ground != ground:
                raise ParseError(f"record {r.id} has ground {r.model.ground}, expected {ground}")
    return merge_orbits(recs)


def merge_orbits(records: Iterable[CoatomRecord]) -> list[CoatomRecord]:
    by_rep: dict = {}
    for r in records:
        n = r.model.ground.n
        key = (r.model.ground, min(orbit(r.model.bits, n)))
        if key in by_rep:
            prev = by_rep[key]
            by_rep[key] = replace(prev, multiplicity=prev.multiplicity + r.multiplicity)
        else:
            by_rep[key] = r
    return list(by_rep.values())


def _screen_one(job) -> ScreenRow:
    rec, config = job
    t0 = time.perf_counter()
    v = is_self_adhesive(rec.model, config)
    ms = (time.perf_counter() - t0) * 1000
    return ScreenRow(rec.id, len(orbit(rec.model.bits, rec.model.ground.n)), v.ok, v.witness, ms)


def screen(records: Iterable[CoatomRecord], config: SAConfig,
           progress: Callable[[ScreenRow], None] | None = None,
           workers: int | None = 1) -> ScreenReport:
    """Self-adhesivity verdict per record, smallest models first."""
    recs = sorted(records, key=lambda r: (len(r.model), r.id))
    grounds = {r.model.ground for r in recs}
    if len(grounds) > 1:
        raise ValueError("records must share one ground set")
    jobs = [(r, config) for r in recs]
    if workers is not None and workers <= 1:
        rows = []
        for job in jobs:
            row = _screen_one(job)
            log.info("%s: %s (%.0f ms)", row.id, "sa" if row.verdict else "not-sa", row.millis)
            if progress:
                progress(row)
            rows.append(row)
    else:
        rows = pmap(_screen_one, jobs, workers, chunksize=1)
    return ScreenReport(rows)
