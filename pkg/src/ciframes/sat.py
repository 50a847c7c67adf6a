"""SAT backends: an incremental in-process solver, an external DIMACS bridge,
model enumeration and a brute-force oracle for tiny universes."""

from __future__ import annotations

import logging
import os
import shutil
import subprocess
import tempfile
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from pysat.solvers import Solver

from .frames import ClauseSet

log = logging.getLogger(__name__)

DEFAULT_SOLVER = "cadical195"
DEFAULT_CAP = 10**8
SOLVER_ENV = "CI_SAT_SOLVER"


class BackendError(RuntimeError):
    """The solver failed, timed out or produced garbage."""


class CapExceeded(RuntimeError):
    """Enumeration hit its model cap; partial results are attached."""

    def __init__(self, cap: int, partial: list[int]):
        super().__init__(f"enumeration exceeded cap of {cap} models")
        self.cap = cap
        self.partial = partial


@dataclass(frozen=True)
class SatResult:
    sat: bool
    witness: int | None = None  # bitset of true statement variables


def _bits_from_model(model: Sequence[int]) -> int:
    w = 0
    for lit in model:
        if lit > 0:
            w |= 1 << (lit - 1)
    return w


class SatEngine:
    """Incremental solver over a fixed clause database, queried with assumptions."""

    def __init__(self, cs: ClauseSet, name: str = DEFAULT_SOLVER):
        self.clauses = cs
        self.name = name
        self._solver = Solver(name=name, bootstrap_with=[list(c) for c in cs.clauses])
        self.calls = 0

    def solve(self, assumptions: Sequence[int] = ()) -> SatResult:
        self.calls += 1
        if self._solver.solve(assumptions=list(assumptions)):
            return SatResult(True, _bits_from_model(self._solver.get_model()))
        return SatResult(False)

    def close(self):
        self._solver.delete()

    def __del__(self):
        try:
            self._solver.delete()
        except Exception:
            pass


class ExternalSatEngine:
    """Run a DIMACS solver executable per query.

    Assumptions are appended as unit clauses to the prebuilt DIMACS body.
    The solver must print ``s SATISFIABLE`` / ``s UNSATISFIABLE`` and
    ``v`` lines, following the competition output convention.
    """

    def __init__(self, cs: ClauseSet, exe: str, timeout: float = 600.0):
        path = shutil.which(exe) or (exe if os.path.exists(exe) else None)
        if path is None:
            raise BackendError(f"solver executable not found: {exe}")
        self.exe = path
        self.clauses = cs
        self.timeout = timeout
        self._body = "\n".join(" ".join(map(str, c)) + " 0" for c in cs.clauses)
        self.calls = 0

    def solve(self, assumptions: Sequence[int] = ()) -> SatResult:
        self.calls += 1
        units = [f"{lit} 0" for lit in assumptions]
        text = f"p cnf {self.clauses.n_vars} {len(self.clauses.clauses) + len(units)}\n{self._body}\n"
        if units:
            text += "\n".join(units) + "\n"
        with tempfile.NamedTemporaryFile("w", suffix=".cnf", delete=False) as fh:
            fh.write(text)
            path = fh.name
        try:
            proc = subprocess.run([self.exe, path], capture_output=True, text=True, timeout=self.timeout)
        except subprocess.TimeoutExpired:
            raise BackendError(f"external solver timed out after {self.timeout}s") from None
        finally:
            os.unlink(path)
        status = None
        lits: list[int] = []
        for line in proc.stdout.splitlines():
            if line.startswith("s "):
                status = line[2:].strip()
            elif line.startswith("v "):
                lits += [int(t) for t in line[2:].split() if t != "0"]
        if status == "SATISFIABLE":
            return SatResult(True, _bits_from_model(lits))
        if status == "UNSATISFIABLE":
            return SatResult(False)
        raise BackendError(f"external solver gave no verdict (exit {proc.returncode})")

    def close(self):
        pass


def make_engine(cs: ClauseSet, exe: str | None = None):
    """In-process engine unless an executable is given or set in CI_SAT_SOLVER."""
    exe = exe or os.environ.get(SOLVER_ENV)
    if exe:
        return ExternalSatEngine(cs, exe)
    return SatEngine(cs)


def enumerate_models(cs: ClauseSet, cap: int = DEFAULT_CAP, name: str = DEFAULT_SOLVER) -> Iterator[int]:
    """All satisfying assignments as bitsets, via full-assignment blocking clauses.

    Variables that occur in no clause are free and expanded at yield time.
    Raises CapExceeded once more than ``cap`` models would be produced.
    """
    used = sorted({abs(lit) for c in cs.clauses for lit in c})
    free = [v for v in range(1, cs.n_vars + 1) if v not in set(used)]
    count = 0
    partial: list[int] = []
    with Solver(name=name, bootstrap_with=[list(c) for c in cs.clauses]) as s:
        while s.solve():
            model = s.get_model()
            val = {abs(l): l > 0 for l in model}
            w = 0
            block = []
            for v in used:
                if val.get(v, False):
                    w |= 1 << (v - 1)
                    block.append(-v)
                else:
                    block.append(v)
            for extra in range(1 << len(free)):
                x = w
                for k, v in enumerate(free):
                    if extra >> k & 1:
                        x |= 1 << (v - 1)
                count += 1
                if count > cap:
                    raise CapExceeded(cap, partial)
                if len(partial) < 1000:
                    partial.append(x)
                yield x
            if not block:
                break
            s.add_clause(block)


def brute_force_models(cs: ClauseSet, chunk_bits: int = 20) -> list[int]:
    """Check every assignment; only for universes of at most 24 variables."""
    u = cs.n_vars
    if u > 24:
        raise ValueError("brute force is limited to 24 variables")
    out: list[int] = []
    size = 1 << u
    step = 1 << min(chunk_bits, u)
    for start in range(0, size, step):
        x = np.arange(start, start + step, dtype=np.uint32)
        bits = [((x >> v) & 1).astype(bool) for v in range(u)]
        ok = np.ones(step, dtype=bool)
        for c in cs.clauses:
            sat = np.zeros(step, dtype=bool)
            for lit in c:
                b = bits[abs(lit) - 1]
                sat |= b if lit > 0 else ~b
            ok &= sat
        out += [int(v) for v in x[ok]]
    return out
