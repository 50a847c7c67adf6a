"""Closure, membership and implication queries for a frame on a ground set."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from .core import CIModel, GroundSet, format_statement, iter_bits, table
from .frames import ClauseSet, FrameSpec, clauses_for, get_frame
from .lp import MAX_LP_GROUND, ResourceLimit, lp_closure
from .sat import BackendError, make_engine

log = logging.getLogger(__name__)

_ENGINES: dict = {}


def _engine(frame: FrameSpec, n: int, exe: str | None):
    key = (frame.name, n, exe)
    eng = _ENGINES.get(key)
    if eng is None:
        eng = make_engine(clauses_for(frame, n), exe)
        _ENGINES[key] = eng
    return eng


def clear_engine_cache():
    for eng in _ENGINES.values():
        eng.close()
    _ENGINES.clear()


@dataclass
class ClosureOracle:
    """Decides closures of one frame over ground sets of one size.

    ``backend`` is ``"sat"`` (clause axiomatisation) or ``"lp"`` (the
    supermodular cone, structural frame only).  ``"auto"`` picks the SAT
    axioms whenever a clause set exists and the LP otherwise.
    """

    frame: FrameSpec
    n: int
    backend: str = "auto"
    solver_exe: str | None = None
    stats: dict = field(default_factory=lambda: {"queries": 0})

    def __post_init__(self):
        self.frame = get_frame(self.frame)
        if self.backend == "auto":
            if self.frame.backend == "structural" and self.n > 4:
                self.backend = "lp"
            else:
                self.backend = "sat"
        if self.backend == "lp":
            if self.frame.backend != "structural":
                raise ValueError("the LP backend only decides the structural frame")
            if self.n > MAX_LP_GROUND:
                raise ResourceLimit(f"LP backend is limited to {MAX_LP_GROUND} variables (got {self.n})")
        elif self.backend != "sat":
            raise ValueError(f"unknown backend {self.backend!r}")

    @property
    def clauses(self) -> ClauseSet:
        return clauses_for(self.frame, self.n)

    def closure_bits(self, M: int, within: int | None = None,
                     transcript: list | None = None) -> int:
        """Closure of the bitset M; only statements of ``within`` are decided."""
        full = (1 << table(self.n).size) - 1
        cand = full if within is None else within
        if self.backend == "lp":
            out = lp_closure(GroundSet.of(self.n), M, within=cand)
            if transcript is not None:
                for b in iter_bits(cand & ~M):
                    transcript.append((b, bool(out >> b & 1)))
            return out
        eng = _engine(self.frame, self.n, self.solver_exe)
        assumptions = [b + 1 for b in iter_bits(M)]
        res = eng.solve(assumptions)
        self.stats["queries"] += 1
        if not res.sat:
            raise BackendError("clause set has no model containing the input")
        # every witness containing M rules out the statements it leaves false
        open_ = cand & res.witness & ~M
        if transcript is not None:
            for b in iter_bits(cand & ~M & ~res.witness):
                transcript.append((b, False))
        out = M
        while open_:
            t = (open_ & -open_).bit_length() - 1
            open_ &= ~(1 << t)
            res = eng.solve(assumptions + [-(t + 1)])
            self.stats["queries"] += 1
            if res.sat:
                if transcript is not None:
                    for b in iter_bits(open_ & ~res.witness):
                        transcript.append((b, False))
                    transcript.append((t, False))
                open_ &= res.witness
            else:
                out |= 1 << t
                if transcript is not None:
                    transcript.append((t, True))
        return out

    def is_member_bits(self, M: int) -> bool:
        if self.backend == "sat":
            return self.clauses.satisfied_by(M)
        return self.closure_bits(M) == M


_ORACLES: dict = {}


def oracle_for(frame, n: int, backend: str = "auto", solver_exe: str | None = None) -> ClosureOracle:
    key = (get_frame(frame).name, n, backend, solver_exe)
    o = _ORACLES.get(key)
    if o is None:
        o = ClosureOracle(get_frame(frame), n, backend, solver_exe)
        _ORACLES[key] = o
    return o


def frame_closure(frame, M: CIModel, *, backend: str = "auto", within: int | None = None,
                  transcript: list | None = None, solver_exe: str | None = None) -> CIModel:
    """Smallest model of the frame containing M.

    ``transcript``, when given, receives ``(statement_index, in_closure)``
    pairs for every candidate that was decided.
    """
    o = oracle_for(frame, M.ground.n, backend, solver_exe)
    return CIModel(M.ground, o.closure_bits(M.bits, within=within, transcript=transcript))


def format_transcript(transcript, ground: GroundSet) -> str:
    return "".join(f"{format_statement(b, ground)} : {'IN' if v else 'OUT'}\n"
                   for b, v in sorted(transcript))


def is_member(frame, M: CIModel, backend: str = "auto") -> bool:
    return oracle_for(frame, M.ground.n, backend).is_member_bits(M.bits)


def check_implication(frame, A: CIModel, B: CIModel, backend: str = "auto") -> bool:
    """True iff every model of the frame containing A also contains B."""
    if A.ground != B.ground:
        raise ValueError("antecedent and consequent live on different ground sets")
    cl = oracle_for(frame, A.ground.n, backend).closure_bits(A.bits, within=B.bits)
    return B.bits & ~cl == 0

