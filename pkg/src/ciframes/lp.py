"""Exact linear programming over the cone of standardized supermodular functions.

Functions m on subsets of a ground set O are normalised so that m vanishes
on the empty set and on singletons.  For a statement s = ij|K the
difference is ``Δm(s) = m(ijK) + m(K) - m(iK) - m(jK)``; m is supermodular
iff every difference is nonnegative, and it induces the model
``{s : Δm(s) = 0}``.

The workhorse is a fraction-free (integer-preserving) simplex with
Bland's rule as anti-cycling fallback.  Arithmetic is exact: int64 while
entries provably cannot overflow, Python ints otherwise.
"""

from __future__ import annotations

import logging
import re
from math import gcd
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .core import CIModel, GroundSet, ParseError, iter_bits, table

log = logging.getLogger(__name__)

Rational = Fraction
MAX_LP_GROUND = 8


class ResourceLimit(RuntimeError):
    """The request exceeds the configured size limits."""


# --------------------------------------------------------------------------
# integer simplex


@dataclass
class PhaseOneResult:
    feasible: bool
    # certificate of infeasibility: integer vector π (one entry per row) with
    # π·A_j <= 0 on every column and π·b > 0, scaled by a positive integer
    certificate: list[int] | None = None
    pivots: int = 0


_SAFE = 1 << 31


def _pivot(T: np.ndarray, r: int, c: int, D: int) -> np.ndarray:
    """Fraction-free pivot on (r, c); every row except r is rescaled by p/D.

    Runs in int64 while entries stay below 2**31 (so no product can
    overflow) and on Python ints otherwise.  Results are identical.
    """
    if T.dtype != object and (int(np.abs(T).max()) >= _SAFE or abs(D) >= _SAFE):
        T = T.astype(object)
    p = T[r, c]
    pr = T[r].copy()
    T = (p * T - np.outer(T[:, c], pr)) // D
    T[r] = pr
    return T


def phase_one(A: np.ndarray, b: Sequence[int], rule: str = "dantzig") -> PhaseOneResult:
    """Decide whether ``A y = b, y >= 0`` has a solution, exactly.

    ``A`` is an integer matrix.  ``rule`` is ``"bland"`` for the pure
    smallest-index rule or ``"dantzig"`` for the most-negative rule, which
    drops to Bland's rule during degenerate stretches (so it terminates).
    """
    m, nc = A.shape
    sign = np.array([1 if bi >= 0 else -1 for bi in b], dtype=np.int64)
    big = any(abs(int(v)) >= _SAFE for v in b) or (A.size and int(np.abs(A).max()) >= _SAFE)
    dt = object if big else np.int64
    T = np.zeros((m + 1, nc + m + 1), dtype=dt)
    T[:m, :nc] = A * sign[:, None].astype(dt)
    T[:m, nc:nc + m] = np.eye(m, dtype=np.int64)
    T[:m, -1] = [int(s) * int(v) for s, v in zip(sign, b)]
    T[m, :nc] = -T[:m, :nc].sum(axis=0)
    T[m, -1] = -T[:m, -1].sum()
    basis = list(range(nc, nc + m))
    D = 1
    pivots = 0
    bland = rule == "bland"
    while True:
        row = T[m, :-1]
        if bland:
            neg = np.flatnonzero(row < 0)
            if not len(neg):
                break
            c = int(neg[0])
        else:
            c = int(np.argmin(row))
            if row[c] >= 0:
                break
        col = T[:m, c]
        rhs = T[:m, -1]
        r = -1
        for i in np.flatnonzero(col > 0):
            if r < 0:
                r = i
                continue
            lhs_v = int(rhs[i]) * int(col[r])
            rhs_v = int(rhs[r]) * int(col[i])
            if lhs_v < rhs_v or (lhs_v == rhs_v and basis[i] < basis[r]):
                r = i
        if r < 0:
            # phase one is bounded below by zero
            raise ArithmeticError("unbounded phase-one problem")
        if rule != "bland":
            bland = rhs[r] == 0
        p = int(T[r, c])
        T = _pivot(T, r, c, D)
        D = p
        basis[r] = c
        pivots += 1
    obj = T[m]
    if obj[-1] == 0:
        return PhaseOneResult(True, None, pivots)
    # reduced cost of artificial i equals 1 - pi_i (over D)
    cert = [int(sign[i]) * (D - int(obj[nc + i])) for i in range(m)]
    return PhaseOneResult(False, cert, pivots)


# --------------------------------------------------------------------------
# the supermodular cone


@dataclass(frozen=True)
class ConeGeometry:
    """Difference vectors of all statements over a k-element ground set.

    Coordinates are the subsets with at least two elements.
    """

    k: int
    coords: tuple[int, ...]
    delta: np.ndarray  # statements x coords, small ints

    @property
    def n_statements(self):
        return self.delta.shape[0]


@lru_cache(maxsize=None)
def cone_geometry(k: int) -> ConeGeometry:
    coords = tuple(S for S in range(1 << k) if S.bit_count() >= 2)
    pos = {S: c for c, S in enumerate(coords)}
    tab = table(k)
    delta = np.zeros((tab.size, len(coords)), dtype=np.int64)
    for b, s in enumerate(tab.stmts):
        for S, coef in ((s.K | 1 << s.i | 1 << s.j, 1), (s.K, 1), (s.K | 1 << s.i, -1), (s.K | 1 << s.j, -1)):
            if S in pos:
                delta[b, pos[S]] += coef
    return ConeGeometry(k, coords, delta)


def _check_size(k: int):
    if k > MAX_LP_GROUND:
        raise ResourceLimit(f"LP backend is limited to {MAX_LP_GROUND} variables (got {k})")


@dataclass
class SupermodularQuery:
    """Is there a supermodular m with Δm = 0 on ``zero_set`` and Δm > 0 on the target?"""

    ground: GroundSet
    zero_set: int
    targets: int  # bitset; the objective is the sum of their differences


def integer_nullspace(A: np.ndarray) -> np.ndarray:
    """Integer basis (as columns) of the rational null space of A.

    Fraction-free Gauss-Jordan elimination; after it every pivot entry
    equals the last pivot D, so each free column f gives the vector with
    D at f and minus the reduced column entries at the pivot positions.
    """
    rows, cols = A.shape
    T = np.array(A, dtype=np.int64)
    D = 1
    pivots: list[tuple[int, int]] = []
    used = 0
    for c in range(cols):
        if used == rows:
            break
        nz = np.flatnonzero(T[used:, c])
        if not len(nz):
            continue
        r = used + int(nz[0])
        if r != used:
            T[[used, r]] = T[[r, used]]
        p = int(T[used, c])
        T = _pivot(T, used, c, D)
        D = p
        pivots.append((used, c))
        used += 1
    pcols = {c for _, c in pivots}
    free = [c for c in range(cols) if c not in pcols]
    sgn = -1 if D < 0 else 1
    if T.dtype != object and abs(D) < _SAFE:
        B = np.zeros((cols, len(free)), dtype=np.int64)
        B[free, np.arange(len(free))] = D
        if pivots:
            B[[c for _, c in pivots]] = -T[[r for r, _ in pivots]][:, free]
        g = np.gcd.reduce(B, axis=0)
        g[g == 0] = 1
        return sgn * (B // g)
    B = np.zeros((cols, len(free)), dtype=object)
    prow = [r for r, _ in pivots]
    pcol = [c for _, c in pivots]
    for k, f in enumerate(free):
        col = [0] * cols
        col[f] = D
        for r, c in zip(prow, pcol):
            col[c] = -int(T[r, f])
        g = 0
        for v in col:
            g = gcd(g, v)
        B[:, k] = [sgn * v // g for v in col]
    return _small(B)


def _small(M: np.ndarray) -> np.ndarray:
    """int64 copy of an integer matrix when all entries are below 2**31."""
    if M.dtype != object:
        return M
    if M.size and max(abs(int(v)) for v in M.flat) >= _SAFE:
        return M
    return M.astype(np.int64)


def _matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Exact integer product, in int64 when it cannot overflow."""
    if A.dtype != object and B.dtype != object and A.size and B.size:
        bound = int(np.abs(A).max()) * int(np.abs(B).max()) * A.shape[1]
        if bound < 1 << 62:
            return A @ B
    return _small(A.astype(object) @ B.astype(object))


def supermodular_feasible(q: SupermodularQuery, rule: str = "dantzig",
                          scale: Fraction | int = 1) -> list[int] | None:
    """Exact witness (integer coordinates over ``cone_geometry(k).coords``) or None.

    The equalities on the zero set are eliminated first: the function is
    written as B u for an integer null-space basis B, and the dual system
    ``sum_s y_s (Δ_s B) = -(g B), y >= 0`` is solved by phase one.  If it is
    infeasible, its certificate u gives the witness B u.

    ``scale`` replaces the normalisation "target sum >= 1" by ">= scale";
    the verdict cannot depend on it since the feasible set is a cone.
    """
    scale = Fraction(scale)
    if scale <= 0:
        raise ValueError("scale must be positive")
    k = q.ground.n
    _check_size(k)
    geo = cone_geometry(k)
    delta = geo.delta
    Z = list(iter_bits(q.zero_set))
    rest = [b for b in range(geo.n_statements) if not q.zero_set >> b & 1]
    g = delta[list(iter_bits(q.targets))].sum(axis=0)
    if Z:
        B = integer_nullspace(delta[Z])
    else:
        B = np.eye(len(geo.coords), dtype=np.int64)
    if B.shape[1] == 0:
        return None
    red = _matmul(delta[rest], B)
    gB = _matmul(g[None, :], B)[0]
    if not any(gB):
        return None
    red = red[np.any(red != 0, axis=1)]
    # Σ y Δ_s B = -scale·gB, cleared of the denominator
    A = red.T if scale.denominator == 1 else _small(red.T.astype(object) * scale.denominator)
    res = phase_one(A, [-int(v) * scale.numerator for v in gB], rule=rule)
    if res.feasible:
        return None
    u = np.array([-v for v in res.certificate], dtype=object)
    w = [int(v) for v in B.astype(object) @ u]
    ww = 0
    for v in w:
        ww = gcd(ww, v)
    if ww > 1:
        w = [v // ww for v in w]
    _verify_witness(delta, w, q.zero_set, g)
    return w


def _verify_witness(delta, w, zero_set, g):
    wv = np.array(w, dtype=object)
    d = _matmul(delta, _small(wv[:, None]))[:, 0]
    for b, val in enumerate(d):
        if val < 0 or (zero_set >> b & 1 and val != 0):
            raise ArithmeticError("LP witness failed exact verification")
    if not (g.astype(object) @ wv) > 0:
        raise ArithmeticError("LP witness does not separate the target")


def witness_differences(k: int, w: Sequence[int]) -> list[int]:
    geo = cone_geometry(k)
    return [int(v) for v in _matmul(geo.delta, _small(np.array(w, dtype=object)[:, None]))[:, 0]]


def lp_closure(ground: GroundSet, M: int, within: int | None = None, rule: str = "dantzig") -> int:
    """Structural closure of the bitset M, restricted to candidates in ``within``.

    A candidate t is in the closure iff every supermodular m with Δm = 0 on M
    also has Δm(t) = 0.  Candidates are settled in batches: one query asks for
    a function positive on the sum of all open candidates; its witness
    discards every candidate it separates, and an infeasible query puts all
    open candidates in the closure.
    """
    k = ground.n
    _check_size(k)
    full = (1 << table(k).size) - 1
    open_ = (full if within is None else within) & ~M
    while open_:
        w = supermodular_feasible(SupermodularQuery(ground, M, open_), rule=rule)
        if w is None:
            return M | open_
        diffs = witness_differences(k, w)
        for b in list(iter_bits(open_)):
            if diffs[b] > 0:
                open_ &= ~(1 << b)
    return M


# --------------------------------------------------------------------------
# explicit set functions


@dataclass(frozen=True)
class SetFunction:
    """A rational-valued function on subsets, indexed by bitmask."""

    ground: GroundSet
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.values) != 1 << self.ground.n:
            raise ValueError("need one value per subset")

    def __call__(self, S: int) -> Fraction:
        return self.values[S]

    def delta(self, b: int) -> Fraction:
        s = table(self.ground.n)[b]
        v = self.values
        return v[s.K | 1 << s.i | 1 << s.j] + v[s.K] - v[s.K | 1 << s.i] - v[s.K | 1 << s.j]

    def is_standardized(self) -> bool:
        return all(self.values[S] == 0 for S in range(1 << self.ground.n) if S.bit_count() <= 1)


def check_supermodular(m: SetFunction) -> bool:
    return all(m.delta(b) >= 0 for b in range(m.ground.n_statements))


def induced_model(m: SetFunction) -> CIModel:
    if not check_supermodular(m):
        raise ValueError("function is not supermodular")
    bits = 0
    for b in range(m.ground.n_statements):
        if m.delta(b) == 0:
            bits |= 1 << b
    return CIModel(m.ground, bits)


def function_from_witness(ground: GroundSet, w: Sequence[int]) -> SetFunction:
    vals = [Fraction(0)] * (1 << ground.n)
    for S, x in zip(cone_geometry(ground.n).coords, w):
        vals[S] = Fraction(x)
    return SetFunction(ground, tuple(vals))


_NUM_RE = re.compile(r"^-?\d+(/\d+)?$")


def parse_rational(tok: str) -> Fraction:
    if not _NUM_RE.match(tok):
        raise ParseError(f"bad rational {tok!r}")
    return Fraction(tok)


def read_functions(text: str) -> list[tuple[str | None, SetFunction]]:
    """Supermodular-function text format.

    ``ground: a b c`` starts a record, then lines ``set a b value 3/2``
    (``set - value 0`` for the empty set).  Unlisted subsets are 0.  An
    optional ``id: <name>`` line may precede the header.
    """
    out: list[tuple[str | None, SetFunction]] = []
    ground = None
    vals: dict[int, Fraction] = {}
    cur_id = pending = None

    def flush():
        if ground is not None:
            arr = [Fraction(0)] * (1 << ground.n)
            for S, v in vals.items():
                arr[S] = v
            out.append((cur_id, SetFunction(ground, tuple(arr))))

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("id:"):
            pending = line[3:].strip()
            continue
        if line.startswith("ground:"):
            flush()
            ground = GroundSet.of(line[7:].split())
            vals, cur_id, pending = {}, pending, None
            continue
        toks = line.split()
        if ground is None or len(toks) < 4 or toks[0] != "set" or toks[-2] != "value":
            raise ParseError(f"line {lineno}: expected 'set <labels> value <q>'")
        labels = toks[1:-2]
        if labels == ["-"]:
            labels = []
        try:
            S = ground.mask(labels)
        except KeyError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        if S in vals:
            raise ParseError(f"line {lineno}: subset listed twice")
        vals[S] = parse_rational(toks[-1])
    if ground is None:
        raise ParseError("missing 'ground:' header")
    flush()
    return out


def write_function(m: SetFunction, ident: str | None = None) -> str:
    lines = [f"id: {ident}"] if ident else []
    lines.append(f"ground: {m.ground}")
    for S, v in enumerate(m.values):
        if v != 0:
            labs = " ".join(m.ground.names(S)) or "-"
            lines.append(f"set {labs} value {v}")
    return "\n".join(lines) + "\n"
