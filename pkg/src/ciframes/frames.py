"""Frames (families of CI models) as Horn clause sets over statement variables.

Literals follow the DIMACS convention: statement index ``b`` is variable
``b + 1``, and a negative literal means the statement is absent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from typing import Iterable, Sequence

from .core import (
    GroundSet,
    ParseError,
    _loose_statement,
    format_statement,
    parse_statement,
    statement_index,
    table,
)

Clause = tuple[int, ...]


@dataclass(frozen=True)
class FrameSpec:
    """Static description of a frame.

    ``lifting`` and ``tight_replication`` say whether the frame is known to
    be closed under those operations; they gate the reduced self-adhesion
    policy.  ``backend`` is ``"sat"`` or ``"structural"`` (axioms at n=4,
    LP otherwise).
    """

    name: str
    lifting: bool
    tight_replication: bool
    backend: str = "sat"

    @property
    def reduced_policy_ok(self) -> bool:
        return self.lifting and self.tight_replication


FRAMES: dict[str, FrameSpec] = {
    "semigraphoid": FrameSpec("semigraphoid", True, True),
    "structural": FrameSpec("structural", True, True, backend="structural"),
    # closure of graphoid-type frames under the two operations is not
    # settled here; they are treated as unknown, which forces the full policy
    "graphoid": FrameSpec("graphoid", False, False),
    "comp-semigraphoid": FrameSpec("comp-semigraphoid", False, False),
    "comp-graphoid": FrameSpec("comp-graphoid", False, False),
}

ALIASES = {
    "semgr": "semigraphoid",
    "strum": "structural",
    "gra": "graphoid",
    "cogr": "comp-graphoid",
    "dual-graphoid": "comp-semigraphoid",
}


def get_frame(name: "str | FrameSpec") -> FrameSpec:
    if isinstance(name, FrameSpec):
        return name
    key = ALIASES.get(name, name)
    try:
        return FRAMES[key]
    except KeyError:
        raise ValueError(f"unknown frame {name!r}; choose from {sorted(FRAMES)}") from None


@dataclass(frozen=True)
class Implication:
    """``antecedent ⇒ consequent`` as statement bitsets over a ground set."""

    ground: GroundSet
    antecedent: int
    consequent: int

    def format(self) -> str:
        a = " ; ".join(format_statement(b, self.ground) for b in _bits(self.antecedent))
        c = " ; ".join(format_statement(b, self.ground) for b in _bits(self.consequent))
        return f"{a} => {c}"

    def holds_in(self, bits: int) -> bool:
        return self.antecedent & ~bits != 0 or self.consequent & ~bits == 0


def _bits(x: int):
    b = 0
    while x:
        if x & 1:
            yield b
        x >>= 1
        b += 1


@dataclass(frozen=True)
class ClauseSet:
    n_vars: int
    clauses: tuple[Clause, ...]

    def __len__(self):
        return len(self.clauses)

    def is_horn(self) -> bool:
        return all(sum(1 for lit in c if lit > 0) <= 1 for c in self.clauses)

    def satisfied_by(self, bits: int) -> bool:
        for c in self.clauses:
            for lit in c:
                if (bits >> (abs(lit) - 1) & 1) == (lit > 0):
                    break
            else:
                return False
        return True


def _dedupe(clauses: Iterable[Clause]) -> tuple[Clause, ...]:
    seen = {}
    for c in clauses:
        key = tuple(sorted(set(c)))
        seen.setdefault(key, key)
    return tuple(seen)


# --------------------------------------------------------------------------
# generators


def _instances(n: int):
    """(i, j, l, K) with j < l, i not in {j, l}, K ⊆ N minus {i, j, l}."""
    full = (1 << n) - 1
    for i in range(n):
        for j, l in combinations([v for v in range(n) if v != i], 2):
            rest = full & ~(1 << i | 1 << j | 1 << l)
            sub = 0
            while True:
                yield i, j, l, sub
                if sub == rest:
                    break
                sub = (sub - rest) & rest


def _lit(i, j, K, n):
    return statement_index(i, j, K, n) + 1


@lru_cache(maxsize=None)
def semigraphoid_clauses(n: int) -> ClauseSet:
    """``ij|K ∧ iℓ|jK ⇔ iℓ|K ∧ ij|ℓK`` for every instance, as 4 Horn clauses."""
    out = []
    for i, j, l, K in _instances(n):
        a = _lit(i, j, K, n)
        b = _lit(i, l, K | 1 << j, n)
        c = _lit(i, l, K, n)
        d = _lit(i, j, K | 1 << l, n)
        out += [(-a, -b, c), (-a, -b, d), (-c, -d, a), (-c, -d, b)]
    return ClauseSet(table(n).size, tuple(out))


def _intersection_clauses(n: int):
    for i, j, l, K in _instances(n):
        p = _lit(i, j, K | 1 << l, n)
        q = _lit(i, l, K | 1 << j, n)
        yield (-p, -q, _lit(i, j, K, n))
        yield (-p, -q, _lit(i, l, K, n))


def _composition_clauses(n: int):
    for i, j, l, K in _instances(n):
        p = _lit(i, j, K, n)
        q = _lit(i, l, K, n)
        yield (-p, -q, _lit(i, j, K | 1 << l, n))
        yield (-p, -q, _lit(i, l, K | 1 << j, n))


@lru_cache(maxsize=None)
def graphoid_clauses(n: int) -> ClauseSet:
    base = semigraphoid_clauses(n).clauses
    return ClauseSet(table(n).size, base + tuple(_intersection_clauses(n)))


@lru_cache(maxsize=None)
def comp_semigraphoid_clauses(n: int) -> ClauseSet:
    base = semigraphoid_clauses(n).clauses
    return ClauseSet(table(n).size, base + tuple(_composition_clauses(n)))


@lru_cache(maxsize=None)
def comp_graphoid_clauses(n: int) -> ClauseSet:
    base = graphoid_clauses(n).clauses
    return ClauseSet(table(n).size, base + tuple(_composition_clauses(n)))


def graphoid_family_clauses(n: int, kind: str) -> ClauseSet:
    gens = {"graphoid": graphoid_clauses, "comp-semigraphoid": comp_semigraphoid_clauses,
            "comp-graphoid": comp_graphoid_clauses}
    try:
        return gens[ALIASES.get(kind, kind)](n)
    except KeyError:
        raise ValueError(f"not a graphoid-type frame: {kind!r}") from None


# The implication types generating the structural frame at n = 4, written
# over variables i, j, k, l.  The first two are the semigraphoid basis.
STRUCTURAL_RULES_N4 = (
    "ij| ; il|j => il| ; ij|l",
    "ij|k ; il|jk => il|k ; ij|kl",
    "ij|k ; ik|l ; il|j => ij|l ; ik|j ; il|k",
    "ij|k ; il|j ; jk|l ; kl|i => ij|l ; il|k ; jk|i ; kl|j",
    "ij|kl ; ik| ; jl| ; kl|ij => ij| ; ik|jl ; jl|ik ; kl|",
    "ij| ; ij|kl ; kl|i ; kl|j => ij|k ; ij|l ; kl| ; kl|ij",
    "ij|k ; jk|il ; il|j ; kl| => ij|kl ; jk|i ; il| ; kl|j",
)


def clauses_from_implications(n: int, basis: Sequence[Implication], with_symmetry: bool) -> ClauseSet:
    """One Horn clause per (implication, consequent statement).

    With ``with_symmetry`` every implication is applied under all n!
    relabelings of the ground set.
    """
    perms = list(permutations(range(n))) if with_symmetry else [tuple(range(n))]
    tab = table(n)
    out = []
    for imp in basis:
        if imp.ground.n != n:
            raise ValueError("implication ground size differs")
        ante = [tab[b] for b in _bits(imp.antecedent)]
        cons = [tab[b] for b in _bits(imp.consequent)]
        for p in perms:
            pa = [-(_perm_index(s, p, n) + 1) for s in ante]
            for s in cons:
                c = _perm_index(s, p, n) + 1
                if -c in pa:
                    continue
                out.append(tuple(pa) + (c,))
    return ClauseSet(tab.size, _dedupe(out))


def _perm_index(s, p, n):
    K = 0
    for v in range(n):
        if s.K >> v & 1:
            K |= 1 << p[v]
    return statement_index(p[s.i], p[s.j], K, n)


@lru_cache(maxsize=None)
def structural_rules_n4() -> tuple[Implication, ...]:
    g = GroundSet(("i", "j", "k", "l"))
    return tuple(parse_implication(r, g) for r in STRUCTURAL_RULES_N4)


@lru_cache(maxsize=None)
def structural_clauses_n4() -> ClauseSet:
    return clauses_from_implications(4, structural_rules_n4(), with_symmetry=True)


def clauses_for(frame: "str | FrameSpec", n: int) -> ClauseSet:
    f = get_frame(frame)
    if f.name == "semigraphoid":
        return semigraphoid_clauses(n)
    if f.name == "graphoid":
        return graphoid_clauses(n)
    if f.name == "comp-semigraphoid":
        return comp_semigraphoid_clauses(n)
    if f.name == "comp-graphoid":
        return comp_graphoid_clauses(n)
    if f.name == "structural":
        if n == 4:
            return structural_clauses_n4()
        if n <= 3:
            # structural and semigraphoid models coincide below four variables
            return semigraphoid_clauses(n)
        raise ValueError("no clause set for the structural frame beyond n=4; use the LP backend")
    raise ValueError(f"no clause generator for {f.name}")


# --------------------------------------------------------------------------
# text formats


def parse_implication(text: str, ground: GroundSet) -> Implication:
    """``a b | ; a c | b => a c | ; a b | c`` (also accepts ``ab|c`` shorthand)."""
    if text.count("=>") != 1:
        raise ParseError(f"implication needs exactly one '=>': {text!r}")
    left, right = text.split("=>")

    def side(part):
        bits = 0
        for tok in part.split(";"):
            tok = tok.strip()
            if not tok:
                continue
            b = parse_statement(_loose_statement(tok, ground), ground)
            if bits >> b & 1:
                raise ParseError(f"duplicate statement {tok!r}")
            bits |= 1 << b
        return bits

    return Implication(ground, side(left), side(right))


def read_basis(text: str, ground: GroundSet | None = None) -> tuple[GroundSet, list[Implication]]:
    """Implication basis file: optional ``ground:`` header, one implication per line."""
    imps = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("ground:"):
            ground = GroundSet.of(line[7:].split())
            continue
        if ground is None:
            raise ParseError(f"line {lineno}: implication before 'ground:' header")
        try:
            imps.append(parse_implication(line, ground))
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    if ground is None:
        raise ParseError("missing 'ground:' header")
    return ground, imps


def write_basis(ground: GroundSet, basis: Iterable[Implication]) -> str:
    return "\n".join([f"ground: {ground}"] + [imp.format() for imp in basis]) + "\n"


def to_dimacs(cs: ClauseSet, ground: GroundSet | None = None, extra: Iterable[Clause] = ()) -> str:
    """DIMACS CNF text with ``c var`` comments naming each statement variable."""
    extra = list(extra)
    lines = []
    if ground is not None:
        for b in range(ground.n_statements):
            lines.append(f"c var {b + 1} = {format_statement(b, ground)}")
    lines.append(f"p cnf {cs.n_vars} {len(cs.clauses) + len(extra)}")
    lines += [" ".join(map(str, c)) + " 0" for c in cs.clauses]
    lines += [" ".join(map(str, c)) + " 0" for c in extra]
    return "\n".join(lines) + "\n"


_P_RE = re.compile(r"^p\s+cnf\s+(\d+)\s+(\d+)\s*$")


def from_dimacs(text: str) -> ClauseSet:
    nv = None
    clauses = []
    cur: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        m = _P_RE.match(line)
        if m:
            nv = int(m.group(1))
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(lit)
    if nv is None:
        raise ParseError("missing DIMACS problem line")
    return ClauseSet(nv, tuple(clauses))
