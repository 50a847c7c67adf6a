"""Model families as lattices: catalogues, symmetry types, irreducibles,
coatoms and canonical implication bases."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from typing import Callable, Iterable, Sequence

import numpy as np

from .closure import oracle_for
from .core import CIModel, GroundSet, ParseError, iter_bits, statement_index, table
from .frames import Implication, get_frame
from .parallel import pmap
from .sat import DEFAULT_CAP, enumerate_models
from .selfadhesion import SAConfig, is_self_adhesive

log = logging.getLogger(__name__)


# --------------------------------------------------------------------------
# symmetry


@lru_cache(maxsize=None)
def permutation_tables(n: int) -> list[tuple[int, ...]]:
    """For every permutation of the ground set, its action on statement indices."""
    tab = table(n)
    out = []
    for p in permutations(range(n)):
        row = []
        for s in tab.stmts:
            K = 0
            for v in iter_bits(s.K):
                K |= 1 << p[v]
            row.append(statement_index(p[s.i], p[s.j], K, n))
        out.append(tuple(row))
    return out


@lru_cache(maxsize=None)
def _chunk_tables(n: int) -> list[list[list[int]]]:
    """Byte-wise lookup: tables[perm][chunk][byte] -> image bits."""
    size = table(n).size
    chunks = (size + 7) // 8
    out = []
    for row in permutation_tables(n):
        per = []
        for c in range(chunks):
            lut = [0] * 256
            for byte in range(1, 256):
                low = byte & -byte
                b = c * 8 + low.bit_length() - 1
                lut[byte] = lut[byte ^ low] | (1 << row[b] if b < size else 0)
            per.append(lut)
        out.append(per)
    return out


def orbit(bits: int, n: int) -> set[int]:
    tabs = _chunk_tables(n)
    chunks = len(tabs[0])
    out = set()
    for per in tabs:
        x = 0
        for c in range(chunks):
            byte = bits >> (8 * c) & 0xFF
            if byte:
                x |= per[c][byte]
        out.add(x)
    return out


def canonical_form(bits: int, n: int) -> int:
    """Orbit representative: the numerically least image under all n! relabelings."""
    return min(orbit(bits, n))


def apply_permutation(bits: int, perm: Sequence[int], n: int) -> int:
    out = 0
    for b in iter_bits(bits):
        s = table(n)[b]
        K = 0
        for v in iter_bits(s.K):
            K |= 1 << perm[v]
        out |= 1 << statement_index(perm[s.i], perm[s.j], K, n)
    return out


# --------------------------------------------------------------------------
# catalogues


@dataclass
class FamilyCatalogue:
    """All models of a family over one ground set, grouped into symmetry types."""

    name: str
    ground: GroundSet
    models: list[int]
    rep_of: dict[int, int] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        self.models = sorted(set(self.models))
        self._set = set(self.models)
        if not self.rep_of:
            self.rep_of = orbit_map(self.models, self.ground.n)

    def __len__(self):
        return len(self.models)

    def __contains__(self, bits: int) -> bool:
        return bits in self._set

    @property
    def top(self) -> int:
        return (1 << self.ground.n_statements) - 1

    def types(self) -> dict[int, list[int]]:
        groups: dict[int, list[int]] = {}
        for m in self.models:
            groups.setdefault(self.rep_of[m], []).append(m)
        return groups

    def n_types(self) -> int:
        return len(set(self.rep_of[m] for m in self.models))

    def closure(self, bits: int) -> int:
        """Intersection of all members containing ``bits``."""
        return family_closure(self, bits)

    def irreducibles(self) -> list[int]:
        return [m for m in self.models if self.rep_of[m] in self._irr_reps()]

    def coatoms(self) -> list[int]:
        return [m for m in self.models if self.rep_of[m] in self._coatom_reps()]

    def _irr_reps(self) -> set[int]:
        if not hasattr(self, "_irr"):
            self._upper_structure()
        return self._irr

    def _coatom_reps(self) -> set[int]:
        if not hasattr(self, "_coat"):
            self._upper_structure()
        return self._coat

    def _upper_structure(self):
        reps = sorted(set(self.rep_of.values()))
        top = self.top
        irr, coat = set(), set()
        for r in reps:
            sup = strict_supersets(self, r)
            meet = top
            for s in sup:
                meet &= s
            # the top element is the empty meet, not an irreducible
            if r != top and meet != r:
                irr.add(r)
            if r != top and all(s == top for s in sup):
                coat.add(r)
        self._irr, self._coat = irr, coat

    def summary(self) -> dict:
        irr = self.irreducibles()
        co = self.coatoms()
        return {
            "family": self.name,
            "models": len(self),
            "types": self.n_types(),
            "irreducibles": len(irr),
            "irreducible_types": len(set(self.rep_of[m] for m in irr)),
            "coatoms": len(co),
            "coatom_types": len(set(self.rep_of[m] for m in co)),
        }

    def restrict(self, name: str, keep_rep: Callable[[int], bool]) -> "FamilyCatalogue":
        """Sub-family of whole symmetry types, deciding on representatives only."""
        verdict = {r: keep_rep(r) for r in sorted(set(self.rep_of.values()))}
        kept = [m for m in self.models if verdict[self.rep_of[m]]]
        return FamilyCatalogue(name, self.ground, kept, {m: self.rep_of[m] for m in kept})


def orbit_map(models: Iterable[int], n: int) -> dict[int, int]:
    rep_of: dict[int, int] = {}
    for m in models:
        if m in rep_of:
            continue
        orb = orbit(m, n)
        r = min(orb)
        for x in orb:
            rep_of[x] = r
    return rep_of


def _as_array(cat: FamilyCatalogue):
    arr = getattr(cat, "_arr", None)
    if arr is None and cat.ground.n_statements <= 63:
        arr = np.array(cat.models, dtype=np.uint64)
        cat._arr = arr
    return arr


def strict_supersets(cat: FamilyCatalogue, bits: int) -> list[int]:
    arr = _as_array(cat)
    if arr is not None:
        b = np.uint64(bits)
        sel = arr[((arr & b) == b) & (arr != b)]
        return [int(x) for x in sel]
    return [m for m in cat.models if m & bits == bits and m != bits]


def family_closure(cat: FamilyCatalogue, bits: int) -> int:
    arr = _as_array(cat)
    if arr is not None:
        b = np.uint64(bits)
        sel = arr[(arr & b) == b]
        return int(np.bitwise_and.reduce(sel)) if len(sel) else cat.top
    out = cat.top
    for m in cat.models:
        if m & bits == bits:
            out &= m
    return out


def _sa_verdict(job) -> bool:
    ground, bits, config = job
    return bool(is_self_adhesive(CIModel(ground, bits), config))


def enumerate_family(frame, n: int, *, selfadhesive: bool = False,
                     config: SAConfig | None = None, cap: int = DEFAULT_CAP,
                     progress: Callable[[int, int], None] | None = None,
                     workers: int | None = 1) -> FamilyCatalogue:
    """Catalogue F(N) and optionally F^sa(N); the latter is filtered per type."""
    f = get_frame(frame)
    ground = GroundSet.of(n)
    if f.backend == "structural" and n > 4:
        raise ValueError("full enumeration of the structural frame needs n <= 4")
    models = list(enumerate_models(oracle_for(f, n).clauses, cap=cap))
    cat = FamilyCatalogue(_family_name(f.name, False), ground, models)
    if not selfadhesive:
        return cat
    config = config or SAConfig(f)
    reps = sorted(set(cat.rep_of.values()))
    if workers is not None and workers <= 1:
        verdicts = {}
        for k, r in enumerate(reps, 1):
            verdicts[r] = _sa_verdict((ground, r, config))
            if progress:
                progress(k, len(reps))
    else:
        verdicts = dict(zip(reps, pmap(_sa_verdict, [(ground, r, config) for r in reps], workers)))
    return cat.restrict(_family_name(f.name, True), verdicts.__getitem__)


def _family_name(frame: str, sa: bool) -> str:
    return frame + ("^sa" if sa else "")


# --------------------------------------------------------------------------
# catalogue files


def write_catalogue(cat: FamilyCatalogue) -> str:
    """One model per line: its statement indices in hex, space separated."""
    lines = [f"# family {cat.name}", f"ground: {cat.ground}"]
    for m in cat.models:
        lines.append(" ".join(format(b, "x") for b in iter_bits(m)))
    return "\n".join(lines) + "\n"


def read_catalogue(text: str, name: str = "family") -> FamilyCatalogue:
    ground = None
    models = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        if raw.startswith("# family "):
            name = raw[9:].strip()
            continue
        line = raw.split("#", 1)[0].strip()
        if line.startswith("ground:"):
            ground = GroundSet.of(line[7:].split())
            continue
        if ground is None:
            if line:
                raise ParseError(f"line {lineno}: model before 'ground:' header")
            continue
        bits = 0
        try:
            for tok in line.split():
                bits |= 1 << int(tok, 16)
        except ValueError:
            raise ParseError(f"line {lineno}: bad hex index") from None
        models.append(bits)
    if ground is None:
        raise ParseError("missing 'ground:' header")
    return FamilyCatalogue(name, ground, models)


SUMMARY_FIELDS = ("family", "models", "types", "irreducibles", "irreducible_types", "coatoms", "coatom_types")


def summary_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SUMMARY_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


# --------------------------------------------------------------------------
# canonical bases


@dataclass
class MooreOracle:
    """A closure system on the universe {0, ..., size-1} given by its closure map.

    ``is_closed`` is an optional fast membership test; ``family_size`` lets
    the step-wise basis construction stop early.
    """

    size: int
    closure: Callable[[int], int]
    is_closed: Callable[[int], bool] | None = None
    family_size: int | None = None

    def closed(self, x: int) -> bool:
        if self.is_closed is not None:
            return self.is_closed(x)
        return self.closure(x) == x

    @classmethod
    def from_catalogue(cls, cat: FamilyCatalogue) -> "MooreOracle":
        return cls(cat.ground.n_statements, cat.closure, cat.__contains__, len(cat))

    @classmethod
    def from_sets(cls, size: int, family: Iterable[int]) -> "MooreOracle":
        fam = sorted(set(family))
        full = (1 << size) - 1
        if full not in fam:
            raise ValueError("a closure system must contain the full universe")
        s = set(fam)

        def cl(x):
            out = full
            for m in fam:
                if m & x == x:
                    out &= m
            return out

        return cls(size, cl, s.__contains__, len(fam))


@dataclass(frozen=True)
class BasisImplication:
    premise: int
    conclusion: int  # closure(premise) minus premise


def _imp_closure(x: int, basis: Sequence[BasisImplication], proper: bool) -> int:
    """Close x under the implications; with ``proper`` only premises strictly below x fire."""
    changed = True
    while changed:
        changed = False
        for imp in basis:
            p = imp.premise
            if p & x == p and imp.conclusion & ~x and (not proper or p != x):
                x |= imp.conclusion
                changed = True
    return x


def canonical_basis(oracle: MooreOracle) -> list[BasisImplication]:
    """Canonical (stem) basis via lectic enumeration of closed and pseudo-closed sets.

    Sets are visited in lectic order, element 0 being least significant
    position-wise; each set closed under the partial basis is either closed
    or pseudo-closed, and pseudo-closed sets contribute ``P -> cl(P) minus P``.
    The result is sorted by premise size, then premise bitset.
    """
    size = oracle.size
    full = (1 << size) - 1
    basis: list[BasisImplication] = []
    A = 0
    while True:
        if not oracle.closed(A):
            c = oracle.closure(A)
            basis.append(BasisImplication(A, c & ~A))
        if A == full:
            return _sorted_basis(basis)
        A = _next_lectic(A, size, basis)


def _sorted_basis(basis: list[BasisImplication]) -> list[BasisImplication]:
    return sorted(basis, key=lambda b: (b.premise.bit_count(), b.premise))


def _next_lectic(A: int, size: int, basis) -> int:
    for i in range(size - 1, -1, -1):
        if A >> i & 1:
            continue
        low = (1 << i) - 1
        B = _imp_closure((A & low) | 1 << i, basis, proper=True)
        if B & low & ~A == 0:
            return B
    raise AssertionError("no lectic successor")


def canonical_basis_stepwise(oracle: MooreOracle, count_limit: int = 24) -> list[BasisImplication]:
    """Level-by-level construction by premise size, for small universes.

    Candidates of size m are tested against all pseudo-closed sets found so
    far; stops once the partial basis has exactly as many models as the family.
    """
    size = oracle.size
    if size > count_limit:
        raise ValueError("step-wise basis construction is only for tiny universes")
    family_size = oracle.family_size
    if family_size is None:
        family_size = sum(1 for x in range(1 << size) if oracle.closed(x))
    m = 0
    while m <= size and all(oracle.closed(sum(1 << v for v in c)) for c in combinations(range(size), m)):
        m += 1
    m -= 1
    basis: list[BasisImplication] = []
    while True:
        if m < size:
            m += 1
        if m == size:
            return _sorted_basis(basis)
        for c in combinations(range(size), m):
            Y = sum(1 << v for v in c)
            if oracle.closed(Y):
                continue
            if all(not (b.premise & Y == b.premise and b.premise != Y) or b.conclusion & ~Y == 0
                   for b in basis):
                basis.append(BasisImplication(Y, oracle.closure(Y) & ~Y))
        models = sum(1 for x in range(1 << size)
                     if all(b.premise & x != b.premise or b.conclusion & ~x == 0 for b in basis))
        if models == family_size:
            return _sorted_basis(basis)


def basis_types(basis: Sequence[BasisImplication], n: int) -> int:
    """Number of symmetry types among implications over statements of n variables."""
    seen = set()
    for imp in basis:
        seen.add(_canonical_pair(imp.premise, imp.conclusion, n))
    return len(seen)


def _canonical_pair(premise: int, conclusion: int, n: int):
    best = None
    for row in permutation_tables(n):
        p = sum(1 << row[b] for b in iter_bits(premise))
        c = sum(1 << row[b] for b in iter_bits(conclusion))
        if best is None or (p, c) < best:
            best = (p, c)
    return best


def to_implications(basis: Sequence[BasisImplication], ground: GroundSet) -> list[Implication]:
    return [Implication(ground, b.premise, b.conclusion) for b in basis]


def is_implicatively_perfect(oracle: MooreOracle, basis: Sequence[BasisImplication] | None = None) -> bool:
    """Every pseudo-closed set loses closedness only at the top: all its
    one-element deletions are closed."""
    if basis is None:
        basis = canonical_basis(oracle)
    for imp in basis:
        for v in iter_bits(imp.premise):
            if not oracle.closed(imp.premise & ~(1 << v)):
                return False
    return True


def meet_irreducibles(oracle: MooreOracle, family: Iterable[int]) -> list[int]:
    """Generic version for explicit families (small universes)."""
    fam = sorted(set(family))
    full = (1 << oracle.size) - 1
    out = []
    for x in fam:
        if x == full:
            continue
        meet = full
        for y in fam:
            if y & x == x and y != x:
                meet &= y
        if meet != x:
            out.append(x)
    return out


def coatoms_of(oracle: MooreOracle, family: Iterable[int]) -> list[int]:
    fam = sorted(set(family))
    full = (1 << oracle.size) - 1
    return [x for x in fam if x != full and all(y == full for y in fam if y & x == x and y != x)]
