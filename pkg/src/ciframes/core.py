"""CI statements, models as bitsets, and the elementary model operations.

A CI statement ``ij|K`` over a ground set of size ``n`` is stored as an
integer index::

    pair_rank(i, j) * 2**(n-2) + cond_rank(K)

Pairs are ranked lexicographically, (0,1), (0,2), ... and ``cond_rank``
reads K as a little-endian bitmask over the ascending list of variables
other than i and j.  A model is a Python int whose bit ``b`` is set iff the
statement with index ``b`` belongs to it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Iterator, NamedTuple, Sequence

MAX_GROUND = 12


class ParseError(ValueError):
    """Malformed input text (statement, model or basis file)."""


class GroundMismatch(ValueError):
    """Two objects live on incompatible ground sets."""


# --------------------------------------------------------------------------
# ground sets


@dataclass(frozen=True)
class GroundSet:
    """An ordered set of variable labels.  Order fixes the encoding."""

    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels in ground set {labels}")
        if len(labels) > MAX_GROUND:
            raise ValueError(f"ground sets are capped at {MAX_GROUND} variables")
        for lab in labels:
            if not lab or any(c.isspace() for c in lab) or lab in ("|", "-", "=>", ";"):
                raise ValueError(f"bad variable label {lab!r}")

    @classmethod
    def of(cls, spec: "GroundSet | str | Iterable[str] | int") -> "GroundSet":
        """Build from a GroundSet, ``"abcd"``, ``"a b c"``, a label list or a size."""
        if isinstance(spec, GroundSet):
            return spec
        if isinstance(spec, int):
            return cls(tuple("abcdefghijkl"[:spec]))
        if isinstance(spec, str):
            parts = spec.replace(",", " ").split()
            if len(parts) == 1:
                parts = list(parts[0])
            return cls(tuple(parts))
        return cls(tuple(spec))

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    @cached_property
    def position(self) -> dict[str, int]:
        return {lab: k for k, lab in enumerate(self.labels)}

    def index_of(self, label: str) -> int:
        try:
            return self.position[label]
        except KeyError:
            raise KeyError(f"unknown variable {label!r}") from None

    def mask(self, labels: Iterable[str]) -> int:
        m = 0
        for lab in labels:
            m |= 1 << self.index_of(lab)
        return m

    def names(self, mask: int) -> list[str]:
        return [lab for k, lab in enumerate(self.labels) if mask >> k & 1]

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @property
    def n_statements(self) -> int:
        return table(self.n).size

    def __str__(self):
        return " ".join(self.labels)


class Statement(NamedTuple):
    """``i j | K`` with ``i < j`` variable positions and K a bitmask."""

    i: int
    j: int
    K: int


# --------------------------------------------------------------------------
# index tables


def pair_rank(i: int, j: int, n: int) -> int:
    return i * (2 * n - i - 1) // 2 + (j - i - 1)


def cond_rank(i: int, j: int, K: int) -> int:
    low = K & ((1 << i) - 1)
    mid = (K >> (i + 1)) & ((1 << (j - i - 1)) - 1)
    high = K >> (j + 1)
    return low | (mid << i) | (high << (j - 1))


def statement_index(i: int, j: int, K: int, n: int) -> int:
    if i > j:
        i, j = j, i
    if i == j or K >> i & 1 or K >> j & 1 or K >> n:
        raise ValueError(f"not a CI statement: ({i},{j}|{K:b})")
    return pair_rank(i, j, n) << (n - 2) | cond_rank(i, j, K)


class StatementTable:
    """Decoding arrays for all statements over ``n`` variables."""

    def __init__(self, n: int):
        if not 0 <= n <= MAX_GROUND:
            raise ValueError(f"ground size {n} outside 0..{MAX_GROUND}")
        self.n = n
        # no statements live on fewer than two variables
        self.size = n * (n - 1) // 2 << (n - 2) if n >= 2 else 0
        stmts: list[Statement] = []
        for i, j in combinations(range(n), 2):
            others = [v for v in range(n) if v != i and v != j]
            for r in range(1 << (n - 2)):
                K = 0
                for b, v in enumerate(others):
                    if r >> b & 1:
                        K |= 1 << v
                stmts.append(Statement(i, j, K))
        self.stmts = stmts
        # support mask (ijK) per statement
        self.support = [1 << s.i | 1 << s.j | s.K for s in stmts]

    def __getitem__(self, b: int) -> Statement:
        return self.stmts[b]

    def index(self, i: int, j: int, K: int) -> int:
        return statement_index(i, j, K, self.n)

    def within(self, mask: int) -> int:
        """Bitset of all statements whose variables lie inside ``mask``."""
        out = 0
        for b, sup in enumerate(self.support):
            if sup & ~mask == 0:
                out |= 1 << b
        return out


@lru_cache(maxsize=None)
def table(n: int) -> StatementTable:
    return StatementTable(n)


def index_statement(ground: "GroundSet", i: str, j: str, K: Iterable[str] = ()) -> int:
    """Canonical index of ``i j | K`` given by labels."""
    ground = GroundSet.of(ground)
    return statement_index(ground.index_of(i), ground.index_of(j), ground.mask(K), ground.n)


def statement_at(index: int, ground: "GroundSet") -> tuple[str, str, frozenset[str]]:
    """Inverse of :func:`index_statement`."""
    ground = GroundSet.of(ground)
    s = table(ground.n)[index]
    return ground.labels[s.i], ground.labels[s.j], frozenset(ground.names(s.K))


def iter_bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def subsets(mask: int) -> Iterator[int]:
    """All submasks of ``mask``, starting from 0."""
    sub = 0
    while True:
        yield sub
        if sub == mask:
            return
        sub = (sub - mask) & mask


# --------------------------------------------------------------------------
# statement text


_STMT_RE = re.compile(r"^\s*(\S+)\s+(\S+)\s*\|\s*(.*?)\s*$")


def parse_statement(text: str, ground: GroundSet) -> int:
    """Parse ``"a b | c d"`` (or ``"a b |"``) to an index over ``ground``."""
    m = _STMT_RE.match(text)
    if not m:
        raise ParseError(f"cannot parse statement {text!r}")
    a, b, rest = m.groups()
    cond = rest.split() if rest else []
    try:
        i, j = ground.index_of(a), ground.index_of(b)
        K = ground.mask(cond)
    except KeyError as exc:
        raise ParseError(str(exc)) from None
    if len(set(cond)) != len(cond) or i == j or K >> i & 1 or K >> j & 1:
        raise ParseError(f"not a CI statement: {text!r}")
    return statement_index(i, j, K, ground.n)


def format_statement(b: int, ground: GroundSet) -> str:
    s = table(ground.n)[b]
    lab = ground.labels
    head = f"{lab[s.i]} {lab[s.j]} |"
    cond = ground.names(s.K)
    return head + (" " + " ".join(cond) if cond else "")


def short_statement(b: int, ground: GroundSet) -> str:
    """Compact form ``ab|cd``, ``ab|`` (only unambiguous with 1-char labels)."""
    s = table(ground.n)[b]
    lab = ground.labels
    return lab[s.i] + lab[s.j] + "|" + "".join(ground.names(s.K))


# --------------------------------------------------------------------------
# models


@dataclass(frozen=True)
class CIModel:
    """A set of CI statements over a ground set, stored as a bitset."""

    ground: GroundSet
    bits: int = 0

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.ground.n_statements:
            raise ValueError("bitset has statements outside sta(N)")

    # construction ---------------------------------------------------------
    @classmethod
    def from_statements(cls, ground, statements: Iterable[str | int]) -> "CIModel":
        ground = GroundSet.of(ground)
        bits = 0
        for st in statements:
            b = st if isinstance(st, int) else parse_statement(st, ground)
            bits |= 1 << b
        return cls(ground, bits)

    @classmethod
    def parse(cls, ground, text: str) -> "CIModel":
        """Statements separated by ``;`` or commas, each like ``ab|c`` or ``a b | c``."""
        ground = GroundSet.of(ground)
        items = [t for t in re.split(r"[;,\n]", text) if t.strip()]
        return cls.from_statements(ground, [_loose_statement(t, ground) for t in items])

    @classmethod
    def full(cls, ground) -> "CIModel":
        ground = GroundSet.of(ground)
        return cls(ground, (1 << ground.n_statements) - 1)

    # set protocol ---------------------------------------------------------
    def __len__(self):
        return self.bits.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.bits)

    def __contains__(self, st) -> bool:
        b = st if isinstance(st, int) else _loose_statement_index(st, self.ground)
        return bool(self.bits >> b & 1)

    def _check(self, other: "CIModel"):
        if other.ground != self.ground:
            raise GroundMismatch(f"{self.ground} vs {other.ground}")

    def __or__(self, other):
        self._check(other)
        return CIModel(self.ground, self.bits | other.bits)

    def __and__(self, other):
        self._check(other)
        return CIModel(self.ground, self.bits & other.bits)

    def __sub__(self, other):
        self._check(other)
        return CIModel(self.ground, self.bits & ~other.bits)

    def __le__(self, other):
        self._check(other)
        return self.bits & ~other.bits == 0

    def __lt__(self, other):
        return self <= other and self.bits != other.bits

    def complement(self) -> "CIModel":
        return CIModel(self.ground, ((1 << self.ground.n_statements) - 1) & ~self.bits)

    def statements(self) -> list[str]:
        return [format_statement(b, self.ground) for b in self]

    def short(self) -> str:
        return "{" + ", ".join(short_statement(b, self.ground) for b in self) + "}"

    def __repr__(self):
        return f"CIModel({self.ground}: {self.short()})"

    # text format ----------------------------------------------------------
    def to_text(self) -> str:
        lines = [f"ground: {self.ground}"]
        lines += self.statements()
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CIModel":
        models = read_models(text)
        if len(models) != 1:
            raise ParseError(f"expected one model, found {len(models)}")
        return models[0][1]


def _loose_statement(text: str, ground: GroundSet) -> str:
    """Accept ``ab|cd`` shorthand for single-character labels."""
    text = text.strip()
    if "|" not in text:
        raise ParseError(f"missing '|' in {text!r}")
    left, right = text.split("|", 1)
    lt = left.split()
    if len(lt) == 1 and len(lt[0]) == 2 and all(len(x) == 1 for x in ground.labels):
        lt = list(lt[0])
    rt = right.split()
    if len(rt) == 1 and rt[0] not in ground.position and all(len(x) == 1 for x in ground.labels):
        rt = list(rt[0])
    if rt == ["-"] or rt == ["∅"]:
        rt = []
    if len(lt) != 2:
        raise ParseError(f"cannot parse statement {text!r}")
    return f"{lt[0]} {lt[1]} | {' '.join(rt)}"


def _loose_statement_index(text: str, ground: GroundSet) -> int:
    return parse_statement(_loose_statement(text, ground), ground)


def read_models(text: str) -> list[tuple[str | None, CIModel]]:
    """Read one or more models in the text format.

    Each model starts with ``ground: a b c``; statement lines follow.  An
    optional ``id: <name>`` line directly before the header names the record.
    ``#`` starts a comment.  Duplicate statements are an error.
    """
    out: list[tuple[str | None, CIModel]] = []
    ground = None
    bits = 0
    pending_id = None
    cur_id = None
    seen: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("id:"):
            pending_id = line[3:].strip()
            continue
        if line.startswith("ground:"):
            if ground is not None:
                out.append((cur_id, CIModel(ground, bits)))
            try:
                ground = GroundSet.of(line[7:].split())
            except ValueError as exc:
                raise ParseError(f"line {lineno}: {exc}") from None
            bits, seen = 0, set()
            cur_id, pending_id = pending_id, None
            continue
        if ground is None:
            raise ParseError(f"line {lineno}: statement before 'ground:' header")
        try:
            b = parse_statement(line, ground)
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        if b in seen:
            raise ParseError(f"line {lineno}: duplicate statement {line!r}")
        seen.add(b)
        bits |= 1 << b
    if ground is None:
        raise ParseError("missing 'ground:' header")
    out.append((cur_id, CIModel(ground, bits)))
    return out


# --------------------------------------------------------------------------
# moving statements between ground sets


def transfer(bits: int, n_src: int, n_tgt: int, varmap: Sequence[int]) -> int:
    """Image of a statement bitset under an injective variable map."""
    src = table(n_src)
    out = 0
    for b in iter_bits(bits):
        s = src[b]
        K = 0
        for v in iter_bits(s.K):
            K |= 1 << varmap[v]
        out |= 1 << statement_index(varmap[s.i], varmap[s.j], K, n_tgt)
    return out


def _embedding(small: GroundSet, big: GroundSet) -> list[int]:
    try:
        return [big.index_of(x) for x in small.labels]
    except KeyError:
        raise GroundMismatch(f"{small} is not contained in {big}") from None


def embed(M: CIModel, big: GroundSet) -> CIModel:
    """Ascetic extension: the same statements, read over a larger ground set."""
    return CIModel(big, transfer(M.bits, M.ground.n, big.n, _embedding(M.ground, big)))


@dataclass(frozen=True)
class VariableMap:
    """Injective map from one ground set's labels into another's."""

    source: GroundSet
    target: GroundSet
    mapping: dict = field(hash=False)

    def __post_init__(self):
        vals = [self.mapping[x] for x in self.source.labels]
        if len(set(vals)) != len(vals):
            raise ValueError("variable map is not injective")
        for v in vals:
            self.target.index_of(v)

    def positions(self) -> list[int]:
        return [self.target.index_of(self.mapping[x]) for x in self.source.labels]


def copy_model(M: CIModel, phi: VariableMap) -> CIModel:
    if phi.source != M.ground:
        raise GroundMismatch("map source differs from model ground")
    return CIModel(phi.target, transfer(M.bits, M.ground.n, phi.target.n, phi.positions()))


def marginalize(M: CIModel, L: Iterable[str]) -> CIModel:
    """Restrict M to the statements over the sub-ground L (kept in M's order)."""
    Lset = set(L)
    sub = GroundSet(tuple(x for x in M.ground.labels if x in Lset))
    if len(sub) != len(Lset):
        raise GroundMismatch(f"{sorted(Lset)} not contained in {M.ground}")
    if sub.n < 2:
        return CIModel(sub, 0)
    keep = M.bits & table(M.ground.n).within(M.ground.mask(sub.labels))
    back = {v: k for k, v in enumerate(_embedding(sub, M.ground))}
    tab = table(M.ground.n)
    out = 0
    for b in iter_bits(keep):
        s = tab[b]
        K = 0
        for v in iter_bits(s.K):
            K |= 1 << back[v]
        out |= 1 << statement_index(back[s.i], back[s.j], K, sub.n)
    return CIModel(sub, out)


@lru_cache(maxsize=None)
def _dual_table(n: int) -> tuple[int, ...]:
    tab = table(n)
    full = (1 << n) - 1
    return tuple(tab.index(s.i, s.j, full & ~(s.K | 1 << s.i | 1 << s.j)) for s in tab.stmts)


def dualize(M: CIModel) -> CIModel:
    dt = _dual_table(M.ground.n)
    out = 0
    for b in M:
        out |= 1 << dt[b]
    return CIModel(M.ground, out)


def expand_global(ground, I: Iterable[str], J: Iterable[str], K: Iterable[str] = ()) -> CIModel:
    """The elementary statements implied by the global ``I ⊥ J | K``.

    ``{ ij|L : i in I, j in J, K ⊆ L ⊆ IJK minus ij }``.
    """
    ground = GroundSet.of(ground)
    Im, Jm, Km = ground.mask(I), ground.mask(J), ground.mask(K)
    if Im & Jm or Im & Km or Jm & Km:
        raise ValueError("I, J, K must be pairwise disjoint")
    return CIModel(ground, _expand_masks(ground.n, Im, Jm, Km))


def _expand_masks(n: int, Im: int, Jm: int, Km: int) -> int:
    out = 0
    for i in iter_bits(Im):
        for j in iter_bits(Jm):
            free = (Im | Jm) & ~(1 << i | 1 << j)
            for extra in subsets(free):
                out |= 1 << statement_index(i, j, Km | extra, n)
    return out


def lift(M: CIModel, big: GroundSet) -> CIModel:
    """Lifting to a superset O of N.

    ``ij|K`` is in the result iff ij meets O minus N, or ij|(K ∩ N) is in M.
    """
    emb = _embedding(M.ground, big)
    nmask = 0
    for v in emb:
        nmask |= 1 << v
    inverse = {v: k for k, v in enumerate(emb)}
    tab = table(big.n)
    out = 0
    for b, s in enumerate(tab.stmts):
        if not (nmask >> s.i & 1 and nmask >> s.j & 1):
            out |= 1 << b
            continue
        K = 0
        for v in iter_bits(s.K & nmask):
            K |= 1 << inverse[v]
        if M.bits >> statement_index(inverse[s.i], inverse[s.j], K, M.ground.n) & 1:
            out |= 1 << b
    return CIModel(big, out)


def fresh_label(base: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    lab = base + "'"
    while lab in taken:
        lab += "'"
    return lab


def tight_replicate(M: CIModel, u: str, v: str | None = None) -> CIModel:
    """Tight replication of variable u by a new variable v.

    Statements over N ∪ {v} are judged through the map sending v to u.
    An image whose dependence pair meets its conditioning set counts as
    valid; the image ``u u | C`` counts iff ``u ⊥ (N minus uC) | C`` is in M.
    """
    N = M.ground
    if v is None:
        v = fresh_label(u, N.labels)
    if v in N.position:
        raise ValueError(f"{v!r} already in ground set")
    big = GroundSet(N.labels + (v,))
    n = N.n
    ui, vi = N.index_of(u), n
    rest = N.full & ~(1 << ui)
    tab = table(big.n)
    out = 0
    for b, s in enumerate(tab.stmts):
        a = ui if s.i == vi else s.i
        c = ui if s.j == vi else s.j
        C = s.K & N.full
        if s.K >> vi & 1:
            C |= 1 << ui
        if a != c:
            if (1 << a | 1 << c) & C:
                out |= 1 << b
            elif M.bits >> statement_index(a, c, C, n) & 1:
                out |= 1 << b
        else:
            # {i, j} = {u, v}: need u ⊥ (L minus C) | C in M
            need = _expand_masks(n, 1 << ui, rest & ~C, C)
            if need & ~M.bits == 0:
                out |= 1 << b
    return CIModel(big, out)


def least_adhesion(M1: CIModel, M2: CIModel) -> CIModel:
    """``M1 ∪ M2 ∪ [N minus L, M minus L | L]`` over N ∪ M, L = N ∩ M.

    Raises if the two models disagree on their common marginal.
    """
    N, Mg = M1.ground, M2.ground
    common = [x for x in N.labels if x in Mg.position]
    if len(common) >= 2:
        a = marginalize(M1, common)
        b = marginalize(M2, common)
        b = CIModel(a.ground, embed(b, a.ground).bits) if b.ground != a.ground else b
        if a.bits != b.bits:
            raise GroundMismatch("models are not consonant on their intersection")
    big = GroundSet(N.labels + tuple(x for x in Mg.labels if x not in N.position))
    out = embed(M1, big).bits | embed(M2, big).bits
    left = [x for x in N.labels if x not in Mg.position]
    right = [x for x in Mg.labels if x not in N.position]
    out |= expand_global(big, left, right, common).bits
    return CIModel(big, out)


def support(M: CIModel) -> frozenset[str]:
    """Variables appearing in some statement of M (as dependence or condition)."""
    tab = table(M.ground.n)
    mask = 0
    for b in M:
        mask |= tab.support[b]
    return frozenset(M.ground.names(mask))


support_set = support


@dataclass(frozen=True)
class UndirectedGraph:
    ground: GroundSet
    edges: frozenset

    @classmethod
    def parse(cls, ground, text: str) -> "UndirectedGraph":
        """Edges like ``"a-b, a-c"``."""
        ground = GroundSet.of(ground)
        edges = set()
        for tok in re.split(r"[,;\s]+", text.strip()):
            if not tok:
                continue
            if "-" not in tok:
                raise ParseError(f"bad edge {tok!r}")
            x, y = tok.split("-", 1)
            ground.index_of(x), ground.index_of(y)
            if x == y:
                raise ParseError("self loops are not allowed")
            edges.add(frozenset((x, y)))
        return cls(ground, frozenset(edges))

    def adjacency(self) -> list[int]:
        adj = [0] * self.ground.n
        for e in self.edges:
            x, y = (self.ground.index_of(t) for t in e)
            adj[x] |= 1 << y
            adj[y] |= 1 << x
        return adj


def graph_separation_model(G: UndirectedGraph) -> CIModel:
    """All ``ij|K`` such that K separates i from j in G."""
    n = G.ground.n
    adj = G.adjacency()
    out = 0
    for b, s in enumerate(table(n).stmts):
        seen = 1 << s.i
        frontier = 1 << s.i
        while frontier:
            nxt = 0
            for v in iter_bits(frontier):
                nxt |= adj[v]
            nxt &= ~seen & ~s.K
            seen |= nxt
            frontier = nxt
        if not seen >> s.j & 1:
            out |= 1 << b
    return CIModel(G.ground, out)
