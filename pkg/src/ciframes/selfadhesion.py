"""Self-adhesion closures built from the least adhesion of a model with a copy."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .closure import frame_closure, oracle_for
from .core import (
    CIModel,
    GroundSet,
    _expand_masks,
    iter_bits,
    marginalize,
    table,
    transfer,
)
from .frames import FrameSpec, get_frame

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SAConfig:
    """How self-adhesion is computed.

    ``policy``: ``"reduced"`` checks only |L| = 2..n-2 (sound when the frame is
    closed under lifting and tight replication), ``"full"`` checks |L| = 0..n-1,
    ``"auto"`` picks reduced when the frame allows it.
    ``iteration``: ``"restart"`` restarts the sweep after every change,
    ``"sweep"`` unions one whole sweep before repeating.
    """

    frame: FrameSpec
    policy: str = "auto"
    iteration: str = "restart"
    backend: str = "auto"

    def __post_init__(self):
        object.__setattr__(self, "frame", get_frame(self.frame))
        if self.policy not in ("auto", "reduced", "full"):
            raise ValueError(f"unknown policy {self.policy!r}")
        if self.iteration not in ("restart", "sweep"):
            raise ValueError(f"unknown iteration mode {self.iteration!r}")
        if self.policy == "reduced" and not self.frame.reduced_policy_ok:
            raise ValueError(f"reduced policy is not valid for the {self.frame.name} frame")

    def effective_policy(self) -> str:
        if self.policy == "auto":
            return "reduced" if self.frame.reduced_policy_ok else "full"
        return self.policy


def policy_sets(n: int, policy: str) -> list[int]:
    """Gluing sets L as bitmasks over positions, by size and then lexicographically."""
    sizes = range(2, n - 1) if policy == "reduced" else range(0, n)
    return [sum(1 << v for v in c) for k in sizes for c in combinations(range(n), k)]


@dataclass(frozen=True)
class AdhesionVerdict:
    ok: bool
    witness: tuple[str, ...] | None = None  # a gluing set L where M fails

    def __bool__(self):
        return self.ok


def _copy_labels(base: Sequence[str], taken: Iterable[str], suffix: str = "'") -> list[str]:
    taken = set(taken)
    out = []
    for x in base:
        lab = x + suffix
        while lab in taken:
            lab += "'"
        taken.add(lab)
        out.append(lab)
    return out


def glued_ground(ground: GroundSet, Lmask: int) -> tuple[GroundSet, list[int]]:
    """N followed by fresh copies of N minus L; returns the copy map on positions."""
    rest = [v for v in range(ground.n) if not Lmask >> v & 1]
    labels = _copy_labels([ground.labels[v] for v in rest], ground.labels)
    big = GroundSet(ground.labels + tuple(labels))
    varmap = list(range(ground.n))
    for k, v in enumerate(rest):
        varmap[v] = ground.n + k
    return big, varmap


def adhesion_input(M: CIModel, Lmask: int) -> tuple[GroundSet, int]:
    """M ∪ copy(M) ∪ [N minus L, copy of N minus L | L] over the glued ground set."""
    N = M.ground
    big, varmap = glued_ground(N, Lmask)
    ident = list(range(N.n))
    xi = transfer(M.bits, N.n, big.n, ident) | transfer(M.bits, N.n, big.n, varmap)
    rest = N.full & ~Lmask
    copies = ((1 << big.n) - 1) & ~N.full
    xi |= _expand_masks(big.n, rest, copies, Lmask)
    return big, xi


def sa_closure_at(frame, M: CIModel, L: Iterable[str] | int, backend: str = "auto") -> CIModel:
    """F-closure of the least adhesion of M with its copy along L, marginal to N."""
    N = M.ground
    Lmask = L if isinstance(L, int) else N.mask(L)
    big, xi = adhesion_input(M, Lmask)
    within = table(big.n).within(N.full)
    cl = oracle_for(frame, big.n, backend).closure_bits(xi, within=within)
    return marginalize(CIModel(big, cl & within), N.labels)


def sa_closure(M: CIModel, config: SAConfig) -> CIModel:
    """Least self-adhesive F-model containing M."""
    cur = frame_closure(config.frame, M, backend=config.backend)
    Ls = policy_sets(M.ground.n, config.effective_policy())
    if config.iteration == "sweep":
        while True:
            nxt = cur.bits
            for L in Ls:
                nxt |= sa_closure_at(config.frame, cur, L, config.backend).bits
            if nxt == cur.bits:
                return cur
            cur = CIModel(M.ground, nxt)
    changed = True
    while changed:
        changed = False
        for L in Ls:
            r = sa_closure_at(config.frame, cur, L, config.backend)
            if r.bits != cur.bits:
                cur = r
                changed = True
                break
    return cur


def is_self_adhesive(M: CIModel, config: SAConfig) -> AdhesionVerdict:
    """Membership in F^sa, with a failing gluing set as witness."""
    o = oracle_for(config.frame, M.ground.n, config.backend)
    if not o.is_member_bits(M.bits):
        return AdhesionVerdict(False, None)
    for L in policy_sets(M.ground.n, config.effective_policy()):
        if sa_closure_at(config.frame, M, L, config.backend).bits != M.bits:
            return AdhesionVerdict(False, tuple(M.ground.names(L)))
    return AdhesionVerdict(True)


def sa2_closure(M: CIModel, config: SAConfig) -> CIModel:
    """Second-order closure: self-adhesion glued over F^sa instead of F.

    For each E with 2 <= |E| <= n-1 the least adhesion of M with a copy
    along E is closed in F^sa over the glued ground set and marginalised.
    Iterated (restart on change) until stable; starts from the F^sa closure.
    """
    N = M.ground
    cur = sa_closure(M, config)
    Es = [sum(1 << v for v in c) for k in range(2, N.n) for c in combinations(range(N.n), k)]
    inner = SAConfig(config.frame, config.policy, config.iteration, config.backend)
    changed = True
    while changed:
        changed = False
        for E in Es:
            big, xi = adhesion_input(cur, E)
            cl = sa_closure(CIModel(big, xi), inner)
            r = marginalize(cl, N.labels)
            if r.bits != cur.bits:
                log.info("sa2 step at %s grew %d -> %d", N.names(E), len(cur), len(r))
                cur = CIModel(N, r.bits | cur.bits)
                changed = True
                break
    return cur


def kfold_sa_closure_at(frame, M: CIModel, L: Iterable[str] | int, k: int,
                        backend: str = "auto") -> CIModel:
    """Glue M with k copies along L, all copies pairwise conditionally independent.

    Copies of a variable x are labelled x'1, x'2, ...  The result is one
    closure step, the marginal to N of the closed glued model.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    N = M.ground
    Lmask = L if isinstance(L, int) else N.mask(L)
    rest = [v for v in range(N.n) if not Lmask >> v & 1]
    labels = list(N.labels)
    blocks = [sum(1 << v for v in rest)]
    maps = []
    for r in range(1, k + 1):
        start = len(labels)
        new = _copy_labels([N.labels[v] for v in rest], labels, suffix=f"'{r}")
        labels += new
        vm = list(range(N.n))
        for t, v in enumerate(rest):
            vm[v] = start + t
        maps.append(vm)
        blocks.append(sum(1 << (start + t) for t in range(len(rest))))
    big = GroundSet(tuple(labels))
    xi = transfer(M.bits, N.n, big.n, list(range(N.n)))
    for vm in maps:
        xi |= transfer(M.bits, N.n, big.n, vm)
    idx = range(k + 1)
    for a in range(1, 1 << (k + 1)):
        for b in range(1, 1 << (k + 1)):
            if a & b:
                continue
            I = sum(blocks[t] for t in idx if a >> t & 1)
            J = sum(blocks[t] for t in idx if b >> t & 1)
            xi |= _expand_masks(big.n, I, J, Lmask)
    within = table(big.n).within(N.full)
    cl = oracle_for(frame, big.n, backend).closure_bits(xi, within=within)
    return marginalize(CIModel(big, cl & within), N.labels)
