"""Worked examples over three and four variables."""

from itertools import combinations

import pytest

from ciframes.closure import frame_closure, is_member
from ciframes.core import (
    CIModel, GroundSet, UndirectedGraph, dualize, expand_global, graph_separation_model,
    least_adhesion, support,
)
from ciframes.lattice import enumerate_family
from ciframes.lp import induced_model, read_functions
from ciframes.selfadhesion import SAConfig, is_self_adhesive, sa_closure_at

from test_lp import INTEGER_FUNCTION

ABC = GroundSet.of("abc")
ABCD = GroundSet.of("abcd")
SEMGR = SAConfig("semigraphoid")
STRUM = SAConfig("structural")
COATOM = "ab|c, ab|d, ab|cd, ac|b, ad|b, bc|a, bd|a, cd|, cd|a, cd|b"


@pytest.fixture(scope="module")
def semgr4():
    return enumerate_family("semigraphoid", 4)


@pytest.fixture(scope="module")
def strum4():
    return enumerate_family("structural", 4)


def test_least_variable_set():
    M = CIModel.parse(ABCD, "ab|, bc|")
    assert support(M) == frozenset("abc")


def test_dual_of_four_point_model():
    # both the model and its dual are structural; the dual comes from an integer function
    M = CIModel.parse(ABCD, "ab|cd, ab|d, ab|c, cd|")
    D = dualize(M)
    assert D == CIModel.parse(ABCD, "ab|, ab|c, ab|d, cd|ab")
    assert is_member("structural", M) and is_member("structural", D)
    assert "ab|cd" not in D and "ab|cd" in M
    [(_, m)] = read_functions(INTEGER_FUNCTION)
    assert induced_model(m) == D


def test_semigraphoid_that_is_not_structural(semgr4, strum4):
    M = CIModel.parse(ABCD, "ab|c, ac|d, ad|b")
    assert M.bits in set(semgr4.models) and M.bits not in set(strum4.models)
    closed = frame_closure("structural", M)
    assert CIModel.parse(ABCD, "ab|d, ac|b, ad|c") <= closed


def test_least_adhesion_of_consonant_models():
    N, Mg = GroundSet.of("abcd"), GroundSet.of("cde")
    M = CIModel.parse(N, "ab|, cd|")
    K = CIModel.parse(Mg, "cd|, cd|e")
    out = least_adhesion(M, K)
    assert sorted(out) == sorted(CIModel.parse(out.ground, "ab|, cd|, cd|e, ae|cd, ae|bcd, be|cd, be|acd"))


def test_self_adhesivity_depends_on_frame():
    G = UndirectedGraph.parse(ABC, "a-b, a-c")
    M = graph_separation_model(G)
    assert M == CIModel.parse(ABC, "bc|a")
    assert is_self_adhesive(M, SEMGR)
    # no graph over abca' separates as required by an adhesion at bc
    big = GroundSet(("a", "b", "c", "a'"))
    need = CIModel.parse(big, "b c | a; b c | a'; a a' | b c")
    avoid = CIModel.parse(big, "a b | c; a c | b; a' b | c; a' c | b")
    pairs = list(combinations(big.labels, 2))
    found = False
    for mask in range(1 << len(pairs)):
        edges = ",".join(f"{x}-{y}" for k, (x, y) in enumerate(pairs) if mask >> k & 1)
        H = graph_separation_model(UndirectedGraph.parse(big, edges))
        if need <= H and not (H & avoid):
            found = True
    assert not found


def test_coatom_outside_self_adhesive_semigraphoids(semgr4, strum4):
    M = CIModel.parse(ABCD, COATOM)
    assert M.bits in semgr4.coatoms() and M.bits in strum4.coatoms()
    assert not is_self_adhesive(M, SEMGR)
    assert not is_self_adhesive(M, STRUM)
    sub = CIModel.parse(ABCD, "ab|d, ad|b, bc|a, bd|a, cd|")
    assert "bc|" in sa_closure_at("semigraphoid", sub, "bd")
    assert "bc|" in sa_closure_at("semigraphoid", M, "bd")


def test_derivation_in_glued_ground():
    # Y, its copy over a' b c' d, and [ac, a'c' | bd] give bc| semigraphoidally
    big = GroundSet(("a", "b", "c", "d", "a'", "c'"))
    Y = CIModel.parse(big, "a b | d; a d | b; b c | a; b d | a; c d |")
    Yc = CIModel.parse(big, "a' b | d; a' d | b; b c' | a'; b d | a'; c' d |")
    glue = expand_global(big, ["a", "c"], ["a'", "c'"], ["b", "d"])
    closed = frame_closure("semigraphoid", Y | Yc | glue)
    for s in ("a d | a'", "a b | a' c'", "b c | a a'", "a' c |", "b c |"):
        assert s in closed


def test_self_adhesive_semigraphoid_with_non_adhesive_dual(strum4):
    M = CIModel.parse(ABCD, "ab|c, ac|d, ad|b, bc|d")
    assert is_member("semigraphoid", M) and is_self_adhesive(M, SEMGR)
    assert M.bits not in set(strum4.models)
    D = dualize(M)
    assert D == CIModel.parse(ABCD, "ab|d, ac|b, ad|c, bc|a")
    assert not is_self_adhesive(D, SEMGR)


def test_self_adhesive_structural_with_non_adhesive_dual():
    M = CIModel.parse(ABCD, "ab|d, ac|d, ad|b, bc|, bc|d")
    assert is_member("structural", M) and is_self_adhesive(M, STRUM)
    D = dualize(M)
    assert D == CIModel.parse(ABCD, "ab|c, ac|b, ad|c, bc|a, bc|ad")
    assert not is_self_adhesive(D, STRUM)
