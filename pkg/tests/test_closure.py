import random

import pytest
from hypothesis import given, settings, strategies as st

from ciframes.closure import (
    ClosureOracle, check_implication, format_transcript, frame_closure, is_member,
)
from ciframes.core import CIModel, GroundSet, embed, marginalize, table
from ciframes.frames import FRAMES, clauses_for
from ciframes.lp import ResourceLimit
from ciframes.sat import brute_force_models

ABC = GroundSet.of("abc")


def smallest_containing(family, bits):
    out = None
    for m in family:
        if m & bits == bits:
            out = m if out is None else out & m
    return out


@pytest.fixture(scope="module")
def brute_families():
    return {n: brute_force_models(clauses_for("semigraphoid", n)) for n in (3, 4)}


def test_sat_closure_equals_brute_force_n3(brute_families):
    fam = brute_families[3]
    for bits in range(1 << 6):
        assert frame_closure("semigraphoid", CIModel(ABC, bits)).bits == smallest_containing(fam, bits)


def test_sat_closure_equals_brute_force_n4(brute_families):
    fam = brute_families[4]
    g = GroundSet.of(4)
    rng = random.Random(4)
    for _ in range(500):
        bits = rng.getrandbits(24) & rng.getrandbits(24)
        assert frame_closure("semigraphoid", CIModel(g, bits)).bits == smallest_containing(fam, bits)


@pytest.mark.parametrize("frame", sorted(FRAMES))
@pytest.mark.parametrize("n", [3, 4])
def test_closure_laws(frame, n):
    g = GroundSet.of(n)
    size = table(n).size
    rng = random.Random(f"{frame}-{n}")
    for _ in range(500 if n == 3 else 150):
        a = rng.getrandbits(size) & rng.getrandbits(size)
        b = a | (rng.getrandbits(size) & rng.getrandbits(size) & rng.getrandbits(size))
        A = frame_closure(frame, CIModel(g, a))
        B = frame_closure(frame, CIModel(g, b))
        assert CIModel(g, a) <= A
        assert A <= B
        assert frame_closure(frame, A) == A
        assert is_member(frame, A)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, (1 << 6) - 1))
def test_ground_extension_n3(bits):
    M = CIModel(ABC, bits)
    big = GroundSet.of("abcz")
    wide = frame_closure("semigraphoid", embed(M, big))
    assert marginalize(wide, "abc") == frame_closure("semigraphoid", M)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, (1 << 24) - 1))
def test_ground_extension_n4(bits):
    g = GroundSet.of(4)
    M = CIModel(g, bits)
    wide = frame_closure("semigraphoid", embed(M, GroundSet.of("abcdz")))
    assert marginalize(wide, "abcd") == frame_closure("semigraphoid", M)


def test_lp_backend_matches_axioms():
    g = GroundSet.of(4)
    rng = random.Random(200)
    for _ in range(200):
        bits = rng.getrandbits(24) & rng.getrandbits(24) & rng.getrandbits(24)
        M = CIModel(g, bits)
        assert frame_closure("structural", M, backend="lp") == frame_closure("structural", M, backend="sat")


def test_within_restricts_candidates():
    g = GroundSet.of(4)
    M = CIModel.parse(g, "ab|, ac|b")
    full = frame_closure("semigraphoid", M)
    part = frame_closure("semigraphoid", M, within=CIModel.parse(g, "ac|").bits)
    assert part == M | CIModel.parse(g, "ac|")
    assert part <= full


def test_check_implication_examples():
    assert check_implication("semigraphoid", CIModel.parse(ABC, "ab|, ac|b"), CIModel.parse(ABC, "ac|, ab|c"))
    assert not check_implication("semigraphoid", CIModel.parse(ABC, "ab|"), CIModel.parse(ABC, "ab|c"))
    M = CIModel.parse(ABC, "ab|, bc|a")
    assert check_implication("semigraphoid", M, CIModel.parse(ABC, "ab|"))


def test_transcript():
    M = CIModel.parse(ABC, "ab|, ac|b")
    tr = []
    out = frame_closure("semigraphoid", M, transcript=tr)
    decided = {b for b, _ in tr}
    assert decided == set(range(6)) - set(M)
    assert {b for b, v in tr if v} == set(out) - set(M)
    text = format_transcript(tr, ABC)
    assert "a c | : IN" in text and "b c | : OUT" in text


def test_backend_guards():
    with pytest.raises(ValueError):
        ClosureOracle(FRAMES["semigraphoid"], 4, backend="lp")
    with pytest.raises(ResourceLimit):
        ClosureOracle(FRAMES["structural"], 9, backend="lp")
    assert ClosureOracle(FRAMES["structural"], 5).backend == "lp"
    assert ClosureOracle(FRAMES["structural"], 4).backend == "sat"
