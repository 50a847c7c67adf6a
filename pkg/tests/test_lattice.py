from itertools import permutations

import pytest

from ciframes.core import CIModel, GroundSet, ParseError, table
from ciframes.frames import clauses_from_implications, semigraphoid_clauses
from ciframes.lattice import (
    BasisImplication, FamilyCatalogue, MooreOracle, apply_permutation, basis_types,
    canonical_basis, canonical_basis_stepwise, canonical_form, coatoms_of, enumerate_family,
    is_implicatively_perfect, meet_irreducibles, orbit, read_catalogue, summary_csv,
    to_implications, write_catalogue,
)
from ciframes.sat import enumerate_models

# toy universe x, y, z, w as bits 0..3
X, Y, Z, W = 1, 2, 4, 8
TOY = [X | Y | Z | W, X | Y | Z, X | Y | W, X | Y, X]


def generated(size, basis):
    return sorted(S for S in range(1 << size)
                  if all(b.premise & S != b.premise or b.conclusion & ~S == 0 for b in basis))


@pytest.fixture(scope="module")
def toy():
    return MooreOracle.from_sets(4, TOY)


@pytest.fixture(scope="module")
def semgr3():
    return enumerate_family("semigraphoid", 3)


@pytest.fixture(scope="module")
def semgr4():
    return enumerate_family("semigraphoid", 4)


@pytest.fixture(scope="module")
def strum4():
    return enumerate_family("structural", 4)


def test_toy_closures(toy):
    assert toy.closure(0) == X == toy.closure(X)
    assert toy.closure(Y) == X | Y
    assert toy.closure(X | Z) == X | Y | Z


def test_toy_irreducibles_and_coatoms(toy):
    assert sorted(meet_irreducibles(toy, TOY)) == sorted([X | Y | Z, X | Y | W, X])
    assert sorted(coatoms_of(toy, TOY)) == sorted([X | Y | Z, X | Y | W])


def test_toy_canonical_basis(toy):
    basis = canonical_basis(toy)
    assert basis == [BasisImplication(0, X), BasisImplication(X | Z, Y), BasisImplication(X | W, Y)]
    assert canonical_basis_stepwise(toy) == basis
    assert not is_implicatively_perfect(toy, basis)


def test_toy_minimal_generator():
    # {∅ -> x, z -> y, x w -> x y w} also generates the toy family
    gen = [BasisImplication(0, X), BasisImplication(Z, Y), BasisImplication(X | W, Y)]
    assert generated(4, gen) == sorted(TOY)


def test_moore_family_needs_top():
    with pytest.raises(ValueError):
        MooreOracle.from_sets(2, [0, 1])


def test_non_redundancy(toy, semgr3):
    for oracle, fam in ((toy, TOY), (MooreOracle.from_catalogue(semgr3), semgr3.models)):
        basis = canonical_basis(oracle)
        assert generated(oracle.size, basis) == sorted(fam)
        for k in range(len(basis)):
            smaller = basis[:k] + basis[k + 1:]
            assert len(generated(oracle.size, smaller)) > len(fam)


def test_semgr3_ground_truth(semgr3):
    s = semgr3.summary()
    assert (s["models"], s["types"], s["irreducibles"], s["irreducible_types"]) == (22, 10, 5, 3)
    assert s["coatoms"] == 5  # coatomistic
    oracle = MooreOracle.from_catalogue(semgr3)
    basis = canonical_basis(oracle)
    assert len(basis) == 6 and basis_types(basis, 3) == 1
    assert canonical_basis_stepwise(oracle) == basis
    assert is_implicatively_perfect(oracle, basis)
    g = semgr3.ground
    premise = CIModel.parse(g, "ab|, ac|b").bits
    conclusion = CIModel.parse(g, "ac|, ab|c").bits
    assert BasisImplication(premise, conclusion) in basis


@pytest.mark.parametrize("name", ["semgr4", "strum4"])
def test_basis_regenerates_family(name, request):
    cat = request.getfixturevalue(name)
    basis = canonical_basis(MooreOracle.from_catalogue(cat))
    cs = clauses_from_implications(4, to_implications(basis, cat.ground), with_symmetry=False)
    assert sorted(enumerate_models(cs)) == cat.models


def test_basis_falls_into_orbits(strum4):
    basis = canonical_basis(MooreOracle.from_catalogue(strum4))
    keys = {(b.premise, b.conclusion) for b in basis}
    for p in list(permutations(range(4)))[:6]:
        for b in basis:
            img = (apply_permutation(b.premise, p, 4), apply_permutation(b.conclusion, p, 4))
            assert img in keys


def test_coatoms_are_irreducible(semgr4, strum4):
    for cat in (semgr4, strum4):
        assert set(cat.coatoms()) <= set(cat.irreducibles())
    assert set(strum4.coatoms()) == set(strum4.irreducibles())
    assert set(semgr4.coatoms()) != set(semgr4.irreducibles())


def test_generic_and_catalogue_structure_agree(semgr3):
    oracle = MooreOracle.from_catalogue(semgr3)
    assert sorted(meet_irreducibles(oracle, semgr3.models)) == sorted(semgr3.irreducibles())
    assert sorted(coatoms_of(oracle, semgr3.models)) == sorted(semgr3.coatoms())


def test_orbits():
    g = GroundSet.of(4)
    M = CIModel.parse(g, "ab|c")
    assert len(orbit(M.bits, 4)) == 12
    assert canonical_form(M.bits, 4) == min(orbit(M.bits, 4))
    for p in permutations(range(4)):
        assert canonical_form(apply_permutation(M.bits, p, 4), 4) == canonical_form(M.bits, 4)
    assert orbit(0, 4) == {0}


def test_catalogue_round_trip(semgr3):
    text = write_catalogue(semgr3)
    back = read_catalogue(text)
    assert back.name == semgr3.name and back.models == semgr3.models
    assert back.summary() == semgr3.summary()


def test_catalogue_errors():
    with pytest.raises(ParseError):
        read_catalogue("0 1\n")
    with pytest.raises(ParseError):
        read_catalogue("ground: a b c\nzz\n")


def test_summary_csv_and_n2():
    cat = enumerate_family("semigraphoid", 2)
    assert summary_csv([cat.summary()]).splitlines() == [
        "family,models,types,irreducibles,irreducible_types,coatoms,coatom_types",
        "semigraphoid,2,2,1,1,1,1",
    ]


def test_restrict_keeps_whole_types(semgr3):
    keep = semgr3.restrict("small", lambda r: bin(r).count("1") <= 2)
    assert all(bin(keep.rep_of[m]).count("1") <= 2 for m in keep.models)
    assert isinstance(keep, FamilyCatalogue) and len(keep) < len(semgr3)
