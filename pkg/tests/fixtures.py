"""Reference data: rule types and the irreducible types of
the self-adhesive structural family on four variables.

Rules are written over variables i, j, k, l; ``[ij,k|l]`` denotes the
global statement expanded into its elementary statements.
"""

import re

from ciframes.core import CIModel, GroundSet, expand_global

IJKL = GroundSet(("i", "j", "k", "l"))

SEMIGRAPHOID_RULES = [
    "ij| ; il|j => il| ; ij|l",
    "ij|k ; il|jk => il|k ; ij|kl",
]

E_RULES = [
    "ij|k ; ik|l ; il|j => ij|l ; ik|j ; il|k",
    "ij|k ; il|j ; jk|l ; kl|i => ij|l ; il|k ; jk|i ; kl|j",
    "ij|kl ; ik| ; jl| ; kl|ij => ij| ; ik|jl ; jl|ik ; kl|",
    "ij| ; ij|kl ; kl|i ; kl|j => ij|k ; ij|l ; kl| ; kl|ij",
    "ij|k ; jk|il ; il|j ; kl| => ij|kl ; jk|i ; il| ; kl|j",
]

SE_SI_RULES = [
    "ij|k ; ik|l ; jk|i ; il|j => ij|l ; ik|j ; il|k",
    "ij|k ; ij|kl ; ik|j ; jk|i ; jk|il ; il| ; il|j ; kl| => kl|j",
    "ij|k ; ik|j ; jk|i ; jk|l ; il|j => ij|l",
    "ij|k ; ik|j ; jk|i ; jk|il ; il|j => ij|kl",
    "ij|k ; ik|j ; jk|i ; il|j ; kl| => il|",
    "ij|k ; ik|j ; jk|i ; il|j ; kl|i => il|k",
    "ij|k ; ij|l ; ik|j ; jk|i ; kl| => ij| ; ik| ; jk|",
]

# irreducible types I..XIII with their sizes
STRUM_SA_IRREDUCIBLES = [
    ("I", 20, "[ijk,l|] ; [ij,k|] ; [ij,k|l]"),
    ("II", 18, "[ijk,l|] ; ij|k ; ij|kl ; ik|j ; ik|jl ; jk|i ; jk|il"),
    ("III", 18, "[ij,k|l] ; [ij,l|k] ; ij|k ; ij|l ; ij|kl ; ik|j ; il|j ; jk|i ; jl|i ; kl|i ; kl|j ; kl|ij"),
    ("IV", 18, "[ijk,l|] ; ij| ; ij|l ; ik| ; ik|l ; jk| ; jk|l"),
    ("V", 18, "[ij,k|] ; [ij,l|] ; ij| ; ij|k ; ij|l ; ik|l ; il|k ; jk|l ; jl|k ; kl| ; kl|i ; kl|j"),
    ("VI", 14, "[ij,k|l] ; [ij,l|k] ; ij| ; ik| ; il| ; jk| ; jl| ; kl|ij"),
    ("VII", 12, "ij| ; ij|kl ; ik| ; ik|jl ; il| ; il|jk ; jk| ; jk|il ; jl| ; jl|ik ; kl| ; kl|ij"),
    ("VIII", 12, "[ij,k|l] ; ij| ; ij|l ; ij|kl ; ik| ; il|jk ; jk| ; jl|ik ; kl|ij"),
    ("IX", 12, "[ij,k|] ; ij| ; ij|k ; ij|kl ; ik|jl ; il| ; jk|il ; jl| ; kl|"),
    ("X", 8, "ij| ; ij|k ; ij|l ; ik|l ; jk|l ; kl|i ; kl|j ; kl|ij"),
    ("XI", 8, "ij| ; ij|k ; ij|l ; ik|l ; jl|k ; kl|i ; kl|j ; kl|ij"),
    ("XII", 8, "ij| ; ij|k ; ij|l ; ik|l ; il|k ; jk|l ; kl|j ; kl|ij"),
    ("XIII", 8, "ij| ; ij|k ; ij|l ; ik|l ; il|k ; jk|l ; jl|k ; kl|ij"),
]

# variant of type IV with jk|il in place of jk|l; it is not a semigraphoid
IV_VARIANT = "[ijk,l|] ; ij| ; ij|l ; ik| ; ik|l ; jk| ; jk|il"

_GLOBAL = re.compile(r"^\[(\w+),(\w+)\|(\w*)\]$")


def model_from_mixed(text: str, ground: GroundSet = IJKL) -> CIModel:
    """Parse a ';'-separated list of elementary and bracketed global statements."""
    bits = 0
    for tok in (t.strip() for t in text.split(";")):
        m = _GLOBAL.match(tok)
        if m:
            bits |= expand_global(ground, m.group(1), m.group(2), m.group(3)).bits
        else:
            bits |= CIModel.parse(ground, tok).bits
    return CIModel(ground, bits)
