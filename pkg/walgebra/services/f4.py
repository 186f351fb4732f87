"""The 27-dimensional representation of F4 and the F4(a2) data.

Root vectors are labelled by the coefficients ``c1c2c3c4`` of the root in the
simple roots; ``F_c`` is the transpose of ``E_c``. The simple root vectors
are given by their matrix units ``eps_{i,j}`` (1-based), the remaining
positive root vectors by a fixed table of commutators.
"""
import logging
from typing import Dict, List, Tuple

from walgebra.config import settings
from walgebra.exceptions import ClosureError, ConfigError
from walgebra.services.liealg import MatrixLieAlgebra, SparseMatrix, commutator, transpose, vcomb
from walgebra.services.symcore import rat

logger = logging.getLogger(__name__)

SIZE = 27

# (sign, row, col), 1-based matrix units
SIMPLE_ROOT_UNITS: Dict[str, List[Tuple[int, int, int]]] = {
    "0001": [(-1, 4, 5), (1, 7, 8), (1, 9, 11), (1, 20, 22), (1, 21, 6), (1, 23, 24)],
    "0010": [(-1, 3, 4), (1, 8, 10), (1, 11, 13), (1, 18, 20), (1, 19, 21), (1, 24, 25)],
    "0100": [
        (-1, 2, 3), (-1, 4, 7), (1, 5, 8), (1, 6, 24), (1, 10, 12), (1, 13, 15),
        (1, 13, 16), (1, 15, 18), (1, 16, 18), (1, 17, 19), (1, 21, 23), (1, 25, 26),
    ],
    "1000": [
        (-1, 1, 2), (-1, 7, 9), (-1, 8, 11), (-1, 10, 13), (1, 12, 14), (-1, 12, 15),
        (-1, 14, 17), (1, 15, 17), (1, 18, 19), (1, 20, 21), (1, 22, 6), (1, 26, 27),
    ],
}

SIMPLE_ROOTS = ("1000", "0100", "0010", "0001")

# new root: (left, right) with E_new = [E_left, E_right]
COMMUTATOR_TABLE: List[Tuple[str, str, str]] = [
    ("0011", "0001", "0010"), ("0110", "0010", "0100"), ("1100", "0100", "1000"),
    ("0111", "0011", "0100"), ("0210", "0100", "0110"), ("1110", "1000", "0110"),
    ("0211", "0111", "0100"), ("1111", "1110", "0001"), ("1210", "1110", "0100"),
    ("0221", "0211", "0010"), ("1211", "1111", "0100"), ("2210", "1210", "1000"),
    ("1221", "0221", "1000"), ("2211", "1211", "1000"), ("1321", "1221", "0100"),
    ("2221", "2211", "0010"), ("2321", "2221", "0100"), ("2421", "2321", "0100"),
    ("2431", "2421", "0010"), ("2432", "2431", "0001"),
]

# Two labels in the printed bases are three digits long. The corrected
# reading pads on the left (the only grading-consistent choice); the raw
# reading pads on the right.
LABEL_TABLES = {
    "corrected": {"221": "0221", "111": "0111"},
    "raw": {"221": "2210", "111": "1110"},
}

Combination = List[Tuple[str, str]]

# F4(a2) triple and bases, as printed (root labels, coefficient strings).
TRIPLE_L1: Combination = [
    ("E0010", "1"), ("E0011", "1"), ("E0110", "1"), ("E0111", "1"),
    ("E0210", "1"), ("E0211", "1"), ("E1000", "1"), ("E1100", "1"),
]
TRIPLE_F: Combination = [
    ("F0010", "3"), ("F0011", "3"), ("F0110", "1"), ("F0111", "1"),
    ("F0210", "5/4"), ("F0211", "5/4"), ("F1000", "6"), ("F1100", "2"),
]
TRIPLE_H: Combination = [("H0001", "5"), ("H0010", "10"), ("H0100", "7"), ("H1000", "4")]

HIGHEST_WEIGHT: Dict[int, Combination] = {
    2: [
        ("E0010", "20/13"), ("E0011", "-28/13"), ("E0110", "-76/13"), ("E0111", "-28/13"),
        ("E0210", "38/13"), ("E0211", "2/13"), ("E1000", "32/13"), ("E1100", "-88/13"),
    ],
    3: [("E2431", "39/20")],
    4: [("E2431", "39/20"), ("E2432", "9/4")],
    5: [("E2321", "1"), ("E2421", "1")],
    6: [("E1221", "2"), ("E1321", "6"), ("E2210", "1"), ("E2211", "-5")],
    7: [("E221", "-4"), ("E1110", "1"), ("E1111", "-5"), ("E1210", "-1"), ("E1211", "5")],
    8: [
        ("E0010", "2/5"), ("E0011", "2"), ("E0110", "-6/5"), ("E0111", "-14/5"),
        ("E0210", "-1/5"), ("E0211", "1"), ("E1100", "-4/5"),
    ],
}

LOWEST_PARTS: Dict[int, Combination] = {
    1: [("F2432", "1")],
    2: [("F2431", "15/13"), ("F2432", "-1")],
    3: [
        ("F0010", "39/20"), ("F0011", "-39/20"), ("F0110", "-39/8"), ("F111", "-273/40"),
        ("F0211", "39/10"), ("F1100", "-39/10"),
    ],
    4: [
        ("F0010", "39/20"), ("F0011", "204/5"), ("F0110", "3"), ("F0111", "-51/5"),
        ("F0210", "9/2"), ("F0211", "129/10"), ("F1000", "9/4"), ("F1100", "48/5"),
    ],
}

DUAL_BASIS: Dict[int, Combination] = {
    1: TRIPLE_F,
    2: [
        ("F0010", "1677/1120"), ("F0011", "-1833/1120"), ("F0110", "-923/1120"), ("F0111", "247/1120"),
        ("F0210", "403/2240"), ("F0211", "247/2240"), ("F1000", "39/35"), ("F1100", "-143/140"),
    ],
    3: [("F2431", "15/13"), ("F2432", "-1")],
    4: [("F2432", "1")],
    5: [("F2321", "27/10"), ("F2421", "9/10")],
    6: [("F1221", "5/16"), ("F1321", "5/16"), ("F2210", "-3/8"), ("F2211", "-7/8")],
    7: [("F0221", "-15/28"), ("F1110", "-27/28"), ("F1111", "-9/4"), ("F1210", "9/28"), ("F1211", "3/4")],
    8: [
        ("F0010", "-405/112"), ("F0011", "135/16"), ("F0110", "75/112"), ("F0111", "-375/112"),
        ("F0210", "45/224"), ("F0211", "15/32"), ("F1100", "-15/14"),
    ],
}

# printed index -> catalog index (extra weights ascending: 4,3,2,1 become 1,2,3,4)
PRINTED_TO_CATALOG = {1: 1, 2: 2, 3: 3, 4: 4, 5: 8, 6: 7, 7: 6, 8: 5}


def simple_root_matrix(label: str) -> SparseMatrix:
    return {(i - 1, j - 1): rat(sign) for sign, i, j in SIMPLE_ROOT_UNITS[label]}


def positive_root_vectors() -> Dict[str, SparseMatrix]:
    roots = {label: simple_root_matrix(label) for label in SIMPLE_ROOTS}
    for new, left, right in COMMUTATOR_TABLE:
        value = commutator(roots[left], roots[right])
        if not value:
            raise ClosureError(f"E{new} = [E{left}, E{right}] vanishes")
        roots[new] = value
    return roots


def build_f4_minimal() -> MatrixLieAlgebra:
    """F4 in its 27-dimensional representation.

    Basis order: the 24 positive root vectors ``E_c``, their transposes
    ``F_c`` and the four coroots ``H_c = [E_c, F_c]`` of the simple roots.
    """
    roots = positive_root_vectors()
    labels = sorted(roots)
    basis, names = [], []
    for label in labels:
        basis.append(roots[label])
        names.append(f"E{label}")
    for label in labels:
        basis.append(transpose(roots[label]))
        names.append(f"F{label}")
    for label in SIMPLE_ROOTS[::-1]:
        e = roots[label]
        basis.append(commutator(e, transpose(e)))
        names.append(f"H{label}")
    algebra = MatrixLieAlgebra("F4", SIZE, basis, names, 4)
    logger.info("Built F4 in gl(%d): dim %d", SIZE, algebra.dim)
    return algebra


def root_of(label: str) -> Tuple[int, ...]:
    """Root coefficients of a basis label (negative for ``F``, zero for ``H``)."""
    digits = tuple(int(c) for c in label[1:])
    if label[0] == "E":
        return digits
    if label[0] == "F":
        return tuple(-d for d in digits)
    return (0, 0, 0, 0)


def resolve_label(label: str, table: str) -> str:
    if table not in LABEL_TABLES:
        raise ConfigError(f"unknown label table: {table}")
    prefix, digits = label[0], label[1:]
    if len(digits) == 4:
        return label
    fixed = LABEL_TABLES[table].get(digits)
    if fixed is None:
        raise ConfigError(f"cannot read root label {label!r}")
    return prefix + fixed


def combination(algebra: MatrixLieAlgebra, terms: Combination, table: str = None):
    table = table or settings.F4_LABEL_TABLE
    return vcomb((rat(c), algebra.element(resolve_label(label, table))) for label, c in terms)
