"""Distinguished nilpotent orbits of semisimple type.

Rows hold the exponents of the orbit, the extra weights of the Slodowy
slice, the shift multiplicities and the exponents of the Lie algebra.
Classical series are generated per rank; exceptional rows are literal data.
"""
import logging
from typing import Dict, List, Optional, Tuple

from walgebra.exceptions import ConfigError
from walgebra.models.schemas import OrbitDescriptor

logger = logging.getLogger(__name__)

MAX_CATALOG_RANK = 8

EXCEPTIONAL_EXPONENTS: Dict[str, Tuple[List[int], int]] = {
    "E6": ([1, 4, 5, 7, 8, 11], 78),
    "E7": ([1, 5, 7, 9, 11, 13, 17], 133),
    "E8": ([1, 7, 11, 13, 17, 19, 23, 29], 248),
    "F4": ([1, 5, 7, 11], 52),
    "G2": ([1, 5], 14),
}

# (algebra, label, exponents, extra weights, printed shifts)
EXCEPTIONAL_ROWS: List[Tuple[str, str, List[int], List[int], List[int]]] = [
    ("E6", "a0", [1, 4, 5, 7, 8, 11], [], [0] * 6),
    ("E6", "a1", [1, 2, 4, 5, 7, 8], [3, 5], [0] * 5 + [1]),
    ("E6", "a3", [1, 1, 2, 4, 5, 5], [1, 2, 2, 3, 3, 4], [0] * 3 + [1] * 3),
    ("E7", "a0", [1, 5, 7, 9, 11, 13, 17], [], [0] * 7),
    ("E7", "a1", [1, 3, 5, 7, 9, 11, 13], [5, 8], [0] * 6 + [1]),
    ("E7", "a5", [1, 1, 1, 3, 5, 5, 5], [1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4], [0] * 2 + [1] * 3 + [2] * 2),
    ("E8", "a0", [1, 7, 11, 13, 17, 19, 23, 29], [], [0] * 8),
    ("E8", "a1", [1, 5, 7, 11, 13, 17, 19, 23], [9, 14], [0] * 7 + [1]),
    ("E8", "a2", [1, 3, 7, 9, 11, 13, 17, 19], [5, 8, 11, 14], [0] * 6 + [1] * 2),
    ("E8", "a4", [1, 2, 4, 7, 8, 11, 13, 14], [3, 5, 5, 7, 7, 9, 9, 11], [0] * 5 + [1] * 3),
    ("E8", "a5", [1, 1, 5, 5, 7, 7, 11, 11], [1, 2, 3, 4, 5, 5, 6, 6, 7, 8, 9, 10], [0] * 3 + [1] * 4 + [2]),
    (
        "E8", "a6", [1, 1, 3, 3, 7, 7, 9, 9],
        [1, 2, 3, 3, 3, 4, 4, 4, 5, 5, 5, 6, 6, 6, 7, 8],
        [0] * 2 + [1] * 4 + [2] * 2,
    ),
    ("E8", "a7", [1, 1, 1, 1, 5, 5, 5, 5], [1] * 6 + [2] * 10 + [3] * 10 + [4] * 6, [0, 1, 1, 2, 2, 3, 3, 4]),
    ("F4", "a0", [1, 5, 7, 11], [], [0] * 4),
    ("F4", "a1", [1, 3, 5, 7], [2, 5], [0] * 3 + [1]),
    ("F4", "a2", [1, 1, 5, 5], [1, 2, 3, 4], [0] * 2 + [1] * 2),
    ("F4", "a3", [1, 1, 3, 3], [1, 1, 1, 1, 2, 2, 2, 2], [0, 1, 1, 2]),
    ("G2", "a0", [1, 5], [], [0] * 2),
]

REALIZED_EXCEPTIONAL = {("F4", "a0"), ("F4", "a2")}


def lie_exponents(series: str, rank: int) -> List[int]:
    if series == "A":
        return list(range(1, rank + 1))
    if series in ("B", "C"):
        return list(range(1, 2 * rank, 2))
    if series == "D":
        return sorted(list(range(1, 2 * rank - 2, 2)) + [rank - 1])
    key = f"{series}{rank}"
    if key in EXCEPTIONAL_EXPONENTS:
        return list(EXCEPTIONAL_EXPONENTS[key][0])
    raise ConfigError(f"unknown simple Lie algebra {key}")


def algebra_dimension(series: str, rank: int) -> int:
    if series == "A":
        return rank * (rank + 2)
    if series in ("B", "C"):
        return rank * (2 * rank + 1)
    if series == "D":
        return rank * (2 * rank - 1)
    return EXCEPTIONAL_EXPONENTS[f"{series}{rank}"][1]


def compute_shifts(lie: List[int], exponents: List[int]) -> List[int]:
    """The unique ``mu_i`` with ``nu_i - mu_i (eta_r + 1)`` in ``{1..eta_r}``."""
    period = exponents[-1] + 1
    return [(nu - 1) // period for nu in lie]


def _row(series: str, rank: int, label: str, exponents, extra, printed, realized: bool) -> OrbitDescriptor:
    lie = lie_exponents(series, rank)
    shifts = compute_shifts(lie, sorted(exponents))
    printed = sorted(printed)
    return OrbitDescriptor(
        series=series,
        rank=rank,
        label=label,
        exponents=sorted(exponents),
        extra_weights=sorted(extra),
        shifts=shifts,
        lie_exponents=lie,
        dimension=algebra_dimension(series, rank),
        realized=realized,
        printed_shifts=None if printed == sorted(shifts) else printed,
    )


def classical_rows(series: str, rank: int) -> List[OrbitDescriptor]:
    """Catalog rows of one classical algebra."""
    rows = []
    if series == "A" and rank >= 1:
        rows.append(_row("A", rank, "a0", range(1, rank + 1), [], [0] * rank, True))
    if series == "B" and rank >= 2:
        rows.append(_row("B", rank, "a0", range(1, 2 * rank, 2), [], [0] * rank, True))
        if rank % 2 == 0 and rank >= 4:
            m = rank // 2
            exps = sorted(list(range(1, 2 * m, 2)) * 2)
            extra = list(range(1, m)) + [m - 1, m] + list(range(m, 2 * m - 1))
            rows.append(_row("B", rank, f"a{m}", exps, extra, [0] * (m + 1) + [1] * (m - 1), True))
    if series == "C" and rank >= 1:
        rows.append(_row("C", rank, "a0", range(1, 2 * rank, 2), [], [0] * rank, True))
    if series == "D" and rank >= 4:
        exps = sorted(list(range(1, 2 * rank - 2, 2)) + [rank - 1])
        rows.append(_row("D", rank, "a0", exps, [], [0] * rank, True))
        if rank % 2 == 0:
            m = rank // 2
            exps = sorted(list(range(1, 2 * m, 2)) * 2)
            rows.append(_row("D", rank, f"a{m - 1}", exps, range(1, 2 * m - 1), [0] * (m + 1) + [1] * (m - 1), True))
    return rows


def exceptional_rows() -> List[OrbitDescriptor]:
    rows = []
    for algebra, label, exps, extra, printed in EXCEPTIONAL_ROWS:
        series, rank = algebra[0], int(algebra[1:])
        rows.append(_row(series, rank, label, exps, extra, printed, (algebra, label) in REALIZED_EXCEPTIONAL))
    return rows


def catalog(max_rank: int = MAX_CATALOG_RANK) -> List[OrbitDescriptor]:
    """All catalog rows, classical series instantiated up to ``max_rank``."""
    rows: List[OrbitDescriptor] = []
    for series in "ABCD":
        for rank in range(1, max_rank + 1):
            rows.extend(classical_rows(series, rank))
    rows.extend(exceptional_rows())
    return rows


def lookup(series: str, rank: int, label: str) -> OrbitDescriptor:
    """Catalog row of an orbit.

    Raises:
        ConfigError: if the orbit is not in the catalog
    """
    series = series.upper()
    label = label.lower()
    candidates: List[OrbitDescriptor]
    if series in "ABCD" and len(series) == 1:
        candidates = classical_rows(series, rank)
    else:
        candidates = [row for row in exceptional_rows() if row.series == series and row.rank == rank]
    for row in candidates:
        if row.label == label:
            return row
    raise ConfigError(f"{series}{rank}({label}) is not a distinguished orbit of semisimple type in the catalog")


def parse_orbit(text: str) -> Tuple[str, int, str]:
    """Split ``F4(a2)`` / ``F4 a2`` / ``F 4 a2`` into ``("F", 4, "a2")``."""
    cleaned = text.replace("(", " ").replace(")", " ").split()
    if len(cleaned) == 3 and cleaned[1].isdigit():
        cleaned = [cleaned[0] + cleaned[1], cleaned[2]]
    elif len(cleaned) == 2 and cleaned[1].isdigit():
        cleaned = [cleaned[0] + cleaned[1]]
    if len(cleaned) == 1 and len(cleaned[0]) >= 2:
        cleaned = [cleaned[0], "a0"]
    if len(cleaned) != 2:
        raise ConfigError(f"cannot read orbit {text!r}")
    algebra, label = cleaned
    try:
        return algebra[0].upper(), int(algebra[1:]), label.lower()
    except ValueError:
        raise ConfigError(f"cannot read algebra {algebra!r}")


def catalog_json(max_rank: int = MAX_CATALOG_RANK) -> List[Dict]:
    return [row.model_dump() | {"name": row.name} for row in catalog(max_rank)]


def describe(row: OrbitDescriptor) -> str:
    lines = [
        f"{row.name} in {row.algebra} (dim {row.dimension})",
        f"  exponents:      {', '.join(map(str, row.exponents))}",
        f"  extra weights:  {', '.join(map(str, row.extra_weights)) or '-'}",
        f"  shifts:         {row.shifts}",
        f"  Lie exponents:  {', '.join(map(str, row.lie_exponents))}",
        f"  slice dim n:    {row.n}",
        f"  realized:       {'yes' if row.realized else 'no'}",
    ]
    if row.printed_shifts is not None:
        lines.append(f"  printed shifts: {row.printed_shifts} (inconsistent with the exponent laws)")
    return "\n".join(lines)


def find(name: str) -> Optional[OrbitDescriptor]:
    try:
        return lookup(*parse_orbit(name))
    except ConfigError:
        return None
