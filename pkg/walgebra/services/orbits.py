"""Matrix realizations of the catalog orbits that the pipeline can run.

Classical regular orbits use principal Jordan chains inside block-antidiagonal
forms; the two non-regular classical families use the partitions
``[2m+1, 2m-1, 1]`` (B) and ``[2m+1, 2m-1]`` (D). F4 orbits use the
27-dimensional representation, with the printed F4(a2) data as hints.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from walgebra.config import settings
from walgebra.exceptions import UnsupportedOrbitError
from walgebra.models.schemas import OrbitDescriptor
from walgebra.services import f4
from walgebra.services.liealg import MatrixLieAlgebra, SparseMatrix, Vec, build_classical, vadd
from walgebra.services.symcore import ONE, rat

logger = logging.getLogger(__name__)


@dataclass
class OrbitRealization:
    """An orbit inside a concrete algebra, with optional validated-on-use hints."""

    orbit: OrbitDescriptor
    algebra: MatrixLieAlgebra
    L1: Vec
    h: Optional[Vec] = None
    f: Optional[Vec] = None
    K1: Optional[Vec] = None
    cartan: Optional[List[Vec]] = None
    extras: Optional[List[Vec]] = None
    gamma: Optional[List[Vec]] = None
    notes: List[str] = field(default_factory=list)


def _chain(blocks: Sequence[Tuple[int, int]], signed: bool) -> Tuple[SparseMatrix, SparseMatrix]:
    """Principal nilpotent and its grading element on each block ``(start, size)``."""
    L1: SparseMatrix = {}
    h: SparseMatrix = {}
    for start, size in blocks:
        for k in range(size - 1):
            value = ONE if not signed or k < size // 2 else -ONE
            L1[(start + k, start + k + 1)] = value
        for k in range(size):
            value = rat(size - 1) / 2 - k
            if value:
                h[(start + k, start + k)] = value
    return L1, h


def _blocks(parts: Sequence[int]) -> List[Tuple[int, int]]:
    out, start = [], 0
    for size in parts:
        out.append((start, size))
        start += size
    return out


def _classical(orbit: OrbitDescriptor) -> OrbitRealization:
    series, r = orbit.series, orbit.rank
    if series == "A":
        parts, signed = [r + 1], False
    elif series == "C":
        parts, signed = [2 * r], True
    elif series == "B":
        parts, signed = ([2 * r + 1] if orbit.label == "a0" else [r + 1, r - 1, 1]), True
    else:
        parts, signed = ([2 * r - 1, 1] if orbit.label == "a0" else [r + 1, r - 1]), True
    algebra = build_classical(series, r, None if series in "AC" else parts)
    L1, h = _chain(_blocks(parts), signed and series != "A")
    realization = OrbitRealization(orbit, algebra, algebra.coordinates(L1), h=algebra.coordinates(h))
    realization.notes.append(f"Jordan type {parts}")
    return realization


def _f4_regular(orbit: OrbitDescriptor) -> OrbitRealization:
    algebra = f4.build_f4_minimal()
    L1 = vadd(*[algebra.element(f"E{label}") for label in f4.SIMPLE_ROOTS])
    return OrbitRealization(orbit, algebra, L1, notes=["sum of simple root vectors"])


def _f4_subregular_a2(orbit: OrbitDescriptor, table: str) -> OrbitRealization:
    """F4(a2) with the printed triple and bases, reindexed to catalog order."""
    algebra = f4.build_f4_minimal()

    def vec(terms):
        return f4.combination(algebra, terms, table)

    L1 = vec(f4.TRIPLE_L1)
    highest = {1: f4.TRIPLE_L1, **f4.HIGHEST_WEIGHT}
    r = orbit.rank
    cartan = [vadd(vec(highest[i]), vec(f4.LOWEST_PARTS[i])) for i in range(1, r + 1)]
    by_catalog = {f4.PRINTED_TO_CATALOG[p]: p for p in highest}
    extras = [vec(highest[by_catalog[c]]) for c in range(r + 1, orbit.n + 1)]
    gamma = [vec(f4.DUAL_BASIS[by_catalog[c]]) for c in range(1, orbit.n + 1)]
    return OrbitRealization(
        orbit,
        algebra,
        L1,
        h=vec(f4.TRIPLE_H),
        f=vec(f4.TRIPLE_F),
        K1=vec(f4.LOWEST_PARTS[1]),
        cartan=cartan,
        extras=extras,
        gamma=gamma,
        notes=[f"printed F4(a2) data, {table} label table"],
    )


def realize(orbit: OrbitDescriptor, label_table: Optional[str] = None) -> OrbitRealization:
    """Algebra, nilpotent ``L1`` and hints for a catalog orbit.

    Raises:
        UnsupportedOrbitError: if the orbit has no implemented realization
    """
    if not orbit.realized:
        raise UnsupportedOrbitError(f"{orbit.name} has no matrix realization; supply a MatrixLieAlgebra")
    if orbit.series in "ABCD":
        realization = _classical(orbit)
    elif orbit.name == "F4(a0)":
        realization = _f4_regular(orbit)
    elif orbit.name == "F4(a2)":
        realization = _f4_subregular_a2(orbit, label_table or settings.F4_LABEL_TABLE)
    else:
        raise UnsupportedOrbitError(f"no realization for {orbit.name}")
    logger.info("Realized %s in %s (%s)", orbit.name, realization.algebra, "; ".join(realization.notes))
    return realization


def hint_gamma(realization: OrbitRealization, permutation: Optional[List[int]], renormalized: bool) -> Optional[List[Vec]]:
    """Dual-basis hint in the order of an accepted Cartan basis (None when the Cartan basis was rebuilt)."""
    if realization.gamma is None or renormalized:
        return None
    if permutation is None:
        return realization.gamma
    r = len(permutation)
    return [realization.gamma[permutation[i]] for i in range(r)] + realization.gamma[r:]
