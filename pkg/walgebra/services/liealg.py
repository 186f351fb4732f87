"""Matrix Lie algebras over QQ.

Elements are sparse coordinate vectors ``{basis index: rational}`` over a
fixed list of basis matrices. Brackets are computed once per basis pair in
the matrix realization and projected back onto the basis; the invariant form
is a rescaled trace form.
"""
import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from walgebra.exceptions import ClosureError, ConfigError, FormNormalizationError, OutsideSpanError
from walgebra.services.symcore import ONE, ZERO, format_rat, inverse, nullspace, qq_matrix, rat

logger = logging.getLogger(__name__)

Vec = Dict[int, object]
SparseMatrix = Dict[Tuple[int, int], object]


def vadd(*vecs: Vec) -> Vec:
    out: Vec = {}
    for v in vecs:
        for k, c in v.items():
            value = out.get(k, ZERO) + c
            if value:
                out[k] = value
            else:
                out.pop(k, None)
    return out


def vscale(v: Vec, factor) -> Vec:
    factor = rat(factor)
    if not factor:
        return {}
    return {k: c * factor for k, c in v.items()}


def vsub(a: Vec, b: Vec) -> Vec:
    return vadd(a, vscale(b, -1))


def vcomb(pairs: Iterable[Tuple[object, Vec]]) -> Vec:
    """Linear combination ``sum c * v`` of ``(c, v)`` pairs."""
    return vadd(*[vscale(v, c) for c, v in pairs])


def vdense(v: Vec, dim: int) -> List:
    row = [ZERO] * dim
    for k, c in v.items():
        row[k] = c
    return row


def vsparse(row: Sequence) -> Vec:
    return {k: rat(c) for k, c in enumerate(row) if c}


def matmul(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    rows_b: Dict[int, List[Tuple[int, object]]] = {}
    for (i, j), v in b.items():
        rows_b.setdefault(i, []).append((j, v))
    out: SparseMatrix = {}
    for (i, k), v in a.items():
        for j, w in rows_b.get(k, ()):
            value = out.get((i, j), ZERO) + v * w
            if value:
                out[(i, j)] = value
            else:
                out.pop((i, j), None)
    return out


def commutator(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    ab, ba = matmul(a, b), matmul(b, a)
    out = dict(ab)
    for key, v in ba.items():
        value = out.get(key, ZERO) - v
        if value:
            out[key] = value
        else:
            out.pop(key, None)
    return out


def trace_product(a: SparseMatrix, b: SparseMatrix) -> object:
    """``Tr(a b)`` without forming the product."""
    total = ZERO
    for (i, j), v in a.items():
        w = b.get((j, i))
        if w:
            total += v * w
    return total


def transpose(a: SparseMatrix) -> SparseMatrix:
    return {(j, i): v for (i, j), v in a.items()}


def unit(i: int, j: int, value=ONE) -> SparseMatrix:
    return {(i, j): rat(value)}


class MatrixLieAlgebra:
    """Lie algebra spanned by sparse rational matrices.

    Args:
        name: Display name, e.g. ``F4``
        size: Dimension of the representation
        basis: Basis matrices as ``{(row, col): value}`` dicts (0-based)
        labels: One label per basis matrix
        rank: Rank of the algebra
    """

    def __init__(self, name: str, size: int, basis: Sequence[SparseMatrix], labels: Sequence[str], rank: int):
        if len(basis) != len(labels):
            raise ConfigError("one label per basis matrix is required")
        self.name = name
        self.size = size
        self.rank = rank
        self.basis = [{k: rat(v) for k, v in m.items() if v} for m in basis]
        self.labels = list(labels)
        self.dim = len(self.basis)
        self._label_index = {label: i for i, label in enumerate(self.labels)}
        self.kappa = ONE
        self._structure: Dict[Tuple[int, int], Vec] = {}
        self._gram: Optional[List[Dict[int, object]]] = None
        self._prepare_projection()
        logger.debug("Built %s: dim %d in gl(%d)", name, self.dim, size)

    def __repr__(self) -> str:
        return f"MatrixLieAlgebra({self.name}, dim={self.dim}, size={self.size})"

    def _prepare_projection(self):
        flat = [[ZERO] * (self.size * self.size) for _ in range(self.dim)]
        for a, m in enumerate(self.basis):
            for (i, j), v in m.items():
                flat[a][i * self.size + j] = v
        red, pivots = qq_matrix(flat, self.size * self.size).rref()
        if len(pivots) != self.dim:
            raise ClosureError(f"{self.name}: basis matrices are linearly dependent (rank {len(pivots)} < {self.dim})")
        self._pivots = [(p // self.size, p % self.size) for p in pivots]
        square = [[flat[a][p] for p in pivots] for a in range(self.dim)]
        # c . square = values at pivots
        self._pivot_inverse = inverse(square)

    def index(self, label: str) -> int:
        try:
            return self._label_index[label]
        except KeyError:
            raise ConfigError(f"{self.name} has no basis element labelled {label!r}")

    def element(self, label: str, coeff=ONE) -> Vec:
        return {self.index(label): rat(coeff)}

    def coordinates(self, matrix: SparseMatrix, check: bool = True) -> Vec:
        """Coordinates of a matrix on the basis.

        Raises:
            OutsideSpanError: if the matrix is not in the span
        """
        values = [matrix.get(p, ZERO) for p in self._pivots]
        vec: Vec = {}
        for k, value in enumerate(values):
            if not value:
                continue
            for a, c in enumerate(self._pivot_inverse[k]):
                if c:
                    vec[a] = vec.get(a, ZERO) + value * c
        vec = {a: c for a, c in vec.items() if c}
        if check and self.matrix(vec) != {k: v for k, v in matrix.items() if v}:
            raise OutsideSpanError(f"matrix is not in the span of {self.name}")
        return vec

    def matrix(self, v: Vec) -> SparseMatrix:
        out: SparseMatrix = {}
        for a, c in v.items():
            for key, value in self.basis[a].items():
                total = out.get(key, ZERO) + c * value
                if total:
                    out[key] = total
                else:
                    out.pop(key, None)
        return out

    def structure(self, a: int, b: int) -> Vec:
        """``[X_a, X_b]`` in coordinates (cached)."""
        if a == b:
            return {}
        if a > b:
            return vscale(self.structure(b, a), -1)
        key = (a, b)
        if key not in self._structure:
            try:
                self._structure[key] = self.coordinates(commutator(self.basis[a], self.basis[b]))
            except OutsideSpanError:
                raise ClosureError(f"[{self.labels[a]}, {self.labels[b]}] leaves the span of {self.name}")
        return self._structure[key]

    def bracket(self, u: Vec, v: Vec) -> Vec:
        acc: Vec = {}
        for a, x in u.items():
            for b, y in v.items():
                if a == b:
                    continue
                for k, c in self.structure(a, b).items():
                    acc[k] = acc.get(k, ZERO) + x * y * c
        return {k: c for k, c in acc.items() if c}

    def ad_power(self, u: Vec, v: Vec, times: int) -> Vec:
        for _ in range(times):
            if not v:
                break
            v = self.bracket(u, v)
        return v

    def ad(self, u: Vec) -> List[List]:
        """Matrix of ``ad u`` (column ``b`` holds the coordinates of ``[u, X_b]``)."""
        rows = [[ZERO] * self.dim for _ in range(self.dim)]
        for b in range(self.dim):
            for k, c in self.bracket(u, {b: ONE}).items():
                rows[k][b] = c
        return rows

    def centralizer(self, u: Vec) -> List[Vec]:
        """Basis of ``ker ad u``."""
        if not u:
            return [{a: ONE} for a in range(self.dim)]
        return [vsparse(row) for row in nullspace(self.ad(u), self.dim)]

    def restricted_kernel(self, u: Vec, domain: Sequence[Vec]) -> List[Vec]:
        """Basis of the kernel of ``ad u`` restricted to ``span(domain)``."""
        if not domain:
            return []
        images = [self.bracket(u, d) for d in domain]
        rows = [[img.get(k, ZERO) for img in images] for k in range(self.dim)]
        return [vcomb(zip(sol, domain)) for sol in nullspace(rows, len(domain))]

    def trace(self, u: Vec, v: Vec) -> object:
        """Unnormalized trace form ``Tr(u v)``."""
        gram = self.gram()
        total = ZERO
        for a, x in u.items():
            row = gram[a]
            for b, y in v.items():
                c = row.get(b)
                if c:
                    total += x * y * c
        return total

    def gram(self) -> List[Dict[int, object]]:
        if self._gram is None:
            self._gram = []
            for a in range(self.dim):
                row = {}
                for b in range(self.dim):
                    value = trace_product(self.basis[a], self.basis[b])
                    if value:
                        row[b] = value
                self._gram.append(row)
        return self._gram

    def form(self, u: Vec, v: Vec) -> object:
        return self.kappa * self.trace(u, v)

    def normalize_form(self, L1: Vec, f: Vec) -> object:
        """Scale the trace form so that ``<L1|f> = 1``; returns the scale."""
        value = self.trace(L1, f)
        if not value:
            raise FormNormalizationError("Tr(L1 f) vanishes; the sl2 data is invalid")
        self.kappa = ONE / value
        logger.debug("%s: form normalized with kappa = %s", self.name, format_rat(self.kappa))
        return self.kappa

    def random_element(self, rng: np.random.Generator, density: float = 0.3) -> Vec:
        v = {}
        for a in range(self.dim):
            if rng.random() < density:
                value = int(rng.integers(-5, 6))
                if value:
                    v[a] = rat(value)
        return v or {int(rng.integers(self.dim)): ONE}

    def jacobi_failures(self, samples: int, seed: int) -> List[str]:
        rng = np.random.default_rng(seed)
        failures = []
        for k in range(samples):
            a, b, c = (self.random_element(rng) for _ in range(3))
            total = vadd(
                self.bracket(self.bracket(a, b), c),
                self.bracket(self.bracket(b, c), a),
                self.bracket(self.bracket(c, a), b),
            )
            if total:
                failures.append(f"sample {k}")
        return failures

    def invariance_failures(self, samples: int, seed: int) -> List[str]:
        rng = np.random.default_rng(seed)
        failures = []
        for k in range(samples):
            a, b, c = (self.random_element(rng) for _ in range(3))
            if self.form(self.bracket(a, b), c) + self.form(b, self.bracket(a, c)):
                failures.append(f"sample {k}")
        return failures

    def to_json(self) -> Dict:
        return {
            "name": self.name,
            "size": self.size,
            "rank": self.rank,
            "kappa": format_rat(self.kappa),
            "basis": [
                {"label": label, "entries": [[i, j, format_rat(v)] for (i, j), v in sorted(m.items())]}
                for label, m in zip(self.labels, self.basis)
            ],
        }

    @classmethod
    def from_json(cls, data: Dict, validate: bool = True) -> "MatrixLieAlgebra":
        basis = [{(int(i), int(j)): rat(v) for i, j, v in item["entries"]} for item in data["basis"]]
        algebra = cls(data["name"], data["size"], basis, [item["label"] for item in data["basis"]], data["rank"])
        algebra.kappa = rat(data.get("kappa", "1"))
        if validate:
            for a in range(algebra.dim):
                for b in range(a + 1, algebra.dim):
                    algebra.structure(a, b)
            failures = algebra.invariance_failures(20, 0)
            if failures:
                raise ClosureError(f"{algebra.name}: trace form is not invariant", failures)
        return algebra


def _antidiagonal_blocks(parts: Sequence[int], signs: bool) -> Tuple[SparseMatrix, List[Tuple[int, int]]]:
    """Block-diagonal bilinear form made of antidiagonal blocks, one per part.

    With ``signs`` the block entries are +1 on the first half and -1 on the
    second (a symplectic block); otherwise all ones.
    """
    form: SparseMatrix = {}
    blocks = []
    start = 0
    for size in parts:
        for i in range(size):
            value = ONE if not signs or i < size // 2 else -ONE
            form[(start + i, start + size - 1 - i)] = value
        blocks.append((start, size))
        start += size
    return form, blocks


def _form_inverse(form: SparseMatrix) -> SparseMatrix:
    # a signed permutation matrix: inverse is the transpose with inverted entries
    return {(j, i): ONE / v for (i, j), v in form.items()}


def build_sl(size: int) -> MatrixLieAlgebra:
    if size < 2:
        raise ConfigError("sl_n needs n >= 2")
    basis, labels = [], []
    for i in range(size):
        for j in range(size):
            if i != j:
                basis.append(unit(i, j))
                labels.append(f"E{i + 1}_{j + 1}")
    for i in range(size - 1):
        basis.append({(i, i): ONE, (i + 1, i + 1): -ONE})
        labels.append(f"H{i + 1}")
    return MatrixLieAlgebra(f"A{size - 1}", size, basis, labels, size - 1)


def build_form_algebra(name: str, parts: Sequence[int], symplectic: bool, rank: int) -> MatrixLieAlgebra:
    """``{X : X^T J + J X = 0}`` for a block-antidiagonal form ``J``.

    The basis is ``J^{-1}(E_ij - E_ji)`` (orthogonal) or ``J^{-1}(E_ij + E_ji)``
    (symplectic), which consists of eigenvectors of the diagonal torus.
    """
    form, _ = _antidiagonal_blocks(parts, symplectic)
    inv = _form_inverse(form)
    size = sum(parts)
    basis, labels = [], []
    for i in range(size):
        for j in range(i if symplectic else i + 1, size):
            sym = unit(i, j)
            other = ONE if symplectic else -ONE
            if i == j:
                sym = {(i, i): rat(2)}
            else:
                sym[(j, i)] = other
            basis.append(matmul(inv, sym))
            labels.append(f"X{i + 1}_{j + 1}")
    algebra = MatrixLieAlgebra(name, size, basis, labels, rank)
    algebra.form_matrix = form
    return algebra


def build_classical(series: str, rank: int, parts: Optional[Sequence[int]] = None) -> MatrixLieAlgebra:
    """Standard realization of a classical simple Lie algebra.

    Args:
        series: One of ``A``, ``B``, ``C``, ``D``
        rank: Rank (``D`` needs rank >= 3)
        parts: Block sizes of the orthogonal form for B/D (default: one
            antidiagonal block, or ``[2r-1, 1]`` for D so that the regular
            nilpotent sits in the first block)

    Returns:
        The algebra; B/D/C realizations expose the form as ``form_matrix``
    """
    if rank < 1 or (series == "D" and rank < 3):
        raise ConfigError(f"unsupported rank {rank} for series {series}")
    if series == "A":
        return build_sl(rank + 1)
    if series == "B":
        parts = list(parts or [2 * rank + 1])
        if sum(parts) != 2 * rank + 1:
            raise ConfigError("block sizes must add up to 2r+1")
        return build_form_algebra(f"B{rank}", parts, False, rank)
    if series == "D":
        parts = list(parts or [2 * rank - 1, 1])
        if sum(parts) != 2 * rank:
            raise ConfigError("block sizes must add up to 2r")
        return build_form_algebra(f"D{rank}", parts, False, rank)
    if series == "C":
        return build_form_algebra(f"C{rank}", [2 * rank], True, rank)
    raise ConfigError(f"unknown classical series {series!r}")
