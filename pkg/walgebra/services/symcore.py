"""Exact arithmetic substrate.

Rationals come from the ground domain ``QQ`` and polynomials from sympy's
sparse ``PolyRing``. ``GradedRing`` attaches a weight to every generator so
that quasihomogeneity becomes a per-term assertion. Linear algebra is done
with ``DomainMatrix`` over ``QQ``.
"""
import logging
from fractions import Fraction
from math import factorial
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import QQ, parse_expr
from sympy.polys.matrices import DomainMatrix
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyElement, PolyRing

from walgebra.exceptions import SingularSystemError, VariableTableError

logger = logging.getLogger(__name__)

Rat = QQ.dtype
Poly = PolyElement
Monomial = Tuple[int, ...]

ZERO = QQ(0)
ONE = QQ(1)


def rat(value: Union[int, str, Fraction, "Rat"]) -> "Rat":
    """Convert an int, a ``"p/q"`` string or a Fraction to an exact rational."""
    if isinstance(value, Rat):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/")
            return QQ(int(num), int(den))
        return QQ(int(text))
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return QQ(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot convert {value!r} to a rational")


def format_rat(q: "Rat") -> str:
    """Serialize a rational as a decimal-integer fraction string."""
    q = rat(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def binomial(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return factorial(n) // (factorial(k) * factorial(n - k))


def poly_from_terms(ring: PolyRing, terms: Mapping[Monomial, "Rat"]) -> Poly:
    """Build a polynomial from an accumulator dict, dropping zero coefficients."""
    poly = ring.zero
    for monom, coeff in terms.items():
        if coeff:
            poly[monom] = coeff
    return poly


class GradedRing:
    """Polynomial ring over QQ whose generators carry nonnegative rational weights.

    Two graded rings are compatible when their variable tables (names and
    weights) coincide.
    """

    def __init__(self, names: Sequence[str], weights: Sequence, order=lex):
        names = tuple(names)
        if len(names) != len(weights):
            raise VariableTableError(f"{len(names)} names but {len(weights)} weights")
        if len(set(names)) != len(names):
            raise VariableTableError(f"duplicate variable names in {names}")
        self.names = names
        self.weights = tuple(rat(w) for w in weights)
        if any(w < 0 for w in self.weights):
            raise VariableTableError("weights must be nonnegative")
        self.ring = PolyRing(names, QQ, order)
        self._index = {name: i for i, name in enumerate(names)}

    def __repr__(self) -> str:
        table = ", ".join(f"{n}:{format_rat(w)}" for n, w in zip(self.names, self.weights))
        return f"GradedRing({table})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GradedRing) and self.names == other.names and self.weights == other.weights

    def __hash__(self) -> int:
        return hash((self.names, self.weights))

    @property
    def ngens(self) -> int:
        return len(self.names)

    @property
    def zero(self) -> Poly:
        return self.ring.zero

    @property
    def one(self) -> Poly:
        return self.ring.one

    def gen(self, name: Union[str, int]) -> Poly:
        return self.ring.gens[self.index(name)]

    def index(self, name: Union[str, int]) -> int:
        if isinstance(name, int):
            return name
        try:
            return self._index[name]
        except KeyError:
            raise VariableTableError(f"variable {name!r} not in {self.names}")

    def has(self, name: str) -> bool:
        return name in self._index

    def const(self, value) -> Poly:
        return self.ring.ground_new(rat(value))

    def check(self, p: Poly) -> Poly:
        if not isinstance(p, PolyElement) or p.ring != self.ring:
            raise VariableTableError(f"polynomial does not belong to {self!r}")
        return p

    def monomial_degree(self, monom: Monomial) -> "Rat":
        total = ZERO
        for e, w in zip(monom, self.weights):
            if e:
                total += e * w
        return total

    def degrees(self, p: Poly) -> List["Rat"]:
        return sorted({self.monomial_degree(m) for m in p.itermonoms()})

    def homogeneous_degree(self, p: Poly) -> Optional["Rat"]:
        """Weighted degree of a quasihomogeneous polynomial, None for zero or mixed degrees."""
        degs = self.degrees(p)
        if len(degs) != 1:
            return None
        return degs[0]

    def is_homogeneous(self, p: Poly, degree=None) -> bool:
        if not p:
            return True
        degs = self.degrees(p)
        if len(degs) != 1:
            return False
        return degree is None or degs[0] == rat(degree)

    def degree_part(self, p: Poly, degree) -> Poly:
        d = rat(degree)
        return poly_from_terms(self.ring, {m: c for m, c in p.iterterms() if self.monomial_degree(m) == d})

    def linear_part(self, p: Poly) -> Poly:
        return poly_from_terms(self.ring, {m: c for m, c in p.iterterms() if sum(m) == 1})

    def sorted_terms(self, p: Poly) -> List[Tuple[Monomial, "Rat"]]:
        """Terms in graded lexicographic order on (weighted degree, exponent vector)."""
        return sorted(p.iterterms(), key=lambda t: (self.monomial_degree(t[0]), t[0]))

    def convert(self, p: Poly) -> Poly:
        """Move a polynomial from another graded ring into this one by variable name."""
        if p.ring == self.ring:
            return p
        source = [str(s) for s in p.ring.symbols]
        images = []
        for name in source:
            images.append(self.gen(name) if name in self._index else None)
        result = {}
        for monom, coeff in p.iterterms():
            target = [0] * self.ngens
            for i, e in enumerate(monom):
                if not e:
                    continue
                if images[i] is None:
                    raise VariableTableError(f"variable {source[i]!r} missing from {self.names}")
                target[self._index[source[i]]] += e
            key = tuple(target)
            result[key] = result.get(key, ZERO) + coeff
        return poly_from_terms(self.ring, result)

    def parse(self, text: str) -> Poly:
        """Parse a polynomial written with this ring's variable names."""
        local = {str(s): s for s in self.ring.symbols}
        return self.ring.from_expr(parse_expr(text, local_dict=local))

    def to_json(self, p: Poly) -> Dict:
        return poly_to_json(self, p)


def gen_index(ring: PolyRing, name: Union[str, int]) -> int:
    """Generator index by symbol name (or pass-through integer)."""
    if isinstance(name, int):
        return name
    names = [str(s) for s in ring.symbols]
    if name not in names:
        raise VariableTableError(f"variable {name!r} not in {tuple(names)}")
    return names.index(name)


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    """Exact ``+``, ``-`` or ``*`` of two polynomials over the same variable table."""
    if not isinstance(a, PolyElement) or not isinstance(b, PolyElement) or a.ring != b.ring:
        raise VariableTableError("operands have different variable tables")
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def compose(p: Poly, images: Sequence[Optional[Poly]], target: PolyRing) -> Poly:
    """Substitute ``images[i]`` for the i-th generator of ``p.ring``.

    ``None`` entries are only allowed for generators that do not occur in ``p``.
    """
    acc: Dict[Monomial, "Rat"] = {}
    powers: List[Dict[int, Poly]] = [dict() for _ in images]
    for monom, coeff in p.iterterms():
        term = None
        for i, e in enumerate(monom):
            if not e:
                continue
            image = images[i]
            if image is None:
                raise VariableTableError(f"no image for generator {p.ring.symbols[i]}")
            cache = powers[i]
            if e not in cache:
                cache[e] = image ** e
            term = cache[e] if term is None else term * cache[e]
        if term is None:
            acc[target.zero_monom] = acc.get(target.zero_monom, ZERO) + coeff
            continue
        for m, c in term.iterterms():
            acc[m] = acc.get(m, ZERO) + coeff * c
    return poly_from_terms(target, acc)


def substitute(p: Poly, mapping: Mapping[str, Poly], target: Optional[PolyRing] = None) -> Poly:
    """Replace the named generators of ``p`` by polynomials; others map to themselves.

    Unmapped generators must exist by name in ``target`` when it differs from ``p.ring``.
    """
    target = target or p.ring
    images = []
    for symbol in p.ring.symbols:
        name = str(symbol)
        if name in mapping:
            images.append(mapping[name])
        else:
            names = [str(s) for s in target.symbols]
            images.append(target.gens[names.index(name)] if name in names else None)
    return compose(p, images, target)


def partial(p: Poly, name: Union[str, int], times: int = 1) -> Poly:
    ring = p.ring
    x = ring.gens[gen_index(ring, name)]
    for _ in range(times):
        if not p:
            break
        p = p.diff(x)
    return p


def coefficient(p: Poly, monom: Monomial) -> "Rat":
    return p.get(tuple(monom), ZERO)


def poly_to_json(graded: GradedRing, p: Poly) -> Dict:
    """Encode as ``{"vars": [...], "terms": [...]}`` with fraction-string coefficients."""
    graded.check(p)
    return {
        "vars": [{"name": n, "weight": format_rat(w)} for n, w in zip(graded.names, graded.weights)],
        "terms": [{"coeff": format_rat(c), "exps": list(m)} for m, c in graded.sorted_terms(p)],
    }


def graded_ring_from_json(data: Dict) -> GradedRing:
    return GradedRing([v["name"] for v in data["vars"]], [rat(v["weight"]) for v in data["vars"]])


def poly_from_json(data: Dict, graded: Optional[GradedRing] = None) -> Poly:
    table = graded_ring_from_json(data)
    graded = graded or table
    if graded != table:
        raise VariableTableError("JSON variable table does not match the requested ring")
    arity = graded.ngens
    terms = {}
    for term in data["terms"]:
        exps = tuple(int(e) for e in term["exps"])
        if len(exps) != arity:
            raise VariableTableError(f"exponent vector {exps} does not match arity {arity}")
        terms[exps] = rat(term["coeff"])
    return poly_from_terms(graded.ring, terms)


# Linear algebra over QQ

def qq_matrix(rows: Sequence[Sequence], ncols: Optional[int] = None) -> DomainMatrix:
    """Sparse ``DomainMatrix`` over QQ from a list of rows."""
    nrows = len(rows)
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    dok = {}
    for i, row in enumerate(rows):
        if len(row) != ncols:
            raise ValueError(f"row {i} has length {len(row)}, expected {ncols}")
        for j, value in enumerate(row):
            if value:
                dok[(i, j)] = rat(value)
    return DomainMatrix.from_dok(dok, (nrows, ncols), QQ)


def matrix_rows(m: DomainMatrix) -> List[List["Rat"]]:
    nrows, ncols = m.shape
    rows = [[ZERO] * ncols for _ in range(nrows)]
    for (i, j), value in m.to_dok().items():
        rows[i][j] = value
    return rows


def rank(rows: Sequence[Sequence], ncols: Optional[int] = None) -> int:
    if not rows:
        return 0
    return qq_matrix(rows, ncols).rank()


def nullspace(rows: Sequence[Sequence], ncols: int) -> List[List["Rat"]]:
    """Basis (in reduced echelon form) of ``{x : rows . x = 0}``."""
    if ncols == 0:
        return []
    if not rows or all(not any(r) for r in rows):
        return [[ONE if i == j else ZERO for j in range(ncols)] for i in range(ncols)]
    red, pivots = qq_matrix(rows, ncols).rref()
    dok = red.to_dok()
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        vec = [ZERO] * ncols
        vec[f] = ONE
        for k, p in enumerate(pivots):
            value = dok.get((k, f))
            if value:
                vec[p] = -value
        basis.append(vec)
    return basis


def row_basis(rows: Sequence[Sequence], ncols: int) -> List[List["Rat"]]:
    """Reduced echelon basis of the row span."""
    if not rows:
        return []
    red, pivots = qq_matrix(rows, ncols).rref()
    return matrix_rows(red)[:len(pivots)]


def solve_linear(rows: Sequence[Sequence], rhs: Sequence, ncols: int, unique: bool = False) -> List["Rat"]:
    """Solve ``rows . x = rhs`` exactly.

    Returns the particular solution with free variables set to zero.

    Raises:
        SingularSystemError: when the system is inconsistent, or not uniquely
            solvable while ``unique`` is requested
    """
    if len(rows) != len(rhs):
        raise ValueError("row count and right-hand side differ")
    if not rows:
        if unique and ncols:
            raise SingularSystemError("empty system is not uniquely solvable")
        return [ZERO] * ncols
    augmented = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = qq_matrix(augmented, ncols + 1).rref()
    if ncols in pivots:
        raise SingularSystemError("inconsistent linear system")
    if unique and len(pivots) < ncols:
        raise SingularSystemError(f"system has {ncols - len(pivots)} free parameters")
    dok = red.to_dok()
    solution = [ZERO] * ncols
    for k, p in enumerate(pivots):
        solution[p] = dok.get((k, ncols), ZERO)
    return solution


def inverse(rows: Sequence[Sequence]) -> List[List["Rat"]]:
    n = len(rows)
    if n == 0:
        return []
    m = qq_matrix(rows, n)
    if m.rank() < n:
        raise SingularSystemError("matrix is singular")
    return matrix_rows(m.to_dense().inv())


def determinant(rows: Sequence[Sequence]) -> "Rat":
    if not rows:
        return ONE
    return qq_matrix(rows).to_dense().det()


def mat_vec(rows: Sequence[Sequence], vec: Sequence) -> List:
    return [sum((a * b for a, b in zip(row, vec) if a), ZERO) for row in rows]


def sample_points(count: int, dim: int, seed: int, low: int = -7, high: int = 8) -> List[List["Rat"]]:
    """Deterministic rational sample points (numerators and denominators from ``seed``)."""
    rng = np.random.default_rng(seed)
    nums = rng.integers(low, high, size=(count, dim))
    dens = rng.integers(1, 5, size=(count, dim))
    return [[QQ(int(a), int(b)) for a, b in zip(nr, dr)] for nr, dr in zip(nums, dens)]


def evaluate(p: Poly, values: Mapping[str, "Rat"]) -> Poly:
    """Evaluate the named generators at rationals, keeping the remaining ones."""
    ring = p.ring
    images = []
    for symbol in ring.symbols:
        name = str(symbol)
        if name in values:
            images.append(ring.ground_new(rat(values[name])))
        else:
            images.append(ring.gens[gen_index(ring, name)])
    return compose(p, images, ring)


def value_at(p: Poly, point: Sequence) -> "Rat":
    """Value of ``p`` at a rational point given for every generator."""
    total = ZERO
    for monom, coeff in p.iterterms():
        term = coeff
        for x, e in zip(point, monom):
            if e:
                term *= rat(x) ** e
        total += term
    return total
