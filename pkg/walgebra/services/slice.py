"""Slodowy slice: invariants, special coordinates, finite brackets and the space N.

The slice is ``Q = L1 + sum z^i gamma_i``. Restricted invariants are trace
powers (and a Pfaffian for D) of the representation matrix of ``Q``; the
finite pencil ``B_2 + lam B_1`` is the Dirac reduction of the Lie-Poisson
pencil frozen at ``K1`` onto the slice.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from tqdm import tqdm

from walgebra.exceptions import (
    CertificateError,
    EliminationError,
    NonTriangularError,
    ShiftMismatchError,
    SingularSystemError,
    VariableTableError,
)
from walgebra.models.schemas import OrbitDescriptor
from walgebra.services.algebraic import AlgebraicFn, AlgebraicRing
from walgebra.services.liealg import Vec, vsparse
from walgebra.services.nilstruct import ModuleData, OppositeCartan, Sl2Data
from walgebra.services.symcore import (
    ONE,
    ZERO,
    GradedRing,
    Poly,
    compose,
    inverse,
    partial,
    rank,
    row_basis,
    sample_points,
    value_at,
)

logger = logging.getLogger(__name__)

PolyMatrix = Dict[Tuple[int, int], Poly]


@dataclass
class SliceChart:
    """Coordinates ``z^i`` (weight ``eta_i + 1``) on the slice and its matrix ``Q(z)``."""

    ring: GradedRing
    weights: List[int]
    rank: int
    Q: PolyMatrix
    point: Dict[int, Poly]

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def names(self) -> Tuple[str, ...]:
        return self.ring.names


@dataclass
class InvariantSet:
    polys: List[Poly]
    nu: List[int]
    labels: List[str]
    expansions: List[List[Poly]] = field(default_factory=list)
    mu: List[int] = field(default_factory=list)


@dataclass
class SpecialCoordinates:
    """``t = t(z)`` and its triangular inverse ``z = psi(t)``."""

    ring: GradedRing
    forward: List[Poly]
    inverse: List[Poly]
    casimirs: List[Poly]

    def to_t(self, p: Poly) -> Poly:
        return compose(p, self.inverse, self.ring.ring)


@dataclass
class FiniteBrackets:
    """``B_1`` and ``B_2`` in the z- and t-charts."""

    F1: List[List[Poly]]
    F2: List[List[Poly]]
    F1_t: List[List[Poly]] = field(default_factory=list)
    F2_t: List[List[Poly]] = field(default_factory=list)


@dataclass
class NSolution:
    """The space N as a triangular extension of ``QQ[t^1..t^r]``."""

    equations: List[Poly]
    ring: AlgebraicRing
    sigma: Dict[str, AlgebraicFn]
    order: List[str]

    @property
    def minimal_polynomials(self) -> List[Poly]:
        return list(self.ring.relations)


def z_name(i: int) -> str:
    return f"z{i + 1}"


def t_name(i: int) -> str:
    return f"t{i + 1}"


def poly_matmul(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    rows_b: Dict[int, List[Tuple[int, Poly]]] = {}
    for (i, j), v in b.items():
        rows_b.setdefault(i, []).append((j, v))
    out: PolyMatrix = {}
    for (i, k), v in a.items():
        for j, w in rows_b.get(k, ()):
            key = (i, j)
            out[key] = out[key] + v * w if key in out else v * w
    return {k: v for k, v in out.items() if v}


def trace_of_product(a: PolyMatrix, b: PolyMatrix, zero: Poly) -> Poly:
    total = zero
    for (i, j), v in a.items():
        w = b.get((j, i))
        if w is not None:
            total += v * w
    return total


def build_chart(data: Sl2Data, modules: ModuleData, orbit: OrbitDescriptor) -> SliceChart:
    algebra = data.algebra
    weights = [w + 1 for w in modules.weights]
    ring = GradedRing([z_name(i) for i in range(len(weights))], weights)
    point: Dict[int, Poly] = {a: ring.const(c) for a, c in data.L1.items()}
    for i, g in enumerate(modules.gamma):
        z = ring.gen(z_name(i))
        for a, c in g.items():
            point[a] = point[a] + z * c if a in point else z * c
    point = {a: p for a, p in point.items() if p}
    Q: PolyMatrix = {}
    for a, coeff in point.items():
        for key, value in algebra.basis[a].items():
            Q[key] = Q[key] + coeff * value if key in Q else coeff * value
    Q = {k: v for k, v in Q.items() if v}
    return SliceChart(ring, weights, orbit.rank, Q, point)


class _Powers:
    """Memoized matrix powers ``Q^k`` from ``Q^a Q^(k-a)``."""

    def __init__(self, Q: PolyMatrix):
        self.cache = {1: Q}

    def __call__(self, k: int) -> PolyMatrix:
        if k not in self.cache:
            a = k // 2
            self.cache[k] = poly_matmul(self(a), self(k - a))
        return self.cache[k]


def pfaffian(matrix: PolyMatrix, size: int, zero: Poly) -> Poly:
    """Pfaffian of an antisymmetric polynomial matrix by expansion along the first row."""
    memo: Dict[Tuple[int, ...], Poly] = {}

    def pf(indices: Tuple[int, ...]) -> Poly:
        if not indices:
            return zero + 1
        if indices in memo:
            return memo[indices]
        first, rest = indices[0], indices[1:]
        total = zero
        for pos, j in enumerate(rest):
            entry = matrix.get((first, j))
            if not entry:
                continue
            sub = rest[:pos] + rest[pos + 1:]
            sign = -1 if pos % 2 else 1
            total += entry * pf(sub) * sign
        memo[indices] = total
        return total

    return pf(tuple(range(size)))


def _generator_specs(orbit: OrbitDescriptor) -> List[Tuple[int, str]]:
    """``(nu, kind)`` per basic invariant, with kind ``trace`` or ``pfaffian``."""
    nus = list(orbit.lie_exponents)
    if orbit.series == "D":
        specs = [(nu, "trace") for nu in range(1, 2 * orbit.rank - 2, 2)]
        specs.append((orbit.rank - 1, "pfaffian"))
        return sorted(specs)
    return [(nu, "trace") for nu in nus]


def restricted_invariants(chart: SliceChart, data: Sl2Data, orbit: OrbitDescriptor) -> InvariantSet:
    """Basic invariants restricted to the slice, ``P_1 = z^1``.

    Raises:
        EliminationError: if the generators are dependent or not quasihomogeneous
    """
    algebra = data.algebra
    ring = chart.ring
    powers = _Powers(chart.Q)
    polys, labels, nus = [], [], []
    for nu, kind in tqdm(_generator_specs(orbit), desc="invariants", disable=None, leave=False):
        degree = nu + 1
        if kind == "trace":
            a = degree // 2
            p = trace_of_product(powers(a), powers(degree - a), ring.zero)
            labels.append(f"Tr Q^{degree}")
        else:
            form = getattr(algebra, "form_matrix", None)
            if form is None:
                raise EliminationError("Pfaffian generator needs the orthogonal form of the realization")
            jq = poly_matmul({k: ring.const(v) for k, v in form.items()}, chart.Q)
            p = pfaffian(jq, algebra.size, ring.zero)
            labels.append("Pf(J Q)")
        if not ring.is_homogeneous(p, degree) or not p:
            raise EliminationError(f"{labels[-1]} is not a nonzero quasihomogeneous polynomial of degree {degree}")
        polys.append(p)
        nus.append(nu)
    # Tr Q^2 = (2/kappa) z1
    first = polys[0]
    coeff = first.coeff(ring.gen(z_name(0)))
    if first != ring.gen(z_name(0)) * coeff or not coeff:
        raise EliminationError("Tr Q^2 is not proportional to z1")
    polys[0] = first.quo_ground(coeff)
    labels[0] = "z1"
    _check_independent(chart, polys)
    logger.info("Restricted invariants of degrees %s", [nu + 1 for nu in nus])
    return InvariantSet(polys, nus, labels)


def _check_independent(chart: SliceChart, polys: Sequence[Poly], seed: int = 7):
    names = chart.names
    for point in sample_points(3, len(names), seed):
        rows = [[value_at(partial(p, name), point) for name in names] for p in polys]
        if rank(rows, len(names)) == len(polys):
            return
    raise EliminationError("restricted invariants are dependent at every sample point")


def argument_shift(inv: InvariantSet, chart: SliceChart, orbit: OrbitDescriptor) -> InvariantSet:
    """``P(q + lam K1) = sum_j lam^j P^j(q)``; since ``gamma_r = K1`` this is a Taylor shift in ``z^r``.

    Raises:
        ShiftMismatchError: if the top non-constant index differs from the catalog
    """
    zr = z_name(chart.rank - 1)
    expansions, mu = [], []
    for p in inv.polys:
        terms = [p]
        while True:
            nxt = partial(terms[-1], zr).quo_ground(len(terms))
            if not nxt:
                break
            terms.append(nxt)
        expansions.append(terms)
        top = max(j for j, t in enumerate(terms) if not t.is_ground)
        mu.append(top)
    if mu != list(orbit.shifts):
        raise ShiftMismatchError(f"argument-shift indices {mu} differ from the catalog {orbit.shifts}")
    inv.expansions = expansions
    inv.mu = mu
    return inv


def special_coordinates(inv: InvariantSet, chart: SliceChart) -> SpecialCoordinates:
    """``t^i = z^i + nonlinear`` with ``t^1..t^r`` combinations of the shifted Casimirs.

    Raises:
        EliminationError: if the linear parts cannot be normalized
    """
    ring = chart.ring
    r, n = chart.rank, chart.n
    zr = z_name(r - 1)
    casimirs = [partial(p, zr, m) for p, m in zip(inv.polys, inv.mu)]
    forward: List[Optional[Poly]] = [None] * n
    by_degree: Dict[object, List[int]] = {}
    for k, c in enumerate(casimirs):
        by_degree.setdefault(ring.homogeneous_degree(c), []).append(k)
    for degree, members in by_degree.items():
        coords = [j for j in range(r) if chart.weights[j] == degree]
        if len(coords) != len(members):
            raise EliminationError(f"{len(members)} Casimirs but {len(coords)} coordinates of weight {degree}")
        matrix = [[casimirs[k].coeff(ring.gen(z_name(j))) for j in coords] for k in members]
        try:
            inv_matrix = inverse(matrix)
        except SingularSystemError:
            raise EliminationError(f"linear parts of the weight-{degree} Casimirs are dependent")
        for row, j in enumerate(coords):
            t = ring.zero
            for col, k in enumerate(members):
                if inv_matrix[row][col]:
                    t += casimirs[k] * inv_matrix[row][col]
            linear = ring.linear_part(t)
            if linear != ring.gen(z_name(j)):
                raise EliminationError(f"t{j + 1} has linear part {linear.as_expr()}")
            forward[j] = t
    for j in range(r, n):
        forward[j] = ring.gen(z_name(j))
    t_ring = GradedRing([t_name(i) for i in range(n)], chart.weights)
    inverse_map = triangular_inverse(ring, t_ring, forward)
    logger.info("Special coordinates: %s", ", ".join(f"t{j + 1}" for j in range(r) if forward[j] != ring.gen(z_name(j))) or "t = z")
    return SpecialCoordinates(t_ring, forward, inverse_map, casimirs)


def triangular_inverse(source: GradedRing, target: GradedRing, forward: List[Poly]) -> List[Poly]:
    """Solve ``y_j = x_j + N_j(x)`` for the ``x_j`` in increasing weight.

    ``forward`` lives on ``source`` (the ``x``); the result lives on ``target`` (the ``y``).
    """
    n = len(forward)
    images: List[Optional[Poly]] = [None] * n
    for j in sorted(range(n), key=lambda j: (source.weights[j], j)):
        nonlinear = forward[j] - source.gen(j)
        value = target.gen(j)
        if nonlinear:
            value -= compose(nonlinear, images, target.ring)
        images[j] = value
    return images


def _complement_basis(data: Sl2Data) -> List[Vec]:
    """Basis of ``[f, g]``, the orthogonal complement of ``g^f``."""
    algebra = data.algebra
    ad = algebra.ad(data.f)
    columns = [[ad[k][b] for k in range(algebra.dim)] for b in range(algebra.dim)]
    return [vsparse(row) for row in row_basis(columns, algebra.dim)]


def lie_poisson_matrix(data: Sl2Data, chart: SliceChart, K1: Vec, X: Sequence[Vec], lam_ring: GradedRing) -> List[List[Poly]]:
    """``Pi^{ab} = <[X_b, X_a] | q + lam K1>`` on the slice."""
    algebra = data.algebra
    lam = lam_ring.gen("lam")
    linear: List[Poly] = []
    for k in range(algebra.dim):
        value = lam_ring.zero
        row = algebra.gram()[k]
        for c, coeff in chart.point.items():
            g = row.get(c)
            if g:
                value += lam_ring.convert(coeff) * (g * algebra.kappa)
        for c, coeff in K1.items():
            g = row.get(c)
            if g:
                value += lam * (g * algebra.kappa * coeff)
        linear.append(value)
    size = len(X)
    out = [[lam_ring.zero] * size for _ in range(size)]
    for a in range(size):
        for b in range(a + 1, size):
            value = lam_ring.zero
            for k, c in algebra.bracket(X[b], X[a]).items():
                if linear[k]:
                    value += linear[k] * c
            out[a][b] = value
            out[b][a] = -value
    return out


def finite_brackets(
    data: Sl2Data,
    modules: ModuleData,
    cartan: OppositeCartan,
    chart: SliceChart,
    coords: Optional[SpecialCoordinates] = None,
) -> FiniteBrackets:
    """Dirac reduction of the frozen Lie-Poisson pencil onto the slice.

    Raises:
        SingularSystemError: if the constraint block is singular or its inverse is not polynomial
        CertificateError: if the pencil is not linear in ``lam``
    """
    n = chart.n
    U = _complement_basis(data)
    if len(U) != data.algebra.dim - n:
        raise SingularSystemError(f"[f, g] has dimension {len(U)}, expected {data.algebra.dim - n}")
    X = list(modules.L) + U
    lam_ring = GradedRing(list(chart.names) + ["lam"], list(chart.weights) + [0])
    Pi = lie_poisson_matrix(data, chart, cartan.K1, X, lam_ring)
    m = len(U)
    const = [[Pi[n + a][n + b].coeff(1) if Pi[n + a][n + b] else ZERO for b in range(m)] for a in range(m)]
    try:
        A_inv = inverse(const)
    except SingularSystemError:
        raise SingularSystemError("constraint block is singular at L1")
    Z = {}
    for a in range(m):
        for b in range(m):
            entry = Pi[n + a][n + b] - lam_ring.const(const[a][b])
            if entry:
                Z[(a, b)] = entry
    cap = 2 * (2 * max(chart.weights) + 3)
    columns = []
    for j in tqdm(range(n), desc="dirac", disable=None, leave=False):
        rhs = [Pi[n + a][j] for a in range(m)]
        vec = _apply_constant(A_inv, rhs, lam_ring.zero)
        total = list(vec)
        for _ in range(cap):
            image = [lam_ring.zero] * m
            for (a, b), entry in Z.items():
                if vec[b]:
                    image[a] += entry * vec[b]
            vec = [-x for x in _apply_constant(A_inv, image, lam_ring.zero)]
            if not any(vec):
                break
            total = [x + y for x, y in zip(total, vec)]
        else:
            raise SingularSystemError("inverse of the constraint block is not polynomial")
        columns.append(total)
    pencil = [[lam_ring.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            value = Pi[i][j]
            for a in range(m):
                if Pi[i][n + a] and columns[j][a]:
                    value -= Pi[i][n + a] * columns[j][a]
            pencil[i][j] = value
    F1, F2 = _split_pencil(pencil, lam_ring, chart.ring)
    brackets = FiniteBrackets(F1, F2)
    if coords is not None:
        brackets.F1_t = transform_bivector(F1, chart, coords)
        brackets.F2_t = transform_bivector(F2, chart, coords)
    return brackets


def _apply_constant(matrix: List[List], vec: List[Poly], zero: Poly) -> List[Poly]:
    out = []
    for row in matrix:
        value = zero
        for c, v in zip(row, vec):
            if c and v:
                value += v * c
        out.append(value)
    return out


def _split_pencil(pencil, lam_ring: GradedRing, ring: GradedRing):
    idx = lam_ring.index("lam")
    n = len(pencil)
    parts = {0: [[ring.zero] * n for _ in range(n)], 1: [[ring.zero] * n for _ in range(n)]}
    for i in range(n):
        for j in range(n):
            grouped: Dict[int, Dict] = {}
            for monom, coeff in pencil[i][j].iterterms():
                power = monom[idx]
                grouped.setdefault(power, {})[monom[:idx]] = coeff
            for power, terms in grouped.items():
                if power > 1:
                    raise CertificateError(f"pencil entry ({i + 1},{j + 1}) has degree {power} in lam")
                value = ring.zero
                for monom, coeff in terms.items():
                    value[monom] = coeff
                parts[power][i][j] = value
    return parts[1], parts[0]


def transform_bivector(F: List[List[Poly]], chart: SliceChart, coords: SpecialCoordinates) -> List[List[Poly]]:
    """``F^{ij}(t) = dt^i/dz^a dt^j/dz^b F^{ab}`` composed with ``z = psi(t)``."""
    n = chart.n
    jac = [[partial(coords.forward[i], z_name(a)) for a in range(n)] for i in range(n)]
    half = [[chart.ring.zero] * n for _ in range(n)]
    for i in range(n):
        for b in range(n):
            value = chart.ring.zero
            for a in range(n):
                if jac[i][a] and F[a][b]:
                    value += jac[i][a] * F[a][b]
            half[i][b] = value
    out = [[coords.ring.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            value = chart.ring.zero
            for b in range(n):
                if half[i][b] and jac[j][b]:
                    value += half[i][b] * jac[j][b]
            out[i][j] = coords.to_t(value) if value else coords.ring.zero
    return out


def poisson_bracket(F: List[List[Poly]], names: Sequence[str], f: Poly, g: Poly) -> Poly:
    grads_f = [partial(f, name) for name in names]
    grads_g = [partial(g, name) for name in names]
    out = f.ring.zero
    for i, df in enumerate(grads_f):
        if not df:
            continue
        for j, dg in enumerate(grads_g):
            if dg and F[i][j]:
                out += df * F[i][j] * dg
    return out


def antisymmetry_failures(F: List[List[Poly]], tag: str) -> List[str]:
    n = len(F)
    return [f"{tag}[{i + 1}][{j + 1}]" for i in range(n) for j in range(i, n) if F[i][j] + F[j][i]]


def jacobi_failures(F: List[List[Poly]], names: Sequence[str], tag: str) -> List[str]:
    """Schouten bracket ``[F, F]`` componentwise."""
    n = len(F)
    derivs = [[[partial(F[i][j], name) for name in names] for j in range(n)] for i in range(n)]
    failures = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                total = F[0][0].ring.zero
                for s in range(n):
                    total += F[i][s] * derivs[j][k][s] + F[j][s] * derivs[k][i][s] + F[k][s] * derivs[i][j][s]
                if total:
                    failures.append(f"{tag}({i + 1},{j + 1},{k + 1})")
    return failures


def pencil_jacobi_failures(F1, F2, names: Sequence[str]) -> List[str]:
    """``[B1, B1] = [B1, B2] = [B2, B2] = 0`` via the lam-pencil."""
    n = len(F1)
    ring = GradedRing(list(names) + ["lam"], [0] * (len(names) + 1))
    lam = ring.gen("lam")
    pencil = [[ring.convert(F2[i][j]) + lam * ring.convert(F1[i][j]) for j in range(n)] for i in range(n)]
    return jacobi_failures(pencil, names, "B2+lam*B1")


def casimir_failures(inv: InvariantSet, brackets: FiniteBrackets, chart: SliceChart) -> List[str]:
    names = chart.names
    failures = []
    for p, label in zip(inv.polys, inv.labels):
        for k in range(chart.n):
            if poisson_bracket(brackets.F2, names, p, chart.ring.gen(names[k])):
                failures.append(f"{{{label}, z{k + 1}}}_2")
    for i in range(chart.rank):
        for j in range(chart.n):
            if brackets.F1_t and brackets.F1_t[i][j]:
                failures.append(f"{{t{i + 1}, t{j + 1}}}_1")
    return failures


def involution_failures(inv: InvariantSet, brackets: FiniteBrackets, chart: SliceChart) -> List[str]:
    names = chart.names
    items = [(f"P{i + 1}^{j}", p) for i, terms in enumerate(inv.expansions) for j, p in enumerate(terms) if not p.is_ground]
    failures = []
    for a in range(len(items)):
        for b in range(a + 1, len(items)):
            for tag, F in (("1", brackets.F1), ("2", brackets.F2)):
                if poisson_bracket(F, names, items[a][1], items[b][1]):
                    failures.append(f"{{{items[a][0]}, {items[b][0]}}}_{tag}")
    return failures


def quasihomogeneity_failures(brackets: FiniteBrackets, coords: SpecialCoordinates, r: int) -> List[str]:
    ring = coords.ring
    tr = t_name(r - 1)
    failures = []
    n = len(brackets.F2_t)
    for i in range(n):
        for j in range(n):
            F2, F1 = brackets.F2_t[i][j], brackets.F1_t[i][j]
            degree = ring.weights[i] + ring.weights[j] - 1
            if not ring.is_homogeneous(F2, degree):
                failures.append(f"deg F2[{i + 1}][{j + 1}]")
            if partial(F2, tr) != F1:
                failures.append(f"F1[{i + 1}][{j + 1}] != d/dt{r} F2")
            if partial(F1, tr):
                failures.append(f"F1[{i + 1}][{j + 1}] depends on t{r}")
    return failures


def rank_failures(data: Sl2Data, modules: ModuleData, cartan: OppositeCartan, brackets: FiniteBrackets, chart: SliceChart, seed: int) -> List[str]:
    """``rank B_1 = n - r`` at sample points and via the pairing ``<L_u|[K1, L_v]>``."""
    algebra = data.algebra
    n, r = chart.n, chart.rank
    failures = []
    points = sample_points(3, n, seed)
    if not any(rank([[value_at(F, p) for F in row] for row in brackets.F1], n) == n - r for p in points):
        failures.append("rank B_1 != n - r at every sample point")
    eta_r = max(modules.weights[:r])
    pairing = [
        [
            algebra.form(modules.L[u], algebra.bracket(cartan.K1, modules.L[v]))
            if modules.weights[u] + modules.weights[v] == eta_r
            else ZERO
            for v in range(n)
        ]
        for u in range(n)
    ]
    if rank(pairing, n) != n - r:
        failures.append("<L_u|[K1, L_v]> has rank != n - r")
    return failures


def normal_coordinate_failures(inv: InvariantSet, coords: SpecialCoordinates, chart: SliceChart) -> List[str]:
    """Jacobian of the shifted Casimirs on ``z^1..z^r`` is nondegenerate at ``Y_1`` (``z = e_r``)."""
    point = [ZERO] * chart.n
    point[chart.rank - 1] = ONE
    matrix = [[value_at(partial(c, z_name(j)), point) for j in range(chart.rank)] for c in coords.casimirs]
    return [] if rank(matrix, chart.rank) == chart.rank else ["Casimir Jacobian singular at Y1"]


def equilibrium_equations(inv: InvariantSet, coords: SpecialCoordinates, r: int) -> List[Poly]:
    """``d P_j / d t^beta`` for shifted generators (``mu_j > 0``) and ``beta > r``."""
    equations = []
    n = len(coords.forward)
    for p, m in zip(inv.polys, inv.mu):
        if m == 0:
            continue
        pt = coords.to_t(p)
        for beta in range(r, n):
            eq = partial(pt, t_name(beta))
            if eq and eq not in equations and -eq not in equations:
                equations.append(eq)
    logger.info("N is cut out by %d equations", len(equations))
    return equations


def bracket_equations(brackets: FiniteBrackets, r: int) -> List[Poly]:
    """``F_2^{i beta}`` for ``i <= r < beta``: N as the common zeros of the mixed second brackets."""
    equations = []
    n = len(brackets.F2_t)
    for i in range(r):
        for beta in range(r, n):
            eq = brackets.F2_t[i][beta]
            if eq and eq not in equations and -eq not in equations:
                equations.append(eq)
    return equations


def _linear_coefficient(eq: Poly, idx: int) -> Optional[object]:
    """Coefficient of a variable appearing only linearly with a constant coefficient."""
    coeff = None
    for monom, c in eq.iterterms():
        if monom[idx] > 1:
            return None
        if monom[idx] == 1:
            if any(e for k, e in enumerate(monom) if k != idx):
                return None
            coeff = c
    return coeff


def _univariate_leading(eq: Poly, idx: int, others: Sequence[int]) -> Optional[int]:
    """Degree in ``idx`` when ``eq`` has a constant leading coefficient and no other unknowns."""
    degree = 0
    for monom in eq.itermonoms():
        if any(monom[k] for k in others):
            return None
        degree = max(degree, monom[idx])
    if degree < 1:
        return None
    for monom in eq.itermonoms():
        if monom[idx] == degree and sum(monom) != degree:
            return None
    return degree


def solve_N(equations: List[Poly], coords: SpecialCoordinates, r: int) -> NSolution:
    """Triangular elimination of ``t^{r+1}..t^n`` on N.

    Unknowns that occur linearly with constant coefficients are eliminated
    (highest weight first); otherwise the lowest-weight unknown with a monic
    univariate equation becomes an auxiliary root.

    Raises:
        NonTriangularError: if neither step applies or a relation is left over
    """
    ring = coords.ring
    n = ring.ngens
    unknowns = list(range(r, n))
    remaining = [e for e in equations if e]
    solved: Dict[int, Poly] = {}
    roots: List[int] = []
    order: List[str] = []
    while remaining and unknowns:
        step = None
        for u in sorted(unknowns, key=lambda k: (-ring.weights[k], -k)):
            for e in remaining:
                c = _linear_coefficient(e, u)
                if c:
                    step = (u, e, c)
                    break
            if step:
                break
        if step:
            u, e, c = step
            value = -(e - ring.gen(t_name(u)) * c).quo_ground(c)
            images = list(ring.ring.gens)
            images[u] = value
            remaining = [x for x in (compose(e2, images, ring.ring) for e2 in remaining if e2 is not e) if x]
            solved = {k: compose(v, images, ring.ring) for k, v in solved.items()}
            solved[u] = value
            unknowns.remove(u)
            order.append(t_name(u))
            continue
        root = None
        for u in sorted(unknowns, key=lambda k: (ring.weights[k], k)):
            others = [k for k in unknowns if k != u]
            for e in remaining:
                if _univariate_leading(e, u, others):
                    root = (u, e)
                    break
            if root:
                break
        if root is None:
            raise NonTriangularError("equations of N are not triangular", [str(e.as_expr()) for e in remaining])
        u, e = root
        roots.append(u)
        unknowns.remove(u)
        order.append(t_name(u))
        relation = e.quo_ground(e.LC) if e.LC != 1 else e
        remaining = [x for x in remaining if x is not e]
        solved[u] = relation
    base_names = [t_name(i) for i in range(r)]
    aux = [(t_name(u), ring.weights[u]) for u in roots]
    relations = [solved.pop(u) for u in roots]
    try:
        alg = AlgebraicRing(base_names, ring.weights[:r], aux, relations)
    except VariableTableError as exc:
        raise NonTriangularError(f"auxiliary relations are not independent: {exc.message}")
    leftover = [k for k in unknowns]
    if leftover:
        raise NonTriangularError(f"no equation determines {', '.join(t_name(k) for k in leftover)}")
    sigma: Dict[str, AlgebraicFn] = {}
    for u in roots:
        sigma[t_name(u)] = alg.gen(t_name(u))
    for u, value in solved.items():
        sigma[t_name(u)] = alg.lift(value)
    failures = [str(e.as_expr()) for e in remaining if substitute_on_N(e, sigma, alg)]
    if failures:
        raise NonTriangularError("equations do not vanish on the triangular solution", failures)
    for e in equations:
        if substitute_on_N(e, sigma, alg):
            raise NonTriangularError("an equation of N does not vanish on the solution", [str(e.as_expr())])
    logger.info("N: eliminated %s; auxiliary roots %s", order, [name for name, _ in aux] or "none")
    return NSolution(equations, alg, sigma, order)


def substitute_on_N(p: Poly, sigma: Dict[str, AlgebraicFn], alg: AlgebraicRing) -> AlgebraicFn:
    """Restrict a polynomial in ``t^1..t^n`` to N."""
    images = []
    for name in [str(s) for s in p.ring.symbols]:
        if name in sigma:
            fn = sigma[name]
            if not fn.is_polynomial():
                raise NonTriangularError(f"{name} is not polynomial on N")
            images.append(fn.num)
        elif alg.full.has(name):
            images.append(alg.full.gen(name))
        else:
            images.append(None)
    return AlgebraicFn(alg, compose(p, images, alg.full.ring))


def restricted_pencil_failures(brackets: FiniteBrackets, solution: NSolution, r: int) -> List[str]:
    """On N the reduced finite pencil vanishes: ``F_2^{ij} = 0`` for ``i <= r``; ``F_1^{i alpha} = 0``."""
    failures = []
    n = len(brackets.F2_t)
    for i in range(r):
        for j in range(n):
            if substitute_on_N(brackets.F2_t[i][j], solution.sigma, solution.ring):
                failures.append(f"F2[{i + 1}][{j + 1}] on N")
            if j >= r and brackets.F1_t[i][j]:
                failures.append(f"F1[{i + 1}][{j + 1}]")
    return failures


def cross_check_N(solution: NSolution, bracket_eqs: List[Poly], coords: SpecialCoordinates, r: int) -> str:
    """Check that the bracket presentation of N agrees with the gradient one.

    Every ``F_2^{i beta}`` must vanish on the solution of the gradient
    equations. When the bracket equations triangularize as well, the gradient
    equations must vanish on their solution, with the same root degrees.

    Raises:
        EliminationError: if the presentations disagree
    """
    failures = [
        f"F2 equation {k + 1} does not vanish on N"
        for k, eq in enumerate(bracket_eqs)
        if substitute_on_N(eq, solution.sigma, solution.ring)
    ]
    try:
        other = solve_N(bracket_eqs, coords, r)
    except NonTriangularError as exc:
        if failures:
            raise EliminationError("the two presentations of N disagree", failures)
        logger.warning("Bracket presentation of N is not triangular (%s); checked one way", exc.message)
        return "bracket equations vanish on N"
    if sorted(other.ring.degrees) != sorted(solution.ring.degrees):
        failures.append(f"root degrees {sorted(other.ring.degrees)} != {sorted(solution.ring.degrees)}")
    failures.extend(
        f"gradient equation {k + 1} does not vanish on the bracket solution"
        for k, eq in enumerate(solution.equations)
        if substitute_on_N(eq, other.sigma, other.ring)
    )
    if failures:
        raise EliminationError("the two presentations of N disagree", failures)
    return "both presentations agree"
