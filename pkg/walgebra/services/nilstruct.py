"""sl2-triples, Dynkin gradings, highest-weight bases and the opposite Cartan subalgebra.

Conventions: ``[h, L1] = L1``, ``[h, f] = -f``, ``[L1, f] = 2h``. The
grading of ``g`` is the eigenvalue decomposition of ``ad h``; the algebra
basis must consist of ``ad h`` eigenvectors (true for root-vector bases).
"""
import itertools
import logging
from dataclasses import dataclass, field
from math import factorial, isqrt
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import ring as poly_ring

from walgebra.exceptions import (
    CartanError,
    DualBasisError,
    GradingError,
    Sl2Error,
    SingularSystemError,
    UnsupportedOrbitError,
)
from walgebra.models.schemas import OrbitDescriptor
from walgebra.services.liealg import (
    MatrixLieAlgebra,
    SparseMatrix,
    Vec,
    matmul,
    vadd,
    vcomb,
    vdense,
    vscale,
    vsub,
)
from walgebra.services.symcore import ONE, ZERO, format_rat, inverse, rank, rat, solve_linear

logger = logging.getLogger(__name__)


@dataclass
class Sl2Data:
    """An sl2-triple with the grading it induces."""

    algebra: MatrixLieAlgebra
    L1: Vec
    h: Vec
    f: Vec
    degree_of: List[int] = field(default_factory=list)

    def piece(self, degree: int) -> List[int]:
        return [a for a, d in enumerate(self.degree_of) if d == degree]

    def component(self, v: Vec, degree: int) -> Vec:
        return {a: c for a, c in v.items() if self.degree_of[a] == degree}

    def degrees(self, v: Vec) -> List[int]:
        return sorted({self.degree_of[a] for a in v})

    @property
    def dims(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for d in self.degree_of:
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))


@dataclass
class OppositeCartan:
    """Normalized basis ``Y_i = L_i + K_i`` of the centralizer of ``L1 + K1``."""

    K1: Vec
    Y: List[Vec]
    L: List[Vec]
    K: List[Vec]
    permutation: Optional[List[int]] = None  # hint index for each position, when a hint was reordered
    renormalized: bool = False


@dataclass
class ModuleData:
    """Highest-weight vectors ``L_1..L_n`` of ``g^{L1}`` and the dual basis ``gamma`` of ``g^f``."""

    weights: List[int]
    L: List[Vec]
    gamma: List[Vec]


def theta(eta: int, order: int) -> object:
    """``<(1/I!) ad_{L1}^I gamma_i | ad_f^I L_i>`` for a module of highest weight ``eta``."""
    sign = -1 if order % 2 else 1
    return rat(sign * factorial(2 * eta) // factorial(2 * eta - order))


def matrix_power_zero(m: SparseMatrix, size: int) -> bool:
    power = dict(m)
    for _ in range(size):
        if not power:
            return True
        power = matmul(power, m)
    return not power


def _solve_in_span(algebra: MatrixLieAlgebra, domain: Sequence[Vec], image_of, target: Vec) -> Vec:
    """Find ``x`` in ``span(domain)`` with ``image_of(x) = target`` (image_of linear)."""
    images = [image_of(d) for d in domain]
    rows = [[img.get(k, ZERO) for img in images] for k in range(algebra.dim)]
    rhs = [target.get(k, ZERO) for k in range(algebra.dim)]
    solution = solve_linear(rows, rhs, len(domain))
    return vcomb(zip(solution, domain))


def toral_indices(algebra: MatrixLieAlgebra) -> List[int]:
    """Diagonal basis elements and coroots labelled ``H...``."""
    out = []
    for a, m in enumerate(algebra.basis):
        if algebra.labels[a].startswith("H") or all(i == j for i, j in m):
            out.append(a)
    return out


def sl2_complete(algebra: MatrixLieAlgebra, L1: Vec, h: Optional[Vec] = None, f: Optional[Vec] = None) -> Sl2Data:
    """Complete ``L1`` to a triple, validating any supplied ``h`` and ``f``.

    Raises:
        Sl2Error: if ``L1`` is not nilpotent or no triple exists in the span
    """
    if not L1 or not matrix_power_zero(algebra.matrix(L1), algebra.size):
        raise Sl2Error("L1 is not a nonzero nilpotent element")
    if h is None:
        torus = [{a: ONE} for a in toral_indices(algebra)]
        try:
            h = _solve_in_span(algebra, torus, lambda x: algebra.bracket(x, L1), L1)
        except SingularSystemError:
            raise Sl2Error("no element of the torus satisfies [h, L1] = L1")
    if algebra.bracket(h, L1) != L1:
        raise Sl2Error("[h, L1] != L1 for the supplied h")
    degree_of = dynkin_degrees(algebra, h)
    data = Sl2Data(algebra, L1, h, {}, degree_of)
    if f is None:
        lower = [{a: ONE} for a in data.piece(-1)]
        try:
            f = _solve_in_span(algebra, lower, lambda x: algebra.bracket(L1, x), vscale(h, 2))
        except SingularSystemError:
            raise Sl2Error("no f in g_{-1} satisfies [L1, f] = 2h")
    data.f = f
    problems = []
    if algebra.bracket(h, f) != vscale(f, -1):
        problems.append("[h, f] != -f")
    if algebra.bracket(L1, f) != vscale(h, 2):
        problems.append("[L1, f] != 2h")
    if problems:
        raise Sl2Error("invalid sl2-triple", problems)
    logger.debug("sl2-triple completed; graded dims %s", data.dims)
    return data


def dynkin_degrees(algebra: MatrixLieAlgebra, h: Vec) -> List[int]:
    """Integer ``ad h`` eigenvalue of every basis element.

    Raises:
        GradingError: if a basis element is not an eigenvector or an eigenvalue is not an integer
    """
    degrees = []
    for a in range(algebra.dim):
        image = algebra.bracket(h, {a: ONE})
        if not image:
            degrees.append(0)
            continue
        if set(image) != {a}:
            raise GradingError(f"basis element {algebra.labels[a]} is not an ad h eigenvector")
        value = image[a]
        if value.denominator != 1:
            raise GradingError(f"non-integral eigenvalue {value} on {algebra.labels[a]}")
        degrees.append(int(value.numerator))
    return degrees


def dynkin_grading(data: Sl2Data, distinguished: bool = True) -> Dict[int, List[int]]:
    """Graded pieces ``{degree: basis indices}``; checks ``dim g_0 = dim g_1`` when distinguished."""
    pieces: Dict[int, List[int]] = {}
    for a, d in enumerate(data.degree_of):
        pieces.setdefault(d, []).append(a)
    if distinguished and len(pieces.get(0, [])) != len(pieces.get(1, [])):
        raise GradingError(f"dim g_0 = {len(pieces.get(0, []))} != dim g_1 = {len(pieces.get(1, []))}")
    return dict(sorted(pieces.items()))


def grading_failures(data: Sl2Data, samples: int = 200) -> List[str]:
    """Spot check ``[g_i, g_j] ⊆ g_{i+j}`` on basis pairs."""
    algebra = data.algebra
    failures = []
    count = 0
    for a in range(algebra.dim):
        for b in range(a + 1, algebra.dim):
            if count >= samples:
                return failures
            count += 1
            target = data.degree_of[a] + data.degree_of[b]
            if any(data.degree_of[k] != target for k in algebra.structure(a, b)):
                failures.append(f"[{algebra.labels[a]}, {algebra.labels[b]}]")
    return failures


def squarefree_minimal_polynomial(matrix: SparseMatrix, size: int) -> bool:
    """True when the square-free part of the characteristic polynomial annihilates the matrix."""
    dense = DomainMatrix.from_dok(dict(matrix), (size, size), QQ).to_dense()
    coeffs = dense.charpoly()
    _, x = poly_ring("x", QQ)
    char = sum((c * x ** (len(coeffs) - 1 - k) for k, c in enumerate(coeffs)), x.ring.zero)
    part = char.sqf_part()
    by_degree = {m[0]: c for m, c in part.iterterms()}
    value: SparseMatrix = {}
    for k in range(part.degree(), -1, -1):
        value = matmul(value, matrix)
        c = by_degree.get(k, ZERO)
        if c:
            for i in range(size):
                total = value.get((i, i), ZERO) + c
                if total:
                    value[(i, i)] = total
                else:
                    value.pop((i, i), None)
    return not value


def is_regular_semisimple(algebra: MatrixLieAlgebra, y: Vec) -> bool:
    if len(algebra.centralizer(y)) != algebra.rank:
        return False
    return squarefree_minimal_polynomial(algebra.matrix(y), algebra.size)


def find_k1(data: Sl2Data, eta_r: int) -> Vec:
    """First ``K1`` in ``g_{-eta_r}`` (deterministic sequence) making ``L1 + K1`` regular semisimple."""
    algebra = data.algebra
    lowest = data.piece(-eta_r)
    if not lowest:
        raise CartanError(f"g_{{-{eta_r}}} is zero")
    candidates: List[Vec] = [{a: ONE} for a in lowest]
    candidates.append({a: ONE for a in lowest})
    for i, a in enumerate(lowest):
        for b in lowest[i + 1:]:
            candidates.append({a: ONE, b: ONE})
            candidates.append({a: ONE, b: -ONE})
    candidates.append({a: rat(k + 1) for k, a in enumerate(lowest)})
    for candidate in candidates:
        if is_regular_semisimple(algebra, vadd(data.L1, candidate)):
            logger.debug("K1 = %s", {algebra.labels[a]: str(c) for a, c in candidate.items()})
            return candidate
    raise CartanError("no candidate K1 makes L1 + K1 regular semisimple")


def _rational_sqrt(value) -> Optional[object]:
    value = rat(value)
    if value < 0:
        return None
    num, den = int(value.numerator), int(value.denominator)
    a, b = isqrt(num), isqrt(den)
    if a * a == num and b * b == den:
        return QQ(a, b)
    return None


def _hyperbolic_basis(algebra: MatrixLieAlgebra, vectors: List[Vec], scale) -> List[Vec]:
    """Basis of ``span(vectors)`` whose Gram matrix is ``scale`` times the antidiagonal identity."""
    m = len(vectors)
    if m == 0:
        return []
    if m == 1:
        value = algebra.form(vectors[0], vectors[0])
        c = _rational_sqrt(rat(scale) / value) if value else None
        if c is None:
            raise UnsupportedOrbitError(f"self-paired Cartan vector needs sqrt({rat(scale) / value if value else 'inf'})")
        return [vscale(vectors[0], c)]
    gram = [[algebra.form(u, v) for v in vectors] for u in vectors]
    isotropic = None
    for i in range(m):
        if not gram[i][i]:
            isotropic = vectors[i]
            break
    if isotropic is None:
        for i in range(m):
            for j in range(i + 1, m):
                a, b, c = gram[i][i], gram[i][j], gram[j][j]
                root = _rational_sqrt(b * b - a * c)
                if root is not None:
                    # a x^2 + 2 b x + c = 0 with x = (-b + root) / a
                    x = (-b + root) / a
                    isotropic = vadd(vscale(vectors[i], x), vectors[j])
                    break
            if isotropic is not None:
                break
    if isotropic is None:
        raise UnsupportedOrbitError("no rational isotropic vector in a self-paired Cartan class")
    partner = None
    for v in vectors:
        value = algebra.form(isotropic, v)
        if value:
            partner = vscale(v, rat(scale) / value)
            break
    if partner is None:
        raise CartanError("degenerate pairing inside a self-paired class")
    norm = algebra.form(partner, partner)
    partner = vsub(partner, vscale(isotropic, norm / (2 * rat(scale))))
    span = [isotropic, partner]
    rest = []
    for v in vectors:
        # project onto the orthogonal complement of the hyperbolic pair
        a = algebra.form(v, partner) / rat(scale)
        b = algebra.form(v, isotropic) / rat(scale)
        w = vsub(v, vadd(vscale(isotropic, a), vscale(partner, b)))
        candidate_rows = [vdense(u, algebra.dim) for u in span + rest + [w]]
        if w and rank(candidate_rows, algebra.dim) == len(candidate_rows):
            rest.append(w)
        if len(rest) == m - 2:
            break
    inner = _hyperbolic_basis(algebra, rest, scale)
    return [isotropic] + inner + [partner]


def _extend_basis(dim: int, start: List[Vec], pool: List[Vec], size: int) -> List[Vec]:
    out = list(start)
    for v in pool:
        if len(out) == size:
            break
        rows = [vdense(u, dim) for u in out + [v]]
        if rank(rows, dim) == len(rows):
            out.append(v)
    return out


def _gram_antidiagonal(algebra: MatrixLieAlgebra, Y: List[Vec], scale) -> List[str]:
    r = len(Y)
    failures = []
    for i in range(r):
        for j in range(i, r):
            expected = rat(scale) if i + j == r - 1 else ZERO
            if algebra.form(Y[i], Y[j]) != expected:
                failures.append(f"<Y{i + 1}|Y{j + 1}>")
    return failures


def _split_components(data: Sl2Data, Y: List[Vec], exponents: List[int], period: int) -> Tuple[List[Vec], List[Vec]]:
    L, K = [], []
    for i, (y, eta) in enumerate(zip(Y, exponents)):
        low = data.component(y, eta)
        high = data.component(y, eta - period)
        if vadd(low, high) != y:
            raise CartanError(f"Y{i + 1} has components outside degrees {eta} and {eta - period}")
        L.append(low)
        K.append(high)
    return L, K


def opposite_cartan(
    data: Sl2Data,
    orbit: OrbitDescriptor,
    K1: Optional[Vec] = None,
    hint: Optional[List[Vec]] = None,
) -> OppositeCartan:
    """Normalized basis of the opposite Cartan subalgebra.

    ``Y_i`` has components in degrees ``eta_i`` and ``eta_i - (eta_r + 1)`` and
    ``<Y_i|Y_j> = (eta_r + 1) delta_{i+j, r+1}``; afterwards ``<f|L_j> = delta_{1j}``.

    Args:
        data: The sl2-triple with its grading (form already normalized)
        orbit: Catalog row (exponents)
        K1: Lowest-weight completion; searched for when omitted
        hint: Candidate basis ``Y_1..Y_r``; validated, reordered within equal exponents or renormalized

    Raises:
        CartanError: if ``L1 + K1`` is not regular semisimple or the classes have wrong dimensions
        UnsupportedOrbitError: if the normalization needs irrational scalars
    """
    algebra = data.algebra
    exps = list(orbit.exponents)
    r = len(exps)
    period = orbit.eta_r + 1
    if K1 is None:
        K1 = find_k1(data, orbit.eta_r)
    if data.degrees(K1) != [-orbit.eta_r]:
        raise CartanError(f"K1 is not in g_{{-{orbit.eta_r}}}")
    if r == 1:
        K1 = vscale(K1, ONE / algebra.form(data.L1, K1))
    Y1 = vadd(data.L1, K1)
    if not is_regular_semisimple(algebra, Y1):
        raise CartanError("L1 + K1 is not regular semisimple")

    if hint is not None:
        accepted = _accept_hint(data, orbit, Y1, hint)
        if accepted is not None:
            Y, permutation = accepted
            L, K = _split_components(data, Y, exps, period)
            return OppositeCartan(K1, Y, L, K, permutation=permutation)
        logger.warning("Supplied opposite Cartan basis is not normalized; renormalizing")

    classes: Dict[int, List[Vec]] = {}
    for rho in sorted(set(exps)):
        domain = [{a: ONE} for a, d in enumerate(data.degree_of) if d % period == rho % period]
        kernel = algebra.restricted_kernel(Y1, domain)
        if hint is not None:
            kernel = [y for y in hint if data.degrees(y) and data.degrees(y)[-1] % period == rho] + kernel
        if rho == 1:
            kernel = [Y1] + kernel
        expected = exps.count(rho)
        basis = _extend_basis(algebra.dim, [], kernel, expected)
        if len(basis) != expected:
            raise CartanError(f"kernel of ad Y1 in class {rho} has dimension {len(basis)}, expected {expected}")
        classes[rho] = basis
    if sum(len(b) for b in classes.values()) != len(algebra.centralizer(Y1)):
        raise CartanError("centralizer of Y1 has components outside the exponent classes")

    Y: List[Optional[Vec]] = [None] * r
    positions = {rho: [i for i, e in enumerate(exps) if e == rho] for rho in classes}
    for rho, basis in classes.items():
        partner_rho = period - rho
        if rho > partner_rho:
            continue
        if rho == partner_rho:
            for pos, y in zip(positions[rho], _hyperbolic_basis(algebra, basis, period)):
                Y[pos] = y
            continue
        partner = classes.get(partner_rho)
        if partner is None or len(partner) != len(basis):
            raise CartanError(f"exponent classes {rho} and {partner_rho} have different sizes")
        for pos, y in zip(positions[rho], basis):
            Y[pos] = y
        gram = [[algebra.form(u, v) for v in partner] for u in basis]
        try:
            ginv = inverse(gram)
        except SingularSystemError:
            raise CartanError(f"pairing between classes {rho} and {partner_rho} is degenerate")
        for k, pos in enumerate(positions[rho]):
            # X = period * (G^{-1})^T, row k
            coeffs = [rat(period) * ginv[l][k] for l in range(len(partner))]
            Y[r - 1 - pos] = vcomb(zip(coeffs, partner))

    # make <f|L_j> vanish for the other exponent-1 vectors
    L, _ = _split_components(data, Y, exps, period)
    for j in positions.get(1, [])[1:]:
        c = -algebra.form(data.f, L[j])
        if c:
            Y[j] = vadd(Y[j], vscale(Y[0], c))
            Y[r - 1] = vsub(Y[r - 1], vscale(Y[r - 1 - j], c))
    failures = _gram_antidiagonal(algebra, Y, period)
    if failures:
        raise CartanError("normalization did not reach the antidiagonal Gram matrix", failures)
    L, K = _split_components(data, Y, exps, period)
    return OppositeCartan(K1, Y, L, K, renormalized=hint is not None)


def _accept_hint(data: Sl2Data, orbit: OrbitDescriptor, Y1: Vec, hint: List[Vec]):
    """Return ``(Y, permutation)`` if some reordering within equal exponents normalizes the hint."""
    algebra = data.algebra
    exps = list(orbit.exponents)
    period = orbit.eta_r + 1
    if len(hint) != len(exps) or hint[0] != Y1:
        return None
    for y in hint:
        if algebra.bracket(Y1, y):
            raise CartanError("a supplied Cartan vector does not commute with L1 + K1")
    groups = [[i for i, e in enumerate(exps) if e == rho] for rho in sorted(set(exps))]
    choices = [list(itertools.permutations(g)) for g in groups]
    for combo in itertools.product(*choices):
        order = [None] * len(exps)
        for group, perm in zip(groups, combo):
            for pos, src in zip(group, perm):
                order[pos] = src
        if order[0] != 0:
            continue
        Y = [hint[i] for i in order]
        if not _gram_antidiagonal(algebra, Y, period):
            try:
                _split_components(data, Y, exps, period)
            except CartanError:
                continue
            return Y, order
    return None


def highest_weight_vectors(data: Sl2Data, degree: int) -> List[Vec]:
    algebra = data.algebra
    return algebra.restricted_kernel(data.L1, [{a: ONE} for a in data.piece(degree)])


def lowest_weight_vectors(data: Sl2Data, degree: int) -> List[Vec]:
    algebra = data.algebra
    return algebra.restricted_kernel(data.f, [{a: ONE} for a in data.piece(-degree)])


def module_decomposition(
    data: Sl2Data,
    orbit: OrbitDescriptor,
    cartan: OppositeCartan,
    extras: Optional[List[Vec]] = None,
    gamma: Optional[List[Vec]] = None,
) -> ModuleData:
    """Highest-weight vectors ``L_1..L_n`` and the dual basis ``gamma_1..gamma_n`` of ``g^f``.

    ``L_1..L_r`` are the degree-``eta_i`` parts of the Cartan basis; the extra
    vectors complete each ``g^{L1} ∩ g_d``.

    Raises:
        GradingError: if the ``ad h`` weights on ``g^{L1}`` differ from the catalog
        DualBasisError: if the pairing ``g^f x g^{L1}`` is degenerate
    """
    algebra = data.algebra
    weights = orbit.weights
    r = orbit.rank
    L = list(cartan.L)
    found: Dict[int, List[Vec]] = {}
    for d in sorted(set(weights)):
        found[d] = highest_weight_vectors(data, d)
    observed = sorted(d for d, vs in found.items() for _ in vs)
    total = sum(len(highest_weight_vectors(data, d)) for d in range(0, orbit.eta_r + 1) if d not in found)
    if observed != sorted(weights) or total:
        raise GradingError(f"ad h weights on g^L1 are {observed}, expected {sorted(weights)}")
    if extras is not None:
        if len(extras) != len(orbit.extra_weights):
            raise GradingError("wrong number of supplied highest-weight vectors")
        for v, d in zip(extras, orbit.extra_weights):
            if data.degrees(v) != [d] or algebra.bracket(data.L1, v):
                raise GradingError(f"a supplied highest-weight vector is not in g^L1 ∩ g_{d}")
        L.extend(extras)
    else:
        for d in sorted(set(orbit.extra_weights)):
            start = [v for v, e in zip(L[:r], orbit.exponents) if e == d]
            basis = _extend_basis(algebra.dim, start, found[d], len(found[d]))
            for v in basis[len(start):]:
                if d == 1:
                    # keep gamma_1 = f
                    v = vsub(v, vscale(data.L1, algebra.form(data.f, v)))
                L.append(v)
    if rank([vdense(v, algebra.dim) for v in L], algebra.dim) != len(L):
        raise GradingError("highest-weight vectors are linearly dependent")

    if gamma is None:
        gamma = [None] * len(L)
        for d in sorted(set(weights)):
            idx = [i for i, w in enumerate(weights) if w == d]
            lows = lowest_weight_vectors(data, d)
            if len(lows) != len(idx):
                raise DualBasisError(f"dim g^f ∩ g_{{-{d}}} = {len(lows)}, expected {len(idx)}")
            gram = [[algebra.form(low, L[i]) for i in idx] for low in lows]
            try:
                ginv = inverse(gram)
            except SingularSystemError:
                raise DualBasisError(f"pairing in degree {d} is degenerate")
            for k, i in enumerate(idx):
                gamma[i] = vcomb((ginv[k][a], lows[a]) for a in range(len(lows)))
    failures = []
    for i, g in enumerate(gamma):
        if algebra.bracket(data.f, g):
            failures.append(f"[f, gamma{i + 1}] != 0")
        for j, v in enumerate(L):
            if algebra.form(g, v) != (ONE if i == j else ZERO):
                failures.append(f"<gamma{i + 1}|L{j + 1}>")
    if failures:
        raise DualBasisError("gamma is not dual to the highest-weight vectors", failures)
    return ModuleData(list(weights), L, gamma)


def pairing_table_failures(data: Sl2Data, modules: ModuleData, limit: Optional[int] = None) -> List[str]:
    """Check ``<(1/I!) ad_{L1}^I gamma_i | ad_f^J L_j> = theta(eta_i, I) delta_ij delta_IJ`` for all I, J."""
    algebra = data.algebra
    raised: List[List[Vec]] = []
    lowered: List[List[Vec]] = []
    for eta, g, v in zip(modules.weights, modules.gamma, modules.L):
        up, down = [g], [v]
        for I in range(1, 2 * eta + 1):
            up.append(vscale(algebra.bracket(data.L1, up[-1]), ONE / I))
            down.append(algebra.bracket(data.f, down[-1]))
        raised.append(up)
        lowered.append(down)
    failures = []
    n = len(modules.weights)
    count = 0
    for i in range(n):
        for j in range(n):
            for I, a in enumerate(raised[i]):
                for J, b in enumerate(lowered[j]):
                    if data.degree_of and a and b and data.degrees(a)[0] + data.degrees(b)[0] != 0:
                        continue
                    expected = theta(modules.weights[i], I) if (i == j and I == J) else ZERO
                    count += 1
                    if algebra.form(a, b) != expected:
                        failures.append(f"(i={i + 1}, I={I}, j={j + 1}, J={J})")
                    if limit is not None and count >= limit:
                        return failures
    return failures


def cartan_identity_failures(data: Sl2Data, orbit: OrbitDescriptor, cartan: OppositeCartan) -> List[str]:
    """Commutation of the ``Y_i``, the pairing ``<L_i|K_j>`` and the bracket identity for ``[K1, L_j]``."""
    algebra = data.algebra
    r = orbit.rank
    eta = orbit.exponents
    failures = []
    for i in range(r):
        for j in range(i + 1, r):
            if algebra.bracket(cartan.Y[i], cartan.Y[j]):
                failures.append(f"[Y{i + 1}, Y{j + 1}] != 0")
    for i in range(r):
        for j in range(r):
            expected = rat(eta[j]) if i + j == r - 1 else ZERO
            if algebra.form(cartan.L[i], cartan.K[j]) != expected:
                failures.append(f"<L{i + 1}|K{j + 1}>")
            lhs = algebra.form(algebra.bracket(cartan.K1, cartan.L[j]), algebra.bracket(data.f, cartan.L[i]))
            expected = rat(2 * eta[i] * eta[j]) if i + j == r - 1 else ZERO
            if lhs != expected:
                failures.append(f"<[K1,L{j + 1}]|ad_f L{i + 1}>")
    return failures


def weight_failures(data: Sl2Data, modules: ModuleData) -> List[str]:
    algebra = data.algebra
    failures = []
    for i, (g, eta) in enumerate(zip(modules.gamma, modules.weights)):
        if algebra.bracket(data.h, g) != vscale(g, -eta):
            failures.append(f"ad_h gamma{i + 1} != -{eta} gamma{i + 1}")
    return failures


def vec_to_json(algebra: MatrixLieAlgebra, v: Vec) -> Dict[str, str]:
    return {algebra.labels[a]: format_rat(c) for a, c in sorted(v.items())}


def vec_from_json(algebra: MatrixLieAlgebra, data: Dict[str, str]) -> Vec:
    return {algebra.index(label): rat(c) for label, c in data.items() if rat(c)}


__all__ = [
    "Sl2Data",
    "OppositeCartan",
    "ModuleData",
    "theta",
    "sl2_complete",
    "dynkin_degrees",
    "dynkin_grading",
    "find_k1",
    "opposite_cartan",
    "module_decomposition",
    "pairing_table_failures",
    "cartan_identity_failures",
    "weight_failures",
]
