"""Drinfeld-Sokolov reduction on the loop space.

Fields ``b`` take values in ``b_- = g_{<=0}`` with basis
``e_{(i,I)} = ad_{L1}^I gamma_i / I!`` and dual basis
``a_{(i,I)} = ad_f^I L_i / theta(eta_i, I)``. Gauge fixing brings
``d/dx + L1 + b`` to ``d/dx + L1 + sum z^i gamma_i``; the brackets of the
``z^i`` are ``D P D^*`` with ``D`` the linearized gauge operator at the
section and ``P`` the base brackets of the ``b`` coordinates.
"""
import logging
from dataclasses import dataclass, field
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.polys.matrices import DomainMatrix
from tqdm import tqdm

from walgebra.config import settings
from walgebra.exceptions import CertificateError, GaugeError, JetOrderError
from walgebra.models.schemas import OrbitDescriptor
from walgebra.services.algebraic import AlgebraicFn, AlgebraicRing, MapToRing
from walgebra.services.jets import DeltaDist, JetRing, jet_name
from walgebra.services.liealg import Vec, vadd, vscale, vsub
from walgebra.services.nilstruct import ModuleData, OppositeCartan, Sl2Data, theta
from walgebra.services.slice import NSolution, SpecialCoordinates, substitute_on_N, t_name, z_name
from walgebra.services.symcore import (
    ONE,
    ZERO,
    GradedRing,
    Poly,
    binomial,
    compose,
    partial,
    poly_from_terms,
    rat,
    sample_points,
    value_at,
)

logger = logging.getLogger(__name__)

PolyVec = Dict[int, Poly]


@dataclass
class BMinusBasis:
    """Adapted basis of ``b_-`` and its dual in ``b_+``."""

    index: List[Tuple[int, int]]
    e: List[Vec]
    a: List[Vec]
    degree: List[int]
    dual: List[Dict[int, object]]

    def position(self, i: int, I: int) -> int:
        return self.index.index((i, I))

    def component(self, alpha: int, v: PolyVec, zero: Poly) -> Poly:
        """``<a_alpha | v>`` for an element with polynomial coefficients."""
        out = zero
        for k, c in self.dual[alpha].items():
            if k in v:
                out += v[k] * c
        return out


@dataclass
class GaugeSolution:
    """Gauge-fixed generators ``z^i(b)`` and gauge parameter components."""

    jets: JetRing
    z: List[Poly]
    w: Dict[Tuple[int, int], Poly]
    truncation: Optional[int] = None


@dataclass
class WBracket:
    """``{t^u(x), t^v(y)} = sum_m K^{uv}_m(x) delta^(m)(x - y)``, linear in ``lam``."""

    jets: JetRing
    K: List[List[DeltaDist]]
    central_charge: Optional[object] = None


@dataclass
class LeadingData:
    ring: GradedRing
    F1: List[List[Poly]]
    F2: List[List[Poly]]
    Omega1: List[List[Poly]]
    Omega2: List[List[Poly]]
    Gamma1: List[List[List[Poly]]]
    Gamma2: List[List[List[Poly]]]


@dataclass
class NBracket:
    """Brackets of ``t^1..t^r`` on the loop space over N.

    ``K1[(u, v)]`` and ``K2[(u, v)]`` map the order ``m`` of ``delta^(m)`` to
    its coefficient. Rows listed in ``rows`` are reduced in full; the other
    entries keep their dispersionless part (``m`` plus differential degree at
    most one).
    """

    jets: "JetsOnN"
    K1: Dict[Tuple[int, int], Dict[int, AlgebraicFn]]
    K2: Dict[Tuple[int, int], Dict[int, AlgebraicFn]]
    rows: List[int]
    central_charge: Optional[object] = None


@dataclass
class ReducedPencil:
    """Leading terms of the pencil on N (indices ``1..r``), read from the reduced bracket."""

    Omega1: List[List[AlgebraicFn]]
    Omega2: List[List[AlgebraicFn]]
    Gamma1: List[List[List[AlgebraicFn]]]
    Gamma2: List[List[List[AlgebraicFn]]]
    bracket: Optional[NBracket] = None
    failures: List[str] = field(default_factory=list)


def b_minus_basis(data: Sl2Data, modules: ModuleData) -> BMinusBasis:
    """``e_{(i,I)}`` for ``0 <= I <= eta_i`` and the dual ``a_{(i,I)}``."""
    algebra = data.algebra
    index, e, a, degree = [], [], [], []
    for i, (eta, gamma, L) in enumerate(zip(modules.weights, modules.gamma, modules.L)):
        up, down = gamma, L
        for I in range(eta + 1):
            if I:
                up = vscale(algebra.bracket(data.L1, up), ONE / I)
                down = algebra.bracket(data.f, down)
            index.append((i, I))
            e.append(up)
            a.append(vscale(down, ONE / theta(eta, I)))
            degree.append(I - eta)
    if len(e) != sum(1 for d in data.degree_of if d <= 0):
        raise GaugeError(f"b_- basis has {len(e)} elements, expected dim g_<=0")
    dual = []
    for v in a:
        row = {}
        for k in range(algebra.dim):
            c = algebra.form(v, {k: ONE})
            if c:
                row[k] = c
        dual.append(row)
    for p, u in enumerate(e):
        for q, v in enumerate(a):
            if algebra.form(u, v) != (ONE if p == q else ZERO):
                raise GaugeError(f"b_- basis is not dual at ({index[p]}, {index[q]})")
    return BMinusBasis(index, e, a, degree, dual)


def default_jet_order(orbit: OrbitDescriptor) -> int:
    return 2 * (orbit.eta_r + 1) + 2


def linear_gauge(data: Sl2Data, modules: ModuleData, basis: BMinusBasis, jets: JetRing) -> List[Dict[int, DeltaDist]]:
    """Linearized gauge operator at the section: ``D[i][alpha]`` acting on the variation of ``b^alpha``.

    Components of ``X = beta - omega' + [omega, sum z^k gamma_k]`` are read
    from degree 0 downwards; ``omega^{(i,I-1)} = X^{(i,I)} / I`` and
    ``D^i = X^{(i,0)}``.
    """
    algebra = data.algebra
    n = len(modules.weights)
    z = [jets.jet(z_name(k)) for k in range(n)]
    deriv = DeltaDist.derivation(jets)
    omega: Dict[Tuple[int, int], Dict[int, DeltaDist]] = {}
    # [e_(j,J), gamma_k] components
    table: Dict[int, List[Tuple[Tuple[int, int], int, object]]] = {}
    for pos, (j, J) in enumerate(basis.index):
        if J >= modules.weights[j]:
            continue
        for k, gamma in enumerate(modules.gamma):
            value = algebra.bracket(basis.e[pos], gamma)
            if not value:
                continue
            for alpha in range(len(basis.index)):
                c = sum((value[m] * w for m, w in basis.dual[alpha].items() if m in value), ZERO)
                if c:
                    table.setdefault(alpha, []).append(((j, J), k, c))
    D: List[Dict[int, DeltaDist]] = [dict() for _ in range(n)]
    order = sorted(range(len(basis.index)), key=lambda p: -basis.degree[p])
    for alpha in order:
        i, I = basis.index[alpha]
        X: Dict[int, DeltaDist] = {alpha: DeltaDist.multiplication(jets, jets.one)}
        if I < modules.weights[i]:
            for col, op in omega.get((i, I), {}).items():
                term = -deriv.compose(op)
                X[col] = X[col] + term if col in X else term
        for source, k, c in table.get(alpha, ()):
            for col, op in omega.get(source, {}).items():
                term = op.scale(z[k] * c)
                X[col] = X[col] + term if col in X else term
        X = {col: op for col, op in X.items() if op}
        if I:
            omega[(i, I - 1)] = {col: op.scale(ONE / I) for col, op in X.items()}
        else:
            D[i] = X
    return D


def base_brackets(data: Sl2Data, basis: BMinusBasis, cartan: OppositeCartan, point: PolyVec, jets: JetRing) -> Dict[Tuple[int, int], DeltaDist]:
    """``P^{ab} = <a_b|a_a> D + <L1 + b + lam K1 | [a_b, a_a]>`` with ``b`` given by ``point``."""
    algebra = data.algebra
    lam = jets.gen("lam")
    values: Dict[int, Poly] = {}
    for k in range(algebra.dim):
        row = algebra.gram()[k]
        value = jets.zero
        for c, coeff in point.items():
            g = row.get(c)
            if g:
                value += coeff * (g * algebra.kappa)
        for c, coeff in data.L1.items():
            g = row.get(c)
            if g:
                value += jets.const(g * algebra.kappa * coeff)
        for c, coeff in cartan.K1.items():
            g = row.get(c)
            if g:
                value += lam * (g * algebra.kappa * coeff)
        values[k] = value
    P: Dict[Tuple[int, int], DeltaDist] = {}
    size = len(basis.index)
    for x in range(size):
        for y in range(size):
            terms = {}
            pairing = algebra.form(basis.a[y], basis.a[x])
            if pairing:
                terms[1] = jets.const(pairing)
            bracket = algebra.bracket(basis.a[y], basis.a[x])
            value = jets.zero
            for k, c in bracket.items():
                if values[k]:
                    value += values[k] * c
            if value:
                terms[0] = value
            if terms:
                P[(x, y)] = DeltaDist(jets, terms)
    return P


def section_point(modules: ModuleData, images: Sequence[Poly]) -> PolyVec:
    """``sum z^k gamma_k`` with ``z^k`` replaced by ``images[k]``."""
    out: PolyVec = {}
    for gamma, image in zip(modules.gamma, images):
        for a, c in gamma.items():
            out[a] = out[a] + image * c if a in out else image * c
    return {a: p for a, p in out.items() if p}


def w_brackets(
    data: Sl2Data,
    modules: ModuleData,
    cartan: OppositeCartan,
    coords: SpecialCoordinates,
    orbit: OrbitDescriptor,
    jet_order: Optional[int] = None,
) -> WBracket:
    """Brackets of the special coordinates ``t^u`` on the loop space.

    ``D_t = (dt/dz) D`` is transported to t-jets through ``z = psi(t)``;
    ``K = D_t P D_t^*`` with ``P`` evaluated on the gauge section.
    """
    n = len(modules.weights)
    order = jet_order or default_jet_order(orbit)
    weights = [w + 1 for w in modules.weights]
    z_jets = JetRing([z_name(k) for k in range(n)], weights, order, [("lam", 0)])
    t_jets = JetRing([t_name(k) for k in range(n)], weights, order, [("lam", 0)])
    basis = b_minus_basis(data, modules)
    D = linear_gauge(data, modules, basis, z_jets)

    psi = [_jet_zero(coords.inverse[k], t_jets) for k in range(n)]
    gens = z_jets.jet_images({z_name(k): psi[k] for k in range(n)}, t_jets)

    def transport(op: DeltaDist) -> DeltaDist:
        return DeltaDist(t_jets, {m: compose(c, gens, t_jets.ring) for m, c in op.terms.items()})

    jac = [[_jet_zero(partial(coords.forward[u], z_name(k)), z_jets) for k in range(n)] for u in range(n)]
    Dt: List[Dict[int, DeltaDist]] = []
    for u in range(n):
        row: Dict[int, DeltaDist] = {}
        for k in range(n):
            if not jac[u][k]:
                continue
            for alpha, op in D[k].items():
                term = op.scale(jac[u][k])
                row[alpha] = row[alpha] + term if alpha in row else term
        Dt.append({alpha: transport(op) for alpha, op in row.items() if op})

    point = section_point(modules, psi)
    P = base_brackets(data, basis, cartan, point, t_jets)
    by_row: Dict[int, List[Tuple[int, DeltaDist]]] = {}
    for (x, y), op in P.items():
        by_row.setdefault(x, []).append((y, op))

    M: List[Dict[int, DeltaDist]] = []
    for u in tqdm(range(n), desc="D P", disable=None, leave=False):
        row: Dict[int, DeltaDist] = {}
        for alpha, op in Dt[u].items():
            for beta, p in by_row.get(alpha, ()):
                term = op.compose(p)
                row[beta] = row[beta] + term if beta in row else term
        M.append({beta: op for beta, op in row.items() if op})
    adjoints = [{beta: op.adjoint() for beta, op in row.items()} for row in Dt]
    K = [[DeltaDist(t_jets) for _ in range(n)] for _ in range(n)]
    for u in tqdm(range(n), desc="D P D*", disable=None, leave=False):
        for v in range(n):
            total = DeltaDist(t_jets)
            for beta, op in M[u].items():
                adj = adjoints[v].get(beta)
                if adj is not None:
                    total = total + op.compose(adj)
            K[u][v] = total
    logger.info("W-brackets computed for %d generators (jet order %d)", n, order)
    return WBracket(t_jets, K)


def _jet_zero(p: Poly, jets: JetRing) -> Poly:
    """Move ``x_i`` to the 0-jet ``x_i_0`` of a jet ring."""
    images = []
    for symbol in p.ring.symbols:
        images.append(jets.jet(str(symbol), 0))
    return compose(p, images, jets.ring)


def pencil_parts(wb: WBracket) -> Tuple[List[List[DeltaDist]], List[List[DeltaDist]]]:
    """``(K_1, K_2)``: coefficients of ``lam^1`` and ``lam^0``.

    Raises:
        CertificateError: if an entry is not linear in ``lam``
    """
    jets = wb.jets
    idx = jets.index("lam")
    n = len(wb.K)
    K1 = [[DeltaDist(jets) for _ in range(n)] for _ in range(n)]
    K2 = [[DeltaDist(jets) for _ in range(n)] for _ in range(n)]
    for u in range(n):
        for v in range(n):
            for m, coeff in wb.K[u][v].terms.items():
                if any(monom[idx] > 1 for monom in coeff.itermonoms()):
                    raise CertificateError(f"K[{u + 1}][{v + 1}] is not linear in lam")
            K1[u][v] = wb.K[u][v].map_coefficients(lambda c: jets.constant_part(c, "lam", 1))
            K2[u][v] = wb.K[u][v].map_coefficients(lambda c: jets.constant_part(c, "lam", 0))
    return K1, K2


def exactness_check(wb: WBracket, r: int) -> Tuple[List[str], object]:
    """``K_1 = d/dt^r K_2``, ``K_1`` free of ``t^r`` jets, and the W-row identities.

    Returns the failures and the central constant ``c`` of ``{t^1, t^1}_2``.
    """
    jets = wb.jets
    K1, K2 = pencil_parts(wb)
    tr = t_name(r - 1)
    n = len(wb.K)
    failures = []
    for u in range(n):
        for v in range(n):
            shifted = K2[u][v].map_coefficients(lambda c: jets.partial(c, tr, 0))
            if shifted != K1[u][v]:
                failures.append(f"K1[{u + 1}][{v + 1}] != d/dt{r} K2")
            if any(jets.max_jet(c, tr) >= 0 for c in K1[u][v].terms.values()):
                failures.append(f"K1[{u + 1}][{v + 1}] depends on t{r}")
            twice = shifted.map_coefficients(lambda c: jets.partial(c, tr, 0))
            if twice:
                failures.append(f"second t{r}-shift of K2[{u + 1}][{v + 1}] is nonzero")
    c = ZERO
    first = K2[0][0]
    t1 = jets.jet(t_name(0), 0)
    expected_terms = {1: t1 * 2, 0: jets.jet(t_name(0), 1)}
    cubic = first.coefficient(3)
    if not cubic.is_ground or not cubic:
        failures.append("coefficient of delta''' in {t1, t1}_2 is not a nonzero constant")
    else:
        c = cubic.LC
        expected_terms[3] = cubic
    if first != DeltaDist(jets, expected_terms):
        failures.append("{t1, t1}_2 != c D^3 + 2 t1 D + t1_x")
    weights = [w - 1 for w in jets.field_weights]
    for v in range(1, n):
        tv = jets.jet(t_name(v), 0)
        expected = DeltaDist(jets, {1: tv * (weights[v] + 1), 0: jets.jet(t_name(v), 1) * weights[v]})
        if K2[0][v] != expected:
            failures.append(f"{{t1, t{v + 1}}}_2 != (eta+1) t D + eta t_x")
    wb.central_charge = c
    return failures, c


def _plain(p: Poly, ring: GradedRing, jets: JetRing) -> Poly:
    """Read a differential-degree-0 polynomial in 0-jets as a polynomial on the coordinate ring."""
    images = []
    for index in range(jets.ngens):
        info = jets.field_of(index)
        if info is None or info[1]:
            images.append(None)
        else:
            images.append(ring.gen(info[0]))
    return compose(p, images, ring.ring)


def leading_terms(wb: WBracket, coords: SpecialCoordinates) -> LeadingData:
    """``F`` (delta term), ``Omega`` (delta' term) and ``Gamma`` (coefficients of ``t^k_x delta``)."""
    jets = wb.jets
    ring = coords.ring
    K1, K2 = pencil_parts(wb)
    n = len(wb.K)

    def split(K):
        F = [[ring.zero] * n for _ in range(n)]
        O = [[ring.zero] * n for _ in range(n)]
        G = [[[ring.zero] * n for _ in range(n)] for _ in range(n)]
        for u in range(n):
            for v in range(n):
                A0, A1 = K[u][v].coefficient(0), K[u][v].coefficient(1)
                F[u][v] = _plain(jets.differential_part(A0, 0), ring, jets)
                O[u][v] = _plain(jets.differential_part(A1, 0), ring, jets)
                first = jets.differential_part(A0, 1)
                for k in range(n):
                    G[u][v][k] = _plain(jets.partial(first, t_name(k), 1), ring, jets)
        return F, O, G

    F1, O1, G1 = split(K1)
    F2, O2, G2 = split(K2)
    return LeadingData(ring, F1, F2, O1, O2, G1, G2)


def leading_failures(ld: LeadingData, finite_F1, finite_F2, etas: Sequence[int], r: int) -> Tuple[List[str], int]:
    """Cross-check the delta terms with the finite pencil and the degrees of ``Omega`` and ``Gamma``.

    The delta terms may differ from the finite pencil by one global sign; the
    sign found is returned with the failures.
    """
    n = len(etas)
    sign = 0
    for s in (1, -1):
        if all(ld.F2[u][v] == finite_F2[u][v] * s and ld.F1[u][v] == finite_F1[u][v] * s for u in range(n) for v in range(n)):
            sign = s
            break
    failures = [] if sign else ["delta term of the loop pencil differs from the finite pencil"]
    ring = ld.ring
    eta_r = etas[r - 1]
    for u in range(n):
        for v in range(n):
            if not ring.is_homogeneous(ld.Omega2[u][v], etas[u] + etas[v]):
                failures.append(f"deg Omega2[{u + 1}][{v + 1}]")
            if not ring.is_homogeneous(ld.Omega1[u][v], etas[u] + etas[v] - eta_r - 1):
                failures.append(f"deg Omega1[{u + 1}][{v + 1}]")
            for k in range(n):
                if not ring.is_homogeneous(ld.Gamma2[u][v][k], etas[u] + etas[v] - etas[k] - 1):
                    failures.append(f"deg Gamma2[{u + 1}][{v + 1}]_{k + 1}")
            if etas[u] + etas[v] < eta_r + 1 and ld.Omega1[u][v]:
                failures.append(f"Omega1[{u + 1}][{v + 1}] has negative degree")
    return failures, sign


def det_omega1(ld: LeadingData, r: int) -> object:
    """``det Omega_1`` on the first ``r`` coordinates; a nonzero constant, ``+-(eta_r + 1)^r`` for an antidiagonal ``Omega_1``.

    Raises:
        CertificateError: if the determinant is not constant
    """
    domain = ld.ring.ring.to_domain()
    rows = [[ld.Omega1[u][v] for v in range(r)] for u in range(r)]
    det = DomainMatrix(rows, (r, r), domain).det()
    if not det.is_ground:
        raise CertificateError("det Omega1 is not constant")
    return det.LC if det else ZERO


# nonlinear gauge fixing

def _pv_add(*vecs: PolyVec) -> PolyVec:
    out: PolyVec = {}
    for v in vecs:
        for k, p in v.items():
            out[k] = out[k] + p if k in out else p
    return {k: p for k, p in out.items() if p}


def _pv_scale(v: PolyVec, c) -> PolyVec:
    return {k: p * c for k, p in v.items()} if c else {}


def _pv_bracket(algebra, u: PolyVec, v: PolyVec, jets: JetRing, degree: Optional[int]) -> PolyVec:
    out: PolyVec = {}
    for a, p in u.items():
        for b, q in v.items():
            if a == b:
                continue
            prod = p * q
            if degree is not None:
                prod = jets.truncate(prod, degree)
            if not prod:
                continue
            for k, c in algebra.structure(a, b).items():
                term = prod * c
                out[k] = out[k] + term if k in out else term
    return {k: p for k, p in out.items() if p}


def gauge_fix(
    data: Sl2Data,
    modules: ModuleData,
    jet_order: Optional[int] = None,
    truncation: Optional[int] = None,
) -> GaugeSolution:
    """Solve ``exp(ad w)(d/dx + L1 + b) = d/dx + L1 + sum z^i gamma_i`` for ``w`` in ``g_{<0}``.

    Args:
        data: sl2-triple and grading
        modules: Highest-weight vectors and the dual basis
        jet_order: Jet order of the ``b`` fields (default ``eta_r + 2``)
        truncation: Keep only terms of polynomial degree at most this in the ``b`` jets

    Raises:
        GaugeError: if the recursion leaves a component unresolved
    """
    algebra = data.algebra
    basis = b_minus_basis(data, modules)
    eta_r = max(modules.weights)
    order = jet_order if jet_order is not None else eta_r + 2
    fields = [f"b{i + 1}_{I}" for i, I in basis.index]
    field_weights = [modules.weights[i] - I + 1 for i, I in basis.index]
    jets = JetRing(fields, field_weights, order)
    b: PolyVec = {}
    for pos, name in enumerate(fields):
        for k, c in basis.e[pos].items():
            term = jets.jet(name, 0) * c
            b[k] = b[k] + term if k in b else term
    b = {k: p for k, p in b.items() if p}
    L1 = {k: jets.const(c) for k, c in data.L1.items()}
    w_components: Dict[Tuple[int, int], Poly] = {}
    z: List[Optional[Poly]] = [None] * len(modules.weights)

    def element(components):
        out: PolyVec = {}
        for (i, J), p in components.items():
            pos = basis.position(i, J)
            out = _pv_add(out, {k: p * c for k, c in basis.e[pos].items()})
        return out

    def derivative(v: PolyVec) -> PolyVec:
        return {k: jets.total_derivative(p) for k, p in v.items() if p}

    for level in range(0, -eta_r - 1, -1):
        w = element(w_components)
        wx = derivative(w)
        inner = _pv_add(_pv_scale(wx, -1), _pv_bracket(algebra, w, b, jets, truncation), _pv_bracket(algebra, w, L1, jets, truncation))
        R = _pv_add(b, _pv_scale(wx, -1), _pv_bracket(algebra, w, b, jets, truncation))
        term, k = inner, 1
        while term:
            term = _pv_bracket(algebra, w, term, jets, truncation)
            if not term:
                break
            R = _pv_add(R, _pv_scale(term, rat(1) / factorial(k + 1)))
            k += 1
            if k > 2 * eta_r + 2:
                raise GaugeError("ad w is not nilpotent on the gauge series")
        for alpha, (i, I) in enumerate(basis.index):
            if basis.degree[alpha] != level:
                continue
            value = basis.component(alpha, R, jets.zero)
            if truncation is not None:
                value = jets.truncate(value, truncation)
            if I:
                w_components[(i, I - 1)] = value * (ONE / I)
            else:
                z[i] = value
    if any(v is None for v in z):
        raise GaugeError("gauge recursion did not reach every generator")
    return GaugeSolution(jets, z, w_components, truncation)


def gauge_failures(gs: GaugeSolution, modules: ModuleData, r: int) -> List[str]:
    """Linear parts ``sum (-1)^I/I! d^I b^i_I``, weights, and the ``b^r_0`` dependence."""
    jets = gs.jets
    failures = []
    r -= 1
    for i, zi in enumerate(gs.z):
        expected = jets.zero
        for I in range(modules.weights[i] + 1):
            name = f"b{i + 1}_{I}"
            try:
                expected += jets.total_derivative(jets.jet(name, 0), I) * (rat((-1) ** I) / factorial(I))
            except JetOrderError:
                failures.append(f"jet order too small for the linear part of z{i + 1}")
                break
        if jets.linear_part(zi) != expected:
            failures.append(f"linear part of z{i + 1}")
        if not jets.is_homogeneous(zi, modules.weights[i] + 1):
            failures.append(f"z{i + 1} is not quasihomogeneous")
    top = f"b{r + 1}_0"
    for i, zi in enumerate(gs.z):
        for k in range(1, jets.order + 1):
            if zi.diff(jets.jet(top, k)):
                failures.append(f"z{i + 1} depends on a derivative of {top}")
                break
        if gs.truncation is None and i != r and zi.diff(jets.jet(top, 0)):
            failures.append(f"z{i + 1} depends on {top}")
    if gs.truncation is None and gs.z[r].diff(jets.jet(top, 0)).diff(jets.jet(top, 0)):
        failures.append(f"z{r + 1} is not linear in {top}")
    return failures


Series = List[Vec]


def _series_bracket(algebra, u: Series, v: Series) -> Series:
    """Bracket of two truncated Taylor series (entries are the jets at ``x = 0``)."""
    out = []
    for k in range(len(u)):
        terms = [vscale(algebra.bracket(u[j], v[k - j]), binomial(k, j)) for j in range(k + 1) if u[j] and v[k - j]]
        out.append(vadd(*terms))
    return out


def _series_add(a: Series, b: Series, factor=ONE) -> Series:
    return [vadd(x, vscale(y, factor)) for x, y in zip(a, b)]


def gauge_action(algebra, w: Series, q: Series) -> Series:
    """``exp(ad w) q - sum_k (ad w)^k w' / (k+1)!`` for nilpotent ``w``.

    Both arguments are Taylor series truncated at the same order; ``w`` must
    vanish at the last order so that ``w'`` is known to it.
    """
    out, term, k = list(q), q, 1
    while any(term):
        term = [vscale(t, ONE / k) for t in _series_bracket(algebra, w, term)]
        out = _series_add(out, term)
        k += 1
    term, k = w[1:] + [{}], 1
    while any(term):
        out = _series_add(out, term, -ONE)
        k += 1
        term = [vscale(t, ONE / k) for t in _series_bracket(algebra, w, term)]
    return out


def gauge_spot_failures(gs: GaugeSolution, data: Sl2Data, modules: ModuleData, seed: int, samples: int = 2) -> List[str]:
    """``z^i`` is unchanged under gauge transforms by random ``w`` in ``g_{<0}`` affine in ``x``.

    The jets of ``b`` and of ``w`` are rational sample values. A truncated
    solution is only gauge invariant to first order, so its ``z^i`` must
    vanish on the infinitesimal transform ``[w, L1] - w'`` of the section.
    """
    algebra = data.algebra
    basis = b_minus_basis(data, modules)
    jets = gs.jets
    size = len(basis.index)
    length = jets.order + 1
    names = [f"b{i + 1}_{I}" for i, I in basis.index]
    negative = [a for a, d in enumerate(data.degree_of) if d < 0]

    def series_of(values) -> Series:
        out = []
        for k in range(length):
            out.append(vadd(*[vscale(basis.e[pos], values[jets.jet_index(names[pos], k)]) for pos in range(size)]))
        return out

    def jets_of(series: Series, start: List) -> List:
        out = list(start)
        for k in range(length):
            for pos in range(size):
                out[jets.jet_index(names[pos], k)] = algebra.form(basis.a[pos], series[k])
        return out

    failures = []
    count = jets.ngens + 2 * len(negative)
    for sample, values in enumerate(sample_points(samples, count, seed)):
        point = [rat(x) for x in values[: jets.ngens]]
        rest = values[jets.ngens:]
        w = [{} for _ in range(length)]
        for k in range(min(2, length - 1)):
            w[k] = {a: rat(x) / 7 for a, x in zip(negative, rest[k * len(negative):]) if x}
        if not any(w):
            continue
        if gs.truncation is not None:
            section = [data.L1] + [{} for _ in range(length - 1)]
            linear = _series_add(_series_bracket(algebra, w, section), w[1:] + [{}], -ONE)
            image = jets_of(linear, point)
            for i, zi in enumerate(gs.z):
                if value_at(zi, image):
                    failures.append(f"z{i + 1} is not invariant to first order (sample {sample})")
            continue
        b = series_of(point)
        q = [vadd(b[0], data.L1)] + b[1:]
        moved = gauge_action(algebra, w, q)
        moved[0] = vsub(moved[0], data.L1)
        image = jets_of(moved, point)
        for i, zi in enumerate(gs.z):
            if value_at(zi, point) != value_at(zi, image):
                failures.append(f"z{i + 1} changes under a gauge transform (sample {sample})")
    return failures


def gauge_invariance_failures(gs: GaugeSolution, D: List[Dict[int, DeltaDist]], z_jets: JetRing, basis: BMinusBasis) -> List[str]:
    """Frechet derivative of the gauge-fixed ``z^i`` on the section equals the linear gauge operator.

    Only meaningful for an untruncated solution.
    """
    jets = gs.jets
    n = len(gs.z)
    images: Dict[str, Poly] = {}
    for pos, (i, I) in enumerate(basis.index):
        images[f"b{i + 1}_{I}"] = z_jets.jet(z_name(i), 0) if I == 0 else z_jets.zero
    gens = []
    for index in range(jets.ngens):
        name, k = jets.field_of(index)
        image = images[name]
        gens.append(z_jets.total_derivative(image, k) if image else z_jets.zero)
    failures = []
    for i in range(n):
        for alpha, (j, J) in enumerate(basis.index):
            op = jets.frechet(gs.z[i], f"b{j + 1}_{J}")
            restricted = DeltaDist(z_jets, {m: compose(c, gens, z_jets.ring) for m, c in op.terms.items()})
            expected = D[i].get(alpha, DeltaDist(z_jets))
            if restricted != expected:
                failures.append(f"dz{i + 1}/db{j + 1}_{J}")
    return failures


# lambda-bracket Jacobi identity

def _shift_apply(jets: JetRing, a: Poly, power: int, phi: Poly) -> Poly:
    """``(a + d/dx)^power phi``."""
    out = jets.zero
    deriv = phi
    for q in range(power + 1):
        if q:
            deriv = jets.total_derivative(deriv)
        if not deriv:
            break
        out += deriv * a ** (power - q) * binomial(power, q)
    return out


def lambda_bracket(jets: JetRing, K: List[List[DeltaDist]], f: Poly, g: Poly, param: Poly) -> Poly:
    """``{f_param g}`` by the master formula with ``{u_i lam u_j}`` the symbol of ``K[j][i]``."""
    n = len(K)
    out = jets.zero
    fields = jets.fields
    for i in range(n):
        inner_terms = []
        for m in range(jets.order + 1):
            df = f.diff(jets.jet(fields[i], m))
            if df:
                sign = -1 if m % 2 else 1
                inner_terms.append(_shift_apply(jets, param, m, df) * sign)
        if not inner_terms:
            continue
        inner = sum(inner_terms[1:], inner_terms[0])
        for j in range(n):
            op = K[j][i]
            if not op:
                continue
            applied = jets.zero
            for m, coeff in op.terms.items():
                applied += coeff * _shift_apply(jets, param, m, inner)
            if not applied:
                continue
            for k in range(jets.order + 1):
                dg = g.diff(jets.jet(fields[j], k))
                if dg:
                    out += dg * _shift_apply(jets, param, k, applied)
    return out


def jacobi_failures(wb: WBracket, extra_order: int = 0, triples: Optional[Sequence[Tuple[int, int, int]]] = None) -> List[str]:
    """``{u_i la {u_j mu u_k}} - {u_j mu {u_i la u_k}} = {{u_i la u_j} la+mu u_k}`` on generator triples."""
    n = len(wb.K)
    source = wb.jets
    jets = JetRing(source.fields, source.field_weights, source.order + extra_order, [("lam", 0), ("la", 0), ("mu", 0)])
    K = [[DeltaDist(jets, {m: jets.convert(c) for m, c in op.terms.items()}) for op in row] for row in wb.K]
    la, mu = jets.gen("la"), jets.gen("mu")
    u = [jets.jet(name, 0) for name in jets.fields]
    if triples is None:
        triples = [(i, j, k) for i in range(n) for j in range(n) for k in range(n)]
    failures = []
    for i, j, k in tqdm(triples, desc="jacobi", disable=None, leave=False):
        try:
            left = lambda_bracket(jets, K, u[i], lambda_bracket(jets, K, u[j], u[k], mu), la)
            middle = lambda_bracket(jets, K, u[j], lambda_bracket(jets, K, u[i], u[k], la), mu)
            right = lambda_bracket(jets, K, lambda_bracket(jets, K, u[i], u[j], la), u[k], la + mu)
        except JetOrderError:
            failures.append(f"jet order too small for ({i + 1},{j + 1},{k + 1})")
            continue
        if left - middle - right:
            failures.append(f"({i + 1},{j + 1},{k + 1})")
    return failures


def skew_failures(wb: WBracket) -> List[str]:
    n = len(wb.K)
    return [f"K[{u + 1}][{v + 1}]" for u in range(n) for v in range(u, n) if not wb.K[u][v].is_skew(wb.K[v][u])]


def should_run_full_checks(orbit: OrbitDescriptor, full_checks: Optional[bool] = None) -> bool:
    full = settings.FULL_CHECKS if full_checks is None else full_checks
    return full or orbit.n <= 3


# reduction to N

class JetsOnN:
    """Jets of ``t^1..t^r`` over N.

    Coefficients live in the algebraic ring of N with the higher jets of
    ``t^1..t^r`` adjoined as free base variables. A jet of an eliminated
    coordinate is ``D^k sigma^alpha``, with ``D`` differentiating the
    auxiliary roots implicitly.
    """

    def __init__(self, solution: NSolution, source: JetRing, r: int):
        base = solution.ring
        self.source = source
        self.order = source.order
        self.r = r
        names, weights = [], []
        for k in range(r):
            for m in range(self.order + 1):
                names.append(jet_name(t_name(k), m))
                weights.append(base.base.weights[k] + m)
        aux = [(jet_name(name, 0), base.full.weights[base.full.index(name)]) for name in base.aux_names]
        full = GradedRing(names + [name for name, _ in aux], weights + [w for _, w in aux])
        rename = [full.gen(jet_name(name, 0)) for name in base.full.names]
        self.ring = AlgebraicRing(names, weights, aux, [compose(rel, rename, full.ring) for rel in base.relations])
        self._lift = MapToRing.from_generators(base, self.ring, rename)
        self._jet_of: List[Tuple[str, int]] = []
        back = []
        for name in self.ring.full.names:
            field_name, m = name.rsplit("_", 1)
            self._jet_of.append((field_name, int(m)))
            back.append(base.full.gen(field_name) if m == "0" else None)
        self._drop = MapToRing.from_generators(self.ring, base, back)
        self._aux = {self.ring.full.index(name) for name, _ in aux}
        self._zero_jets = {self.ring.full.index(jet_name(t_name(k), 0)) for k in range(r)}
        self._sigma = {name: self._lift(value) for name, value in solution.sigma.items()}
        self._aux_jets: Dict[Tuple[str, int], AlgebraicFn] = {}
        self._powers: Dict[Tuple[str, int, int], AlgebraicFn] = {}
        kept = {t_name(k) for k in range(r)}
        self._base_images: List[Optional[Poly]] = []
        self._source_aux: List[int] = []
        for idx in range(source.ngens):
            info = source.field_of(idx)
            if info is not None and info[0] in kept:
                self._base_images.append(self.ring.full.gen(jet_name(*info)))
            else:
                self._base_images.append(None)
                if info is not None:
                    self._source_aux.append(idx)

    def gen(self, k: int, m: int = 0) -> AlgebraicFn:
        return self.ring.gen(jet_name(t_name(k), m))

    def differential_degree(self, monom) -> int:
        return sum(e * self._jet_of[idx][1] for idx, e in enumerate(monom) if e)

    def differential_part(self, a: AlgebraicFn, degree: int) -> AlgebraicFn:
        terms = {m: c for m, c in a.num.iterterms() if self.differential_degree(m) == degree}
        return AlgebraicFn(self.ring, poly_from_terms(self.ring.full.ring, terms), a.den)

    def total_derivative(self, a: AlgebraicFn) -> AlgebraicFn:
        active = set()
        for poly in (a.num, a.den):
            for monom in poly.itermonoms():
                active.update(idx for idx, e in enumerate(monom) if e)
        if active & self._aux:
            active |= self._zero_jets
        out = self.ring.zero
        for idx in sorted(active - self._aux):
            field_name, m = self._jet_of[idx]
            if m == self.order:
                raise JetOrderError(f"derivative of {field_name}_{m} exceeds jet order {self.order}")
            out = out + a.partial(self.ring.full.names[idx]) * self.ring.gen(jet_name(field_name, m + 1))
        return out

    def aux_jet(self, field_name: str, m: int) -> AlgebraicFn:
        key = (field_name, m)
        if key not in self._aux_jets:
            if m == 0:
                self._aux_jets[key] = self._sigma[field_name]
            else:
                self._aux_jets[key] = self.total_derivative(self.aux_jet(field_name, m - 1))
        return self._aux_jets[key]

    def _power(self, field_name: str, m: int, e: int) -> AlgebraicFn:
        key = (field_name, m, e)
        if key not in self._powers:
            self._powers[key] = self.aux_jet(field_name, m) ** e
        return self._powers[key]

    def restrict(self, p: Poly) -> AlgebraicFn:
        """Restrict a lam-free coefficient in the jets of ``t^1..t^n`` to N."""
        groups: Dict[Tuple[int, ...], Dict] = {}
        for monom, coeff in p.iterterms():
            key = tuple(monom[i] for i in self._source_aux)
            rest = list(monom)
            for i in self._source_aux:
                rest[i] = 0
            groups.setdefault(key, {})[tuple(rest)] = coeff
        out = self.ring.zero
        for key, terms in groups.items():
            value = self.ring.lift(compose(poly_from_terms(p.ring, terms), self._base_images, self.ring.full.ring))
            for idx, e in zip(self._source_aux, key):
                if e:
                    value = value * self._power(*self.source.field_of(idx), e)
            out = out + value
        return out

    def to_base(self, a: AlgebraicFn) -> AlgebraicFn:
        """A function of the 0-jets as a function on N."""
        return self._drop(a)

    def adjoint(self, op: Dict[int, AlgebraicFn]) -> Dict[int, AlgebraicFn]:
        out: Dict[int, AlgebraicFn] = {}
        for m, coeff in op.items():
            deriv = coeff
            for j in range(m + 1):
                if j:
                    deriv = self.total_derivative(deriv)
                if not deriv:
                    break
                term = deriv * ((-1) ** m * binomial(m, j))
                out[m - j] = out[m - j] + term if m - j in out else term
        return {m: c for m, c in out.items() if c}


def same_operator(a: Dict[int, AlgebraicFn], b: Dict[int, AlgebraicFn]) -> bool:
    for m in set(a) | set(b):
        left, right = a.get(m), b.get(m)
        if left is None or right is None:
            if left or right:
                return False
        elif left != right:
            return False
    return True


def first_row_failures(bracket: NBracket, etas: Sequence[int], r: int) -> Tuple[List[str], object]:
    """``{t^1, t^1}^N = c D^3 + 2 t^1 D + t^1_x``, the W rows, and ``K_1 = d/dt^r K_2`` on the first row."""
    jets = bracket.jets
    failures = []
    c = ZERO
    first = bracket.K2[(0, 0)]
    cubic = first.get(3)
    expected = {1: jets.gen(0) * 2, 0: jets.gen(0, 1)}
    if cubic is None or not cubic.is_polynomial() or not cubic.num.is_ground:
        failures.append("coefficient of delta''' in {t1, t1} on N is not a nonzero constant")
    else:
        c = cubic.num.LC
        expected[3] = cubic
    if not same_operator(first, expected):
        failures.append("{t1, t1} on N != c D^3 + 2 t1 D + t1_x")
    for v in range(1, r):
        expected = {1: jets.gen(v) * (etas[v] + 1), 0: jets.gen(v, 1) * etas[v]}
        if not same_operator(bracket.K2[(0, v)], expected):
            failures.append(f"{{t1, t{v + 1}}} on N != (eta+1) t D + eta t_x")
    top = jet_name(t_name(r - 1), 0)
    for v in range(r):
        shifted = {m: coeff.partial(top) for m, coeff in bracket.K2[(0, v)].items()}
        if not same_operator(bracket.K1[(0, v)], shifted):
            failures.append(f"{{t1, t{v + 1}}}_1 on N != d/dt{r} {{t1, t{v + 1}}}_2")
    return failures, c


def reduced_skew_failures(bracket: NBracket, r: int) -> List[str]:
    jets = bracket.jets
    failures = []
    for u in range(r):
        for v in range(u, r):
            try:
                adj = jets.adjoint(bracket.K2[(v, u)])
            except JetOrderError:
                failures.append(f"jet order too small for K[{u + 1}][{v + 1}] on N")
                continue
            total = dict(bracket.K2[(u, v)])
            for m, coeff in adj.items():
                total[m] = total[m] + coeff if m in total else coeff
            if any(total.values()):
                failures.append(f"K[{u + 1}][{v + 1}] on N is not skew")
    return failures


def dirac_to_N(
    wb: WBracket,
    ld: LeadingData,
    solution: NSolution,
    coords: SpecialCoordinates,
    r: int,
    rows: Optional[Sequence[int]] = None,
) -> ReducedPencil:
    """Restrict the brackets of ``t^1..t^r`` to N.

    The Dirac corrections vanish because ``F_1^{i alpha} = 0`` and
    ``F_2^{i alpha} = 0`` on N, so ``{t^u, t^v}^N`` is ``{t^u, t^v}`` with
    ``t^alpha = sigma^alpha(t)`` substituted in every jet. Rows in ``rows``
    (default: all) are reduced in full, the other entries in their
    dispersionless part; ``Omega`` and ``Gamma`` are read from the result.
    """
    alg = solution.ring
    n = len(wb.K)
    failures = []
    for i in range(r):
        for alpha in range(r, n):
            if ld.F1[i][alpha]:
                failures.append(f"F1[{i + 1}][{alpha + 1}] != 0")
    for i in range(r):
        for j in range(n):
            if substitute_on_N(ld.F2[i][j], solution.sigma, alg):
                failures.append(f"F2[{i + 1}][{j + 1}] != 0 on N")

    K1, K2 = pencil_parts(wb)
    jets = JetsOnN(solution, wb.jets, r)
    rows = list(range(r)) if rows is None else sorted(set(rows))

    def reduce_entry(op: DeltaDist, full: bool) -> Dict[int, AlgebraicFn]:
        out = {}
        for m, coeff in op.terms.items():
            if not full:
                if m > 1:
                    continue
                coeff = sum((wb.jets.differential_part(coeff, d) for d in range(2 - m)), wb.jets.zero)
            value = jets.restrict(coeff)
            if value:
                out[m] = value
        return out

    reduced1, reduced2 = {}, {}
    for u in tqdm(range(r), desc="reduce to N", disable=None, leave=False):
        for v in range(r):
            reduced1[(u, v)] = reduce_entry(K1[u][v], u in rows)
            reduced2[(u, v)] = reduce_entry(K2[u][v], u in rows)
    bracket = NBracket(jets, reduced1, reduced2, rows)

    def omega(table, u, v) -> AlgebraicFn:
        coeff = table[(u, v)].get(1)
        return jets.to_base(jets.differential_part(coeff, 0)) if coeff is not None else alg.zero

    def gamma(table, u, v, k) -> AlgebraicFn:
        coeff = table[(u, v)].get(0)
        if coeff is None:
            return alg.zero
        return jets.to_base(jets.differential_part(coeff, 1).partial(jet_name(t_name(k), 1)))

    O1 = [[omega(reduced1, u, v) for v in range(r)] for u in range(r)]
    O2 = [[omega(reduced2, u, v) for v in range(r)] for u in range(r)]
    G1 = [[[gamma(reduced1, u, v, k) for k in range(r)] for v in range(r)] for u in range(r)]
    G2 = [[[gamma(reduced2, u, v, k) for k in range(r)] for v in range(r)] for u in range(r)]
    etas = [w - 1 for w in coords.ring.weights[:r]]
    for v in range(r):
        if O2[0][v] != alg.gen(t_name(v)) * (etas[v] + 1):
            failures.append(f"Omega2[1][{v + 1}] != (eta+1) t{v + 1} on N")
        for k in range(r):
            expected = alg.const(etas[v]) if k == v else alg.zero
            if G2[0][v][k] != expected:
                failures.append(f"Gamma2[1][{v + 1}]_{k + 1} on N")
    if 0 in rows:
        row_failures, c = first_row_failures(bracket, etas, r)
        failures.extend(row_failures)
        bracket.central_charge = c
        if wb.central_charge is not None and c != wb.central_charge:
            failures.append("central constant changes on N")
    if len(rows) == r:
        failures.extend(reduced_skew_failures(bracket, r))
    logger.info("Brackets restricted to N (rows %s in full, %d auxiliary roots)", [u + 1 for u in rows], len(alg.aux_names))
    return ReducedPencil(O1, O2, G1, G2, bracket, failures)
