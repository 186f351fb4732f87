"""Flat pencil on N, flat coordinates and the algebraic Frobenius potential."""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Sequence, Tuple

from tqdm import tqdm

from walgebra.exceptions import ReconstructionError, SingularSystemError
from walgebra.services.algebraic import AlgebraicFn, AlgebraicRing, MapToRing, common_numerators
from walgebra.services.dsred import ReducedPencil
from walgebra.services.slice import triangular_inverse
from walgebra.services.symcore import ONE, ZERO, GradedRing, Poly, compose, format_rat, partial, rat, solve_linear

logger = logging.getLogger(__name__)

Table = List[List[AlgebraicFn]]
Christoffel = List[List[List[AlgebraicFn]]]


def s_name(i: int) -> str:
    return f"s{i + 1}"


@dataclass
class FlatCoordinates:
    """``s = s(t)`` on the base coordinates of N and the triangular inverse ``t = psi(s)``."""

    t_ring: GradedRing
    s_ring: GradedRing
    s: List[Poly]
    inverse: List[Poly]


@dataclass
class FlatPencil:
    ring: AlgebraicRing
    Omega1: Table
    Omega2: Table
    Gamma1: Christoffel
    Gamma2: Christoffel
    etas: List[int]
    coords: FlatCoordinates

    @property
    def r(self) -> int:
        return len(self.etas)

    @property
    def eta_r(self) -> int:
        return self.etas[-1]

    @property
    def charge(self):
        return rat(self.eta_r - 1) / (self.eta_r + 1)

    @property
    def degrees(self) -> List:
        return [rat(eta + 1) / (self.eta_r + 1) for eta in self.etas]

    @property
    def tau(self) -> AlgebraicFn:
        """``t^1 / (eta_r + 1)``."""
        return self.ring.lift(self.coords.inverse[0]) * (ONE / (self.eta_r + 1))


@dataclass
class FrobeniusPotential:
    ring: AlgebraicRing
    F: AlgebraicFn
    gradient: List[AlgebraicFn]
    hessian: Table
    charge: object
    degrees: List
    failures: List[str] = field(default_factory=list)

    @property
    def r(self) -> int:
        return len(self.degrees)

    def eta(self, i: int, j: int):
        return ONE if i + j == self.r - 1 else ZERO

    def euler_field(self) -> str:
        return " + ".join(f"{format_rat(d)} {s_name(i)} d/d{s_name(i)}" for i, d in enumerate(self.degrees))


def _monomials(weights: Sequence, degree) -> Iterator[Tuple[int, ...]]:
    """Exponent vectors of weighted degree ``degree``."""

    def walk(index: int, remaining, prefix: Tuple[int, ...]):
        if index == len(weights):
            if remaining == 0:
                yield prefix
            return
        q = remaining / weights[index]
        top = int(q.numerator) // int(q.denominator)
        for e in range(top, -1, -1):
            yield from walk(index + 1, remaining - e * weights[index], prefix + (e,))

    yield from walk(0, rat(degree), ())


def _flatness_operator(pencil: ReducedPencil, alg: AlgebraicRing, p: Poly) -> List[AlgebraicFn]:
    """``sum_v Omega_1^{uv} d_v d_k p + sum_m Gamma_1^{um}_k d_m p`` for all ``(u, k)``."""
    names = alg.base.names
    r = len(names)
    first = [partial(p, names[m]) for m in range(r)]
    out = []
    for u in range(r):
        for k in range(r):
            value = alg.zero
            for v in range(r):
                second = partial(first[k], names[v])
                if second and pencil.Omega1[u][v]:
                    value = value + pencil.Omega1[u][v] * alg.lift(second)
            for m in range(r):
                if first[m] and pencil.Gamma1[u][m][k]:
                    value = value + pencil.Gamma1[u][m][k] * alg.lift(first[m])
            out.append(value)
    return out


def _linear_system(columns: List[List[AlgebraicFn]], target: List[AlgebraicFn]) -> Tuple[List[List], List]:
    """Rows of ``sum_j c_j columns[j] = target`` read off every base monomial of every root power."""
    alg = target[0].ring
    flat = [v for col in columns for v in col] + list(target)
    nums, _ = common_numerators(flat)
    size = len(target)
    keyed: Dict[Tuple[int, int, Tuple[int, ...]], Dict[int, object]] = {}
    for j in range(len(columns) + 1):
        for e in range(size):
            num = nums[j * size + e]
            for b, coeff_poly in enumerate(alg.coordinates(num)):
                for monom, coeff in coeff_poly.iterterms():
                    keyed.setdefault((e, b, monom), {})[j] = coeff
    rows, rhs = [], []
    ncols = len(columns)
    for key in sorted(keyed):
        entry = keyed[key]
        rows.append([entry.get(j, ZERO) for j in range(ncols)])
        rhs.append(entry.get(ncols, ZERO))
    return rows, rhs


def flat_coordinates(pencil: ReducedPencil, alg: AlgebraicRing, etas: Sequence[int]) -> FlatCoordinates:
    """Quasihomogeneous flat coordinates ``s^i = t^i + (nonlinear)`` of ``Omega_1``.

    Raises:
        ReconstructionError: if the ansatz system is inconsistent
    """
    t_ring = alg.base
    r = len(etas)
    weights = list(t_ring.weights)
    s_ring = GradedRing([s_name(i) for i in range(r)], weights)
    s: List[Poly] = []
    for i in range(r):
        ti = t_ring.gen(i)
        base = _flatness_operator(pencil, alg, ti)
        monos = [m for m in _monomials(weights, weights[i]) if sum(m) > 1]
        if not monos:
            if any(base):
                raise ReconstructionError(f"t{i + 1} is not flat and has no nonlinear correction")
            s.append(ti)
            continue
        polys = [t_ring.ring.from_dict({m: ONE}) for m in monos]
        columns = [_flatness_operator(pencil, alg, p) for p in polys]
        rows, rhs = _linear_system(columns, [-v for v in base])
        try:
            coeffs = solve_linear(rows, rhs, len(polys))
        except SingularSystemError as exc:
            raise ReconstructionError(f"no flat coordinate of the form t{i + 1} + ...: {exc.message}")
        value = ti
        for c, p in zip(coeffs, polys):
            if c:
                value += p * c
        s.append(value)
    inverse = triangular_inverse(t_ring, s_ring, s)
    logger.info("Flat coordinates: %s", "; ".join(f"s{i + 1} = {p.as_expr()}" for i, p in enumerate(s)))
    return FlatCoordinates(t_ring, s_ring, s, inverse)


def _s_ring(alg: AlgebraicRing, flat: FlatCoordinates) -> Tuple[AlgebraicRing, MapToRing]:
    """Same roots over the flat coordinates; relations rewritten through ``t = psi(s)``."""
    names = [s_name(i) for i in range(len(flat.s))]
    aux = [(name, alg.full.weights[alg.full.index(name)]) for name in alg.aux_names]
    full = GradedRing(names + [n for n, _ in aux], list(flat.s_ring.weights) + [w for _, w in aux])
    gens = []
    for name in alg.full.names:
        if alg.base.has(name):
            gens.append(full.convert(flat.inverse[alg.base.index(name)]))
        else:
            gens.append(full.gen(name))
    relations = [compose(rel, gens, full.ring) for rel in alg.relations]
    target = AlgebraicRing(names, flat.s_ring.weights, aux, relations)
    images = {name: flat.inverse[alg.base.index(name)] for name in alg.base.names}
    return target, alg.transform(target, images)


def to_flat(pencil: ReducedPencil, alg: AlgebraicRing, flat: FlatCoordinates, etas: Sequence[int]) -> FlatPencil:
    """Rewrite the pencil in the flat coordinates.

    ``Omega^{ab}(s) = ds^a/dt^u ds^b/dt^v Omega^{uv}`` and
    ``Gamma^{ab}_c(s) = sum_w (ds^a/dt^u d_w d_v s^b Omega^{uv} + ds^a/dt^u ds^b/dt^v Gamma^{uv}_w) dt^w/ds^c``.
    """
    r = len(etas)
    names = alg.base.names
    jac = [[alg.lift(partial(flat.s[a], names[u])) for u in range(r)] for a in range(r)]
    hess = [[[alg.lift(partial(partial(flat.s[b], names[v]), names[w])) for v in range(r)] for w in range(r)] for b in range(r)]
    s_images = [flat.t_ring.convert(p) for p in flat.s]
    inv_jac = [[alg.lift(compose(partial(flat.inverse[w], s_name(c)), s_images, flat.t_ring.ring)) for c in range(r)] for w in range(r)]
    target, mapping = _s_ring(alg, flat)

    def metric(O: Table) -> Table:
        out = []
        for a in range(r):
            row = []
            for b in range(r):
                value = alg.zero
                for u in range(r):
                    if not jac[a][u]:
                        continue
                    for v in range(r):
                        if jac[b][v] and O[u][v]:
                            value = value + jac[a][u] * jac[b][v] * O[u][v]
                row.append(mapping(value))
            out.append(row)
        return out

    def christoffel(O: Table, G: Christoffel) -> Christoffel:
        out = []
        for a in range(r):
            plane = []
            for b in range(r):
                partial_w = []
                for w in range(r):
                    value = alg.zero
                    for u in range(r):
                        if not jac[a][u]:
                            continue
                        for v in range(r):
                            if hess[b][w][v] and O[u][v]:
                                value = value + jac[a][u] * hess[b][w][v] * O[u][v]
                            if jac[b][v] and G[u][v][w]:
                                value = value + jac[a][u] * jac[b][v] * G[u][v][w]
                    partial_w.append(value)
                entry = []
                for c in range(r):
                    value = alg.zero
                    for w in range(r):
                        if partial_w[w] and inv_jac[w][c]:
                            value = value + partial_w[w] * inv_jac[w][c]
                    entry.append(mapping(value))
                plane.append(entry)
            out.append(plane)
        return out

    return FlatPencil(
        target,
        metric(pencil.Omega1),
        metric(pencil.Omega2),
        christoffel(pencil.Omega1, pencil.Gamma1),
        christoffel(pencil.Omega2, pencil.Gamma2),
        list(etas),
        flat,
    )


def flat_frame_failures(fp: FlatPencil) -> List[str]:
    """``Omega_1(s) = (eta_r + 1) antidiagonal``, ``Gamma_1(s) = 0`` and the ``s^1`` row identities."""
    ring, r = fp.ring, fp.r
    failures = []
    for a in range(r):
        for b in range(r):
            expected = ring.const(fp.eta_r + 1 if a + b == r - 1 else 0)
            if fp.Omega1[a][b] != expected:
                failures.append(f"Omega1(s)[{a + 1}][{b + 1}]")
            for c in range(r):
                if fp.Gamma1[a][b][c]:
                    failures.append(f"Gamma1(s)[{a + 1}][{b + 1}]_{c + 1}")
    for v in range(r):
        if fp.Omega2[0][v] != ring.gen(s_name(v)) * (fp.etas[v] + 1):
            failures.append(f"Omega2(s)[1][{v + 1}] != (eta+1) s{v + 1}")
        for k in range(r):
            expected = ring.const(fp.etas[v] if k == v else 0)
            if fp.Gamma2[0][v][k] != expected:
                failures.append(f"Gamma2(s)[1][{v + 1}]_{k + 1}")
    return failures


def _metric_failures(ring, g: Table, G: Christoffel, tag: str) -> List[str]:
    """Compatibility ``d_k g^{ij} = Gamma^{ij}_k + Gamma^{ji}_k`` and symmetry ``g^{is} Gamma^{jk}_s = g^{js} Gamma^{ik}_s``."""
    r = len(g)
    failures = []
    for i in range(r):
        for j in range(r):
            for k in range(r):
                if g[i][j].partial(s_name(k)) != G[i][j][k] + G[j][i][k]:
                    failures.append(f"{tag}: d{k + 1} g[{i + 1}][{j + 1}]")
    for i in range(r):
        for j in range(i + 1, r):
            for k in range(r):
                left = sum((g[i][s] * G[j][k][s] for s in range(r)), ring.zero)
                right = sum((g[j][s] * G[i][k][s] for s in range(r)), ring.zero)
                if left != right:
                    failures.append(f"{tag}: torsion ({i + 1},{j + 1},{k + 1})")
    return failures


def _christoffel_gradient(ring, G: Christoffel) -> List:
    """``dG[j][k][l][s] = d_s Gamma^{jk}_l``."""
    r = len(G)
    return [[[[G[j][k][l].partial(s_name(s)) if G[j][k][l] else ring.zero for s in range(r)] for l in range(r)] for k in range(r)] for j in range(r)]


def _curvature(ring, ga: Table, Ga: Christoffel, Gb: Christoffel, dGb, i, j, k, l) -> AlgebraicFn:
    """Bilinear curvature form: metric and first Christoffel factor from ``a``, second factor from ``b``."""
    r = len(ga)
    value = ring.zero
    for s in range(r):
        if ga[i][s]:
            value = value + ga[i][s] * (dGb[j][k][l][s] - dGb[j][k][s][l])
        value = value + Ga[i][j][s] * Gb[s][k][l] - Ga[i][k][s] * Gb[s][j][l]
    return value


def pencil_verify(fp: FlatPencil, full: bool = True) -> Dict[str, List[str]]:
    """Flatness of ``Omega_2 + lam Omega_1`` for formal ``lam`` and the quasihomogeneity relations.

    Returns failures keyed by certificate name.
    """
    ring, r = fp.ring, fp.r
    results: Dict[str, List[str]] = {"flat_frame": flat_frame_failures(fp)}
    results["compatibility"] = _metric_failures(ring, fp.Omega1, fp.Gamma1, "1") + _metric_failures(ring, fp.Omega2, fp.Gamma2, "2")
    cross = []
    for i in range(r):
        for j in range(i + 1, r):
            for k in range(r):
                left = sum((fp.Omega1[i][s] * fp.Gamma2[j][k][s] + fp.Omega2[i][s] * fp.Gamma1[j][k][s] for s in range(r)), ring.zero)
                right = sum((fp.Omega1[j][s] * fp.Gamma2[i][k][s] + fp.Omega2[j][s] * fp.Gamma1[i][k][s] for s in range(r)), ring.zero)
                if left != right:
                    cross.append(f"torsion lam^1 ({i + 1},{j + 1},{k + 1})")
    results["compatibility"] += cross
    curvature = []
    if full:
        dG1, dG2 = _christoffel_gradient(ring, fp.Gamma1), _christoffel_gradient(ring, fp.Gamma2)
        quads = list(itertools.product(range(r), repeat=4))
        for i, j, k, l in tqdm(quads, desc="curvature", disable=None, leave=False):
            parts = {
                0: _curvature(ring, fp.Omega2, fp.Gamma2, fp.Gamma2, dG2, i, j, k, l),
                1: _curvature(ring, fp.Omega1, fp.Gamma1, fp.Gamma2, dG2, i, j, k, l)
                + _curvature(ring, fp.Omega2, fp.Gamma2, fp.Gamma1, dG1, i, j, k, l),
                2: _curvature(ring, fp.Omega1, fp.Gamma1, fp.Gamma1, dG1, i, j, k, l),
            }
            for power, value in parts.items():
                if value:
                    curvature.append(f"lam^{power} ({i + 1},{j + 1},{k + 1},{l + 1})")
    results["curvature"] = curvature
    results["lie_derivatives"] = lie_derivative_failures(fp)
    spectrum = regularity_spectrum(fp)
    expected = [rat(eta) / (fp.eta_r + 1) for eta in fp.etas]
    results["regularity"] = [] if spectrum == expected else [f"R spectrum {spectrum} != {expected}"]
    return results


def lie_derivative_failures(fp: FlatPencil) -> List[str]:
    """``Lie_E Omega_2 = (d-1) Omega_2``, ``Lie_E Omega_1 = (d-2) Omega_1``, ``Lie_e Omega_2 = Omega_1``, ``Lie_e Omega_1 = 0``, ``[e, E] = e``."""
    ring, r = fp.ring, fp.r
    d, degrees = fp.charge, fp.degrees
    E = {s_name(i): ring.gen(s_name(i)) * degrees[i] for i in range(r)}
    unity = s_name(r - 1)
    failures = []
    for a in range(r):
        for b in range(r):
            for tag, g, factor in (("Omega2", fp.Omega2, d - 1), ("Omega1", fp.Omega1, d - 2)):
                lie = g[a][b].apply_field(E) - g[a][b] * (degrees[a] + degrees[b])
                if lie != g[a][b] * factor:
                    failures.append(f"Lie_E {tag}[{a + 1}][{b + 1}]")
            if fp.Omega2[a][b].partial(unity) != fp.Omega1[a][b]:
                failures.append(f"Lie_e Omega2[{a + 1}][{b + 1}] != Omega1")
            if fp.Omega1[a][b].partial(unity):
                failures.append(f"Lie_e Omega1[{a + 1}][{b + 1}] != 0")
    # [e, E] = d_r e
    if degrees[-1] != 1:
        failures.append(f"[e, E] = {format_rat(degrees[-1])} e")
    return failures


def regularity_spectrum(fp: FlatPencil) -> List:
    """Diagonal of ``R = (d-1)/2 + grad E`` in flat coordinates, checked to be diagonal."""
    ring, r = fp.ring, fp.r
    rows = []
    for i in range(r):
        Ej = [ring.gen(s_name(j)) * fp.degrees[j] for j in range(r)]
        rows.append([Ej[j].partial(s_name(i)) for j in range(r)])
    spectrum = []
    for i in range(r):
        for j in range(r):
            value = rows[i][j] + (ring.const((fp.charge - 1) / 2) if i == j else ring.zero)
            if i == j:
                if not value.is_polynomial() or not value.num.is_ground:
                    raise ReconstructionError("grad E is not constant in flat coordinates")
                spectrum.append(value.num.LC if value else ZERO)
            elif value:
                raise ReconstructionError("grad E is not diagonal in flat coordinates")
    return sorted(spectrum)


def potential_reconstruct(fp: FlatPencil) -> FrobeniusPotential:
    """Integrate ``d_a d_b F = g~_2^{a'b'} / (d - 1 + d_a' + d_b')`` (``a' = r + 1 - a``) with the Euler operator.

    ``g~ = Omega / (eta_r + 1)`` so that ``eta^{ab}`` is the antidiagonal.

    Raises:
        ReconstructionError: if the reconstructed gradient is not closed
    """
    ring, r = fp.ring, fp.r
    d, degrees = fp.charge, fp.degrees
    scale = ONE / (fp.eta_r + 1)
    s = [ring.gen(s_name(i)) for i in range(r)]
    H = [[ring.zero] * r for _ in range(r)]
    for a in range(r):
        for b in range(r):
            ap, bp = r - 1 - a, r - 1 - b
            denominator = d - 1 + degrees[ap] + degrees[bp]
            H[a][b] = fp.Omega2[ap][bp] * (scale / denominator)
    gradient = []
    for b in range(r):
        value = sum((s[a] * H[a][b] * degrees[a] for a in range(r)), ring.zero)
        gradient.append(value * (ONE / (3 - d - degrees[b])))
    F = sum((s[b] * gradient[b] * degrees[b] for b in range(r)), ring.zero) * (ONE / (3 - d))
    failures = []
    for b in range(r):
        if F.partial(s_name(b)) != gradient[b]:
            failures.append(f"dF/ds{b + 1}")
        for c in range(r):
            if gradient[b].partial(s_name(c)) != H[c][b]:
                failures.append(f"d{c + 1} d{b + 1} F")
    if failures:
        raise ReconstructionError("reconstructed potential is not closed", failures)
    logger.info("Potential reconstructed: charge %s, degrees %s", format_rat(d), [format_rat(x) for x in degrees])
    return FrobeniusPotential(ring, F, gradient, H, d, degrees)


def third_derivatives(pot: FrobeniusPotential) -> Dict[Tuple[int, int, int], AlgebraicFn]:
    r = pot.r
    out = {}
    for i in range(r):
        for j in range(i, r):
            for k in range(j, r):
                value = pot.hessian[j][k].partial(s_name(i))
                for key in set(itertools.permutations((i, j, k))):
                    out[key] = value
    return out


def wdvv_verify(pot: FrobeniusPotential, full: bool = True) -> Dict[str, List[str]]:
    """WDVV, unity, constancy of ``eta`` and the Euler identity; failures keyed by certificate name."""
    ring, r = pot.ring, pot.r
    c = third_derivatives(pot)
    results: Dict[str, List[str]] = {}
    unity = []
    for i in range(r):
        for j in range(r):
            if c[(r - 1, i, j)] != ring.const(pot.eta(i, j)):
                unity.append(f"d{r} d{i + 1} d{j + 1} F != eta")
            for k in range(r):
                contracted = sum((c[(r - 1, i, p)] * pot.eta(p, k) for p in range(r)), ring.zero)
                if contracted != ring.const(ONE if i == k else ZERO):
                    unity.append(f"C^{k + 1}_{{{r}{i + 1}}}")
    results["unity"] = unity
    euler = sum((ring.gen(s_name(i)) * pot.gradient[i] * pot.degrees[i] for i in range(r)), ring.zero)
    results["euler"] = [] if euler == pot.F * (3 - pot.charge) else ["sum d_i s^i dF/ds^i != (3-d) F"]
    wdvv = []
    if full:
        quads = [(i, j, k, l) for i in range(r) for j in range(r) for k in range(r) for l in range(r) if (i, j) <= (k, l)]
        for i, j, k, l in tqdm(quads, desc="wdvv", disable=None, leave=False):
            left = ring.zero
            right = ring.zero
            for p in range(r):
                q = r - 1 - p
                left = left + c[(i, j, p)] * c[(q, k, l)]
                right = right + c[(i, k, p)] * c[(q, j, l)]
            if left != right:
                wdvv.append(f"({i + 1},{j + 1},{k + 1},{l + 1})")
    results["wdvv"] = wdvv
    return results
