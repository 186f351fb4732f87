"""Functions on a triangular algebraic extension of a polynomial ring.

An ``AlgebraicRing`` adjoins auxiliary roots ``T_j`` to base coordinates,
each constrained by a monic relation ``m_j(base, T_j) = 0`` involving only
the base variables and ``T_j``. Elements (``AlgebraicFn``) are stored as a
reduced numerator (degree below ``deg m_j`` in every ``T_j``) over a
denominator free of the auxiliaries. Partial derivatives use implicit
differentiation of the relations.
"""
import itertools
import logging
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from sympy.polys.matrices import DomainMatrix
from sympy.polys.polyerrors import ExactQuotientFailed

from walgebra.exceptions import BranchPointError, VariableTableError
from walgebra.services.symcore import (
    ZERO,
    GradedRing,
    Poly,
    compose,
    format_rat,
    poly_from_terms,
    rat,
)

logger = logging.getLogger(__name__)


class AlgebraicRing:
    """Base coordinates plus auxiliary roots of monic relations."""

    def __init__(
        self,
        base_names: Sequence[str],
        base_weights: Sequence,
        aux: Sequence[Tuple[str, object]] = (),
        relations: Sequence = (),
    ):
        self.base = GradedRing(base_names, base_weights)
        self.aux_names = tuple(name for name, _ in aux)
        self.full = GradedRing(list(base_names) + list(self.aux_names), list(base_weights) + [w for _, w in aux])
        if len(relations) != len(self.aux_names):
            raise VariableTableError("one relation per auxiliary root is required")
        self._aux_index = [self.full.index(name) for name in self.aux_names]
        self.relations: List[Poly] = []
        self.degrees: List[int] = []
        self._tails: List[Dict[int, Poly]] = []
        for j, relation in enumerate(relations):
            relation = relation if isinstance(relation, Poly) and relation.ring == self.full.ring else self.full.convert(relation)
            self.relations.append(self._validate_relation(j, relation))
        self._dT: Dict[Tuple[int, str], "AlgebraicFn"] = {}

    def _validate_relation(self, j: int, relation: Poly) -> Poly:
        idx = self._aux_index[j]
        for monom in relation.itermonoms():
            for other, oidx in enumerate(self._aux_index):
                if other != j and monom[oidx]:
                    raise VariableTableError(f"relation for {self.aux_names[j]} involves {self.aux_names[other]}")
        degree = max((m[idx] for m in relation.itermonoms()), default=0)
        if degree < 1:
            raise VariableTableError(f"relation for {self.aux_names[j]} does not involve it")
        by_power = self._split(relation, idx)
        lead = by_power[degree]
        if not lead.is_ground:
            raise BranchPointError(f"leading coefficient of the relation for {self.aux_names[j]} is not constant")
        lead_value = lead.LC
        tail = {}
        for power, coeff in by_power.items():
            if power < degree:
                tail[power] = -coeff.quo_ground(lead_value)
        self.degrees.append(degree)
        self._tails.append(tail)
        return relation if lead_value == 1 else relation.quo_ground(lead_value)

    def __repr__(self) -> str:
        rels = ", ".join(f"{n}: {r.as_expr()} = 0" for n, r in zip(self.aux_names, self.relations))
        return f"AlgebraicRing(base={self.base.names}, {rels})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AlgebraicRing)
            and self.full == other.full
            and self.aux_names == other.aux_names
            and self.relations == other.relations
        )

    def __hash__(self) -> int:
        return hash((self.full, self.aux_names))

    @staticmethod
    def _split(p: Poly, idx: int) -> Dict[int, Poly]:
        groups: Dict[int, Dict] = {}
        for monom, coeff in p.iterterms():
            key = monom[:idx] + (0,) + monom[idx + 1:]
            groups.setdefault(monom[idx], {})[key] = coeff
        return {power: poly_from_terms(p.ring, terms) for power, terms in groups.items()}

    @property
    def is_trivial(self) -> bool:
        return not self.aux_names

    def reduce(self, p: Poly) -> Poly:
        """Normal form modulo the relations."""
        for j, idx in enumerate(self._aux_index):
            degree = self.degrees[j]
            if not any(m[idx] >= degree for m in p.itermonoms()):
                continue
            gen = self.full.ring.gens[idx]
            coeffs = self._split(p, idx)
            top = max(coeffs)
            for power in range(top, degree - 1, -1):
                c = coeffs.pop(power, None)
                if not c:
                    continue
                for k, t in self._tails[j].items():
                    target = power - degree + k
                    coeffs[target] = coeffs[target] + c * t if target in coeffs else c * t
            p = self.full.zero
            for power, c in coeffs.items():
                if c:
                    p += c * gen ** power
        return p

    def gen(self, name: str) -> "AlgebraicFn":
        return AlgebraicFn(self, self.full.gen(name))

    def const(self, value) -> "AlgebraicFn":
        return AlgebraicFn(self, self.full.const(value))

    @property
    def zero(self) -> "AlgebraicFn":
        return AlgebraicFn(self, self.full.zero)

    @property
    def one(self) -> "AlgebraicFn":
        return AlgebraicFn(self, self.full.one)

    def lift(self, p: Poly, den: Optional[Poly] = None) -> "AlgebraicFn":
        """Element from a polynomial of any ring whose variables exist here by name."""
        num = p if p.ring == self.full.ring else self.full.convert(p)
        if den is not None:
            den = den if den.ring == self.full.ring else self.full.convert(den)
        return AlgebraicFn(self, num, den)

    def basis(self) -> List[Poly]:
        """Monomials ``prod T_j**e_j`` with ``e_j < deg m_j``."""
        ranges = [range(d) for d in self.degrees]
        gens = [self.full.ring.gens[idx] for idx in self._aux_index]
        out = []
        for exps in itertools.product(*ranges):
            mono = self.full.one
            for g, e in zip(gens, exps):
                mono *= g ** e
            out.append(mono)
        return out

    def coordinates(self, p: Poly) -> List[Poly]:
        """Coefficients of a reduced numerator on ``basis()``; entries are base polynomials."""
        if self.is_trivial:
            return [p]
        index = {tuple(m[i] for i in self._aux_index): k for k, m in enumerate(b.LM for b in self.basis())}
        groups: Dict[int, Dict] = {}
        for monom, coeff in p.iterterms():
            k = index[tuple(monom[i] for i in self._aux_index)]
            key = list(monom)
            for i in self._aux_index:
                key[i] = 0
            groups.setdefault(k, {})[tuple(key)] = coeff
        out = [self.full.zero] * len(index)
        for k, terms in groups.items():
            out[k] = poly_from_terms(self.full.ring, terms)
        return out

    def inverse_numerator(self, num: Poly) -> Tuple[Poly, Poly]:
        """``1/num`` as ``(numerator, base denominator)`` via the adjugate of the multiplication matrix."""
        if not num:
            raise BranchPointError("inverse of zero")
        if self.is_trivial or all(not m[i] for m in num.itermonoms() for i in self._aux_index):
            return self.full.one, num
        basis = self.basis()
        domain = self.base.ring.to_domain()
        size = len(basis)
        dok = {}
        for col, b in enumerate(basis):
            for row, c in enumerate(self.coordinates(self.reduce(num * b))):
                if c:
                    dok[(row, col)] = self.base.convert(c)
        matrix = DomainMatrix.from_dok(dok, (size, size), domain)
        adj, det = matrix.to_dense().adj_det()
        if not det:
            raise BranchPointError("element is a zero divisor on the branch locus")
        adj_rows = adj.to_list()
        result = self.full.zero
        for row, b in enumerate(basis):
            entry = adj_rows[row][0]
            if entry:
                result += self.full.convert(entry) * b
        return result, self.full.convert(det)

    def root_derivative(self, j: int, name: str) -> "AlgebraicFn":
        """``dT_j / d(name)`` from ``m_j = 0``."""
        key = (j, name)
        if key not in self._dT:
            relation = self.relations[j]
            gen = self.full.ring.gens[self._aux_index[j]]
            dm = relation.diff(self.full.gen(name))
            dT = relation.diff(gen)
            inv_num, inv_den = self.inverse_numerator(self.reduce(dT))
            self._dT[key] = AlgebraicFn(self, -dm * inv_num, inv_den)
        return self._dT[key]

    def transform(self, target: "AlgebraicRing", images: Mapping[str, Poly]) -> "MapToRing":
        return MapToRing(self, target, images)

    def to_json(self) -> Dict:
        return {
            "base": [{"name": n, "weight": format_rat(w)} for n, w in zip(self.base.names, self.base.weights)],
            "aux": [
                {
                    "name": name,
                    "weight": format_rat(self.full.weights[idx]),
                    "relation": self.full.to_json(rel)["terms"],
                }
                for name, idx, rel in zip(self.aux_names, self._aux_index, self.relations)
            ],
        }

    @classmethod
    def from_json(cls, data: Dict) -> "AlgebraicRing":
        base_names = [v["name"] for v in data["base"]]
        base_weights = [rat(v["weight"]) for v in data["base"]]
        aux = [(a["name"], rat(a["weight"])) for a in data["aux"]]
        full = GradedRing(base_names + [n for n, _ in aux], base_weights + [w for _, w in aux])
        relations = []
        for a in data["aux"]:
            terms = {tuple(t["exps"]): rat(t["coeff"]) for t in a["relation"]}
            relations.append(poly_from_terms(full.ring, terms))
        return cls(base_names, base_weights, aux, relations)


class MapToRing:
    """Ring map sending base variables to given polynomials and each ``T_j`` to the same-named root."""

    def __init__(self, source: AlgebraicRing, target: AlgebraicRing, images: Mapping[str, Poly]):
        gens = []
        for name in source.full.names:
            if name in images:
                image = images[name]
                gens.append(image if image.ring == target.full.ring else target.full.convert(image))
            elif target.full.has(name):
                gens.append(target.full.gen(name))
            else:
                gens.append(None)
        self.source = source
        self.target = target
        self.gens = gens

    @classmethod
    def from_generators(cls, source: AlgebraicRing, target: AlgebraicRing, gens: Sequence[Optional[Poly]]) -> "MapToRing":
        """Map given by the image of every generator of ``source.full``, in order."""
        if len(gens) != source.full.ngens:
            raise VariableTableError(f"{len(gens)} images for {source.full.ngens} generators")
        mapping = cls(source, target, {})
        mapping.gens = [g if g is None or g.ring == target.full.ring else target.full.convert(g) for g in gens]
        return mapping

    def poly(self, p: Poly) -> Poly:
        return compose(p, self.gens, self.target.full.ring)

    def __call__(self, a: "AlgebraicFn") -> "AlgebraicFn":
        num = self.poly(a.num)
        den = self.poly(a.den)
        if any(m[i] for m in den.itermonoms() for i in self.target._aux_index):
            inv_num, inv_den = self.target.inverse_numerator(self.target.reduce(den))
            return AlgebraicFn(self.target, num * inv_num, inv_den)
        return AlgebraicFn(self.target, num, den)


def _quotient(a: Poly, b: Poly) -> Optional[Poly]:
    """``a / b`` when ``b`` divides ``a``, else None."""
    try:
        return a.exquo(b)
    except ExactQuotientFailed:
        return None


class AlgebraicFn:
    """``num / den`` with ``num`` reduced modulo the relations and ``den`` free of auxiliaries."""

    __slots__ = ("ring", "num", "den")

    def __init__(self, ring: AlgebraicRing, num: Poly, den: Optional[Poly] = None):
        self.ring = ring
        num = ring.reduce(num)
        if den is None:
            den = ring.full.one
        if not den:
            raise ZeroDivisionError("zero denominator")
        if den.is_ground:
            if den.LC != 1:
                num = num.quo_ground(den.LC)
            den = ring.full.one
        self.num = num
        self.den = den

    def __repr__(self) -> str:
        if self.den == self.ring.full.one:
            return f"AlgebraicFn({self.num.as_expr()})"
        return f"AlgebraicFn(({self.num.as_expr()}) / ({self.den.as_expr()}))"

    def _coerce(self, other) -> "AlgebraicFn":
        if isinstance(other, AlgebraicFn):
            if other.ring is not self.ring and other.ring != self.ring:
                raise VariableTableError("operands live in different algebraic rings")
            return other
        if isinstance(other, Poly):
            return self.ring.lift(other)
        return self.ring.const(other)

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_zero(self) -> bool:
        return not self.num

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        return not self.ring.reduce(self.num * other.den - other.num * self.den)

    def __hash__(self):
        raise TypeError("AlgebraicFn is unhashable")

    def __add__(self, other) -> "AlgebraicFn":
        other = self._coerce(other)
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return AlgebraicFn(self.ring, self.num + other.num, self.den)
        one = self.ring.full.one
        if self.den != one and other.den != one:
            factor = _quotient(other.den, self.den)
            if factor is not None:
                return AlgebraicFn(self.ring, self.num * factor + other.num, other.den)
            factor = _quotient(self.den, other.den)
            if factor is not None:
                return AlgebraicFn(self.ring, self.num + other.num * factor, self.den)
        return AlgebraicFn(self.ring, self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "AlgebraicFn":
        return AlgebraicFn(self.ring, -self.num, self.den)

    def __sub__(self, other) -> "AlgebraicFn":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "AlgebraicFn":
        return self._coerce(other) - self

    def __mul__(self, other) -> "AlgebraicFn":
        other = self._coerce(other)
        if not self.num or not other.num:
            return self.ring.zero
        return AlgebraicFn(self.ring, self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "AlgebraicFn":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = self.ring.one
        for _ in range(exponent):
            result = result * self
        return result

    def inverse(self) -> "AlgebraicFn":
        inv_num, inv_den = self.ring.inverse_numerator(self.num)
        return AlgebraicFn(self.ring, self.den * inv_num, inv_den).cancel()

    def __truediv__(self, other) -> "AlgebraicFn":
        other = self._coerce(other)
        return self * other.inverse()

    def cancel(self) -> "AlgebraicFn":
        """Remove the common polynomial factor of numerator and denominator."""
        if self.den.is_ground or not self.num:
            return self
        g = self.num.gcd(self.den)
        if g.is_ground:
            return self
        return AlgebraicFn(self.ring, self.num.exquo(g), self.den.exquo(g))

    def is_polynomial(self) -> bool:
        return self.den == self.ring.full.one

    def partial(self, name: str) -> "AlgebraicFn":
        """Derivative along a base coordinate, differentiating the roots implicitly."""
        ring = self.ring
        var = ring.full.gen(name)
        dnum = AlgebraicFn(ring, self.num.diff(var))
        for j, idx in enumerate(ring._aux_index):
            dT_num = self.num.diff(ring.full.ring.gens[idx])
            if dT_num:
                dnum = dnum + AlgebraicFn(ring, dT_num) * ring.root_derivative(j, name)
        if self.den == ring.full.one:
            return dnum
        dden = self.den.diff(var)
        result = AlgebraicFn(ring, dnum.num * self.den - self.num * dden * dnum.den, dnum.den * self.den ** 2)
        return result.cancel()

    def apply_field(self, field: Mapping[str, "AlgebraicFn"]) -> "AlgebraicFn":
        """``sum_k field[k] * d/d(k)`` applied to this function."""
        out = self.ring.zero
        for name, component in field.items():
            if component:
                out = out + component * self.partial(name)
        return out

    def numerator_terms(self) -> Dict[Tuple[int, ...], object]:
        return dict(self.num.iterterms())

    def weighted_degrees(self) -> List:
        """Weighted degrees of the numerator minus the (homogeneous) denominator degree."""
        full = self.ring.full
        den_degrees = set(full.degrees(self.den))
        if len(den_degrees) != 1:
            return []
        shift = den_degrees.pop()
        return sorted(set(d - shift for d in full.degrees(self.num)))

    def to_json(self) -> Dict:
        full = self.ring.full
        return {"num": full.to_json(self.num)["terms"], "den": full.to_json(self.den)["terms"]}

    @classmethod
    def from_json(cls, ring: AlgebraicRing, data: Dict) -> "AlgebraicFn":
        def read(terms):
            return poly_from_terms(ring.full.ring, {tuple(t["exps"]): rat(t["coeff"]) for t in terms})

        den = read(data["den"]) if data["den"] else ring.full.one
        return cls(ring, read(data["num"]), den)


def change_root(
    ring: AlgebraicRing, j: int, scale, shift: Poly, new_name: Optional[str] = None
) -> Tuple[AlgebraicRing, MapToRing]:
    """Substitute ``T_j = scale * T' + shift`` (``shift`` a base polynomial) and renormalize the relation.

    Returns the new ring and the map carrying old functions to it.
    """
    scale = rat(scale)
    if not scale:
        raise ValueError("root rescaling by zero")
    name = ring.aux_names[j]
    new_name = new_name or name
    aux = [(n if k != j else new_name, ring.full.weights[idx]) for k, (n, idx) in enumerate(zip(ring.aux_names, ring._aux_index))]
    target_full = GradedRing(list(ring.base.names) + [n for n, _ in aux], list(ring.base.weights) + [w for _, w in aux])
    images = []
    for k, var in enumerate(ring.full.names):
        if var == name:
            images.append(target_full.gen(new_name) * scale + target_full.convert(shift))
        else:
            images.append(target_full.gen(var))
    new_relations = []
    for k, relation in enumerate(ring.relations):
        image = compose(relation, images, target_full.ring)
        if k == j:
            image = image.quo_ground(scale ** ring.degrees[j])
        new_relations.append(image)
    target = AlgebraicRing(ring.base.names, ring.base.weights, aux, new_relations)
    return target, MapToRing.from_generators(ring, target, images)


def depress(ring: AlgebraicRing, j: int = 0) -> Tuple[AlgebraicRing, MapToRing, Poly]:
    """Remove the ``T_j**(d-1)`` term of the relation by a base-polynomial shift.

    Returns the new ring, the map, and the shift ``s`` with ``T_j = T' + s``.
    """
    relation = ring.relations[j]
    idx = ring._aux_index[j]
    degree = ring.degrees[j]
    by_power = AlgebraicRing._split(relation, idx)
    lead = by_power[degree].LC
    sub = by_power.get(degree - 1, ring.full.zero)
    shift = -sub.quo_ground(lead * degree)
    target, mapping = change_root(ring, j, 1, shift)
    return target, mapping, shift


def common_numerators(values: Sequence[AlgebraicFn]) -> Tuple[List[Poly], Poly]:
    """Numerators over a shared denominator (the product of the distinct denominators)."""
    if not values:
        raise ValueError("no values")
    ring = values[0].ring
    dens: List[Poly] = []
    for v in values:
        if v.den not in dens:
            dens.append(v.den)
    common = ring.full.one
    for d in dens:
        common *= d
    out = []
    for v in values:
        factor = common.exquo(v.den)
        out.append(ring.reduce(v.num * factor))
    return out, common


__all__ = [
    "AlgebraicRing",
    "AlgebraicFn",
    "MapToRing",
    "change_root",
    "depress",
    "common_numerators",
    "ZERO",
]
