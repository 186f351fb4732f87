"""Differential polynomials and local brackets.

A ``JetRing`` is a ``GradedRing`` whose generators are the jets ``u_k`` of a
list of fields (``k`` = number of x-derivatives) plus optional constants such
as the pencil parameter. A local bracket ``{u(x), v(y)} = sum A_m(x) d^m/dx^m
delta(x - y)`` is stored as the differential operator ``sum A_m D^m``
(``DeltaDist``); composition, adjoints and the two-point normal form act on
that operator form.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from sympy.polys.rings import PolyElement

from walgebra.exceptions import JetOrderError, VariableTableError
from walgebra.services.symcore import (
    ZERO,
    GradedRing,
    Poly,
    binomial,
    compose,
    format_rat,
    poly_from_terms,
    poly_to_json,
    poly_from_json,
    rat,
)

logger = logging.getLogger(__name__)


def jet_name(field: str, order: int) -> str:
    return f"{field}_{order}"


class JetRing(GradedRing):
    """Polynomial ring in jet variables ``field_k`` (0 <= k <= order) and constants.

    The jet ``field_k`` has weight ``weight(field) + k``.
    """

    def __init__(
        self,
        fields: Sequence[str],
        weights: Sequence,
        order: int,
        constants: Sequence[Tuple[str, object]] = (),
    ):
        if order < 0:
            raise JetOrderError("jet order must be nonnegative")
        self.fields = tuple(fields)
        self.field_weights = tuple(rat(w) for w in weights)
        self.order = order
        self.constants = tuple(name for name, _ in constants)
        names, jet_weights = [], []
        for field, weight in zip(self.fields, self.field_weights):
            for k in range(order + 1):
                names.append(jet_name(field, k))
                jet_weights.append(weight + k)
        for name, weight in constants:
            names.append(name)
            jet_weights.append(rat(weight))
        super().__init__(names, jet_weights)
        self._field_index = {f: i for i, f in enumerate(self.fields)}
        # index of the next jet for the total derivative, -1 at the top order
        self._next = []
        self._jet_of = []
        for i, field in enumerate(self.fields):
            for k in range(order + 1):
                self._next.append(i * (order + 1) + k + 1 if k < order else -1)
                self._jet_of.append((field, k))
        for name in self.constants:
            self._next.append(None)
            self._jet_of.append(None)

    def __repr__(self) -> str:
        return f"JetRing(fields={self.fields}, order={self.order}, constants={self.constants})"

    def jet_index(self, field: str, k: int) -> int:
        if k > self.order:
            raise JetOrderError(f"jet {field}_{k} beyond order {self.order}")
        return self._field_index[field] * (self.order + 1) + k

    def jet(self, field: str, k: int = 0) -> Poly:
        return self.ring.gens[self.jet_index(field, k)]

    def field_of(self, index: int) -> Optional[Tuple[str, int]]:
        return self._jet_of[index]

    def differential_degree(self, monom) -> int:
        total = 0
        for idx, e in enumerate(monom):
            if e and self._jet_of[idx] is not None:
                total += e * self._jet_of[idx][1]
        return total

    def differential_part(self, p: Poly, degree: int) -> Poly:
        return poly_from_terms(self.ring, {m: c for m, c in p.iterterms() if self.differential_degree(m) == degree})

    def constant_part(self, p: Poly, name: str, power: int) -> Poly:
        """Coefficient of ``name**power`` (as a polynomial free of ``name``)."""
        idx = self.index(name)
        out = {}
        for monom, coeff in p.iterterms():
            if monom[idx] == power:
                key = monom[:idx] + (0,) + monom[idx + 1:]
                out[key] = coeff
        return poly_from_terms(self.ring, out)

    def total_derivative(self, p: Poly, times: int = 1) -> Poly:
        """Total x-derivative; each application raises the weighted degree by one."""
        for _ in range(times):
            if not p:
                return p
            acc: Dict[tuple, object] = {}
            for monom, coeff in p.iterterms():
                for idx, e in enumerate(monom):
                    if not e:
                        continue
                    nxt = self._next[idx]
                    if nxt is None:
                        continue
                    if nxt == -1:
                        field, k = self._jet_of[idx]
                        raise JetOrderError(f"derivative of {field}_{k} exceeds jet order {self.order}")
                    new = list(monom)
                    new[idx] -= 1
                    new[nxt] += 1
                    key = tuple(new)
                    acc[key] = acc.get(key, ZERO) + coeff * e
            p = poly_from_terms(self.ring, acc)
        return p

    def partial(self, p: Poly, field: str, k: int) -> Poly:
        return p.diff(self.jet(field, k))

    def frechet(self, p: Poly, field: str) -> "DeltaDist":
        """Fréchet derivative of ``p`` along ``field`` as the operator sum_k dp/d(field_k) D^k."""
        terms = {}
        for k in range(self.order + 1):
            coeff = p.diff(self.jet(field, k))
            if coeff:
                terms[k] = coeff
        return DeltaDist(self, terms)

    def max_jet(self, p: Poly, field: str) -> int:
        """Highest derivative order of ``field`` occurring in ``p`` (-1 if absent)."""
        start = self.jet_index(field, 0)
        best = -1
        for monom in p.itermonoms():
            for k in range(self.order + 1):
                if monom[start + k]:
                    best = max(best, k)
        return best

    def truncate(self, p: Poly, degree: int) -> Poly:
        """Drop monomials of polynomial degree (in jets, constants excluded) above ``degree``."""
        jets = len(self.fields) * (self.order + 1)
        return poly_from_terms(self.ring, {m: c for m, c in p.iterterms() if sum(m[:jets]) <= degree})

    def jet_images(self, images: Mapping[str, Poly], target: "JetRing") -> List[Optional[Poly]]:
        """Images of every generator under a substitution given on the 0-jets of the fields.

        Higher jets map to total derivatives of the images in ``target``;
        fields absent from ``images`` map to zero, constants map by name.
        """
        result: List[Optional[Poly]] = []
        for field in self.fields:
            image = images.get(field, target.zero)
            for k in range(self.order + 1):
                result.append(image)
                if k < self.order:
                    image = target.total_derivative(image)
        for name in self.constants:
            result.append(target.gen(name) if target.has(name) else None)
        return result

    def substitute_fields(self, p: Poly, images: Mapping[str, Poly], target: "JetRing", cache=None) -> Poly:
        gens = cache if cache is not None else self.jet_images(images, target)
        return compose(p, gens, target.ring)


class DeltaDist:
    """Local distribution ``sum_m A_m(x) delta^(m)(x - y)``, i.e. the operator ``sum_m A_m D^m``."""

    __slots__ = ("jets", "terms")

    def __init__(self, jets: JetRing, terms: Optional[Mapping[int, Poly]] = None):
        self.jets = jets
        self.terms: Dict[int, Poly] = {}
        for m, coeff in (terms or {}).items():
            if m < 0:
                raise ValueError("negative delta order")
            if coeff:
                self.terms[m] = coeff

    @classmethod
    def multiplication(cls, jets: JetRing, coeff: Poly) -> "DeltaDist":
        return cls(jets, {0: coeff})

    @classmethod
    def derivation(cls, jets: JetRing, order: int = 1) -> "DeltaDist":
        return cls(jets, {order: jets.one})

    def __repr__(self) -> str:
        parts = [f"({c})*D^{m}" for m, c in sorted(self.terms.items())]
        return " + ".join(parts) or "0"

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DeltaDist):
            return NotImplemented
        return self.terms == other.terms

    def _check(self, other: "DeltaDist"):
        if other.jets is not self.jets and other.jets != self.jets:
            raise VariableTableError("distributions over different jet rings")

    @property
    def order(self) -> int:
        return max(self.terms) if self.terms else -1

    def coefficient(self, m: int) -> Poly:
        return self.terms.get(m, self.jets.zero)

    def __add__(self, other: "DeltaDist") -> "DeltaDist":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return DeltaDist(self.jets, out)

    def __sub__(self, other: "DeltaDist") -> "DeltaDist":
        return self + (-other)

    def __neg__(self) -> "DeltaDist":
        return DeltaDist(self.jets, {m: -c for m, c in self.terms.items()})

    def scale(self, factor) -> "DeltaDist":
        """Left multiplication by a rational or a polynomial."""
        if not isinstance(factor, PolyElement):
            factor = self.jets.const(factor)
        if not factor:
            return DeltaDist(self.jets)
        return DeltaDist(self.jets, {m: factor * c for m, c in self.terms.items()})

    def map_coefficients(self, func) -> "DeltaDist":
        return DeltaDist(self.jets, {m: func(c) for m, c in self.terms.items()})

    def compose(self, other: "DeltaDist") -> "DeltaDist":
        """Operator product ``self o other``."""
        self._check(other)
        jets = self.jets
        out: Dict[int, Poly] = {}
        derivs: Dict[Tuple[int, int], Poly] = {}
        for m, a in self.terms.items():
            for k, b in other.terms.items():
                for j in range(m + 1):
                    key = (k, j)
                    if key not in derivs:
                        derivs[key] = b if j == 0 else jets.total_derivative(derivs[(k, j - 1)])
                    bj = derivs[key]
                    if not bj:
                        continue
                    term = a * bj * binomial(m, j)
                    order = m - j + k
                    out[order] = out[order] + term if order in out else term
        return DeltaDist(jets, out)

    def compose_left(self, coeff: Poly) -> "DeltaDist":
        return self.scale(coeff)

    def compose_right(self, coeff: Poly) -> "DeltaDist":
        """``self o coeff`` for a multiplication operator."""
        return self.compose(DeltaDist.multiplication(self.jets, coeff))

    def adjoint(self) -> "DeltaDist":
        """Formal adjoint; equals the kernel with x and y exchanged, in normal form."""
        jets = self.jets
        out: Dict[int, Poly] = {}
        for m, c in self.terms.items():
            sign = -1 if m % 2 else 1
            deriv = c
            for j in range(m + 1):
                if j:
                    deriv = jets.total_derivative(deriv)
                if not deriv:
                    break
                term = deriv * (sign * binomial(m, j))
                order = m - j
                out[order] = out[order] + term if order in out else term
        return DeltaDist(jets, out)

    def is_skew(self, partner: "DeltaDist") -> bool:
        """True when ``K^{uv}(x, y) = -K^{vu}(y, x)`` with ``self = K^{uv}`` and ``partner = K^{vu}``."""
        return not (self + partner.adjoint())

    def symbol(self, variable: Poly) -> Poly:
        """``sum_m A_m variable**m`` with ``variable`` a constant of the jet ring."""
        out = self.jets.zero
        for m, c in self.terms.items():
            out += c * variable ** m
        return out

    def to_json(self) -> Dict:
        return {str(m): poly_to_json(self.jets, c)["terms"] for m, c in sorted(self.terms.items())}


@dataclass(frozen=True)
class TwoPointTerm:
    """``x_coeff(x) * y_coeff(y) * delta^(order)(x - y)``."""

    x_coeff: Poly
    y_coeff: Poly
    order: int


def delta_normal_form(jets: JetRing, terms: Iterable[TwoPointTerm]) -> DeltaDist:
    """Move every y-coefficient to x: ``f(y) delta^(m) = sum_k C(m,k) f^(k)(x) delta^(m-k)``."""
    out: Dict[int, Poly] = {}
    for term in terms:
        deriv = term.y_coeff
        for k in range(term.order + 1):
            if k:
                deriv = jets.total_derivative(deriv)
            if not deriv:
                break
            value = term.x_coeff * deriv * binomial(term.order, k)
            order = term.order - k
            out[order] = out[order] + value if order in out else value
    return DeltaDist(jets, out)


def normal_form_terms(dist: DeltaDist) -> List[TwoPointTerm]:
    """A normal form read back as two-point terms (constant y-coefficients)."""
    return [TwoPointTerm(c, dist.jets.one, m) for m, c in sorted(dist.terms.items())]


def dist_from_json(jets: JetRing, data: Dict) -> DeltaDist:
    table = {"vars": [{"name": n, "weight": format_rat(w)} for n, w in zip(jets.names, jets.weights)]}
    terms = {}
    for m, poly_terms in data.items():
        terms[int(m)] = poly_from_json({**table, "terms": poly_terms}, jets)
    return DeltaDist(jets, terms)


OperatorMatrix = List[List[DeltaDist]]


def operator_matrix_skew_failures(matrix: OperatorMatrix) -> List[str]:
    failures = []
    n = len(matrix)
    for u in range(n):
        for v in range(u, n):
            if not matrix[u][v].is_skew(matrix[v][u]):
                failures.append(f"K[{u + 1}][{v + 1}]")
    return failures
