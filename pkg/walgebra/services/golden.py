"""Golden comparisons: the catalog table and the printed F4(a2) results.

Reconciliation between the printed data and a pipeline run is limited to
what is recorded here: the printed-to-catalog index permutation (plus the
Cartan reordering found by the hint path), one scalar per invariant
generator, and the normalization of the auxiliary root (depression followed
by a rational rescale found from the relation itself).
"""
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from sympy import parse_expr

from walgebra.config import settings
from walgebra.models.schemas import CertificateResult
from walgebra.services import f4
from walgebra.services.algebraic import AlgebraicFn, AlgebraicRing, change_root, depress
from walgebra.services.catalog import find
from walgebra.services.frob import FrobeniusPotential, s_name, wdvv_verify
from walgebra.services.slice import InvariantSet, SliceChart, SpecialCoordinates, t_name, z_name
from walgebra.services.symcore import ONE, GradedRing, Poly, coefficient, format_rat, partial, rat

logger = logging.getLogger(__name__)

REFERENCE_NAME = "T"


def reference_path() -> Path:
    return Path(settings.GOLDEN_DIR) / "f4a2" / "reference.json"


def catalog_path() -> Path:
    return Path(settings.GOLDEN_DIR) / "catalog.json"


def load_reference(path: Optional[Path] = None) -> Dict:
    with open(path or reference_path(), encoding="utf-8") as handle:
        return json.load(handle)


def printed_positions(r: int, permutation: Optional[List[int]] = None) -> Dict[int, int]:
    """Printed index (1-based) to pipeline position (0-based)."""
    positions = {}
    for printed, catalog in f4.PRINTED_TO_CATALOG.items():
        if printed <= r and permutation is not None:
            positions[printed] = permutation.index(printed - 1)
        else:
            positions[printed] = catalog - 1
    return positions


def parse_renamed(text: str, graded: GradedRing, rename: Dict[str, str]) -> Poly:
    """Parse ``text`` whose variable ``k`` is called ``rename[k]`` in ``graded``."""
    symbols = {str(s): s for s in graded.ring.symbols}
    local = {printed: symbols[ours] for printed, ours in rename.items()}
    return graded.ring.from_expr(parse_expr(text, local_dict=local))


def proportionality(ours: Poly, reference: Poly) -> Optional[object]:
    """``c`` with ``ours == c * reference``, or None."""
    if not reference:
        return ONE if not ours else None
    monom, value = next(iter(reference.iterterms()))
    c = coefficient(ours, monom) / value
    if not c or ours != reference * c:
        return None
    return c


def _certificate(name: str, failures: List[str], detail: str = "") -> CertificateResult:
    return CertificateResult(name=name, passed=not failures, detail=detail, failures=failures)


# reference-only checks

def reference_potential(reference: Optional[Dict] = None) -> FrobeniusPotential:
    """The printed potential as a FrobeniusPotential over the printed cubic."""
    reference = reference or load_reference()
    weights = reference["weights"]
    names = [s_name(i) for i in range(len(weights["s"]))]
    full = GradedRing(names + [REFERENCE_NAME], list(weights["s"]) + [weights["T"]])
    cubic = full.parse(reference["cubic"])
    ring = AlgebraicRing(names, weights["s"], [(REFERENCE_NAME, weights["T"])], [cubic])
    F = AlgebraicFn(ring, full.parse(reference["potential"]))
    r = len(names)
    gradient = [F.partial(name) for name in names]
    hessian = [[gradient[b].partial(names[a]) for b in range(r)] for a in range(r)]
    degrees = [rat(d) for d in reference["degrees"]]
    return FrobeniusPotential(ring, F, gradient, hessian, rat(reference["charge"]), degrees)


def reference_failures(reference: Optional[Dict] = None, full: bool = True) -> Dict[str, List[str]]:
    """Euler identity, unity and WDVV of the printed potential modulo the printed cubic."""
    reference = reference or load_reference()
    pot = reference_potential(reference)
    results = wdvv_verify(pot, full=full)
    z_names = [z_name(i) for i in range(len(reference["weights"]["z"]))]
    graded = GradedRing(z_names, reference["weights"]["z"])
    polys = {key: graded.parse(text) for key, text in reference["invariants"].items()}
    polys["dP3_dz4"] = partial(polys["P3"], z_name(3))
    coords = []
    for name, recipe in reference["coordinates"].items():
        value = graded.zero
        for key, c in recipe.items():
            value += (polys[key] if key in polys else graded.gen(key)) * rat(c)
        if graded.linear_part(value) != graded.gen(name.replace("t", "z")):
            coords.append(f"linear part of {name}")
        if name == "t2" and value != graded.gen(z_name(1)):
            coords.append("t2 != z2")
    results["coordinates"] = coords
    return results


# comparisons with a pipeline run

def compare_invariants(inv: InvariantSet, chart: SliceChart, positions: Dict[int, int], reference: Dict) -> Tuple[List[str], Dict[str, object]]:
    rename = {f"z{p}": z_name(q) for p, q in positions.items()}
    z4 = z_name(positions[4])
    ours = {"P2": inv.polys[1], "P3": inv.polys[2], "dP4_dz4": partial(inv.polys[3], z4)}
    failures, scalars = [], {}
    for key, text in reference["invariants"].items():
        c = proportionality(ours[key], parse_renamed(text, chart.ring, rename))
        if c is None:
            failures.append(f"{key} is not proportional to the printed polynomial")
        else:
            scalars[key] = c
    return failures, scalars


def compare_coordinates(coords: SpecialCoordinates, chart: SliceChart, positions: Dict[int, int], reference: Dict) -> List[str]:
    rename = {f"z{p}": z_name(q) for p, q in positions.items()}
    graded = chart.ring
    printed = {key: parse_renamed(text, graded, rename) for key, text in reference["invariants"].items()}
    printed["dP3_dz4"] = partial(printed["P3"], z_name(positions[4]))
    failures = []
    for name, recipe in reference["coordinates"].items():
        value = graded.zero
        for key, c in recipe.items():
            term = printed[key] if key in printed else graded.gen(rename[key])
            value += term * rat(c)
        position = positions[int(name[1:])]
        if coords.forward[position] != value:
            failures.append(f"{name} differs from the printed combination")
    for p in range(1, len(positions) + 1):
        if f"t{p}" not in reference["coordinates"] and coords.forward[positions[p]] != graded.gen(z_name(positions[p])):
            failures.append(f"t{p} != z{p}")
    return failures


def compare_equations(inv: InvariantSet, coords: SpecialCoordinates, positions: Dict[int, int], scalar, reference: Dict) -> List[str]:
    rename = {f"t{p}": t_name(q) for p, q in positions.items()}
    P3 = coords.to_t(inv.polys[2])
    failures = []
    for beta, text in reference["equilibrium"].items():
        ours = partial(P3, t_name(positions[int(beta)]))
        printed = parse_renamed(text, coords.ring, rename)
        if ours != printed * scalar:
            failures.append(f"dP3/dt{beta}")
    return failures


def normalize_root(ring: AlgebraicRing, reference_relation: Poly):
    """Depress the single auxiliary root, then rescale it to match the printed relation.

    With ``T' = k T`` the coefficient of ``T^j`` in the monic relation scales
    by ``k^(j - deg)``, so two consecutive powers fix ``k``.

    Returns the normalized ring, a map into it and ``k`` (None if no rational scale exists).
    """
    depressed, to_depressed, _ = depress(ring, 0)
    idx = depressed.full.index(depressed.aux_names[0])
    ours = AlgebraicRing._split(depressed.relations[0], idx)
    graded = GradedRing(list(depressed.base.names) + [REFERENCE_NAME], list(depressed.full.weights))
    theirs = AlgebraicRing._split(graded.convert(reference_relation), graded.index(REFERENCE_NAME))
    ratios = {}
    for power in range(depressed.degrees[0]):
        a, b = ours.get(power), theirs.get(power)
        if a and b:
            monom, value = next(iter(b.iterterms()))
            ratios[power] = coefficient(a, monom) / value
    scale = None
    for power in sorted(ratios):
        if power + 1 in ratios and ratios[power + 1]:
            scale = ratios[power] / ratios[power + 1]
            break
    if not scale:
        return depressed, to_depressed, None
    target, to_target = change_root(depressed, 0, scale, depressed.full.zero, REFERENCE_NAME)

    def mapping(a: AlgebraicFn) -> AlgebraicFn:
        return to_target(to_depressed(a))

    return target, mapping, scale


def compare_potential(pot: FrobeniusPotential, positions: Dict[int, int], reference: Dict) -> Tuple[List[str], Optional[str]]:
    """Exact comparison of the root relation and the potential after normalizing the root.

    Returns the failures and the root scale found.
    """
    r = pot.r
    if len(pot.ring.aux_names) != 1:
        return [f"expected one auxiliary root, found {len(pot.ring.aux_names)}"], None
    rename = {f"s{p}": s_name(positions[p]) for p in range(1, r + 1)}
    rename[REFERENCE_NAME] = REFERENCE_NAME
    printed_ring = GradedRing(list(pot.ring.base.names) + [REFERENCE_NAME], pot.ring.full.weights)
    printed_relation = parse_renamed(reference["cubic"], printed_ring, rename)
    target, mapping, scale = normalize_root(pot.ring, printed_relation)
    if scale is None:
        return ["no rational rescale of the auxiliary root matches the printed relation"], None
    failures = []
    if target.relations[0] != target.full.convert(printed_relation):
        failures.append("root relation differs from the printed cubic")
    printed_F = AlgebraicFn(target, parse_renamed(reference["potential"], target.full, rename))
    mapped = mapping(pot.F)
    if mapped != printed_F:
        difference = (mapped - printed_F).num
        shown = [str(target.full.ring.from_dict({m: c}).as_expr()) for m, c in list(difference.iterterms())[:5]]
        failures.append(f"potential differs in {len(difference)} terms, e.g. {', '.join(shown)}")
    return failures, format_rat(scale)


def verify_f4a2(
    inv: InvariantSet,
    chart: SliceChart,
    coords: SpecialCoordinates,
    pot: Optional[FrobeniusPotential],
    permutation: Optional[List[int]] = None,
    reference: Optional[Dict] = None,
) -> List[CertificateResult]:
    """Golden certificates for an F4(a2) run."""
    reference = reference or load_reference()
    positions = printed_positions(chart.rank, permutation)
    results = []
    failures, scalars = compare_invariants(inv, chart, positions, reference)
    detail = ", ".join(f"{k}: {format_rat(v)}" for k, v in scalars.items())
    results.append(_certificate("golden_invariants", failures, f"scalars {detail}" if detail else ""))
    results.append(_certificate("golden_coordinates", compare_coordinates(coords, chart, positions, reference)))
    if "P3" in scalars:
        equations = compare_equations(inv, coords, positions, scalars["P3"], reference)
    else:
        equations = ["P3 scalar unknown"]
    results.append(_certificate("golden_equations", equations))
    if pot is not None:
        failures, scale = compare_potential(pot, positions, reference)
        results.append(_certificate("golden_potential", failures, f"root scale {scale}" if scale else ""))
        expected = [rat(d) for d in reference["degrees"]]
        charge = [] if pot.charge == rat(reference["charge"]) and list(pot.degrees) == expected else ["charge or degrees"]
        results.append(_certificate("golden_charge", charge, f"d = {format_rat(pot.charge)}"))
    logger.info("Golden F4(a2): %d/%d certificates pass", sum(c.passed for c in results), len(results))
    return results


def catalog_failures(path: Optional[Path] = None) -> List[str]:
    """Generated catalog rows against the printed table in ``golden/catalog.json``.

    A printed shift row may differ from the computed one only when the
    generated row records it as ``printed_shifts``.
    """
    path = Path(path or catalog_path())
    if not path.exists():
        return [f"missing {path}"]
    with open(path, encoding="utf-8") as handle:
        printed = json.load(handle)
    failures = []
    for entry in printed:
        row = find(entry["name"])
        if row is None:
            failures.append(f"{entry['name']} missing from the catalog")
            continue
        if row.exponents != entry["exponents"] or row.extra_weights != entry["extra_weights"]:
            failures.append(f"{row.name}: weights")
        if row.shifts != entry["printed_shifts"] and row.printed_shifts != entry["printed_shifts"]:
            failures.append(f"{row.name}: shifts {row.shifts} vs printed {entry['printed_shifts']}")
        failures.extend(f"{row.name}: {v}" for v in row.violations())
    return failures
