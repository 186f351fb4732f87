"""Stage orchestration with a content-addressed JSON cache.

Stages run in the canonical order build → sl2 → cartan → slice → ds →
frobenius → verify. Each one produces a JSON payload holding its report
fields and certificates. A cached run is reused only when every requested
stage has an artifact whose input hash matches; otherwise every stage is
recomputed, since the in-memory objects of later stages depend on all
earlier ones.
"""
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from tqdm import tqdm

from walgebra import __version__
from walgebra.config import settings
from walgebra.exceptions import WAlgebraError
from walgebra.models.schemas import CertificateResult, PipelineConfig, RunReport, StageArtifact
from walgebra.services import dsred, frob, golden, nilstruct, orbits
from walgebra.services import slice as slicing
from walgebra.services.catalog import lookup
from walgebra.services.jets import JetRing
from walgebra.services.serialization import (
    content_hash,
    fn_text,
    poly_text,
    rat_list,
    read_artifact,
    stage_path,
    write_artifact,
)
from walgebra.services.symcore import format_rat

logger = logging.getLogger(__name__)

Payload = Dict[str, Any]


def certificate(name: str, failures: List[str], detail: str = "") -> CertificateResult:
    result = CertificateResult(name=name, passed=not failures, detail=detail, failures=list(failures))
    if failures:
        logger.warning("Certificate %s failed: %s", name, "; ".join(failures[:5]))
    else:
        logger.debug("Certificate %s passed %s", name, detail)
    return result


@dataclass
class _State:
    realization: Any = None
    data: Any = None
    cartan: Any = None
    modules: Any = None
    chart: Any = None
    invariants: Any = None
    coords: Any = None
    brackets: Any = None
    solution: Any = None
    pencil: Any = None
    potential: Any = None


class Pipeline:
    """Run the requested stage prefix for one orbit."""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.orbit = lookup(config.series, config.rank, config.label)
        self.cache_dir = Path(config.cache_dir) if config.cache_dir else Path(settings.CACHE_DIR)
        self.state = _State()
        self._stages: Dict[str, Callable[[], Tuple[Payload, List[CertificateResult]]]] = {
            "build": self.build,
            "sl2": self.sl2,
            "cartan": self.cartan,
            "slice": self.slice,
            "ds": self.ds,
            "frobenius": self.frobenius,
            "verify": self.verify,
        }

    @property
    def full_checks(self) -> bool:
        return self.config.full_checks or settings.FULL_CHECKS

    def input_hashes(self) -> Dict[str, str]:
        hashes, upstream = {}, ""
        for stage in self.config.stages:
            upstream = content_hash({
                "version": __version__,
                "config": self.config.fingerprint(),
                "stage": stage,
                "upstream": upstream,
            })
            hashes[stage] = upstream
        return hashes

    def _cached(self, hashes: Dict[str, str]) -> Optional[List[StageArtifact]]:
        if not self.config.use_cache:
            return None
        artifacts = []
        for stage, digest in hashes.items():
            artifact = read_artifact(stage_path(self.cache_dir, self.config.orbit_key, stage), digest)
            if artifact is None:
                return None
            artifacts.append(artifact)
        return artifacts

    def run(self) -> RunReport:
        """Execute (or reuse) every configured stage and assemble the report.

        Raises:
            WAlgebraError: from the failing stage, tagged with its name
        """
        hashes = self.input_hashes()
        artifacts = self._cached(hashes)
        recomputed: List[str] = []
        if artifacts is not None:
            logger.info("Reusing cached artifacts for %s", self.orbit.name)
        else:
            artifacts = []
            for stage in tqdm(self.config.stages, desc=self.orbit.name, disable=None):
                artifact = self._run_stage(stage, hashes[stage])
                if self.config.use_cache:
                    write_artifact(stage_path(self.cache_dir, self.config.orbit_key, stage), artifact)
                artifacts.append(artifact)
                recomputed.append(stage)
        report = RunReport(
            orbit=self.orbit.name,
            exponents=self.orbit.exponents,
            extra_weights=self.orbit.extra_weights,
            stages=list(self.config.stages),
            recomputed=recomputed,
        )
        for artifact in artifacts:
            for key, value in artifact.payload.get("report", {}).items():
                if isinstance(getattr(report, key), list):
                    getattr(report, key).extend(value)
                else:
                    setattr(report, key, value)
            report.certificates.extend(CertificateResult.model_validate(c) for c in artifact.payload.get("certificates", []))
        return report

    def _run_stage(self, stage: str, digest: str) -> StageArtifact:
        logger.info("Stage %s: %s", stage, self.orbit.name)
        start = time.perf_counter()
        try:
            payload, certificates = self._stages[stage]()
        except WAlgebraError as exc:
            if exc.stage is None:
                exc.stage = stage
            raise
        elapsed = time.perf_counter() - start
        payload["certificates"] = [c.model_dump() for c in certificates]
        failed = [c.name for c in certificates if not c.passed]
        logger.info("Stage %s finished in %.1fs (%d certificates, %d failed)", stage, elapsed, len(certificates), len(failed))
        return StageArtifact(stage=stage, input_hash=digest, payload=payload, elapsed=round(elapsed, 3))

    # stages

    def build(self) -> Tuple[Payload, List[CertificateResult]]:
        realization = orbits.realize(self.orbit, self.config.label_table)
        self.state.realization = realization
        algebra = realization.algebra
        seed = self.config.seed
        certs = [
            certificate("algebra_jacobi", algebra.jacobi_failures(settings.SAMPLE_POINTS * 10, seed)),
            certificate("form_invariance", algebra.invariance_failures(settings.SAMPLE_POINTS * 10, seed)),
        ]
        if algebra.dim != self.orbit.dimension:
            certs.append(certificate("dimension", [f"dim {algebra.dim} != {self.orbit.dimension}"]))
        payload = {
            "algebra": {"name": algebra.name, "size": algebra.size, "dim": algebra.dim},
            "report": {"notes": list(realization.notes)},
        }
        return payload, certs

    def sl2(self) -> Tuple[Payload, List[CertificateResult]]:
        realization = self.state.realization
        algebra = realization.algebra
        data = nilstruct.sl2_complete(algebra, realization.L1, realization.h, realization.f)
        kappa = algebra.normalize_form(data.L1, data.f)
        nilstruct.dynkin_grading(data)
        self.state.data = data
        payload = {
            "h": nilstruct.vec_to_json(algebra, data.h),
            "f": nilstruct.vec_to_json(algebra, data.f),
            "kappa": format_rat(kappa),
            "grading": {str(d): k for d, k in data.dims.items()},
        }
        return payload, [certificate("grading", nilstruct.grading_failures(data))]

    def cartan(self) -> Tuple[Payload, List[CertificateResult]]:
        realization, data = self.state.realization, self.state.data
        algebra = data.algebra
        cartan = nilstruct.opposite_cartan(data, self.orbit, K1=realization.K1, hint=realization.cartan)
        gamma = orbits.hint_gamma(realization, cartan.permutation, cartan.renormalized)
        modules = nilstruct.module_decomposition(data, self.orbit, cartan, extras=realization.extras, gamma=gamma)
        self.state.cartan, self.state.modules = cartan, modules
        notes = []
        if cartan.permutation is not None:
            notes.append(f"Cartan hint reordered as {[p + 1 for p in cartan.permutation]}")
        if cartan.renormalized:
            notes.append("Cartan hint renormalized")
        certs = [
            certificate("cartan_identities", nilstruct.cartan_identity_failures(data, self.orbit, cartan)),
            certificate("pairing_table", nilstruct.pairing_table_failures(data, modules)),
            certificate("weights", nilstruct.weight_failures(data, modules)),
        ]
        payload = {
            "K1": nilstruct.vec_to_json(algebra, cartan.K1),
            "Y": [nilstruct.vec_to_json(algebra, y) for y in cartan.Y],
            "gamma": [nilstruct.vec_to_json(algebra, g) for g in modules.gamma],
            "permutation": cartan.permutation,
            "report": {"notes": notes},
        }
        return payload, certs

    def slice(self) -> Tuple[Payload, List[CertificateResult]]:
        data, modules, cartan = self.state.data, self.state.modules, self.state.cartan
        r = self.orbit.rank
        chart = slicing.build_chart(data, modules, self.orbit)
        inv = slicing.restricted_invariants(chart, data, self.orbit)
        inv = slicing.argument_shift(inv, chart, self.orbit)
        coords = slicing.special_coordinates(inv, chart)
        brackets = slicing.finite_brackets(data, modules, cartan, chart, coords)
        certs = [
            certificate("finite_antisymmetry", slicing.antisymmetry_failures(brackets.F1, "B1") + slicing.antisymmetry_failures(brackets.F2, "B2")),
            certificate("finite_jacobi", slicing.pencil_jacobi_failures(brackets.F1, brackets.F2, chart.names)),
            certificate("casimirs", slicing.casimir_failures(inv, brackets, chart)),
            certificate("involutivity", slicing.involution_failures(inv, brackets, chart)),
            certificate("finite_quasihomogeneity", slicing.quasihomogeneity_failures(brackets, coords, r)),
            certificate("rank", slicing.rank_failures(data, modules, cartan, brackets, chart, self.config.seed)),
            certificate("normal_coordinates", slicing.normal_coordinate_failures(inv, coords, chart)),
        ]
        equations = slicing.equilibrium_equations(inv, coords, r)
        solution = slicing.solve_N(equations, coords, r)
        bracket_eqs = slicing.bracket_equations(brackets, r)
        certs.append(certificate("N_presentations", [], slicing.cross_check_N(solution, bracket_eqs, coords, r)))
        certs.append(certificate("restricted_pencil", slicing.restricted_pencil_failures(brackets, solution, r)))
        self.state.chart, self.state.invariants, self.state.coords = chart, inv, coords
        self.state.brackets, self.state.solution = brackets, solution
        payload = {
            "invariants": [{"label": label, "poly": chart.ring.to_json(p)} for label, p in zip(inv.labels, inv.polys)],
            "shifts": inv.mu,
            "N": solution.ring.to_json(),
            "eliminated": solution.order,
            "report": {
                "special_coordinates": [f"t{i + 1} = {poly_text(p)}" for i, p in enumerate(coords.forward)],
                "equations": [poly_text(e) for e in equations],
                "minimal_polynomials": [poly_text(m) for m in solution.minimal_polynomials],
            },
        }
        return payload, certs

    def ds(self) -> Tuple[Payload, List[CertificateResult]]:
        data, modules, cartan = self.state.data, self.state.modules, self.state.cartan
        coords, brackets, solution = self.state.coords, self.state.brackets, self.state.solution
        orbit, r, n = self.orbit, self.orbit.rank, self.orbit.n
        wb = dsred.w_brackets(data, modules, cartan, coords, orbit, jet_order=self.config.jet_order)
        certs = [certificate("skew_symmetry", dsred.skew_failures(wb))]
        exact, c = dsred.exactness_check(wb, r)
        certs.append(certificate("exactness", exact, f"c = {format_rat(c)}"))
        ld = dsred.leading_terms(wb, coords)
        lead, sign = dsred.leading_failures(ld, brackets.F1_t, brackets.F2_t, orbit.weights, r)
        certs.append(certificate("leading_terms", lead, f"delta term sign {sign}"))
        det = dsred.det_omega1(ld, r)
        # sign of the antidiagonal permutation
        expected = (-1) ** (r * (r - 1) // 2) * (orbit.eta_r + 1) ** r
        antidiagonal = all(not ld.Omega1[u][v] for u in range(r) for v in range(r) if u + v != r - 1)
        detail = f"{format_rat(det)}, {'antidiagonal' if antidiagonal else 'not antidiagonal'} on t1..t{r}"
        certs.append(certificate("det_omega1", [] if det == expected else [f"det Omega1 = {format_rat(det)}, expected {expected}"], detail))
        full = dsred.should_run_full_checks(orbit, self.full_checks)
        triples = None if full else [(0, 0, 0), (0, 0, n - 1), (0, n - 1, n - 1)]
        certs.append(certificate("w_jacobi", dsred.jacobi_failures(wb, triples=triples), "all triples" if full else "sampled triples"))
        certs.extend(self._gauge_certificates(n, r))
        rows = None if full else [0]
        pencil = dsred.dirac_to_N(wb, ld, solution, coords, r, rows=rows)
        certs.append(certificate("reduction_to_N", pencil.failures, "all rows" if full else "t1 row and leading terms"))
        self.state.pencil = pencil
        payload = {
            "sign": sign,
            "jet_order": wb.jets.order,
            "reduced_rows": [u + 1 for u in pencil.bracket.rows],
            "report": {"det_omega1": format_rat(det), "central_charge": format_rat(c)},
        }
        return payload, certs

    def _gauge_certificates(self, n: int, r: int) -> List[CertificateResult]:
        data, modules = self.state.data, self.state.modules
        small = n <= 3
        gs = dsred.gauge_fix(data, modules, truncation=None if small else 1)
        detail = "full series" if small else "linear truncation"
        certs = [
            certificate("gauge_normal_form", dsred.gauge_failures(gs, modules, r), detail),
            certificate(
                "gauge_spot",
                dsred.gauge_spot_failures(gs, data, modules, self.config.seed),
                "finite x-dependent transforms" if small else "first order at the section",
            ),
        ]
        if small:
            basis = dsred.b_minus_basis(data, modules)
            weights = [w + 1 for w in modules.weights]
            order = self.config.jet_order or dsred.default_jet_order(self.orbit)
            z_jets = JetRing([slicing.z_name(k) for k in range(n)], weights, order, [("lam", 0)])
            D = dsred.linear_gauge(data, modules, basis, z_jets)
            certs.append(certificate("gauge_linearization", dsred.gauge_invariance_failures(gs, D, z_jets, basis)))
        return certs

    def frobenius(self) -> Tuple[Payload, List[CertificateResult]]:
        pencil, solution = self.state.pencil, self.state.solution
        etas = list(self.orbit.exponents)
        full = self.full_checks or self.orbit.rank <= 4
        flat = frob.flat_coordinates(pencil, solution.ring, etas)
        fp = frob.to_flat(pencil, solution.ring, flat, etas)
        certs = [certificate(f"pencil_{key}", failures) for key, failures in frob.pencil_verify(fp, full=full).items()]
        pot = frob.potential_reconstruct(fp)
        certs.extend(certificate(f"frobenius_{key}", failures) for key, failures in frob.wdvv_verify(pot, full=full).items())
        self.state.potential = pot
        payload = {
            "ring": pot.ring.to_json(),
            "potential": pot.F.to_json(),
            "report": {
                "flat_coordinates": [f"s{i + 1} = {poly_text(p)}" for i, p in enumerate(flat.s)],
                "potential": fn_text(pot.F),
                "charge": format_rat(pot.charge),
                "degrees": rat_list(pot.degrees),
                "euler_field": pot.euler_field(),
            },
        }
        return payload, certs

    def verify(self) -> Tuple[Payload, List[CertificateResult]]:
        orbit = self.orbit
        certs = [certificate("catalog", golden.catalog_failures() + orbit.violations())]
        if orbit.name == "F4(a2)":
            reference = golden.load_reference()
            checks = golden.reference_failures(reference, full=self.full_checks)
            certs.extend(certificate(f"reference_{key}", failures) for key, failures in checks.items())
            certs.extend(
                golden.verify_f4a2(
                    self.state.invariants,
                    self.state.chart,
                    self.state.coords,
                    self.state.potential,
                    self.state.cartan.permutation,
                    reference,
                )
            )
        return {"orbit": orbit.name}, certs


def run(config: PipelineConfig) -> RunReport:
    return Pipeline(config).run()
