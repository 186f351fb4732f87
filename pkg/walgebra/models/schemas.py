from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from walgebra.exceptions import ConfigError

STAGES = ("build", "sl2", "cartan", "slice", "ds", "frobenius", "verify")


class OrbitDescriptor(BaseModel):
    """Catalog row for a distinguished nilpotent orbit of semisimple type"""
    model_config = ConfigDict(frozen=True)

    series: str
    rank: int
    label: str
    exponents: List[int]
    extra_weights: List[int] = Field(default_factory=list)
    shifts: List[int]
    lie_exponents: List[int]
    dimension: int
    realized: bool = False
    printed_shifts: Optional[List[int]] = None  # set when the printed row breaks the duality laws

    @property
    def algebra(self) -> str:
        return f"{self.series}{self.rank}"

    @property
    def name(self) -> str:
        return f"{self.series}{self.rank}({self.label})"

    @property
    def weights(self) -> List[int]:
        return list(self.exponents) + list(self.extra_weights)

    @property
    def eta_r(self) -> int:
        return self.exponents[-1]

    @property
    def n(self) -> int:
        return len(self.exponents) + len(self.extra_weights)

    def violations(self) -> List[str]:
        """Return the duality laws this row breaks (empty when consistent)."""
        problems = []
        r, eta = self.rank, self.exponents
        if len(eta) != r or len(self.shifts) != r or len(self.lie_exponents) != r:
            problems.append("row length differs from rank")
            return problems
        for i in range(r):
            if eta[i] + eta[r - 1 - i] != self.eta_r + 1:
                problems.append(f"eta_{i + 1} + eta_{r - i} != eta_r + 1")
        extra = self.extra_weights
        for i in range(len(extra)):
            if extra[i] + extra[len(extra) - 1 - i] != self.eta_r:
                problems.append(f"extra weight pair {i + 1} does not sum to eta_r")
        if self.n != r + 2 * sum(self.shifts):
            problems.append("n != r + 2 * sum(mu)")
        shifted = sorted(nu - mu * (self.eta_r + 1) for nu, mu in zip(self.lie_exponents, self.shifts))
        if shifted != sorted(eta):
            problems.append("{nu_i - mu_i (eta_r + 1)} != {eta_i}")
        return problems


class PipelineConfig(BaseModel):
    """Validated configuration for one pipeline run"""
    series: str
    rank: int
    label: str
    stages: List[str] = Field(default_factory=lambda: list(STAGES))
    cache_dir: Optional[str] = None
    use_cache: bool = True
    full_checks: bool = False
    jet_order: Optional[int] = None
    label_table: str = "corrected"
    output_format: str = "text"
    seed: int = 20240601

    @model_validator(mode="after")
    def _check(self):
        from walgebra.services.catalog import lookup

        lookup(self.series, self.rank, self.label)
        if not self.stages or list(self.stages) != list(STAGES[:len(self.stages)]):
            raise ConfigError(f"stages must be a prefix of {', '.join(STAGES)}; got {self.stages}")
        if self.label_table not in ("corrected", "raw"):
            raise ConfigError(f"unknown label table: {self.label_table}")
        if self.output_format not in ("json", "text"):
            raise ConfigError(f"unknown output format: {self.output_format}")
        return self

    @property
    def orbit_key(self) -> str:
        return f"{self.series}{self.rank}-{self.label}"

    def fingerprint(self) -> Dict[str, Any]:
        """Fields that influence computed payloads (cache keys)."""
        return {
            "series": self.series,
            "rank": self.rank,
            "label": self.label,
            "full_checks": self.full_checks,
            "jet_order": self.jet_order,
            "label_table": self.label_table,
            "seed": self.seed,
        }


class StageArtifact(BaseModel):
    """Cached output of a single pipeline stage"""
    stage: str
    input_hash: str
    payload: Dict[str, Any] = Field(default_factory=dict)
    elapsed: float = 0.0  # seconds


class CertificateResult(BaseModel):
    """Outcome of one exact identity check"""
    name: str
    passed: bool
    detail: str = ""
    failures: List[str] = Field(default_factory=list)


class RunReport(BaseModel):
    """Response model for a pipeline run"""
    orbit: str
    exponents: List[int]
    extra_weights: List[int] = Field(default_factory=list)
    stages: List[str] = Field(default_factory=list)
    det_omega1: Optional[str] = None
    central_charge: Optional[str] = None
    equations: List[str] = Field(default_factory=list)
    minimal_polynomials: List[str] = Field(default_factory=list)
    special_coordinates: List[str] = Field(default_factory=list)
    flat_coordinates: List[str] = Field(default_factory=list)
    potential: Optional[str] = None
    charge: Optional[str] = None
    degrees: List[str] = Field(default_factory=list)
    euler_field: Optional[str] = None
    notes: List[str] = Field(default_factory=list)
    certificates: List[CertificateResult] = Field(default_factory=list)
    recomputed: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.certificates)
