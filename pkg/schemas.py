from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

ComplexJSON = Tuple[float, float]
Entry = Union[float, ComplexJSON]
MatrixJSON = List[List[Entry]]

MODEL_CHOICES = ("A", "B", "C", "cirac")


# Matrix pair file
class PairFile(BaseModel):
    """Two 2x2 matrices; entries are numbers or [re, im] pairs"""
    a0: MatrixJSON = Field(..., description="Matrix for physical index 0", examples=[[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]])
    a1: MatrixJSON = Field(..., description="Matrix for physical index 1", examples=[[[1, 0.5], [0, 0]]])


# Classification schemas
class CanonicalFormSchema(BaseModel):
    """Family tag, parameters and the gauge (U, mu) with canonical_i = mu U A_i U^-1"""
    tag: str = Field(..., description="A, B, C or Degenerate", examples=["A"])
    params: Dict[str, float] = Field(default_factory=dict, description="Family parameters", examples=[{"g": 1.0, "theta": 1.5707963267948966, "epsilon": 1}])
    gauge_u: Optional[List[List[ComplexJSON]]] = Field(None, description="Gauge matrix U")
    gauge_mu: Optional[ComplexJSON] = Field(None, description="Overall scale mu")
    swapped: bool = Field(False, description="The source A1 was used as the canonical A0")
    notes: List[str] = Field(default_factory=list, description="Edge cases met during reduction")
    residual: float = Field(0.0, description="Max reconstruction residual of the reduction")


class WitnessSchema(BaseModel):
    kind: Literal["spin-flip", "parity"]
    matrix: List[List[ComplexJSON]] = Field(..., description="X or Omega, unit Frobenius norm")
    sign: int = Field(..., description="epsilon for spin flip, sigma for parity")
    residual: float = Field(..., description="verify_witness residual")


class WitnessReport(BaseModel):
    trace_sign: Optional[int] = Field(None, description="eps with tr A0 = eps tr A1, if any")
    det_ok: bool = Field(..., description="det A0 = det A1")
    spin_flip: Union[List[WitnessSchema], Literal["none"]] = "none"
    parity: Union[List[WitnessSchema], Literal["none"]] = "none"


class EquivalenceSchema(BaseModel):
    """S A_i S^-1 = mu A'_i, or 'none'"""
    s: Union[List[List[ComplexJSON]], Literal["none"]] = "none"
    mu: Union[ComplexJSON, Literal["none"]] = "none"
    residual: Optional[float] = None


# Spectra
class SpectrumComparisonSchema(BaseModel):
    analytic: List[ComplexJSON]
    numeric: List[ComplexJSON]
    deviation: float
    flagged: bool = Field(..., description="Closed form disagrees with the numeric spectrum")


class SpectrumSchema(BaseModel):
    eigenvalues: List[ComplexJSON] = Field(..., description="Transfer-matrix eigenvalues by descending modulus")
    ratio: Union[float, str] = Field(..., description="|lambda_0| / |lambda_1|")
    xi: Union[float, str] = Field(..., description="Correlation length, 'inf' when the leading modulus is degenerate")
    degeneracy_of_max: int
    is_defective: bool
    comparison: Optional[SpectrumComparisonSchema] = None


class CrossingSchema(BaseModel):
    kind: Literal["max-crossing", "second-kink"]
    axis: str
    location: float
    bracket: Tuple[float, float]
    refined: Optional[float] = None
    fixed: Dict[str, float] = Field(default_factory=dict, description="Other scan axis for 2-D grids")


class CrossingReportSchema(BaseModel):
    tag: str
    crossings: List[CrossingSchema]


# Hamiltonians
class ComparisonSchema(BaseModel):
    target: str = Field(..., examples=["cirac"])
    scale: float
    shift: float
    residual: float
    flagged: bool
    constructed: Dict[str, float]
    printed: Dict[str, float]


class FamilyFitSchema(BaseModel):
    target: str
    residual: float
    shift: float
    eigenvalues: List[float]
    definite: bool


class HamiltonianReport(BaseModel):
    interaction_range: Union[int, Literal["none"]]
    null_dimension: int
    null_vectors: List[List[ComplexJSON]] = Field(default_factory=list, description="Kets |e_alpha>, site 1 most significant")
    orbit_mode: Optional[str] = None
    orbits: List[List[int]] = Field(default_factory=list)
    pauli: Dict[str, float] = Field(default_factory=dict, description="Words of the k-site projector sum")
    chain_density: Dict[str, float] = Field(default_factory=dict)
    comparisons: List[ComparisonSchema] = Field(default_factory=list)
    family_fits: List[FamilyFitSchema] = Field(default_factory=list)


# Exact diagonalization
class VerifyEntry(BaseModel):
    n: int
    full_diagonalization: bool
    lowest: List[float]
    lambda_min: Optional[float]
    norm_bound: float
    ground_dimension: Optional[int]
    states: List[str] = Field(..., description="Labels of the checked states")
    rayleigh: List[float]
    overlaps: List[Optional[float]]
    spin_flip_residual: float
    reversal_residual: float


class VerifyReport(BaseModel):
    interaction_range: int
    entries: List[VerifyEntry]


class CorrelationRow(BaseModel):
    r: int
    two_point: ComplexJSON
    connected: ComplexJSON


class CorrelationTable(BaseModel):
    operator: str
    mode: str
    expectation: ComplexJSON
    xi: Union[float, str]
    rows: List[CorrelationRow]


# Run configuration
class RunConfig(BaseModel):
    """Validated command-line request"""
    model_config = ConfigDict(extra="forbid")

    subcommand: str
    model: Optional[Literal["A", "B", "C", "cirac"]] = None
    params: Dict[str, float] = Field(default_factory=dict)
    pair_file: Optional[Path] = None
    grids: List[str] = Field(default_factory=list, description="name:min:max:steps specs")
    sites: List[int] = Field(default_factory=list)
    output: Optional[Path] = None
    report: Optional[Path] = None
    format: Literal["json", "csv"] = "json"
    other: Optional[str] = None
    operator: str = "Z"
    r_max: int = Field(10, ge=2, description="Largest site index r of <O(1) O(r)>")
    mode: Literal["finite", "thermodynamic", "asymptotic"] = "thermodynamic"
    k_max: int = Field(6, ge=1, le=12)
    orbit_mode: Literal["auto", "sparse", "adapted"] = "auto"
    weights: Optional[str] = None
    export_state: Optional[Path] = None
    null_tol: Optional[float] = Field(None, gt=0, lt=1)
    diag_tol: Optional[float] = Field(None, gt=0, lt=1)
    kink_factor: Optional[float] = Field(None, gt=0)

    @model_validator(mode="after")
    def one_model_source(self):
        if (self.model is None) == (self.pair_file is None):
            raise ValueError("exactly one of --model and --pair-file is required")
        return self
