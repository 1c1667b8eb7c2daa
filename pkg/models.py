import enum
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from errors import ValidationError


def frozen_array(value, dtype=complex) -> np.ndarray:
    """Copy into a read-only ndarray so dataclass instances stay immutable"""
    arr = np.array(value, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


class ModelTag(enum.Enum):
    A = "A"
    B = "B"
    C = "C"
    DEGENERATE = "Degenerate"


class EvaluationMode(enum.Enum):
    FINITE = "finite"
    THERMODYNAMIC = "thermodynamic"
    ASYMPTOTIC = "asymptotic"


class CrossingType(enum.Enum):
    MAX_CROSSING = "max-crossing"
    SECOND_KINK = "second-kink"


class OrbitMode(enum.Enum):
    AUTO = "auto"  # adapted unless a symmetry-breaking basis is strictly sparser
    SPARSE = "sparse"
    ADAPTED = "adapted"


# MPS building blocks
@dataclass(frozen=True, eq=False)
class MatrixPair:
    a0: np.ndarray
    a1: np.ndarray

    def __post_init__(self):
        for name in ("a0", "a1"):
            arr = np.asarray(getattr(self, name))
            if arr.shape != (2, 2):
                raise ValidationError(f"{name}: expected a 2x2 matrix, got shape {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"{name}: entries must be finite")
            object.__setattr__(self, name, frozen_array(arr))
        if not (np.any(self.a0) or np.any(self.a1)):
            raise ValidationError("a0, a1: at least one matrix must be nonzero")

    def __getitem__(self, i: int) -> np.ndarray:
        return (self.a0, self.a1)[i]

    @property
    def matrices(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.a0, self.a1

    @property
    def scale(self) -> float:
        """Largest Frobenius norm of the pair, the unit for relative tolerances"""
        return float(max(np.linalg.norm(self.a0), np.linalg.norm(self.a1)))


@dataclass(frozen=True, eq=False)
class SiteOperator:
    op: np.ndarray
    name: str = "O"

    def __post_init__(self):
        arr = np.asarray(self.op)
        if arr.shape != (2, 2):
            raise ValidationError(f"{self.name}: site operators must be 2x2, got shape {arr.shape}")
        object.__setattr__(self, "op", frozen_array(arr))


IDENTITY = SiteOperator(np.eye(2), "I")
SIGMA_X = SiteOperator([[0, 1], [1, 0]], "X")
SIGMA_Y = SiteOperator([[0, -1j], [1j, 0]], "Y")
SIGMA_Z = SiteOperator([[1, 0], [0, -1]], "Z")
PAULI = {"I": IDENTITY, "X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    eigenvalues: np.ndarray  # descending modulus, then real, then imag
    right_vectors: np.ndarray  # columns
    left_vectors: np.ndarray  # columns, <l_i|r_j> = delta_ij when not defective
    is_defective: bool


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    e: np.ndarray
    spectrum: EigenDecomposition
    degeneracy_of_max: int

    @property
    def lambda_max(self) -> complex:
        return complex(self.spectrum.eigenvalues[0])


@dataclass(frozen=True)
class NormZ:
    """Z = mantissa * exp(log_scale)"""
    log_scale: float
    mantissa: complex

    @property
    def value(self) -> complex:
        return self.mantissa * np.exp(self.log_scale)

    @property
    def log_value(self) -> float:
        return self.log_scale + float(np.log(abs(self.mantissa)))


# Symmetry and classification
@dataclass(frozen=True, eq=False)
class SpinFlipWitness:
    x: np.ndarray
    epsilon: int


@dataclass(frozen=True, eq=False)
class ParityWitness:
    omega: np.ndarray
    sigma: int


@dataclass(frozen=True)
class InvariantReport:
    trace_sign: Optional[int]
    det_ok: bool


@dataclass(frozen=True, eq=False)
class CanonicalForm:
    tag: ModelTag
    params: Dict[str, float] = field(default_factory=dict)
    gauge_u: Optional[np.ndarray] = None  # A_canonical_i = mu * U A_i U^-1
    gauge_mu: Optional[complex] = None
    swapped: bool = False  # the source pair's A1 played the role of A0
    notes: Tuple[str, ...] = ()
    residual: float = 0.0


# Parent Hamiltonians
@dataclass(frozen=True, eq=False)
class NullSpaceBasis:
    k: int
    vectors: np.ndarray  # rows are the kets |e_alpha>, orthonormal
    tol: float

    @property
    def dimension(self) -> int:
        return int(self.vectors.shape[0])

    @property
    def coefficients(self) -> np.ndarray:
        """Rows c with sum_J c_J A_J = 0 (complex conjugates of the kets)"""
        return self.vectors.conj()


@dataclass(frozen=True, eq=False)
class SymmetryOrbits:
    k: int
    vectors: np.ndarray  # rows, same span as the source basis
    orbits: Tuple[Tuple[int, ...], ...]  # row indices grouped by orbit
    mode: OrbitMode

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(o) for o in self.orbits)


@dataclass(frozen=True, eq=False)
class LocalHamiltonian:
    k: int
    projector_terms: Tuple[Tuple[np.ndarray, float], ...]
    dense: np.ndarray


@dataclass(frozen=True, eq=False)
class ChainHamiltonian:
    n: int
    local: LocalHamiltonian
    boundary: str = "periodic"


@dataclass(frozen=True, eq=False)
class PauliDecomposition:
    k: int
    terms: Dict[str, float]  # word in site order -> coefficient


@dataclass(frozen=True, eq=False)
class FamilyFit:
    """Best Hermitian combination sum_ab M_ab |e_a><e_b| reproducing a printed chain form"""
    target: str
    residual: float
    shift: float
    matrix: np.ndarray
    eigenvalues: np.ndarray
    definite: bool  # M semidefinite of one sign: the printed form is a parent Hamiltonian up to sign


@dataclass(frozen=True, eq=False)
class PauliComparison:
    target: str
    scale: float
    shift: float
    residual: float
    flagged: bool
    constructed: Dict[str, float]
    printed: Dict[str, float]


# Exact diagonalization
@dataclass(frozen=True, eq=False)
class DenseState:
    n: int
    amplitudes: np.ndarray  # index bits: site 1 is the most significant

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class StateSymmetry:
    spin_flip_residual: float
    reversal_residual: float


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    n: int
    lowest: np.ndarray  # ascending; empty in Rayleigh-only mode
    lambda_min: Optional[float]
    norm_bound: float
    ground_dimension: Optional[int]
    rayleigh: Tuple[float, ...]
    overlaps: Tuple[Optional[float], ...]
    full_diagonalization: bool


# Parameter sweeps
@dataclass(frozen=True)
class GridAxis:
    name: str
    min: float
    max: float
    steps: int

    def __post_init__(self):
        if self.steps < 2:
            raise ValidationError(f"{self.name}: steps must be >= 2")
        if not self.min < self.max:
            raise ValidationError(f"{self.name}: min must be below max")

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.steps)


@dataclass(frozen=True, eq=False)
class ScanGrid:
    tag: ModelTag
    axes: Tuple[GridAxis, ...]
    fixed: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ValidationError("axes: a scan takes one or two parameters")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ValidationError("axes: parameter names must be distinct")


@dataclass(frozen=True, eq=False)
class SpectralRecord:
    params: Tuple[float, ...]
    eigenvalues: np.ndarray
    ratio: float
    xi: float
    degenerate: bool


@dataclass(frozen=True, eq=False)
class SweepResult:
    grid: ScanGrid
    records: Tuple[SpectralRecord, ...]  # row-major over the axes


@dataclass(frozen=True, eq=False)
class SpectrumComparison:
    """Closed-form eigenvalues against numeric ones, numeric taken as ground truth"""
    tag: ModelTag
    params: Dict[str, float]
    analytic: np.ndarray
    numeric: np.ndarray  # reordered to match analytic entry by entry
    deviation: float
    flagged: bool


@dataclass(frozen=True)
class Crossing:
    kind: CrossingType
    axis: str
    location: float
    bracket: Tuple[float, float]
    refined: Optional[float] = None
    fixed: Tuple[Tuple[str, float], ...] = ()  # the other axis for 2-D scans


@dataclass(frozen=True)
class CrossingReport:
    tag: ModelTag
    crossings: Tuple[Crossing, ...]

    def of_kind(self, kind: CrossingType) -> Tuple[Crossing, ...]:
        return tuple(c for c in self.crossings if c.kind is kind)
