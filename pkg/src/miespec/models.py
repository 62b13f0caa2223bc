# pydantic models for parameters, channels and verification records
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field


# which Kratzer family a (kappa, r_e) pair belongs to
class KratzerVariant(str, Enum):
    KRATZER_FUES = "kratzer_fues"
    MODIFIED_KRATZER = "modified_kratzer"


# coefficients of V(r) = -A/r + B/r^2 + C plus the units
class PotentialParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    A: float = Field(gt=0)
    B: float = 0.0
    C: float = 0.0
    mu: float = Field(default=1.0, gt=0)
    hbar: float = Field(default=1.0, gt=0)

    # short label used in report item names
    def label(self) -> str:
        return f"A={self.A!r},B={self.B!r},C={self.C!r}"


# Kratzer potential written with dissociation energy and bond length
class KratzerForm(BaseModel):
    model_config = ConfigDict(frozen=True)

    kappa: float = Field(gt=0)
    r_e: float = Field(gt=0)
    variant: KratzerVariant = KratzerVariant.KRATZER_FUES


# quantum numbers (N, l, n_r) of one radial problem
class Channel(BaseModel):
    model_config = ConfigDict(frozen=True)

    N: int = Field(ge=2)
    ell: int = Field(ge=0)
    n_r: int = Field(default=0, ge=0)

    def label(self) -> str:
        return f"N={self.N};l={self.ell};nr={self.n_r}"


# per-channel secondary quantities
class DerivedParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    radicand: float = Field(gt=0)
    v: float
    nu: float
    epsilon: float = Field(gt=0)
    alpha: float
    K: float


# closed-form bound-state energy of a channel
class EnergyLevel(BaseModel):
    model_config = ConfigDict(frozen=True)

    channel: Channel
    energy: float
    principal_n: float
    K: float


# degeneracy counts for a fixed dimension
class DegeneracyTable(BaseModel):
    N: int = Field(ge=3)
    rows: List[Tuple[int, int]] = []

    def counts(self) -> List[int]:
        return [count for _, count in self.rows]


# value and first derivative of one associated Laguerre polynomial
class LaguerreEval(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=0)
    alpha: float = Field(gt=-1)
    x: float = Field(ge=0)
    value: float
    derivative: float


# Hellmann-Feynman expectation values and both sides of the virial relation
class HftValues(BaseModel):
    model_config = ConfigDict(frozen=True)

    inv_r: float
    inv_r2: float
    beta: float
    kinetic: float
    potential: float
    virial_lhs: float
    virial_rhs: float

    @computed_field
    @property
    def virial_residual(self) -> float:
        scale = max(abs(self.virial_lhs), abs(self.virial_rhs), 1e-300)
        return abs(self.virial_lhs - self.virial_rhs) / scale


# ladder coefficients at one rung
class LadderCoeffs(BaseModel):
    model_config = ConfigDict(frozen=True)

    ell_minus: float = Field(ge=0)
    ell_plus: float = Field(gt=0)
    ell_zero: float


# discretized reduced radial problem on (0, r_max)
class FdProblem(BaseModel):
    model_config = ConfigDict(frozen=True)

    params: PotentialParams
    N: int = Field(ge=2)
    ell: int = Field(ge=0)
    r_max: float = Field(gt=0)
    grid_points: int = Field(ge=100)

    # interior nodes are h, 2h, ..., grid_points*h with U(0) = U(r_max) = 0
    @computed_field
    @property
    def spacing(self) -> float:
        return self.r_max / (self.grid_points + 1)

    # same box with every interval halved
    def refined(self) -> "FdProblem":
        return self.model_copy(update={"grid_points": 2 * self.grid_points + 1})


# outcome of one closed-form vs oracle comparison
class ReportStatus(str, Enum):
    MATCH = "match"
    PAPER_TYPO_FLAGGED = "paper_typo_flagged"
    MISMATCH = "mismatch"


# one row of the verification report
class ReportItem(BaseModel):
    name: str
    paper_form: str
    computed: float
    oracle: float
    rel_error: float = Field(ge=0)
    tolerance: float = Field(gt=0)
    status: ReportStatus
    corrected_form: Optional[str] = None
    literal: Optional[float] = None


# full verification report; metadata is kept apart from the items
class VerificationReport(BaseModel):
    metadata: Dict[str, Any] = {}
    items: List[ReportItem] = []

    # number of items per status
    def counts(self) -> Dict[str, int]:
        totals = {status.value: 0 for status in ReportStatus}
        for item in self.items:
            totals[item.status.value] += 1
        return totals

    def mismatches(self) -> List[ReportItem]:
        return [item for item in self.items if item.status == ReportStatus.MISMATCH]

    def flagged(self) -> List[ReportItem]:
        return [item for item in self.items if item.status == ReportStatus.PAPER_TYPO_FLAGGED]

    @property
    def passed(self) -> bool:
        return not self.mismatches()


DEFAULT_SWEEP_POTENTIALS: List[Tuple[float, float, float]] = [
    (1.0, 0.0, 0.0),
    (2.0, 1.0, 0.0),
    (2.0, 1.0, 1.0),
    (1.0, 0.5, 0.0),
]


# what build_report sweeps over
class SweepConfig(BaseModel):
    potentials: List[Tuple[float, float, float]] = Field(
        default_factory=lambda: list(DEFAULT_SWEEP_POTENTIALS)
    )
    dimensions: List[int] = Field(default_factory=lambda: [3, 4, 5])
    ells: List[int] = Field(default_factory=lambda: [0, 1])
    n_r_max: int = Field(default=2, ge=0, le=10)
    fd_levels: int = Field(default=3, ge=0, le=10)
    ladder_n_max: int = Field(default=4, ge=0, le=10)
    mu: float = Field(default=1.0, gt=0)
    hbar: float = Field(default=1.0, gt=0)
    tolerances: Dict[str, float] = {}
    epsilon_scale: float = Field(default=1.0, gt=0)
    strict_literal: bool = False

    def is_empty(self) -> bool:
        return not (self.potentials and self.dimensions and self.ells)


# output formats understood by the CLI
class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    TABLE = "table"


# parsed command line merged with an optional config file
class RunConfig(BaseModel):
    A: Optional[float] = None
    B: float = 0.0
    C: float = 0.0
    kratzer: Optional[KratzerForm] = None
    mu: float = Field(default=1.0, gt=0)
    hbar: float = Field(default=1.0, gt=0)
    dimensions: List[int] = Field(default_factory=lambda: [3], min_length=1)
    ells: List[int] = Field(default_factory=lambda: [0], min_length=1)
    n_rs: List[int] = Field(default_factory=lambda: [0], min_length=1)
    principal: List[int] = Field(default_factory=lambda: [1, 2, 3, 4, 5], min_length=1)
    output_format: OutputFormat = OutputFormat.TABLE
    tolerances: Dict[str, float] = {}
    grid: str = "lin:0.05:20:400"
    epsilon: Optional[float] = Field(default=None, gt=0)
    epsilon_scale: float = Field(default=1.0, gt=0)
    skip_unphysical: bool = False
    strict_literal: bool = False
    check_norm: bool = False
    paper_table: bool = False
