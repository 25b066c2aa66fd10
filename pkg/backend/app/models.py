from fractions import Fraction
from typing import Dict, List, Optional, Union
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class FieldKind(str, Enum):
    """Base field enumeration"""
    RATIONALS = "rationals"
    REAL_QUADRATIC = "real_quadratic"


class Target(str, Enum):
    """CLI target enumeration"""
    GENUS = "genus"
    IDEAL_CLASSES = "ideal-classes"
    ORDERS = "orders"
    MASS = "mass"
    VERIFY = "verify"


class OutputFormat(str, Enum):
    """Report format enumeration"""
    JSON = "json"
    TABLE = "table"


class CheckStatus(str, Enum):
    """Check outcome enumeration"""
    PASS = "PASS"
    FAIL = "FAIL"


def rational_str(value) -> str:
    """Canonical "p/q" (or "p") rendering of an exact rational"""
    return str(Fraction(value))


class JobSpec(BaseModel):
    """One command line job"""
    model_config = ConfigDict(use_enum_values=False)

    field: FieldKind = FieldKind.RATIONALS
    d: Optional[int] = None
    a: str = "1"
    b: str = "1"
    target: Target = Target.GENUS
    ideal: str = "unit"
    output: OutputFormat = OutputFormat.JSON
    denominator_cap: int = Field(32, ge=1)
    threads: int = Field(1, ge=1)
    seed: Optional[int] = None

    @model_validator(mode="after")
    def validate_field(self):
        """Validate d against the field kind and the algebra entries against the field"""
        from app.field_arith import make_field, parse_elem, parse_ideal

        if self.field == FieldKind.REAL_QUADRATIC:
            if self.d is None:
                raise ValueError("--d is required for real quadratic fields")
        elif self.d is not None:
            raise ValueError("--d only applies to real quadratic fields")

        K = make_field(self.field, self.d)
        self.a = str(parse_elem(K, self.a))
        self.b = str(parse_elem(K, self.b))
        if self.target == Target.GENUS:
            parse_ideal(K, self.ideal)
        return self

    @field_validator("ideal")
    def validate_ideal(cls, v):
        """Validate ideal spec is not empty"""
        if not v.strip():
            raise ValueError("Ideal spec cannot be empty")
        return v.strip()


class IdealReport(BaseModel):
    """Fractional ideal as a norm:HNF pair"""
    spec: str
    norm: str
    hnf: List[List[int]]
    denominator: int


class FieldReport(BaseModel):
    """Base field summary"""
    kind: FieldKind
    d: Optional[int] = None
    discriminant: int
    fundamental_unit: Optional[str] = None
    class_number: int
    narrow_class_number: int
    class_group: List[int]
    narrow_reps: List[IdealReport]
    zeta_minus_one: str


class AlgebraReport(BaseModel):
    """Quaternion algebra summary"""
    a: str
    b: str
    ramified_primes: List[IdealReport]
    maximal_order: List[List[int]]
    maximal_order_denominator: int


class GramReport(BaseModel):
    """Exact trace Gram as matrix / denominator, plus its primitive integral rescaling factor and determinant"""
    matrix: List[List[int]]
    denominator: int
    scale: str
    determinant: int


class GenusClassReport(BaseModel):
    """One proper isometry class"""
    index: int
    left_type: int
    right_type: int
    unit_coset: str
    weight: str
    x_J: str
    alpha_u: str
    aut_plus_order: int
    ideal: List[List[int]]
    ideal_denominator: int
    trace_gram: GramReport
    trace_minimum: str
    rescaled_minimum: int


class GenusResults(BaseModel):
    """Genus enumeration results"""
    ideal: IdealReport
    class_count: int
    siegel_mass: str
    mass_sum: str
    classes: List[GenusClassReport]


class IdealClassRow(BaseModel):
    """Right ideal class representative"""
    index: int
    norm: IdealReport
    narrow_class: int
    left_type: int
    hnf: List[List[int]]
    denominator: int


class IdealClassResults(BaseModel):
    """Right ideal classes of the base maximal order"""
    class_number: int
    type_number: int
    eichler_mass: str
    classes: List[IdealClassRow]


class TypeRow(BaseModel):
    """Unit and normalizer data of one maximal order type"""
    index: int
    norm_one_mod_pm1: int
    unit_index: int
    norm_image: List[str]
    x: int
    f: int
    normalizer_norms: List[str]
    two_sided_class_number: int


class OrderResults(BaseModel):
    """Maximal order types"""
    type_number: int
    types: List[TypeRow]
    norm_classes: List[List[int]]


class MassResults(BaseModel):
    """Mass formulas"""
    eichler_mass: str
    mass_per_narrow_class: str
    siegel_mass: str
    direct_mass: Optional[str] = None


class CheckResult(BaseModel):
    """One named consistency check"""
    name: str
    status: CheckStatus
    detail: str = ""


class Report(BaseModel):
    """Top level report"""
    spec: JobSpec
    field: FieldReport
    algebra: AlgebraReport
    results: Union[GenusResults, IdealClassResults, OrderResults, MassResults, Dict[str, str]]
    checks: List[CheckResult] = Field(default_factory=list)
    timings: Dict[str, float] = Field(default_factory=dict)

    def failed(self) -> bool:
        return any(check.status == CheckStatus.FAIL for check in self.checks)
