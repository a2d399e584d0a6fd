import math
from enum import Enum
from typing import Any, Dict


class CrossProductKind(Enum):
    F = "F"
    FTILDE = "Ftilde"


class BoundaryCondition(Enum):
    ABS = "abs"
    REL = "rel"
    MIXED = "mixed"


class ZeroFamily(Enum):
    A_NU = "a_nu"
    ATILDE_NU = "atilde_nu"
    A_0 = "a_0"
    ATILDE_0 = "atilde_0"


class ZetaMethod(Enum):
    CLOSED_FORM = "closed_form"
    CONTINUATION_ORACLE = "continuation_oracle"


class Preset(Enum):
    PAPER_FIGURE_1 = "paper_figure_1"
    PRODUCT_CW = "product_cw"


class Representation(Enum):
    TRIVIAL = 1
    SIGN = -1


class RTorsionVariant(Enum):
    ABS = "abs"
    REL = "rel"
    PAIR_W2 = "pair_W2"


class OutputFormat(Enum):
    JSON = "json"
    CSV = "csv"


class Command(Enum):
    RTORSION = "rtorsion"
    ANALYTIC = "analytic"
    ZEROS = "zeros"
    VERIFY = "verify"
    LIMITS = "limits"
    REPORT = "report"


# Riemann zeta at the origin.
ZETA_R_AT_0 = -0.5
ZETA_R_PRIME_AT_0 = -0.5 * math.log(2.0 * math.pi)
EULER_GAMMA = 0.5772156649015329

THREADS_ENV_VAR = "TORSIONLAB_THREADS"
DEFAULT_MAX_WORKERS = 4

DEFAULT_PRECISION = 12
SYMPY_DIGITS = 40

SCAN_STEPS_PER_SPACING = 8
SPACING_TOLERANCE = 0.25
SPACING_CHECK_FROM = 20

DEFAULT_ZERO_COUNT = 10_000
DEFAULT_ZERO_TOL = 1e-12
ORACLE_ERROR = 1e-5

CONE_SWEEP_DEPTH = 20
CYLINDER_EXPONENTS = (2, 3, 4, 5, 6)

TOLERANCES: Dict[str, Any] = {
    "cheeger_muller": 1e-10,
    "chain_closed_form": 1e-12,
    "anomaly_total": 1e-14,
    "closed_form_assembly": 1e-14,
    "semi_numeric": 1e-4,
    "reconciliation_fit": 1e-12,
    "cone_limit": 1e-9,
    "cone_rate": 1.5,
    "cylinder_limit": 1e-4,
}

RECONCILIATION_L1_VALUES = (0.3, 0.5, 0.7)

SCHEMA_FILES: Dict[str, str] = {
    "chain-complex": "chain-complex.json",
    "verification-report": "verification-report.json",
    "zeta-evaluation": "zeta-evaluation.json",
    "run-report": "run-report.json",
}
