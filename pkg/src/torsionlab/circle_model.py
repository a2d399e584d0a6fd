"""The frustum F of a circular cone: cells, harmonic data, torsions, limits.

F = [l1, l2] x S^1 with metric dr² + r² sin²α dθ². Its boundary circles are
W1 (radius l1 sin α) and W2 (radius l2 sin α).

Cells of the product structure: 0-cells c00 on W2 and c01 on W1, 1-cells
c10 on W1, c11 radial and c12 on W2, and one 2-cell c2.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from torsionlab.chain_torsion import (
    ChainComplexData,
    HomologyBasisData,
    LogTorsion,
    ShortExactSequence,
    betti_ranks,
    identity,
    pair_sequence_torsion_log,
    torsion_log,
    validate_complex,
    zeros,
)
from torsionlab.config import max_workers
from torsionlab.constants import (
    CONE_SWEEP_DEPTH,
    CYLINDER_EXPONENTS,
    RECONCILIATION_L1_VALUES,
    TOLERANCES,
    BoundaryCondition,
    CrossProductKind,
    Preset,
    Representation,
    RTorsionVariant,
    ZetaMethod,
)
from torsionlab.frustum_formulas import (
    FrustumParams,
    cm_assemble,
    cone_analytic_torsion_log,
    frustum_analytic_torsion_log,
    frustum_rtorsion_log,
    limit_upsilon_log,
    tau_T_log_derived,
    tau_T_reconciliation,
    upsilon_log,
)
from torsionlab.spectral_zeta import (
    analytic_torsion_closed_form,
    cross_product,
    torsion_zeta_evaluation,
    torsion_zeta_log,
)

logger = logging.getLogger(__name__)

STRAY_CELL_NOTE = (
    "The printed boundary of c2 contains the 0-cell c01; it cannot enter a "
    "degree-1 boundary and is dropped"
)


class CircleModelError(Exception):
    pass


@dataclass(frozen=True)
class CircleFrustum:
    l1: float
    l2: float
    alpha: float

    def __post_init__(self) -> None:
        if not (0.0 < self.l1 < self.l2):
            raise CircleModelError(f"Need 0 < l1 < l2, got l1={self.l1}, l2={self.l2}")
        if not (0.0 < self.alpha < math.pi / 2):
            raise CircleModelError(f"α must lie in (0, π/2), got {self.alpha}")

    @classmethod
    def from_nu(cls, l1: float, l2: float, nu: float) -> "CircleFrustum":
        if nu <= 1.0:
            raise CircleModelError(f"ν = 1/sin α must exceed 1, got {nu}")
        return cls(l1, l2, math.asin(1.0 / nu))

    def with_l1(self, l1: float) -> "CircleFrustum":
        return replace(self, l1=l1)

    @property
    def sin_alpha(self) -> float:
        return math.sin(self.alpha)

    @property
    def nu(self) -> float:
        return 1.0 / self.sin_alpha

    @property
    def log_ratio(self) -> float:
        return math.log1p((self.l2 - self.l1) / self.l1)

    @property
    def volume(self) -> float:
        return math.pi * self.sin_alpha * (self.l2 - self.l1) * (self.l2 + self.l1)

    @property
    def params(self) -> FrustumParams:
        return FrustumParams(self.l1, self.l2, 1, (1, 1))

    @property
    def section_log_torsion(self) -> float:
        """log τ_R(S^1, g) = log(2π sin α) for the unit-radius section metric."""
        return math.log(2.0 * math.pi * self.sin_alpha)

    @property
    def skeleton_log_torsion(self) -> float:
        """log τ(W_(0)) = ½ log(2π l2 sin α)."""
        return 0.5 * math.log(2.0 * math.pi * self.l2 * self.sin_alpha)


@dataclass(frozen=True)
class HarmonicData:
    """Norms of the harmonic forms 1 and dθ and their De Rham images.

    The H_1 image κ(c10 - c12) is read with c12 oriented as the boundary of
    W2, which in product coordinates is the cycle κ(c10 + c12).
    """

    norm_one: float
    norm_dtheta: float
    kappa: float
    z0: Tuple[float, float]
    z1: Tuple[float, float, float]

    def homology_basis(self, c: ChainComplexData) -> HomologyBasisData:
        return HomologyBasisData.from_vectors(c, {0: [self.z0], 1: [self.z1]})


@dataclass(frozen=True)
class MixedAnomaly:
    component_sum: float
    global_value: float


@dataclass(frozen=True)
class LimitSweep:
    parameters: Tuple[float, ...]
    values: Tuple[float, ...]
    increments: Tuple[float, ...]
    limit_estimate: float
    rate_exponent: float
    target: Optional[float] = None

    @property
    def decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.increments, self.increments[1:]))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "parameters": list(self.parameters),
            "values": list(self.values),
            "increments": list(self.increments),
            "limit_estimate": self.limit_estimate,
            "rate_exponent": self.rate_exponent,
            "target": self.target,
            "decreasing": self.decreasing,
        }


@dataclass(frozen=True)
class Check:
    check: str
    lhs: float
    rhs: float
    tol: float
    notes: str = ""
    relation: str = "eq"

    @property
    def abs_diff(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def passed(self) -> bool:
        if self.relation == "ge":
            return self.lhs >= self.rhs
        if self.relation == "le":
            return self.lhs <= self.rhs
        return self.abs_diff <= self.tol

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check": self.check,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "abs_diff": self.abs_diff,
            "tol": self.tol,
            "pass": self.passed,
            "relation": self.relation,
            "notes": self.notes,
        }


@dataclass(frozen=True)
class Discrepancy:
    name: str
    value: float
    notes: str

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "value": self.value, "notes": self.notes}


@dataclass(frozen=True)
class VerificationReport:
    parameters: Dict[str, float]
    checks: Tuple[Check, ...]
    discrepancies: Tuple[Discrepancy, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[str]:
        return [c.check for c in self.checks if not c.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "parameters": dict(self.parameters),
            "checks": [c.to_dict() for c in self.checks],
            "discrepancies": [d.to_dict() for d in self.discrepancies],
            "pass": self.passed,
        }


def build_complex(
    f: CircleFrustum, preset: Preset, rep: Representation = Representation.TRIVIAL
) -> ChainComplexData:
    """Cellular chain complex of F twisted by a rank-one representation.

    ``product_cw`` is the product structure on S^1 x I, a valid complex for
    both representations. ``paper_figure_1`` keeps the published boundary of
    c2, which does not satisfy ∂∂ = 0.
    """
    t = rep.value
    d1 = [[0, -1, t - 1], [t - 1, 1, 0]]
    if preset is Preset.PRODUCT_CW:
        d2 = [[1], [1 - t], [-1]]
    else:
        logger.info(STRAY_CELL_NOTE)
        d2 = [[1], [-t], [-1]]
    c = ChainComplexData.from_matrices((2, 3, 1), [d1, d2])
    if preset is Preset.PAPER_FIGURE_1:
        validate_complex(c)
    return c


def harmonic_data(f: CircleFrustum) -> HarmonicData:
    norm_one = math.sqrt(f.volume)
    norm_dtheta = math.sqrt(2.0 * math.pi / f.sin_alpha * f.log_ratio)
    kappa = math.sqrt(f.log_ratio) / math.sqrt(2.0 * math.pi * f.sin_alpha)
    return HarmonicData(
        norm_one=norm_one,
        norm_dtheta=norm_dtheta,
        kappa=kappa,
        z0=(norm_one, norm_one),
        z1=(kappa, 0.0, kappa),
    )


def rtorsion_closed_form(f: CircleFrustum) -> float:
    """log(π sin α √(2(l2² - l1²)) / √log(l2/l1))."""
    return (
        math.log(math.pi * f.sin_alpha)
        + 0.5 * math.log(2.0 * (f.l2 - f.l1) * (f.l2 + f.l1))
        - 0.5 * math.log(f.log_ratio)
    )


def _absolute_chain_torsion(f: CircleFrustum) -> LogTorsion:
    c = build_complex(f, Preset.PRODUCT_CW)
    return torsion_log(c, harmonic_data(f).homology_basis(c))


def _pair_relative_complex(
    rep: Representation = Representation.TRIVIAL,
) -> ChainComplexData:
    """C(F, W2): cells c01; c10, c11; c2."""
    t = rep.value
    return ChainComplexData.from_matrices((1, 2, 1), [[[t - 1, 1]], [[1], [1 - t]]])


def rtorsion_circle(f: CircleFrustum, variant: RTorsionVariant) -> LogTorsion:
    """R torsion of F for the trivial representation.

    Args:
        f (CircleFrustum): The frustum.
        variant (RTorsionVariant): ABS (chain level with harmonic bases),
            REL (its inverse) or PAIR_W2 (the acyclic pair (F, W2)).

    Returns:
        LogTorsion: The torsion.
    """
    if variant is RTorsionVariant.PAIR_W2:
        relative = _pair_relative_complex()
        return torsion_log(relative, HomologyBasisData.empty(relative))
    absolute = _absolute_chain_torsion(f)
    expected = rtorsion_closed_form(f)
    if abs(absolute.value - expected) > TOLERANCES["chain_closed_form"]:
        raise CircleModelError(
            f"Chain-level torsion {absolute.value} differs from {expected}"
        )
    if variant is RTorsionVariant.REL:
        return -absolute
    return absolute


def sign_representation_torsion(f: CircleFrustum) -> LogTorsion:
    """Torsion of the acyclic complex twisted by t -> -1."""
    c = build_complex(f, Preset.PRODUCT_CW, Representation.SIGN)
    if any(betti_ranks(c)):
        raise CircleModelError("Sign-twisted complex is not acyclic")
    return torsion_log(c, HomologyBasisData.empty(c))


def pair_complexes(f: CircleFrustum) -> ShortExactSequence:
    """0 -> C(W2) -> C(F) -> C(F, W2) -> 0 with harmonic bases on W2 and F."""
    total = build_complex(f, Preset.PRODUCT_CW)
    sub = ChainComplexData.from_matrices((1, 1), [[[0]]])
    quotient = _pair_relative_complex()
    length = 2.0 * math.pi * f.l2 * f.sin_alpha
    sub_homology = HomologyBasisData.from_vectors(
        sub, {0: [[math.sqrt(length)]], 1: [[1.0 / math.sqrt(length)]]}
    )
    one = identity(1)
    inclusion = (
        sympy.ImmutableMatrix([[1], [0]]),
        sympy.ImmutableMatrix([[0], [0], [1]]),
        zeros(1, 0),
    )
    projection = (
        sympy.ImmutableMatrix([[0, 1]]),
        sympy.ImmutableMatrix([[1, 0, 0], [0, 1, 0]]),
        one,
    )
    return ShortExactSequence(
        sub=sub,
        sub_homology=sub_homology,
        total=total,
        total_homology=harmonic_data(f).homology_basis(total),
        quotient=quotient,
        quotient_homology=HomologyBasisData.empty(quotient),
        inclusion=inclusion,
        projection=projection,
    )


def anomaly_circle(
    f: CircleFrustum, j: int, bc: BoundaryCondition, rk: int = 1
) -> float:
    """Anomaly term of the boundary circle W_j; ∫_{W_j} B = sin α."""
    if j not in (1, 2):
        raise CircleModelError(f"Boundary component must be 1 or 2, got {j}")
    if bc is BoundaryCondition.ABS:
        return (-1) ** j / 2.0 * rk * f.sin_alpha
    if bc is BoundaryCondition.REL:
        return (-1) ** (j + 1) / 2.0 * rk * f.sin_alpha
    raise CircleModelError("Per-component anomalies are absolute or relative")


def total_anomaly(f: CircleFrustum, bc: BoundaryCondition, rk: int = 1) -> float:
    return anomaly_circle(f, 1, bc, rk) + anomaly_circle(f, 2, bc, rk)


def mixed_anomaly(f: CircleFrustum, rk: int = 1) -> MixedAnomaly:
    """Absolute on W1 and relative on W2, per component and from the global formula."""
    return MixedAnomaly(
        component_sum=anomaly_circle(f, 1, BoundaryCondition.ABS, rk)
        + anomaly_circle(f, 2, BoundaryCondition.REL, rk),
        global_value=rk * f.sin_alpha,
    )


def analytic_torsion_circle(
    f: CircleFrustum,
    bc: BoundaryCondition = BoundaryCondition.ABS,
    method: ZetaMethod = ZetaMethod.CLOSED_FORM,
    **kwargs: Any,
) -> float:
    """log T of F from the spectral assembly (mixed conditions in closed form)."""
    if bc is BoundaryCondition.MIXED:
        return frustum_analytic_torsion_log(f.params, 0.0, bc, f.sin_alpha)
    value = torsion_zeta_log(f.nu, f.l1, f.l2, method, **kwargs)
    return value if bc is BoundaryCondition.ABS else -value


def printed_upsilon_log(f: CircleFrustum) -> float:
    """log Υ with the published denominator.

    The denominator is √(π(l2² - l1²) sin α / (l2 log(l2/l1))).
    """
    denominator = 0.5 * math.log(
        math.pi * (f.l2 - f.l1) * (f.l2 + f.l1) * f.sin_alpha / (f.l2 * f.log_ratio)
    )
    return rtorsion_closed_form(f) - denominator


def printed_cone_limit_log(f: CircleFrustum) -> float:
    """log √(π l2² sin α)."""
    return 0.5 * math.log(math.pi * f.l2 * f.l2 * f.sin_alpha)


def _upsilon(f: CircleFrustum, l1: float) -> float:
    return upsilon_log(
        f.params.with_l1(l1), f.section_log_torsion, f.skeleton_log_torsion
    )


def _rate(parameters: Sequence[float], increments: Sequence[float]) -> float:
    x = np.log(np.asarray(parameters, dtype=float))
    y = np.log(np.asarray(increments, dtype=float))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def cone_limit_sweep(f: CircleFrustum, depth: int = CONE_SWEEP_DEPTH) -> LimitSweep:
    """log Υ at l1 = l2 2^{-j}, j = 1..depth, with a Richardson limit.

    Υ approaches its limit like l1², so halving l1 shrinks the error by 4.
    """
    if depth < 3:
        raise CircleModelError(f"Cone sweep needs depth >= 3, got {depth}")
    l1_values = tuple(f.l2 * 2.0**-j for j in range(1, depth + 1))
    values = tuple(_upsilon(f, l1) for l1 in l1_values)
    increments = tuple(abs(b - a) for a, b in zip(values, values[1:]))
    limit = values[-1] + (values[-1] - values[-2]) / 3.0
    rate = _rate(l1_values[1:], increments)
    return LimitSweep(l1_values, values, increments, limit, rate)


def cylinder_limit_sweep(
    b1: float, h: float, exponents: Sequence[int] = CYLINDER_EXPONENTS
) -> LimitSweep:
    """T_abs at α = 10^{-k} with b1 = l1 sin α and h = (l2 - l1) cos α fixed."""
    if b1 <= 0 or h <= 0:
        raise CircleModelError(f"Need b1 > 0 and h > 0, got b1={b1}, h={h}")
    alphas = tuple(10.0**-k for k in exponents)
    values = []
    for alpha in alphas:
        l1 = b1 / math.sin(alpha)
        l2 = l1 + h / math.cos(alpha)
        values.append(math.exp(torsion_zeta_log(1.0 / math.sin(alpha), l1, l2)))
    target = 2.0 * math.pi * b1
    errors = tuple(abs(v - target) for v in values)
    return LimitSweep(
        alphas, tuple(values), errors, values[-1], _rate(alphas, errors), target
    )


def reconciliation_residual(f: CircleFrustum) -> Tuple[float, float]:
    """(exponent c, max |difference - c log l2|) over the reconciliation l1 grid."""
    scale = f.l2 if f.l2 <= max(RECONCILIATION_L1_VALUES) else 1.0
    residual = 0.0
    exponent = 0.0
    for value in RECONCILIATION_L1_VALUES:
        record = tau_T_reconciliation(f.params.with_l1(value * scale))
        exponent = float(record.exponent)
        residual = max(residual, abs(record.difference - exponent * math.log(f.l2)))
    return exponent, residual


def _discrepancies(f: CircleFrustum, cone: LimitSweep) -> Tuple[Discrepancy, ...]:
    exponent, _ = reconciliation_residual(f)
    mixed = mixed_anomaly(f)
    small = 1e-3 / f.l2
    f0 = cross_product(CrossProductKind.F, 0.0, f.l1, f.l2, small)
    return (
        Discrepancy(
            "frustum_proposition_l2_exponent",
            exponent,
            "log τ(T) as printed minus derived is this multiple of -log l2",
        ),
        Discrepancy(
            "printed_upsilon_denominator",
            printed_upsilon_log(f.with_l1(cone.parameters[-1])) - cone.limit_estimate,
            "published Υ denominator versus the regularisation it abbreviates",
        ),
        Discrepancy(
            "mixed_anomaly_sign",
            mixed.global_value - mixed.component_sum,
            "global value ∫B minus the sum of per-component anomalies",
        ),
        Discrepancy(
            "f0_sign_at_origin",
            f0 * math.pi / (2.0 * f.log_ratio),
            "F_0 at small z over (2/π)log(l2/l1); the product constant is positive",
        ),
    )


def verify_suite(
    f: CircleFrustum,
    semi_numeric: bool = False,
    **zeta_options: Any,
) -> VerificationReport:
    """Cheeger-Müller, pair-sequence, limit and reconciliation checks.

    Failed checks are recorded, never raised.
    """
    chain = _absolute_chain_torsion(f)
    analytic = torsion_zeta_log(f.nu, f.l1, f.l2)
    abs_anomaly = total_anomaly(f, BoundaryCondition.ABS)
    rel_anomaly = total_anomaly(f, BoundaryCondition.REL)
    log_tau = chain.value
    checks: List[Check] = [
        Check(
            "cheeger_muller",
            cm_assemble(log_tau, 0, abs_anomaly),
            analytic,
            TOLERANCES["cheeger_muller"],
            "χ(∂F) = 0 and the absolute anomaly cancels",
        ),
        Check(
            "chain_closed_form",
            log_tau,
            rtorsion_closed_form(f),
            TOLERANCES["chain_closed_form"],
        ),
        Check(
            "frustum_formula_derived",
            frustum_rtorsion_log(f.params, f.section_log_torsion).derived,
            log_tau,
            TOLERANCES["chain_closed_form"],
        ),
        Check(
            "closed_form_assembly",
            analytic,
            analytic_torsion_closed_form(f.nu, f.l1, f.l2),
            TOLERANCES["closed_form_assembly"],
        ),
        Check("anomaly_total_abs", abs_anomaly, 0.0, TOLERANCES["anomaly_total"]),
        Check("anomaly_total_rel", rel_anomaly, 0.0, TOLERANCES["anomaly_total"]),
    ]
    sequence = pair_complexes(f)
    les = pair_sequence_torsion_log(sequence)
    sub = torsion_log(sequence.sub, sequence.sub_homology)
    relative = rtorsion_circle(f, RTorsionVariant.PAIR_W2)
    checks.append(
        Check(
            "pair_sequence",
            log_tau,
            (sub + relative + les).value,
            TOLERANCES["chain_closed_form"],
            "log τ(F) = log τ(W2) + log τ(F, W2) + log τ(T)",
        )
    )
    checks.append(
        Check(
            "les_torsion_formula",
            les.value,
            tau_T_log_derived(f.params),
            TOLERANCES["chain_closed_form"],
        )
    )
    if semi_numeric:
        evaluation = torsion_zeta_evaluation(
            f.nu, f.l1, f.l2, ZetaMethod.CONTINUATION_ORACLE, **zeta_options
        )
        checks.append(
            Check(
                "cheeger_muller_semi_numeric",
                evaluation.value_at_0_derivative,
                log_tau,
                TOLERANCES["semi_numeric"],
                f"axial error estimate {evaluation.error_estimate:.3g}",
            )
        )
    exponent, residual = reconciliation_residual(f)
    checks.append(
        Check(
            "reconciliation_fit",
            residual,
            0.0,
            TOLERANCES["reconciliation_fit"],
            f"derived minus printed log τ(T) = {exponent} log l2",
        )
    )
    cone = cone_limit_sweep(f)
    derived_limit = limit_upsilon_log(f.params, f.section_log_torsion)
    checks.extend(
        [
            Check(
                "cone_limit",
                cone.limit_estimate,
                derived_limit,
                TOLERANCES["cone_limit"],
                "fitted lim log Υ against the regularised limit",
            ),
            Check(
                "cone_limit_printed",
                cone.limit_estimate,
                printed_cone_limit_log(f),
                TOLERANCES["cone_limit"],
                "fitted lim log Υ against log √(π l2² sin α)",
            ),
            Check(
                "cone_analytic_torsion",
                cone_analytic_torsion_log(f.params, f.section_log_torsion),
                derived_limit,
                TOLERANCES["chain_closed_form"],
                "cone analytic torsion without boundary term",
            ),
            Check(
                "cone_rate",
                cone.rate_exponent,
                TOLERANCES["cone_rate"],
                0.0,
                "empirical exponent of |Υ(l1) - Υ(l1/2)|",
                relation="ge",
            ),
            Check(
                "cone_increments_decreasing",
                float(cone.decreasing),
                1.0,
                0.0,
            ),
        ]
    )
    b1 = f.l1 * f.sin_alpha
    h = (f.l2 - f.l1) * math.cos(f.alpha)
    cylinder = cylinder_limit_sweep(b1, h)
    checks.extend(
        [
            Check(
                "cylinder_limit",
                cylinder.increments[-1],
                TOLERANCES["cylinder_limit"],
                0.0,
                f"|T_abs - 2π b1| at α = {cylinder.parameters[-1]:.0e}",
                relation="le",
            ),
            Check(
                "cylinder_errors_decreasing",
                float(cylinder.decreasing),
                1.0,
                0.0,
            ),
        ]
    )
    report = VerificationReport(
        parameters={"l1": f.l1, "l2": f.l2, "alpha": f.alpha, "nu": f.nu},
        checks=tuple(checks),
        discrepancies=_discrepancies(f, cone),
    )
    for name in report.failures():
        logger.warning(f"Check {name} failed for l1={f.l1}, l2={f.l2}, α={f.alpha}")
    return report


def verify_grid(frusta: Sequence[CircleFrustum]) -> List[VerificationReport]:
    """verify_suite over several frusta, reports in input order."""
    with ThreadPoolExecutor(max_workers=max_workers()) as pool:
        return list(pool.map(verify_suite, frusta))
