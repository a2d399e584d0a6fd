"""Bessel cross products, their zeros and the zeta data of the circle frustum.

The second solution is Y_ν for every order. For non-integer ν the
J_{-ν} form of the cross products equals -sin(νπ) times the Y_ν form, so
the zeros coincide; the Y_ν form stays non-degenerate at integer orders.
"""

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Any, Dict, List, Optional, Tuple

import mpmath
import numpy as np
from scipy import integrate, optimize, special

from torsionlab.config import max_workers
from torsionlab.constants import (
    DEFAULT_ZERO_COUNT,
    DEFAULT_ZERO_TOL,
    EULER_GAMMA,
    ORACLE_ERROR,
    SCAN_STEPS_PER_SPACING,
    SPACING_CHECK_FROM,
    SPACING_TOLERANCE,
    ZETA_R_AT_0,
    ZETA_R_PRIME_AT_0,
    BoundaryCondition,
    CrossProductKind,
    ZeroFamily,
    ZetaMethod,
)

logger = logging.getLogger(__name__)

BRENTQ_RTOL = 4.0 * np.finfo(float).eps
SLOPE_STEP = 1e-3
# the fitted c2/k² + c4/k⁴ tail leaves an error decaying like K^-5
TAIL_ERROR_ORDER = 5


class SpectralError(Exception):
    pass


class SpectralRangeError(SpectralError):
    pass


class FindZerosError(SpectralError):
    pass


class OracleConvergenceError(SpectralError):
    pass


@dataclass(frozen=True)
class ZeroTable:
    """First positive zeros a_1 < ... < a_K of a cross product."""

    kind: CrossProductKind
    order: float
    l1: float
    l2: float
    zeros: Tuple[float, ...]
    tol: float

    @property
    def spacing(self) -> float:
        return math.pi / (self.l2 - self.l1)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.zeros, dtype=float)

    def spacing_violations(self) -> List[int]:
        """Indices k > 20 whose gap a_{k+1} - a_k is off π/L by 25% or more."""
        gaps = np.diff(self.as_array())
        bad = np.abs(gaps - self.spacing) >= SPACING_TOLERANCE * self.spacing
        return [int(i) + 1 for i in np.nonzero(bad)[0] if i + 1 > SPACING_CHECK_FROM]


@dataclass(frozen=True)
class ZetaEvaluation:
    value_at_0_derivative: float
    method: ZetaMethod
    error_estimate: float
    sequence: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sequence": self.sequence,
            "method": self.method.value,
            "value_at_0_derivative": self.value_at_0_derivative,
            "error_estimate": self.error_estimate,
        }


@dataclass(frozen=True)
class ProductRepresentation:
    value: float
    tail_factor: float
    tail_bound: float


@dataclass(frozen=True)
class LargeLambdaExpansion:
    """log Γ(-λ, S) ~ log_coefficient·log√(-λ) + constant + linear·√(-λ)."""

    value: float
    log_coefficient: float
    constant: float
    linear: float

    @property
    def zeta_at_0(self) -> float:
        return -0.5 * self.log_coefficient

    @property
    def zprime_at_0(self) -> float:
        return -self.constant


@dataclass(frozen=True)
class PhiTerms:
    phi1: float
    big_phi1: float
    residue: float
    finite_part: float
    measured_slope: float


@dataclass(frozen=True)
class DoubleSeriesTerms:
    a00: float
    a00_prime: float
    a01: float
    a01_prime: float
    phi_contribution: float
    difference: float


@dataclass(frozen=True)
class SpectrumFamily:
    family: ZeroFamily
    multiplicity: int


def _check_lengths(l1: float, l2: float) -> None:
    if not (0.0 < l1 < l2):
        raise SpectralError(f"Need 0 < l1 < l2, got l1={l1}, l2={l2}")


def _cross(kind: CrossProductKind, order: float, l1: float, l2: float, z: Any) -> Any:
    inner, outer = l1 * z, l2 * z
    if kind is CrossProductKind.F:
        return special.jv(order, outer) * special.yv(order, inner) - special.jv(
            order, inner
        ) * special.yv(order, outer)
    return special.jvp(order, inner) * special.yvp(order, outer) - special.jvp(
        order, outer
    ) * special.yvp(order, inner)


def cross_product(
    kind: CrossProductKind, nu_n: float, l1: float, l2: float, z: float
) -> float:
    """F_ν(z) = J_ν(l2 z)Y_ν(l1 z) - J_ν(l1 z)Y_ν(l2 z) or its derivative form
    F̃_ν(z) = J'_ν(l1 z)Y'_ν(l2 z) - J'_ν(l2 z)Y'_ν(l1 z).
    """
    _check_lengths(l1, l2)
    if z <= 0:
        raise SpectralError(f"Cross products are evaluated at z > 0, got {z}")
    value = float(_cross(kind, nu_n, l1, l2, z))
    if not math.isfinite(value):
        raise SpectralRangeError(
            f"{kind.value}_{nu_n}({z}) is not finite for l1={l1}, l2={l2}"
        )
    return value


def _log_positive(value: float, what: str) -> float:
    if not (math.isfinite(value) and value > 0.0):
        raise SpectralRangeError(f"{what} = {value} is outside the floating range")
    return math.log(value)


def _i_prime_scaled(nu: float, x: float) -> float:
    """I'_ν(x) e^{-x}."""
    return float(special.ive(nu + 1, x) + nu / x * special.ive(nu, x))


def _minus_k_prime_scaled(nu: float, x: float) -> float:
    """-K'_ν(x) e^{x}."""
    return float(0.5 * (special.kve(nu - 1, x) + special.kve(nu + 1, x)))


def log_gee(kind: CrossProductKind, nu: float, l1: float, l2: float, y: float) -> float:
    """log of the cross product on the imaginary axis, normalised positive.

    G_ν(y) = (2/π)[I_ν(l2 y)K_ν(l1 y) - I_ν(l1 y)K_ν(l2 y)] and
    G̃_ν(y) = (2/π)[I'_ν(l1 y)K'_ν(l2 y) - I'_ν(l2 y)K'_ν(l1 y)], evaluated
    through exponentially scaled I and K so large orders stay in range.
    """
    _check_lengths(l1, l2)
    if y <= 0:
        raise SpectralError(f"G is evaluated at y > 0, got {y}")
    outer, inner = l2 * y, l1 * y
    if kind is CrossProductKind.F:
        big = (
            _log_positive(float(special.ive(nu, outer)), f"ive({nu}, {outer})")
            + _log_positive(float(special.kve(nu, inner)), f"kve({nu}, {inner})")
            + outer
            - inner
        )
        small = (
            _log_positive(float(special.ive(nu, inner)), f"ive({nu}, {inner})")
            + _log_positive(float(special.kve(nu, outer)), f"kve({nu}, {outer})")
            + inner
            - outer
        )
    else:
        big = (
            _log_positive(_i_prime_scaled(nu, outer), f"I'({nu}, {outer})")
            + _log_positive(_minus_k_prime_scaled(nu, inner), f"K'({nu}, {inner})")
            + outer
            - inner
        )
        small = (
            _log_positive(_i_prime_scaled(nu, inner), f"I'({nu}, {inner})")
            + _log_positive(_minus_k_prime_scaled(nu, outer), f"K'({nu}, {outer})")
            + inner
            - outer
        )
    if small >= big:
        raise SpectralRangeError(f"Cancellation in G at y={y}, order {nu}")
    return math.log(2.0 / math.pi) + big + math.log1p(-math.exp(small - big))


def gee(kind: CrossProductKind, nu: float, l1: float, l2: float, y: float) -> float:
    if y == 0:
        return gee_at_zero(kind, nu, l1, l2)
    return math.exp(log_gee(kind, nu, l1, l2, y))


def _log_ratio_power_difference(nu: float, l1: float, l2: float) -> float:
    """log((l2/l1)^ν - (l1/l2)^ν) without overflow."""
    log_ratio = math.log1p((l2 - l1) / l1)
    return nu * log_ratio + math.log(-math.expm1(-2.0 * nu * log_ratio))


def gee_at_zero(kind: CrossProductKind, nu: float, l1: float, l2: float) -> float:
    """Constant of the product representation of G or G̃.

    For ν > 0 the G̃ value is the coefficient of y^{-2}.
    """
    _check_lengths(l1, l2)
    if nu < 0:
        raise SpectralError(f"Order must be >= 0, got {nu}")
    if nu == 0:
        if kind is CrossProductKind.F:
            return 2.0 / math.pi * math.log1p((l2 - l1) / l1)
        return (l2 - l1) * (l2 + l1) / (math.pi * l1 * l2)
    power = math.exp(_log_ratio_power_difference(nu, l1, l2))
    if kind is CrossProductKind.F:
        return power / (nu * math.pi)
    return nu * power / (math.pi * l1 * l2)


def _scan_and_refine(
    kind: CrossProductKind,
    order: float,
    l1: float,
    l2: float,
    count: int,
    tol: float,
    workers: int,
) -> List[float]:
    spacing = math.pi / (l2 - l1)
    step = spacing / SCAN_STEPS_PER_SPACING
    # No zero lies below order/l2: the eigenvalue exceeds ν²/r² on the annulus.
    start = max(order / l2, step)
    horizon = start + spacing * (count + 2) + 2.0 * (order + 1.0) / l1
    grid = np.arange(start, horizon + step, step)
    with np.errstate(all="ignore"):
        values = _cross(kind, order, l1, l2, grid)
    if not np.all(np.isfinite(values)):
        raise SpectralRangeError(
            f"{kind.value}_{order} overflows on the scan grid for l1={l1}, l2={l2}"
        )
    negative = np.signbit(values)
    brackets = np.nonzero(negative[:-1] != negative[1:])[0]
    if len(brackets) < count:
        raise FindZerosError(
            f"Bracketed {len(brackets)} of {count} zeros of {kind.value}_{order} "
            f"below z={horizon:.6g}"
        )
    brackets = brackets[:count]

    def f(z: float) -> float:
        return float(_cross(kind, order, l1, l2, z))

    def refine(indices: np.ndarray) -> List[float]:
        return [
            optimize.brentq(f, grid[i], grid[i + 1], xtol=tol, rtol=BRENTQ_RTOL)
            for i in indices
        ]

    chunks = [c for c in np.array_split(brackets, workers) if len(c)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        refined = list(pool.map(refine, chunks))
    return [z for chunk in refined for z in chunk]


def find_zeros(
    kind: CrossProductKind,
    nu_n: float,
    l1: float,
    l2: float,
    K: int = DEFAULT_ZERO_COUNT,
    tol: float = DEFAULT_ZERO_TOL,
    workers: Optional[int] = None,
) -> ZeroTable:
    """First K positive zeros of a cross product.

    Sign changes are bracketed on a grid of step (π/(l2 - l1))/8 and refined
    with Brent's method; brackets are refined on a thread pool and collected
    in index order.

    Args:
        kind (CrossProductKind): F or Ftilde.
        nu_n (float): Order ν n >= 0.
        l1 (float): Inner radius.
        l2 (float): Outer radius.
        K (int): Number of zeros.
        tol (float): Absolute refinement tolerance.
        workers (Optional[int]): Thread count; TORSIONLAB_THREADS by default.

    Returns:
        ZeroTable: The zeros in increasing order.
    """
    _check_lengths(l1, l2)
    if K < 1:
        raise SpectralError(f"K must be >= 1, got {K}")
    if tol <= 0:
        raise SpectralError(f"Tolerance must be positive, got {tol}")
    if nu_n < 0:
        raise SpectralError(f"Order must be >= 0, got {nu_n}")
    workers = workers or max_workers()
    zeros = _scan_and_refine(kind, nu_n, l1, l2, K, tol, workers)
    if any(b <= a for a, b in zip(zeros, zeros[1:])):
        raise FindZerosError(f"Zeros of {kind.value}_{nu_n} are not increasing")
    table = ZeroTable(kind, float(nu_n), l1, l2, tuple(zeros), tol)
    violations = table.spacing_violations()
    if violations:
        logger.warning(
            f"{len(violations)} gaps of {kind.value}_{nu_n} drift from π/L, "
            f"first at k={violations[0]}"
        )
    logger.debug(f"Found {K} zeros of {kind.value}_{nu_n}, last {zeros[-1]:.6f}")
    return table


def product_representation(table: ZeroTable, y: float) -> ProductRepresentation:
    """G_0(y) from its zeros: G_0(0) ∏_{k<=K}(1 + y²/a_k²) times a tail factor.

    The tail Σ_{k>K} 1/a_k² is replaced by (L/π)² ψ'(K + 1); ``tail_bound``
    bounds the log error of that replacement.
    """
    if table.order != 0:
        raise SpectralError("Product representations are implemented for order 0")
    zeros = table.as_array()
    count = len(zeros)
    scale = (table.l2 - table.l1) / math.pi
    head = math.fsum(np.log1p((y / zeros) ** 2).tolist())
    tail_sum = scale**2 * float(special.polygamma(1, count + 1))
    relative = abs(zeros[-1] / (count * table.spacing) - 1.0)
    tail_bound = y**4 * scale**4 * float(special.polygamma(3, count + 1)) / 12.0
    tail_bound += 2.0 * relative * y**2 * tail_sum
    constant = gee_at_zero(table.kind, 0.0, table.l1, table.l2)
    value = constant * math.exp(head + y**2 * tail_sum)
    return ProductRepresentation(value, math.exp(y**2 * tail_sum), tail_bound)


def large_lambda_expansion(
    kind: CrossProductKind, l1: float, l2: float, lam: float
) -> LargeLambdaExpansion:
    """Large -λ expansion of log Γ(-λ, S_0) or log Γ(-λ, S̃_0)."""
    _check_lengths(l1, l2)
    if lam >= 0:
        raise SpectralError(f"λ must be negative, got {lam}")
    if kind is CrossProductKind.F:
        log_ratio = math.log1p((l2 - l1) / l1)
        constant = 0.5 * math.log(l1 * l2) + math.log(log_ratio) + math.log(2.0)
    else:
        constant = -0.5 * math.log(l1 * l2) + math.log((l2 - l1) * (l2 + l1))
    root = math.sqrt(-lam)
    linear = -(l2 - l1)
    value = math.log(root) + constant + linear * root
    return LargeLambdaExpansion(value, 1.0, constant, linear)


def log_gamma_axial(kind: CrossProductKind, l1: float, l2: float, lam: float) -> float:
    """log Γ(-λ, S_0) = -log ∏(1 - λ/a_{0,k}²) from the product representation."""
    if lam >= 0:
        raise SpectralError(f"λ must be negative, got {lam}")
    y = math.sqrt(-lam)
    return -log_gee(kind, 0.0, l1, l2, y) + math.log(gee_at_zero(kind, 0.0, l1, l2))


def _axial_closed_form(kind: CrossProductKind, l1: float, l2: float) -> float:
    return large_lambda_expansion(kind, l1, l2, -1.0).zprime_at_0


def _corrected_log_sum(log_ratios: np.ndarray, count: int) -> float:
    """Σ_{k<=count} log(a_k/ρ_k) plus a fitted c2/k² + c4/k⁴ tail."""
    terms = log_ratios[:count]
    k = np.arange(1, count + 1, dtype=float)
    first = max(count // 10, 1) - 1
    design = np.column_stack([k[first:] ** -2, k[first:] ** -4])
    (c2, c4), *_ = np.linalg.lstsq(design, terms[first:], rcond=None)
    tail = (
        c2 * special.polygamma(1, count + 1)
        + c4 * special.polygamma(3, count + 1) / 6.0
    )
    return math.fsum(terms.tolist()) + float(tail)


def continuation_oracle(table: ZeroTable) -> Tuple[float, float]:
    """Z'(0) of Σ a_k^{-2s} from the zeros, with an error estimate.

    Z'(0) = 2ζ_R(0) log(L/π) + 2ζ_R'(0) - 2 Σ log(a_k/ρ_k), ρ_k = kπ/L.
    The tail-corrected sums over the first K/2 and all K zeros are combined
    by Richardson extrapolation. The estimate is twice their difference.
    """
    zeros = table.as_array()
    count = len(zeros)
    rho = np.arange(1, count + 1, dtype=float) * table.spacing
    log_ratios = np.log(zeros / rho)
    length = table.l2 - table.l1
    base = 2.0 * ZETA_R_AT_0 * math.log(length / math.pi) + 2.0 * ZETA_R_PRIME_AT_0
    full = _corrected_log_sum(log_ratios, count)
    half = _corrected_log_sum(log_ratios, max(count // 2, 1))
    ratio = 2.0**TAIL_ERROR_ORDER
    extrapolated = full + (full - half) / (ratio - 1.0)
    return base - 2.0 * extrapolated, 2.0 * abs(full - half)


def zprime0_axial(
    kind: CrossProductKind,
    l1: float,
    l2: float,
    method: ZetaMethod = ZetaMethod.CLOSED_FORM,
    K: int = DEFAULT_ZERO_COUNT,
    tol: float = DEFAULT_ZERO_TOL,
    error: float = ORACLE_ERROR,
    strict: bool = False,
) -> ZetaEvaluation:
    """Z'(0) for the order-0 zeros, S_0 (kind F) or S̃_0 (kind Ftilde)."""
    _check_lengths(l1, l2)
    sequence = "S0" if kind is CrossProductKind.F else "S0tilde"
    if method is ZetaMethod.CLOSED_FORM:
        return ZetaEvaluation(_axial_closed_form(kind, l1, l2), method, 0.0, sequence)
    table = find_zeros(kind, 0.0, l1, l2, K, tol)
    value, estimate = continuation_oracle(table)
    if estimate > error:
        message = (
            f"Tail estimate {estimate:.3g} for Z'(0, {sequence}) exceeds "
            f"the requested {error:.3g}"
        )
        if strict:
            raise OracleConvergenceError(message)
        logger.warning(message)
    return ZetaEvaluation(value, method, estimate, sequence)


def phi1(l1: float, l2: float, lam: float) -> float:
    """φ_1(λ) = ½(t2 - t1) - ½(t2³ - t1³), t_j = (1 - l_j²λ)^{-1/2}."""
    _check_lengths(l1, l2)
    if lam >= 0:
        raise SpectralError(f"φ_1 needs λ < 0, got {lam}")
    t1 = 1.0 / math.sqrt(1.0 - l1 * l1 * lam)
    t2 = 1.0 / math.sqrt(1.0 - l2 * l2 * lam)
    return 0.5 * (t2 - t1) - 0.5 * (t2**3 - t1**3)


def _mellin_term(l: float, k: int, s: float) -> float:
    """l^{2s} Γ(s + k/2) / (Γ(k/2) s)."""
    return float(l ** (2 * s) * special.gamma(s + k / 2) / (special.gamma(k / 2) * s))


def big_phi1(l1: float, l2: float, s: float) -> float:
    """Mellin transform Φ_1(s) of φ_1; analytic at 0 with Φ_1(0) = 0."""
    _check_lengths(l1, l2)
    if s == 0:
        return 0.0
    first = _mellin_term(l2, 1, s) - _mellin_term(l1, 1, s)
    third = _mellin_term(l2, 3, s) - _mellin_term(l1, 3, s)
    return 0.5 * first - 0.5 * third


def mellin_phi_quadrature(l1: float, l2: float, s: float) -> float:
    """Φ_1(s) for s > 0 by quadrature of the heat representation of φ_1.

    Each (1 - l²λ)^{-k/2} transforms to ∫_0^∞ t^{s-1} Q(k/2, t/l²) dt with Q
    the regularised upper incomplete gamma function.
    """
    _check_lengths(l1, l2)
    if s <= 0:
        raise SpectralError(f"Quadrature needs s > 0, got {s}")

    def term(l: float, k: int) -> float:
        def q(t: float) -> float:
            return float(special.gammaincc(k / 2, t / (l * l)))

        near, _ = integrate.quad(q, 0.0, 1.0, weight="alg", wvar=(s - 1.0, 0.0))
        far, _ = integrate.quad(lambda t: t ** (s - 1.0) * q(t), 1.0, np.inf)
        return float(near + far)

    first = term(l2, 1) - term(l1, 1)
    third = term(l2, 3) - term(l1, 3)
    return 0.5 * first - 0.5 * third


def _phi_laurent_at_zero(l1: float, l2: float) -> Tuple[float, float]:
    """Residue and finite part of Φ_1 at s = 0.

    sΦ_1(s) = (l2^{2s} - l1^{2s}) g(s), g(s) = ½Γ(s+½)/Γ(½) - ½Γ(s+3/2)/Γ(3/2),
    so the residue is 0·g(0) and the finite part is 2 log(l2/l1) g(0).
    """
    g0 = float(
        0.5 * special.gamma(0.5) / special.gamma(0.5)
        - 0.5 * special.gamma(1.5) / special.gamma(1.5)
    )
    residue = (l2**0 - l1**0) * g0
    finite_part = 2.0 * math.log(l2 / l1) * g0
    return residue, finite_part


def phi_terms(l1: float, l2: float, lam: float, s: float) -> PhiTerms:
    """φ_1(λ), Φ_1(s), and the residue and finite part of Φ_1 at 0 (both 0).

    ``measured_slope`` is the central difference of Φ_1 at 0, close to
    -2 log(l2/l1), which shows Φ_1 = O(s).
    """
    slope = (big_phi1(l1, l2, SLOPE_STEP) - big_phi1(l1, l2, -SLOPE_STEP)) / (
        2.0 * SLOPE_STEP
    )
    residue, finite_part = _phi_laurent_at_zero(l1, l2)
    return PhiTerms(
        phi1=phi1(l1, l2, lam),
        big_phi1=big_phi1(l1, l2, s),
        residue=residue,
        finite_part=finite_part,
        measured_slope=slope,
    )


def double_series_a01(nu: float, s: float) -> float:
    """A_{0,1}(s) = -ν^{-2s} ζ_R(2s)."""
    return float(-mpmath.power(nu, -2 * s) * mpmath.zeta(2 * s))


def double_series_a00(nu: float, l1: float, l2: float, s: float) -> float:
    """A_{0,0}(s) = -log(l1 l2) ν^{-2s} ζ_R(2s)."""
    return math.log(l1 * l2) * double_series_a01(nu, s)


def double_series_terms(nu: float, l1: float, l2: float) -> DoubleSeriesTerms:
    """Values at s = 0 of the double-series terms and Z'(0,S̃) - Z'(0,S)."""
    _check_lengths(l1, l2)
    if nu < 1:
        raise SpectralError(f"ν = 1/sin α must be >= 1, got {nu}")
    log_nu = math.log(nu)
    # d/ds ν^{-2s}ζ_R(2s) at 0
    zeta_slope = -2.0 * log_nu * ZETA_R_AT_0 + 2.0 * ZETA_R_PRIME_AT_0
    log_l1l2 = math.log(l1 * l2)
    a00 = -log_l1l2 * ZETA_R_AT_0
    a00_prime = -log_l1l2 * zeta_slope
    a01 = -ZETA_R_AT_0
    a01_prime = -zeta_slope
    # ζ(s, U) = ν^{-2s}ζ_R(2s) at its pole s = ½
    u_residue = 0.5 / nu
    u_finite_part = (EULER_GAMMA - log_nu) / nu
    residue, finite_part = _phi_laurent_at_zero(l1, l2)
    phi_contribution = 0.5 * (finite_part * u_residue + residue * u_finite_part)
    return DoubleSeriesTerms(
        a00=a00,
        a00_prime=a00_prime,
        a01=a01,
        a01_prime=a01_prime,
        phi_contribution=phi_contribution,
        difference=-a00 - a01_prime + phi_contribution,
    )


def log_gamma_sequence(
    kind: CrossProductKind, n: int, nu: float, l1: float, l2: float, lam: float
) -> float:
    """log Γ(-λ, S_n/(νn)²), or the S̃_n analogue for kind Ftilde."""
    if n < 1:
        raise SpectralError(f"n must be >= 1, got {n}")
    if lam >= 0:
        raise SpectralError(f"λ must be negative, got {lam}")
    order = nu * n
    y = order * math.sqrt(-lam)
    normalisation = _log_ratio_power_difference(order, l1, l2) - math.log(
        order * math.pi
    )
    value = -log_gee(kind, order, l1, l2, y) + normalisation
    if kind is CrossProductKind.FTILDE:
        value -= math.log(-lam * l1 * l2)
    return value


def uniform_expansion_residual(
    n: int,
    nu: float,
    l1: float,
    l2: float,
    lam: float,
    include_phi: bool = True,
) -> float:
    """Remainder of the large-n expansion of log Γ(S̃_n) - log Γ(S_n).

    Subtracts -½ log((1 - λl1²)(1 - λl2²)) and, unless ``include_phi`` is
    false, φ_1(λ)/(νn); what is left is O((νn)^{-2}).
    """
    difference = log_gamma_sequence(
        CrossProductKind.FTILDE, n, nu, l1, l2, lam
    ) - log_gamma_sequence(CrossProductKind.F, n, nu, l1, l2, lam)
    leading = -0.5 * math.log((1.0 - lam * l1 * l1) * (1.0 - lam * l2 * l2))
    if include_phi:
        leading += phi1(l1, l2, lam) / (nu * n)
    return difference - leading


_ABS_SPECTRA: Dict[int, Tuple[SpectrumFamily, ...]] = {
    0: (
        SpectrumFamily(ZeroFamily.ATILDE_NU, 2),
        SpectrumFamily(ZeroFamily.ATILDE_0, 1),
    ),
    1: (
        SpectrumFamily(ZeroFamily.ATILDE_NU, 2),
        SpectrumFamily(ZeroFamily.A_NU, 2),
        SpectrumFamily(ZeroFamily.ATILDE_0, 1),
        SpectrumFamily(ZeroFamily.A_0, 1),
    ),
    2: (
        SpectrumFamily(ZeroFamily.A_NU, 2),
        SpectrumFamily(ZeroFamily.A_0, 1),
    ),
}

_SWAP = {
    ZeroFamily.A_NU: ZeroFamily.ATILDE_NU,
    ZeroFamily.ATILDE_NU: ZeroFamily.A_NU,
    ZeroFamily.A_0: ZeroFamily.ATILDE_0,
    ZeroFamily.ATILDE_0: ZeroFamily.A_0,
}


def spectrum_descriptor(q: int, bc: BoundaryCondition) -> Tuple[SpectrumFamily, ...]:
    """Zero families, with multiplicities, making up the spectrum of Δ^(q)."""
    if q not in _ABS_SPECTRA:
        raise SpectralError(f"The frustum surface has forms of degree 0..2, not {q}")
    if bc is BoundaryCondition.ABS:
        return _ABS_SPECTRA[q]
    if bc is BoundaryCondition.REL:
        return tuple(
            SpectrumFamily(_SWAP[f.family], f.multiplicity) for f in _ABS_SPECTRA[q]
        )
    raise SpectralError(f"No spectrum for {bc.value} boundary conditions")


def torsion_zeta_coefficients(bc: BoundaryCondition) -> Dict[ZeroFamily, Fraction]:
    """Coefficients of each family's zeta function in ½ Σ_q (-1)^q q ζ_q(s)."""
    coefficients = {family: Fraction(0) for family in ZeroFamily}
    for q in range(1, 3):
        for entry in spectrum_descriptor(q, bc):
            weight = (-1) ** q * q * entry.multiplicity
            coefficients[entry.family] += Fraction(weight, 2)
    return coefficients


def analytic_torsion_closed_form(nu: float, l1: float, l2: float) -> float:
    """log(π √(2(l2² - l1²)) / (ν √log(l2/l1)))."""
    _check_lengths(l1, l2)
    return (
        math.log(math.pi)
        + 0.5 * math.log(2.0 * (l2 - l1) * (l2 + l1))
        - math.log(nu)
        - 0.5 * math.log(math.log1p((l2 - l1) / l1))
    )


def torsion_zeta_evaluation(
    nu: float,
    l1: float,
    l2: float,
    method: ZetaMethod = ZetaMethod.CLOSED_FORM,
    K: int = DEFAULT_ZERO_COUNT,
    tol: float = DEFAULT_ZERO_TOL,
    error: float = ORACLE_ERROR,
    strict: bool = False,
) -> ZetaEvaluation:
    """t'_abs(0) = [Z'(0,S) - Z'(0,S̃)] + ½[Z'(0,S_0) - Z'(0,S̃_0)].

    The double-series part is always closed form; ``method`` selects how the
    axial derivatives are obtained.
    """
    coefficients = torsion_zeta_coefficients(BoundaryCondition.ABS)
    if coefficients[ZeroFamily.A_0] != Fraction(1, 2):
        raise SpectralError("Torsion zeta function does not reduce to t_abs")
    double = double_series_terms(nu, l1, l2)
    axial = zprime0_axial(CrossProductKind.F, l1, l2, method, K, tol, error, strict)
    axial_tilde = zprime0_axial(
        CrossProductKind.FTILDE, l1, l2, method, K, tol, error, strict
    )
    value = -double.difference + 0.5 * (
        axial.value_at_0_derivative - axial_tilde.value_at_0_derivative
    )
    estimate = 0.5 * (axial.error_estimate + axial_tilde.error_estimate)
    return ZetaEvaluation(value, method, estimate, "t_abs")


def torsion_zeta_log(
    nu: float,
    l1: float,
    l2: float,
    method: ZetaMethod = ZetaMethod.CLOSED_FORM,
    **kwargs: Any,
) -> float:
    """log T_abs = t'_abs(0); log T_rel is its negative."""
    return torsion_zeta_evaluation(nu, l1, l2, method, **kwargs).value_at_0_derivative


def write_zero_table(table: ZeroTable, stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["kind", "nu_n", "l1", "l2", "tol"])
    writer.writerow(
        [
            table.kind.value,
            repr(table.order),
            repr(table.l1),
            repr(table.l2),
            repr(table.tol),
        ]
    )
    writer.writerow(["k", "a_k"])
    for k, zero in enumerate(table.zeros, start=1):
        writer.writerow([k, repr(zero)])


def read_zero_table(stream: IO[str]) -> ZeroTable:
    rows = list(csv.reader(stream))
    try:
        kind, order, l1, l2, tol = rows[1]
        zeros = tuple(float(row[1]) for row in rows[3:])
        return ZeroTable(
            CrossProductKind(kind),
            float(order),
            float(l1),
            float(l2),
            zeros,
            float(tol),
        )
    except (IndexError, ValueError) as e:
        raise SpectralError(f"Malformed zero table: {e}") from e
