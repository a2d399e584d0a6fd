"""Closed-form torsion of conical frusta and cones over a section W.

All quantities are natural logarithms. Section data enter through the
dimension m of W, its Betti numbers r_q and, where needed, log τ_R(W, g)
as a number.
"""

import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence, Tuple

from torsionlab.constants import BoundaryCondition

logger = logging.getLogger(__name__)

LOG_2 = math.log(2.0)


class FrustumError(Exception):
    pass


@dataclass(frozen=True)
class FrustumParams:
    """Frustum [l1, l2] x W over a section of dimension m."""

    l1: float
    l2: float
    m: int
    betti: Tuple[int, ...]
    rk_rho: int = 1

    def __post_init__(self) -> None:
        if not (0.0 < self.l1 < self.l2):
            raise FrustumError(f"Need 0 < l1 < l2, got l1={self.l1}, l2={self.l2}")
        if self.m < 0:
            raise FrustumError(f"Section dimension must be >= 0, got {self.m}")
        if len(self.betti) != self.m + 1:
            raise FrustumError(
                f"Expected {self.m + 1} Betti numbers for m={self.m}, "
                f"got {len(self.betti)}"
            )
        if any(r < 0 for r in self.betti):
            raise FrustumError(f"Betti numbers must be >= 0: {self.betti}")
        if self.rk_rho < 1:
            raise FrustumError(f"Representation rank must be >= 1, got {self.rk_rho}")

    @property
    def p(self) -> int:
        """p with m = 2p - 1 (odd m) or m = 2p (even m)."""
        return (self.m + 1) // 2

    @property
    def is_odd(self) -> bool:
        return self.m % 2 == 1

    def require_odd(self) -> int:
        if not self.is_odd:
            raise FrustumError(
                f"Operation needs an odd-dimensional section, m={self.m}"
            )
        return self.p

    def is_poincare_symmetric(self) -> bool:
        return tuple(reversed(self.betti)) == self.betti

    def with_l1(self, l1: float) -> "FrustumParams":
        return replace(self, l1=l1)


@dataclass(frozen=True)
class HarmonicExponents:
    alpha_q: float
    mu: float
    a_plus: float
    a_minus: float


@dataclass(frozen=True)
class Reconciliation:
    """Printed versus derived log τ(T); ``difference = exponent * log l2``."""

    printed: float
    derived: float
    difference: float
    exponent: Fraction


@dataclass(frozen=True)
class FrustumRTorsion:
    printed: float
    derived: float
    difference: float


@dataclass(frozen=True)
class DualitySums:
    upper: Fraction
    lower: Fraction
    half_full: Fraction

    @property
    def consistent(self) -> bool:
        return self.upper == self.lower == self.half_full


def harmonic_exponents(q: int, m: int, lam: float) -> HarmonicExponents:
    """Exponents of the radial solutions x^{a±} for an eigenvalue λ of W.

    Args:
        q (int): Form degree on the section.
        m (int): Dimension of the section.
        lam (float): Eigenvalue λ >= 0 of the section Laplacian.

    Returns:
        HarmonicExponents: α_q = (1 + 2q - m)/2, μ = √(λ + α_q²) and
        a± = α_q ± μ.
    """
    if lam < 0:
        raise FrustumError(f"Eigenvalue must be >= 0, got {lam}")
    alpha_q = (1 + 2 * q - m) / 2.0
    mu = math.sqrt(lam + alpha_q * alpha_q)
    return HarmonicExponents(alpha_q, mu, alpha_q + mu, alpha_q - mu)


def absolute_bc_harmonic(q: int, m: int, lam: float) -> bool:
    """Whether the mode satisfies absolute boundary conditions harmonically.

    a_- = q - √(λ + q²) vanishes exactly when λ = 0.
    """
    if lam < 0:
        raise FrustumError(f"Eigenvalue must be >= 0, got {lam}")
    return lam == 0.0


def _check_range(q: int, m: int, l1: float, l2: float) -> None:
    if not (0.0 < l1 < l2):
        raise FrustumError(f"Need 0 < l1 < l2, got l1={l1}, l2={l2}")
    if not (0 <= q <= m):
        raise FrustumError(f"Degree {q} outside 0..{m}")


def gamma_coefficient(q: int, m: int, l1: float, l2: float) -> float:
    """Γ_q = ∫_{l1}^{l2} x^{m-2q} dx."""
    _check_range(q, m, l1, l2)
    exponent = m + 1 - 2 * q
    log_ratio = math.log1p((l2 - l1) / l1)
    if exponent == 0:
        return log_ratio
    if abs(exponent * log_ratio) < 0.5:
        value = l1**exponent * math.expm1(exponent * log_ratio) / exponent
    else:
        value = (l2**exponent - l1**exponent) / exponent
    if not value > 0.0:
        raise FrustumError(f"Γ_{q} is not positive for l1={l1}, l2={l2}")
    return value


def _gamma_term(p: FrustumParams, q: int) -> float:
    """log(Γ_q / l2^{m-2q})."""
    return math.log(gamma_coefficient(q, p.m, p.l1, p.l2)) - (p.m - 2 * q) * math.log(
        p.l2
    )


def tau_T_log(p: FrustumParams) -> float:
    """log τ(T) with the l2 powers of the frustum proposition as printed."""
    total = 0.0
    for q, r in enumerate(p.betti):
        if r == 0:
            continue
        sign = -1 if q % 2 else 1
        if p.is_odd and q == p.p:
            term = math.log(gamma_coefficient(q, p.m, p.l1, p.l2))
        else:
            term = _gamma_term(p, q)
        total += 0.5 * sign * r * term
    return total


def tau_T_log_derived(p: FrustumParams) -> float:
    """log τ(T) = Σ (-1)^{q+1} (r_q/2) log(l2^{m-2q} / Γ_q)."""
    total = 0.0
    for q, r in enumerate(p.betti):
        if r:
            total += 0.5 * (-1 if q % 2 else 1) * r * _gamma_term(p, q)
    return total


def reconciliation_exponent(p: FrustumParams) -> Fraction:
    """c with tau_T_log_derived - tau_T_log = c log l2."""
    if not p.is_odd:
        return Fraction(0)
    return Fraction((-1) ** p.p * p.betti[p.p], 2)


def tau_T_reconciliation(p: FrustumParams) -> Reconciliation:
    printed = tau_T_log(p)
    derived = tau_T_log_derived(p)
    return Reconciliation(
        printed, derived, derived - printed, reconciliation_exponent(p)
    )


def euler_characteristic(betti: Sequence[int]) -> int:
    return sum((-1) ** q * r for q, r in enumerate(betti))


def _scaling_sum(m: int, betti: Sequence[int], degrees: range) -> Fraction:
    return Fraction(sum((-1) ** q * betti[q] * (m - 2 * q) for q in degrees))


def metric_scaling_log(m: int, betti: Sequence[int], l: float) -> float:
    """log τ_R(W, l²g) - log τ_R(W, g)."""
    if len(betti) != m + 1:
        raise FrustumError(f"Expected {m + 1} Betti numbers, got {len(betti)}")
    if l <= 0:
        raise FrustumError(f"Scale must be positive, got {l}")
    return float(_scaling_sum(m, betti, range(m + 1)) / 2) * math.log(l)


def duality_scaling_sums(betti: Sequence[int]) -> DualitySums:
    """The three scaling sums that agree for Poincaré-symmetric r_q, m odd."""
    m = len(betti) - 1
    if m % 2 == 0:
        raise FrustumError(f"Duality sums need an odd-dimensional section, m={m}")
    p = (m + 1) // 2
    return DualitySums(
        upper=_scaling_sum(m, betti, range(p, m + 1)),
        lower=_scaling_sum(m, betti, range(p)),
        half_full=_scaling_sum(m, betti, range(m + 1)) / 2,
    )


def frustum_rtorsion_log(p: FrustumParams, tauW_log_at_g: float) -> FrustumRTorsion:
    """log τ_R of the frustum as log τ_R(W, l2²g) + log τ(T).

    Args:
        p (FrustumParams): Frustum parameters.
        tauW_log_at_g (float): log τ_R(W, g) for the unscaled section metric.

    Returns:
        FrustumRTorsion: The value with τ(T) as printed, the derived value and
        their difference.
    """
    scaled = tauW_log_at_g + metric_scaling_log(p.m, p.betti, p.l2)
    printed = scaled + tau_T_log(p)
    derived = scaled + tau_T_log_derived(p)
    return FrustumRTorsion(printed, derived, derived - printed)


def upsilon_log(
    p: FrustumParams, tauW_log_at_g: float, tau_skeleton_log: float
) -> float:
    """Geometrically regularised torsion log Υ_R of the frustum.

    The derived frustum torsion divided by the skeleton torsion
    τ(W_{(p-1)}) and by ∏_{q>=p} (Γ_q / l2^{m-2q})^{(-1)^q r_q / 2}, the
    factors that diverge as l1 -> 0.
    """
    half = p.require_odd()
    divergent = sum(
        0.5 * (-1) ** q * p.betti[q] * _gamma_term(p, q)
        for q in range(half, p.m + 1)
        if p.betti[q]
    )
    derived = frustum_rtorsion_log(p, tauW_log_at_g).derived
    return derived - tau_skeleton_log - divergent


def _cone_sum(p: FrustumParams, half: int) -> float:
    return sum(
        0.5 * (-1) ** (q + 1) * p.betti[q] * math.log(2.0 * (half - q) / p.l2)
        for q in range(half)
        if p.betti[q]
    )


def limit_upsilon_log(p: FrustumParams, tauW_log_at_g: float) -> float:
    """lim_{l1 -> 0+} log Υ_R; does not depend on p.l1."""
    half = p.require_odd()
    scaling = float(_scaling_sum(p.m, p.betti, range(half)) / 2) * math.log(p.l2)
    return 0.5 * tauW_log_at_g + scaling + _cone_sum(p, half)


def cone_analytic_torsion_log(
    p: FrustumParams, tauW_log_at_g: float, anomaly: float = 0.0
) -> float:
    """log T_abs of the cone C_{l2}W from half the torsion of (W, l2²g).

    Agrees with :func:`limit_upsilon_log` (plus ``anomaly``) whenever the
    Betti numbers are Poincaré symmetric.
    """
    half = p.require_odd()
    if p.rk_rho != 1:
        raise FrustumError(f"Cone torsion needs rk(ρ) = 1, got {p.rk_rho}")
    if not p.is_poincare_symmetric():
        logger.warning(f"Betti numbers {p.betti} are not Poincaré symmetric")
    scaled = tauW_log_at_g + metric_scaling_log(p.m, p.betti, p.l2)
    return 0.5 * scaled + _cone_sum(p, half) + anomaly


def cm_assemble(
    log_tau: float, euler_boundary: int, anomaly: float, rk_rho: int = 1
) -> float:
    """log T = log τ_R + (rk/4) χ(∂M) log 2 + rk A_BM."""
    return log_tau + rk_rho / 4.0 * euler_boundary * LOG_2 + rk_rho * anomaly


def anomaly_sign(m: int, bc: BoundaryCondition) -> int:
    """Coefficient of ∫_W B in the boundary anomaly of the frustum."""
    if m % 2 == 0:
        return 1
    return 1 if bc is BoundaryCondition.MIXED else 0


def frustum_analytic_torsion_log(
    p: FrustumParams, log_tau_R: float, bc: BoundaryCondition, integral_B: float
) -> float:
    """Analytic torsion of the frustum for absolute or mixed conditions.

    Args:
        p (FrustumParams): Frustum parameters.
        log_tau_R (float): log τ_R of the frustum (ignored for mixed conditions,
            whose R torsion part vanishes).
        bc (BoundaryCondition): ABS, or MIXED for absolute on W1 and
            relative on W2.
        integral_B (float): ∫_W B.

    Returns:
        float: log T.
    """
    chi_term = 0.5 * p.rk_rho * euler_characteristic(p.betti) * LOG_2
    if bc is BoundaryCondition.ABS:
        parity = (1 - (-1) ** (p.m + 1)) // 2
        return log_tau_R + chi_term + parity * p.rk_rho * integral_B
    if bc is BoundaryCondition.MIXED:
        return chi_term + p.rk_rho * integral_B
    raise FrustumError(f"No closed form for {bc.value} boundary conditions")
