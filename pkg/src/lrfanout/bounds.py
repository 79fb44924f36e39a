"""Closed-form scaling regimes for broadcast times and light-cone lower
bounds, plus least-squares fitting of measured makespans against them.

Regimes carry symbolic tags and exact rational exponents; proportionality
constants are deliberately unrepresented.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exceptions import DomainError, ParameterError

# Regime tags
CONSTANT = "constant"
LOGARITHMIC = "logarithmic"
POWER = "power"

# Number of smallest-n samples excluded from fits (finite-size transients).
FIT_DISCARD = 2


@dataclass(frozen=True)
class ScalingRegime:
    """One case of a piecewise scaling law.

    ``exponent`` is the power of the scale variable (None for constant and
    logarithmic regimes); ``log_correction`` marks a /log(r) factor.
    ``alpha_interval`` is (lo, hi, lo_closed, hi_closed) with hi=None for an
    unbounded case.
    """

    kind: str
    exponent: Fraction | None = None
    log_correction: bool = False
    alpha_interval: tuple = ()
    source: str = ""

    def describe(self) -> str:
        if self.kind == CONSTANT:
            return "constant"
        if self.kind == LOGARITHMIC:
            return "log"
        body = f"^{self.exponent}"
        return f"power{body}/log" if self.log_correction else f"power{body}"


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def broadcast_time_regime(alpha, dimension: int) -> ScalingRegime:
    """Piecewise regime of the broadcast (GHZ-construction) time in n.

    constant for alpha < D, logarithmic at alpha = D, n^((alpha-D)/D) for
    D < alpha <= D+1, and n^(1/D) beyond.
    """
    if dimension not in (1, 2, 3):
        raise DomainError(f"dimension must be 1, 2 or 3, got {dimension}")
    a = _frac(alpha)
    d = Fraction(dimension)
    if a < 0:
        raise DomainError(f"alpha must be nonnegative, got {alpha}")
    if a < d:
        return ScalingRegime(CONSTANT, alpha_interval=(0, dimension, True, False), source="broadcast")
    if a == d:
        return ScalingRegime(LOGARITHMIC, alpha_interval=(dimension, dimension, True, True), source="broadcast")
    if a <= d + 1:
        return ScalingRegime(
            POWER,
            exponent=(a - d) / d,
            alpha_interval=(dimension, dimension + 1, False, True),
            source="broadcast",
        )
    return ScalingRegime(
        POWER,
        exponent=Fraction(1, dimension),
        alpha_interval=(dimension + 1, None, False, False),
        source="broadcast",
    )


def lr_lower_bound(alpha, dimension: int) -> ScalingRegime:
    """Lieb-Robinson light-cone lower bound on the QFT/fanout time in the
    qubit separation r, defined for alpha >= D."""
    if dimension not in (1, 2, 3):
        raise DomainError(f"dimension must be 1, 2 or 3, got {dimension}")
    a = _frac(alpha)
    d = Fraction(dimension)
    if a < d:
        raise DomainError(f"Lieb-Robinson bound needs alpha >= D, got alpha={alpha}, D={dimension}")
    if a == d:
        return ScalingRegime(CONSTANT, alpha_interval=(dimension, dimension, True, True), source="lieb-robinson")
    if a <= 2 * d:
        return ScalingRegime(LOGARITHMIC, alpha_interval=(dimension, 2 * dimension, False, True), source="lieb-robinson")
    if a <= 2 * d + 1:
        return ScalingRegime(
            POWER,
            exponent=(a - 2 * d) / (a - d),
            alpha_interval=(2 * dimension, 2 * dimension + 1, False, True),
            source="lieb-robinson",
        )
    return ScalingRegime(
        POWER,
        exponent=Fraction(1),
        alpha_interval=(2 * dimension + 1, None, False, False),
        source="lieb-robinson",
    )


def frob_lower_bound_1d(alpha) -> ScalingRegime:
    """Frobenius light-cone lower bound in 1D, defined for alpha > 3/2."""
    a = _frac(alpha)
    if a <= Fraction(3, 2):
        raise DomainError(f"Frobenius bound needs alpha > 3/2, got {alpha}")
    if a <= Fraction(5, 2):
        return ScalingRegime(
            POWER,
            exponent=a - Fraction(3, 2),
            log_correction=True,
            alpha_interval=(Fraction(3, 2), Fraction(5, 2), False, True),
            source="frobenius",
        )
    return ScalingRegime(
        POWER,
        exponent=Fraction(1),
        alpha_interval=(Fraction(5, 2), None, False, False),
        source="frobenius",
    )


@dataclass(frozen=True)
class FitReport:
    model: str
    statistic: float  # ratio (constant), slope (logarithmic), exponent (power)
    residual: float
    n_used: tuple[int, ...]

    def matches(self, regime: ScalingRegime, power_tol: float = 0.1,
                const_ratio_cap: float = 3.0, log_residual_frac: float = 0.05) -> bool:
        """Tolerances for regime agreement: ratio cap for constant fits,
        residual fraction for logarithmic fits, exponent window for power fits."""
        if regime.kind == CONSTANT:
            return self.model == CONSTANT and self.statistic <= const_ratio_cap
        if regime.kind == LOGARITHMIC:
            return self.model == LOGARITHMIC and self.residual <= log_residual_frac * abs(self.statistic)
        return self.model == POWER and abs(self.statistic - float(regime.exponent)) <= power_tol


def fit_scaling(samples, model: str) -> FitReport:
    """Fit (n, makespan) samples to a regime model.

    The two smallest n are discarded before fitting.  constant: max/min
    ratio; logarithmic: least-squares slope of t against ln n; power:
    least-squares slope on log-log axes.  The residual is the RMS deviation
    in the fitted coordinates.
    """
    pts = [(int(n), float(t)) for n, t in samples]
    if len(pts) < 4:
        raise ParameterError(f"need at least 4 samples, got {len(pts)}")
    ns = [p[0] for p in pts]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ParameterError("sample n values must be strictly increasing")
    kept = pts[FIT_DISCARD:]
    n = np.array([p[0] for p in kept], dtype=np.float64)
    t = np.array([p[1] for p in kept], dtype=np.float64)
    used = tuple(int(v) for v in n)
    if model == CONSTANT:
        ratio = float(t.max() / t.min())
        resid = float(np.sqrt(np.mean((t / t.mean() - 1.0) ** 2)))
        return FitReport(CONSTANT, ratio, resid, used)
    if model == LOGARITHMIC:
        x = np.log(n)
        y = t
    elif model == POWER:
        x = np.log(n)
        y = np.log(t)
    else:
        raise ParameterError(f"unknown fit model {model!r}")
    coeffs = np.polyfit(x, y, 1)
    pred = np.polyval(coeffs, x)
    resid = float(np.sqrt(np.mean((y - pred) ** 2)))
    return FitReport(model, float(coeffs[0]), resid, used)


def exponent_gap_at(alpha: float, dimension: int) -> float:
    """Float value of the Lieb-Robinson power exponent near alpha = 2D.

    Used to confirm the exponent's continuous vanishing at the regime
    boundary: (alpha-2D)/(alpha-D) -> 0 as alpha -> 2D+.
    """
    a = float(alpha)
    d = float(dimension)
    return (a - 2 * d) / (a - d)


def exp_decay_fit(profile) -> tuple[float, float]:
    """Log-linear fit of |correlation| against distance.

    Returns (decay rate per unit distance, RMS residual in log space).
    Zero entries are floored at 1e-300 so all-zero profiles fit cleanly.
    """
    pts = [(float(d), float(c)) for d, c in profile if d > 0]
    if len(pts) < 2:
        raise ParameterError("need at least two nonzero distances to fit a decay")
    x = np.array([p[0] for p in pts])
    y = np.log(np.maximum([p[1] for p in pts], 1e-300))
    coeffs = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - np.polyval(coeffs, x)) ** 2)))
    return float(-coeffs[0]), resid
