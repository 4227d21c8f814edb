"""Polynomial scaling fits of T_f(S) with nested model selection.

Fits use the plain monomial basis y = a + b x + c x^2 + d x^3 + e x^4 so the
coefficients are directly comparable across runs; conditioning is a non-issue
for x <= 5 and degree <= 4. Model selection walks the degree up from 1 and
stops when the R^2 gain of the next degree falls below a threshold, zeroing
the unused high-order coefficients.

The default threshold is 5e-4. On the default S grid this keeps near-linear
scaling curves at degree 1 while still resolving the quartic term of the
fully anisotropic curve, whose R^2 gain from degree 3 to 4 is ~6e-4.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, UndefinedRSquaredError

MAX_DEGREE = 4
DEFAULT_GAIN_THRESHOLD = 5e-4


@dataclass(frozen=True)
class FitResult:
    a: float
    b: float
    c: float
    d: float
    e: float
    degree: int
    r_squared: float

    @property
    def coefficients(self) -> tuple:
        return (self.a, self.b, self.c, self.d, self.e)

    def predict(self, xs):
        return np.polynomial.polynomial.polyval(np.asarray(xs, dtype=float),
                                                self.coefficients)


def r_squared(ys, predictions) -> float:
    ys = np.asarray(ys, dtype=float)
    predictions = np.asarray(predictions, dtype=float)
    if ys.shape != predictions.shape or ys.size < 2:
        raise ValueError("need equally many observations and predictions, at least 2")
    ss_res = float(np.sum((ys - predictions) ** 2))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    if ss_tot == 0.0:
        # constant data: an exact fit is reported as 1 by convention
        if ss_res <= 1e-20 * max(1.0, float(np.sum(ys ** 2))):
            return 1.0
        raise UndefinedRSquaredError("zero total variance with nonzero residuals")
    return 1.0 - ss_res / ss_tot


def polyfit(xs, ys, degree: int) -> FitResult:
    """Ordinary least squares on the monomial design matrix."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if not 0 <= degree <= MAX_DEGREE:
        raise ValueError(f"degree must be between 0 and {MAX_DEGREE}, got {degree}")
    if xs.shape != ys.shape:
        raise ValueError("xs and ys must have equal length")
    if np.unique(xs).size < degree + 1:
        raise InsufficientDataError(
            f"degree {degree} needs at least {degree + 1} distinct xs, "
            f"got {np.unique(xs).size}")
    design = np.vander(xs, degree + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(design, ys, rcond=None)
    padded = np.zeros(MAX_DEGREE + 1)
    padded[:degree + 1] = coef
    r2 = r_squared(ys, design @ coef)
    return FitResult(*padded, degree=degree, r_squared=r2)


def select_model(xs, ys, threshold: float = DEFAULT_GAIN_THRESHOLD) -> FitResult:
    """Smallest polynomial degree whose successor adds less than `threshold` R^2.

    Mirrors the zero-padded rows of the scaling table: a curve keeps its
    quadratic, cubic, or quartic terms only while each one still buys a
    meaningful R^2 improvement.
    """
    xs = np.asarray(xs, dtype=float)
    highest = min(MAX_DEGREE, int(np.unique(xs).size) - 1)
    if highest < 1:
        raise InsufficientDataError("need at least 2 distinct xs to fit a line")
    best = polyfit(xs, ys, 1)
    for degree in range(2, highest + 1):
        nxt = polyfit(xs, ys, degree)
        if nxt.r_squared - best.r_squared < threshold:
            break
        best = nxt
    return best
