"""Two-parameter Weibull distribution: evaluation, sampling, and fitting.

Fitting comes in two flavors. Least squares matches the density to a
frequency histogram at bin centers (grid search plus derivative-free
refinement); maximum likelihood solves the one-dimensional profile equation
for the shape. Both return a FitReport rather than raising on degenerate
data, so callers can skip-and-continue.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .histogram import Histogram

__all__ = [
    "WeibullParams",
    "FitReport",
    "weibull_pdf",
    "weibull_cdf",
    "sample_weibull",
    "fit_least_squares",
    "fit_mle",
    "ks_statistic",
]

# Grid-then-refine settings for the least-squares fitter. The grid brackets
# the shape in [0.2, 10] and the scale in [0.1, 2] x data max; refinement
# runs Nelder-Mead on log-parameters to a relative tolerance of 1e-6.
_SHAPE_GRID = (0.2, 10.0, 41)
_SCALE_GRID_FACTORS = (0.1, 2.0, 41)
_REFINE_REL_TOL = 1e-6

_MLE_SHAPE_BRACKET = (1e-3, 1e3)
_MLE_BISECT_ITERS = 100


@dataclass(frozen=True)
class WeibullParams:
    """Shape k and scale lambda, both strictly positive."""

    shape: float
    scale: float

    def __post_init__(self) -> None:
        if not (self.shape > 0 and math.isfinite(self.shape)):
            raise ValueError("shape must be a positive finite real")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError("scale must be a positive finite real")


@dataclass(frozen=True)
class FitReport:
    """Outcome of one fit; ``params`` is None when the fit was skipped."""

    method: str
    params: WeibullParams | None
    objective: float | None
    ks: float | None
    n: int
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None

    def to_json(self) -> str:
        if self.ok:
            payload = {
                "k": self.params.shape,
                "lambda": self.params.scale,
                "method": self.method,
                "objective": self.objective,
                "ks": self.ks,
                "n": self.n,
            }
        else:
            payload = {"method": self.method, "n": self.n, "failure": self.failure}
        return json.dumps(payload)


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def weibull_pdf(params: WeibullParams, x):
    """Density (k/s)(x/s)^(k-1) exp(-(x/s)^k) for x >= 0, zero below."""
    arr, scalar = _as_array(x)
    k, s = params.shape, params.scale
    z = np.where(arr >= 0, arr, 0.0) / s
    with np.errstate(divide="ignore", over="ignore"):
        value = (k / s) * z ** (k - 1.0) * np.exp(-(z**k))
    value = np.where(arr < 0, 0.0, value)
    return float(value) if scalar else value


def weibull_cdf(params: WeibullParams, x):
    """P(X <= x): 0 below zero, 1 - exp(-(x/s)^k) above."""
    arr, scalar = _as_array(x)
    z = np.where(arr >= 0, arr, 0.0) / params.scale
    value = -np.expm1(-(z**params.shape))
    value = np.where(arr < 0, 0.0, value)
    return float(value) if scalar else value


def sample_weibull(params: WeibullParams, seed, n: int) -> np.ndarray:
    """Inverse-CDF sampling: x = scale * (-ln u)^(1/shape), u uniform."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    u = np.where(u == 0.0, np.finfo(float).tiny, u)  # keep u in the open interval
    return params.scale * (-np.log(u)) ** (1.0 / params.shape)


def ks_statistic(data, params: WeibullParams) -> float:
    """Sup distance between the empirical CDF of the data and the Weibull CDF.

    Sample arrays use the standard two-sided statistic over the sample
    points. Histograms are binned data, so the comparison runs over bin
    boundaries: cumulative mass through each bin against the CDF at the
    bin's upper edge (plus the CDF mass below the first edge).
    """
    if isinstance(data, Histogram):
        cum = np.cumsum(np.asarray(data.counts)) / data.total
        model = weibull_cdf(params, data.upper_edges)
        head = weibull_cdf(params, float(data.lower_edges[0]))
        return float(max(np.max(np.abs(cum - model)), head))
    values = np.sort(np.asarray(data, dtype=float))
    if values.ndim != 1 or len(values) == 0:
        raise ValueError("data must be a non-empty 1-d sample")
    n = len(values)
    model = weibull_cdf(params, values)
    steps = np.arange(1, n + 1) / n
    return float(max(np.max(steps - model), np.max(model - (steps - 1.0 / n))))


def _density_points(hist: Histogram) -> tuple[np.ndarray, np.ndarray]:
    centers = hist.centers
    density = np.asarray(hist.counts) / (hist.total * hist.bin_width)
    return centers, density


def fit_least_squares(hist: Histogram) -> FitReport:
    """Least-squares Weibull fit to a frequency histogram.

    Normalizes counts to an empirical density, evaluates candidate densities
    at bin centers, and minimizes the residual sum of squares: first on a
    log-spaced (shape, scale) grid, then with Nelder-Mead on log-parameters.
    Ties in the grid argmin go to the smaller shape, then the smaller scale.
    """
    total = hist.total
    n = int(round(total))
    if hist.nonzero_bins() < 3:
        return FitReport(
            "ls", None, None, None, n, failure="fewer than 3 nonzero bins"
        )
    if total < 1:
        return FitReport("ls", None, None, None, n, failure="total count below 1")
    centers, density = _density_points(hist)
    nonzero_centers = centers[np.asarray(hist.counts) > 0]
    data_max = float(nonzero_centers.max())
    if data_max <= 0:
        return FitReport("ls", None, None, None, n, failure="all mass at zero")

    def rss(shape: float, scale: float) -> float:
        fitted = weibull_pdf(WeibullParams(shape, scale), centers)
        return float(np.sum((density - fitted) ** 2))

    shapes = np.geomspace(*_SHAPE_GRID)
    scales = np.geomspace(
        _SCALE_GRID_FACTORS[0] * data_max,
        _SCALE_GRID_FACTORS[1] * data_max,
        _SCALE_GRID_FACTORS[2],
    )
    best = (math.inf, shapes[0], scales[0])
    for shape in shapes:
        for scale in scales:
            value = rss(shape, scale)
            if value < best[0]:
                best = (value, shape, scale)

    result = optimize.minimize(
        lambda v: rss(math.exp(v[0]), math.exp(v[1])),
        x0=[math.log(best[1]), math.log(best[2])],
        method="Nelder-Mead",
        options={
            "xatol": _REFINE_REL_TOL,
            "fatol": 1e-15,
            "maxiter": 4000,
            "maxfev": 8000,
        },
    )
    if result.fun <= best[0]:
        fitted = WeibullParams(math.exp(result.x[0]), math.exp(result.x[1]))
        objective = float(result.fun)
    else:  # refinement went uphill; keep the grid point
        fitted = WeibullParams(best[1], best[2])
        objective = best[0]
    return FitReport("ls", fitted, objective, ks_statistic(hist, fitted), n)


def _profile_gap(shape: float, scaled: np.ndarray, log_scaled: np.ndarray) -> float:
    # Stationarity gap of the profile log-likelihood in the shape; the data
    # enter pre-divided by their maximum so powers cannot overflow.
    powered = scaled**shape
    return float(
        (powered @ log_scaled) / powered.sum() - 1.0 / shape - log_scaled.mean()
    )


def fit_mle(samples) -> FitReport:
    """Maximum-likelihood Weibull fit to positive samples.

    The shape solves the profile equation by bisection on [1e-3, 1e3]; the
    scale is then (mean of x^shape)^(1/shape). Integer count data should be
    shifted by +0.5 before calling so zeros stay off the density's boundary.
    """
    values = np.asarray(samples, dtype=float)
    if values.ndim != 1:
        raise ValueError("samples must be 1-dimensional")
    n = len(values)
    if np.any(values <= 0) or np.any(~np.isfinite(values)):
        raise ValueError(
            "samples must be positive finite reals "
            "(shift integer count data by +0.5)"
        )
    if n < 2:
        return FitReport("mle", None, None, None, n, failure="need at least 2 samples")
    if np.all(values == values[0]):
        return FitReport(
            "mle", None, None, None, n, failure="all samples identical"
        )

    scaled = values / values.max()
    log_scaled = np.log(scaled)
    lo, hi = _MLE_SHAPE_BRACKET
    if not (_profile_gap(lo, scaled, log_scaled) < 0 < _profile_gap(hi, scaled, log_scaled)):
        return FitReport(
            "mle",
            None,
            None,
            None,
            n,
            failure=f"profile equation has no root in [{lo}, {hi}]",
        )
    log_lo, log_hi = math.log(lo), math.log(hi)
    for _ in range(_MLE_BISECT_ITERS):
        mid = 0.5 * (log_lo + log_hi)
        if _profile_gap(math.exp(mid), scaled, log_scaled) < 0:
            log_lo = mid
        else:
            log_hi = mid
    shape = math.exp(0.5 * (log_lo + log_hi))
    scale = float(values.max() * np.mean(scaled**shape) ** (1.0 / shape))

    params = WeibullParams(shape, scale)
    z = values / scale
    log_likelihood = float(
        n * math.log(shape / scale) + (shape - 1.0) * np.sum(np.log(z)) - np.sum(z**shape)
    )
    return FitReport("mle", params, -log_likelihood, ks_statistic(values, params), n)
