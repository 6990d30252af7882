"""Degree-distribution fitting, KS goodness of fit, CCDF and growth curves.

All four families are discrete models on the tail ``x >= xmin``:

power_law
    P(X = x) = x**-alpha / zeta(alpha, xmin)
log_normal
    a log-normal(mu, sigma) variate rounded to the nearest integer and
    conditioned on ``x >= xmin``; mu and sigma are the mean and standard
    deviation of ``ln x`` over the tail
exponential
    geometric on the support shifted to ``xmin``:
    P(X = x) = lam * (1 - lam)**(x - xmin), lam = 1 / (mean - xmin + 1)
poisson
    Poisson(lam) conditioned on ``x >= xmin``, lam = tail mean
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import stats
from scipy.optimize import minimize_scalar
from scipy.special import zeta

from . import synth
from .errors import (DataError, DegenerateAbscissa, DegenerateData, EmptyInput,
                     InsufficientTail)
from .ledger import EdgeList

FAMILIES = ("power_law", "log_normal", "exponential", "poisson")
_ALPHA_BOUNDS = (1.0 + 1e-9, 50.0)


@dataclass
class ModelFit:
    family: str
    params: dict
    xmin: int
    n_tail: int
    ks_stat: float
    log_likelihood: float
    xmin_scanned: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class GofResult:
    p_value: float
    replicates: int
    seed: int
    replicate_ks: list[float] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        del d["replicate_ks"]
        return d


@dataclass
class GrowthFit:
    a: float
    b: float
    r_squared: float

    def to_dict(self) -> dict:
        return asdict(self)


def _positive(degrees) -> np.ndarray:
    x = np.asarray(list(degrees) if not isinstance(degrees, np.ndarray) else degrees)
    x = x.astype(np.int64)
    return x[x >= 1]


def _tail(x: np.ndarray, xmin: int) -> np.ndarray:
    if int(xmin) != xmin or xmin < 1:
        raise ValueError(f"xmin must be a positive integer, got {xmin!r}")
    tail = np.sort(x[x >= xmin])
    if len(tail) < 2:
        raise InsufficientTail(f"{len(tail)} observation(s) >= xmin={xmin}")
    return tail


# ---------------------------------------------------------------------------
# survival functions P(X >= x | X >= xmin), vectorised over integer x >= xmin

def _sf_power_law(params, xmin, x):
    return zeta(params["alpha"], x.astype(np.float64)) / zeta(params["alpha"], xmin)


def _lognormal_logsf(params, y):
    z = (np.log(y) - params["mu"]) / params["sigma"]
    return stats.norm.logsf(z)


def _sf_log_normal(params, xmin, x):
    return np.exp(_lognormal_logsf(params, x - 0.5) - _lognormal_logsf(params, np.float64(xmin) - 0.5))


def _sf_exponential(params, xmin, x):
    return (1.0 - params["lambda"]) ** (x - xmin)


def _sf_poisson(params, xmin, x):
    lam = params["lambda"]
    return np.exp(stats.poisson.logsf(x - 1, lam) - stats.poisson.logsf(xmin - 1, lam))


_SF = {
    "power_law": _sf_power_law,
    "log_normal": _sf_log_normal,
    "exponential": _sf_exponential,
    "poisson": _sf_poisson,
}


def model_sf(family: str, params: dict, xmin: int, x) -> np.ndarray:
    return _SF[family](params, xmin, np.asarray(x, dtype=np.int64))


def ks_statistic(tail: np.ndarray, family: str, params: dict, xmin: int) -> float:
    """Sup distance between the empirical tail CDF and the model CDF.

    Both CDFs are step functions on the integers. Between two observed values
    the empirical CDF is flat and the model CDF rises, so checking each
    observed value and the integer just below it covers the supremum.
    """
    values, counts = np.unique(tail, return_counts=True)
    emp = np.cumsum(counts) / len(tail)
    emp_before = np.concatenate([[0.0], emp[:-1]])
    model_at = 1.0 - model_sf(family, params, xmin, values + 1)
    model_before = 1.0 - model_sf(family, params, xmin, values)
    gap = np.maximum(np.abs(emp - model_at), np.abs(emp_before - model_before))
    return float(min(1.0, gap.max()))


def _loglik(tail: np.ndarray, family: str, params: dict, xmin: int) -> float:
    sf_here = model_sf(family, params, xmin, tail)
    sf_next = model_sf(family, params, xmin, tail + 1)
    with np.errstate(divide="ignore"):
        return float(np.sum(np.log(sf_here - sf_next)))


# ---------------------------------------------------------------------------
# power law

def alpha_approx(tail: np.ndarray, xmin: int) -> float:
    """Closed-form estimate ``1 + n / sum(ln(x / (xmin - 1/2)))``."""
    return 1.0 + len(tail) / float(np.sum(np.log(tail / (xmin - 0.5))))


def alpha_mle(tail: np.ndarray, xmin: int) -> float:
    """Exact discrete MLE: maximise ``-alpha*sum(ln x) - n*ln zeta(alpha, xmin)``.

    The maximum is finite only when the tail holds at least two distinct values.
    """
    if tail[0] == tail[-1]:
        raise DegenerateData(f"all {len(tail)} tail values equal {tail[0]}")
    s = float(np.sum(np.log(tail)))
    n = len(tail)

    def nll(a):
        return a * s + n * math.log(zeta(a, xmin))

    res = minimize_scalar(nll, bounds=_ALPHA_BOUNDS, method="bounded",
                          options={"xatol": 1e-10})
    return float(res.x)


def _power_law_at(x: np.ndarray, xmin: int, method: str) -> ModelFit:
    tail = _tail(x, xmin)
    if method == "approx":
        alpha = alpha_approx(tail, xmin)
    elif method == "exact":
        alpha = alpha_mle(tail, xmin)
    else:
        raise ValueError(f"unknown power-law method {method!r}")
    params = {"alpha": alpha}
    ll = -alpha * float(np.sum(np.log(tail))) - len(tail) * math.log(zeta(alpha, xmin))
    return ModelFit("power_law", params, int(xmin), len(tail),
                    ks_statistic(tail, "power_law", params, xmin), ll)


def fit_power_law(degrees, xmin: int | str = "auto", method: str = "exact") -> ModelFit:
    """Discrete power-law fit on the tail ``x >= xmin``.

    ``method="exact"`` maximises the likelihood numerically;
    ``method="approx"`` uses the closed form with the ``xmin - 1/2``
    continuity correction, which is biased for small ``xmin``. With
    ``xmin="auto"`` every observed value is tried as the cutoff and the one
    with the smallest KS statistic wins (the smaller cutoff on ties).
    Zero degrees are ignored.
    """
    x = _positive(degrees)
    if xmin != "auto":
        return _power_law_at(x, int(xmin), method)
    best = None
    for cand in np.unique(x).tolist():
        try:
            fit = _power_law_at(x, cand, method)
        except (InsufficientTail, DegenerateData):
            continue
        if best is None or fit.ks_stat < best.ks_stat:
            best = fit
    if best is None:
        if len(x) < 2:
            raise InsufficientTail(f"only {len(x)} positive observation(s)")
        raise DegenerateData("no cutoff leaves a tail with two distinct values")
    best.xmin_scanned = True
    return best


# ---------------------------------------------------------------------------
# alternative families

def fit_alternative(degrees, family: str, xmin: int) -> ModelFit:
    """Fit ``family`` on the tail ``x >= xmin`` (see module docstring)."""
    x = _positive(degrees)
    tail = _tail(x, int(xmin))
    xmin = int(xmin)
    if family == "log_normal":
        logs = np.log(tail)
        sigma = float(np.std(logs))
        if sigma == 0.0:
            raise DegenerateData(f"all {len(tail)} tail values equal {tail[0]}")
        params = {"mu": float(np.mean(logs)), "sigma": sigma}
    elif family == "exponential":
        params = {"lambda": 1.0 / (float(np.mean(tail)) - xmin + 1.0)}
    elif family == "poisson":
        params = {"lambda": float(np.mean(tail))}
    elif family == "power_law":
        return _power_law_at(x, xmin, "exact")
    else:
        raise ValueError(f"unknown family {family!r}")
    return ModelFit(family, params, xmin, len(tail),
                    ks_statistic(tail, family, params, xmin),
                    _loglik(tail, family, params, xmin))


def fit_all(degrees, xmin: int | str = "auto") -> list[ModelFit]:
    """Power law first, then every other family on the same tail."""
    pl = fit_power_law(degrees, xmin)
    return [pl] + [fit_alternative(degrees, fam, pl.xmin) for fam in FAMILIES[1:]]


# ---------------------------------------------------------------------------
# bootstrap goodness of fit

def _inverse_sf(family, params, xmin, v, span):
    table = model_sf(family, params, xmin, np.arange(xmin, xmin + span))
    k = np.searchsorted(-table, -v, side="right")
    return xmin + k - 1


def sample_model(fit: ModelFit, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``size`` tail values from a fitted model."""
    p, xmin = fit.params, fit.xmin
    if size == 0:
        return np.zeros(0, dtype=np.int64)
    if fit.family == "power_law":
        return synth.sample_power_law(p["alpha"], xmin, size, rng)
    if fit.family == "exponential":
        return xmin + rng.geometric(min(p["lambda"], 1.0), size) - 1
    if fit.family == "log_normal":
        z0 = (math.log(xmin - 0.5) - p["mu"]) / p["sigma"]
        v = 1.0 - rng.random(size)
        z = stats.norm.isf(v * stats.norm.sf(z0))
        y = np.exp(p["mu"] + p["sigma"] * z)
        return np.maximum(np.floor(y + 0.5).astype(np.int64), xmin)
    if fit.family == "poisson":
        lam = p["lambda"]
        span = int(max(lam, xmin) + 20 * math.sqrt(lam) + 50) - xmin + 1
        return _inverse_sf("poisson", p, xmin, 1.0 - rng.random(size), span)
    raise ValueError(f"unknown family {fit.family!r}")


def _refit(sample: np.ndarray, fit: ModelFit) -> ModelFit:
    xmin = "auto" if fit.xmin_scanned else fit.xmin
    if fit.family == "power_law":
        return fit_power_law(sample, xmin)
    if xmin == "auto":
        xmin = fit_power_law(sample, "auto").xmin
    return fit_alternative(sample, fit.family, xmin)


def gof_bootstrap(degrees, fit: ModelFit, replicates: int = 100, seed: int = 0) -> GofResult:
    """Semiparametric bootstrap p-value for ``fit``.

    Each replicate keeps the sample size, draws every point from the fitted
    tail with probability ``n_tail / n`` and otherwise resamples the observed
    values below ``xmin``, then refits (rescanning ``xmin`` if the original fit
    did). The p-value is the fraction of replicates whose KS statistic is at
    least the observed one; a replicate that cannot be refitted counts as
    such. Replicate ``i`` uses its own stream spawned from ``seed``.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    x = _positive(degrees)
    n = len(x)
    body = x[x < fit.xmin]
    p_tail = fit.n_tail / n if len(body) else 1.0
    ks = []
    for child in np.random.SeedSequence(seed).spawn(replicates):
        rng = np.random.default_rng(child)
        n_tail = int(rng.binomial(n, p_tail)) if len(body) else n
        sample = np.concatenate([
            sample_model(fit, n_tail, rng),
            rng.choice(body, n - n_tail) if n_tail < n else np.zeros(0, dtype=np.int64),
        ])
        try:
            ks.append(_refit(sample, fit).ks_stat)
        except DataError:
            ks.append(1.0)
    ks_arr = np.asarray(ks)
    p = float(np.mean(ks_arr >= fit.ks_stat))
    return GofResult(p, replicates, seed, ks_arr.tolist())


# ---------------------------------------------------------------------------
# plot series and growth

def ccdf_series(degrees) -> list[tuple[int, float]]:
    """``(d, P(X >= d))`` for each distinct value ``d`` in increasing order."""
    x = np.asarray(list(degrees) if not isinstance(degrees, np.ndarray) else degrees)
    if len(x) == 0:
        raise EmptyInput("CCDF of an empty sample")
    values, counts = np.unique(x, return_counts=True)
    at_least = len(x) - np.concatenate([[0], np.cumsum(counts)[:-1]])
    return [(int(v), float(c) / len(x)) for v, c in zip(values, at_least)]


def growth_series(edges: EdgeList | Sequence, bin_s: float = 60.0) -> list[tuple[float, int, int]]:
    """Cumulative distinct addresses and edges at the end of each time bin.

    Time is measured in seconds from the window start (``EdgeList.t0``, or
    the earliest edge for a plain sequence). The series ends with the bin
    holding the last edge.
    """
    if bin_s <= 0:
        raise ValueError("bin must be positive")
    items = edges.edges if isinstance(edges, EdgeList) else list(edges)
    if not items:
        return []
    t0 = edges.t0 if isinstance(edges, EdgeList) else min(e.timestamp_ms for e in items)
    bin_ms = bin_s * 1000.0
    per_bin: dict[int, list] = {}
    for e in items:
        k = max(0, int((e.timestamp_ms - t0) // bin_ms))
        per_bin.setdefault(k, []).append(e)
    seen: set[str] = set()
    n_edges = 0
    out = []
    for k in range(max(per_bin) + 1):
        for e in per_bin.get(k, ()):
            seen.add(e.source)
            seen.add(e.target)
            n_edges += 1
        out.append(((k + 1) * bin_s, len(seen), n_edges))
    return out


def fit_log_growth(series: Iterable[Sequence[float]]) -> GrowthFit:
    """Least-squares fit of ``y = a + b ln t``.

    A constant ``y`` gives ``b = 0`` and ``r_squared = 0`` by convention.
    """
    pts = [(float(p[0]), float(p[1])) for p in series]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 points, got {len(pts)}")
    t = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if (t <= 0).any():
        raise ValueError("all t must be positive")
    x = np.log(t)
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx == 0.0:
        raise DegenerateAbscissa("all t are equal")
    yc = y - y.mean()
    syy = float(yc @ yc)
    if syy == 0.0:
        return GrowthFit(float(y.mean()), 0.0, 0.0)
    b = float(xc @ yc) / sxx
    a = float(y.mean() - b * x.mean())
    resid = y - (a + b * x)
    r2 = 1.0 - float(resid @ resid) / syy
    return GrowthFit(a, b, min(1.0, max(0.0, r2)))
