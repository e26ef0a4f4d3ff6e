"""The statistical core: fixed-distance-band spatial weights, Global Moran's I
with the analytic randomization z-score, incremental autocorrelation for
distance-band selection, per-point Getis-Ord Gi*, and false-discovery-rate
confidence binning.

Weights are binary (1 within the band, 0 outside). Moran's I uses a graph
without self-neighbors; Gi* includes each point in its own neighborhood.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import norm

from .errors import (
    AllNeighborsWarning,
    DegenerateValues,
    InputMismatch,
    InsufficientPoints,
    InvalidBand,
    InvalidConfig,
    InvalidPValue,
    MonotoneCurveWarning,
    NoNeighbors,
    NoSignificantPeakWarning,
    SmallSampleWarning,
)
from .geo import SpatialIndex, nn_outlier_mask

ALPHA_LEVELS = (0.10, 0.05, 0.01)

# Confidence level (percent) -> minimum |bin| it corresponds to.
BIN_BY_MIN_CONF = {90: 1, 95: 2, 99: 3}


@dataclass(frozen=True)
class NeighborGraph:
    """Binary fixed-distance-band weights in compressed sparse row form.

    ``indices[indptr[i]:indptr[i+1]]`` is the sorted id list of i's
    neighbors. Symmetric by construction; ``include_self`` says whether each
    point counts as its own neighbor (Gi* mode) or not (Moran mode).
    """

    band: float
    include_self: bool
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def n(self) -> int:
        return self.indptr.size - 1

    @property
    def counts(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]


def build_graph(index: SpatialIndex, band: float, include_self: bool) -> NeighborGraph:
    """Neighbor lists {j : dist(i, j) <= band} for every point."""
    if band <= 0:
        raise InvalidBand(f"band must be > 0, got {band}")
    lists = index.radius_query_all(band)
    if not include_self:
        lists = [ids[ids != i] for i, ids in enumerate(lists)]
    counts = np.array([ids.size for ids in lists], dtype=np.int64)
    indptr = np.zeros(index.n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = np.concatenate(lists) if indptr[-1] else np.empty(0, dtype=np.intp)
    return NeighborGraph(float(band), include_self, indptr, indices)


@dataclass(frozen=True)
class MoranResult:
    """Global Moran's I at one distance band, with its analytic z-score."""

    distance: float
    i_value: float
    expected_i: float
    variance: float
    z: float
    p_two_sided: float


def _check_values(values: np.ndarray, graph: NeighborGraph) -> None:
    if values.size != graph.n:
        raise InputMismatch(f"{values.size} values for a graph over {graph.n} points")
    if not np.all(np.isfinite(values)):
        raise DegenerateValues("values must be finite")
    if np.all(values == values[0]):
        raise DegenerateValues("values have zero variance")


def _lag(deviations: np.ndarray, graph: NeighborGraph) -> np.ndarray:
    """Row sums of the weighted values: lag_i = sum of deviations over i's
    neighbors. Safe for empty neighbor lists."""
    rows = np.repeat(np.arange(graph.n), graph.counts)
    return np.bincount(rows, weights=deviations[graph.indices], minlength=graph.n)


def morans_i(values: np.ndarray, graph: NeighborGraph) -> MoranResult:
    """Global Moran's I with variance under the randomization assumption.

    Expects a graph without self-neighbors. The variance follows the
    standard randomization (permutation-moment) formula driven by the graph
    sums S0, S1, S2 and the sample kurtosis; the z-score is (I - E[I]) / sd
    and the p-value is two-sided normal.
    """
    x = np.asarray(values, dtype=float)
    n = x.size
    if graph.include_self:
        raise InputMismatch("Moran's I needs a graph without self-neighbors")
    _check_values(x, graph)
    if n < 4:
        raise InsufficientPoints("randomization variance needs n >= 4")

    counts = graph.counts.astype(float)
    s0 = float(counts.sum())
    if s0 == 0:
        raise NoNeighbors(f"no point has a neighbor within {graph.band} m")

    dev = x - x.mean()
    dev2_sum = float(np.sum(dev**2))
    i_value = n / s0 * float(np.sum(dev * _lag(dev, graph))) / dev2_sum

    # For symmetric binary weights: S1 = 2*S0, S2 = 4 * sum of squared degrees.
    s1 = 2.0 * s0
    s2 = 4.0 * float(np.sum(counts**2))
    b2 = n * float(np.sum(dev**4)) / dev2_sum**2
    expected = -1.0 / (n - 1)
    nf = float(n)
    a = nf * ((nf * nf - 3 * nf + 3) * s1 - nf * s2 + 3 * s0 * s0)
    b = b2 * ((nf * nf - nf) * s1 - 2 * nf * s2 + 6 * s0 * s0)
    variance = (a - b) / ((nf - 1) * (nf - 2) * (nf - 3) * s0 * s0) - expected**2
    if variance <= 0:
        raise DegenerateValues("randomization variance is not positive")

    z = (i_value - expected) / math.sqrt(variance)
    p = 2.0 * float(norm.sf(abs(z)))
    return MoranResult(graph.band, i_value, expected, variance, z, p)


@dataclass(frozen=True)
class GiResult:
    """Per-point Gi* outcome: z-score, p-value, and confidence bin.

    ``bin`` is 0 until :func:`classify` fills it from an FDR outcome; its
    sign then matches the z-score and |bin| encodes 90/95/99% confidence.
    """

    point_id: int
    z: float
    p_two_sided: float
    bin: int
    neighbor_count: int


def gi_star(values: np.ndarray, graph: NeighborGraph) -> list[GiResult]:
    """Getis-Ord Gi* z-score for every point.

    Expects a self-inclusive graph. With binary weights the statistic for
    point i with neighborhood size W_i is

        z_i = (sum of neighbor values - mean * W_i)
              / (S * sqrt((n W_i - W_i^2) / (n - 1))),

    with mean and S the population mean and standard deviation over all n
    values. When a neighborhood spans the entire dataset the denominator is
    zero; those points get z = 0 by convention (with a warning), since there
    is no "elsewhere" to contrast against.
    """
    x = np.asarray(values, dtype=float)
    n = x.size
    if not graph.include_self:
        raise InputMismatch("Gi* needs a self-inclusive graph")
    _check_values(x, graph)
    if n < 2:
        raise InsufficientPoints("Gi* needs n >= 2")

    mean = float(x.mean())
    dev = x - mean
    s = math.sqrt(float(np.mean(dev**2)))

    w = graph.counts.astype(float)
    numer = _lag(dev, graph)  # equals sum(x over nbrs) - mean * W
    var_term = (n * w - w * w) / (n - 1.0)
    whole = var_term <= 0
    if np.any(whole):
        warnings.warn(
            f"{int(whole.sum())} neighborhood(s) cover the whole dataset; "
            "their z-scores are 0 by convention",
            AllNeighborsWarning,
            stacklevel=2,
        )
    with np.errstate(invalid="ignore", divide="ignore"):
        z = np.where(whole, 0.0, numer / (s * np.sqrt(var_term)))
    p = 2.0 * norm.sf(np.abs(z))
    return [
        GiResult(i, float(z[i]), float(p[i]), 0, int(w[i])) for i in range(n)
    ]


@dataclass(frozen=True)
class FdrLevel:
    """Benjamini-Hochberg outcome at one alpha level."""

    alpha: float
    critical_p: float
    significant: frozenset[int]


@dataclass(frozen=True)
class FdrOutcome:
    """BH outcomes at the fixed (0.10, 0.05, 0.01) ladder; sets are nested."""

    levels: tuple[FdrLevel, ...]

    def at(self, alpha: float) -> FdrLevel:
        for level in self.levels:
            if level.alpha == alpha:
                return level
        raise KeyError(f"no FDR level at alpha={alpha}")


def fdr_correct(p_values: np.ndarray, alpha: float) -> FdrLevel:
    """Benjamini-Hochberg at one level.

    Sort p ascending (stable, so ties resolve by id), find the largest k
    with p(k) <= k*alpha/m, and reject the first k hypotheses in that
    order. critical_p is p(k), or 0 when nothing is rejected.
    """
    p = np.asarray(p_values, dtype=float)
    if p.size and (not np.all(np.isfinite(p)) or p.min() < 0 or p.max() > 1):
        raise InvalidPValue("p-values must lie in [0, 1]")
    if not 0 < alpha < 1:
        raise InvalidConfig(f"alpha must be in (0, 1), got {alpha}")
    m = p.size
    order = np.argsort(p, kind="stable")
    passed = np.nonzero(p[order] <= alpha * np.arange(1, m + 1) / m)[0]
    k = int(passed[-1]) + 1 if passed.size else 0
    critical = float(p[order[k - 1]]) if k else 0.0
    return FdrLevel(alpha, critical, frozenset(int(i) for i in order[:k]))


def fdr_outcome(p_values: np.ndarray) -> FdrOutcome:
    return FdrOutcome(tuple(fdr_correct(p_values, a) for a in ALPHA_LEVELS))


def classify(gi: list[GiResult], fdr: FdrOutcome) -> list[GiResult]:
    """Fill confidence bins: sign(z) * 3 for the 0.01 set, * 2 for 0.05,
    * 1 for 0.10, else 0."""
    n = len(gi)
    sig10 = fdr.at(0.10).significant
    sig05 = fdr.at(0.05).significant
    sig01 = fdr.at(0.01).significant
    if any(i >= n for i in sig10):
        raise InputMismatch("FDR outcome refers to ids beyond the Gi* results")
    out = []
    for r in gi:
        if r.point_id in sig01:
            mag = 3
        elif r.point_id in sig05:
            mag = 2
        elif r.point_id in sig10:
            mag = 1
        else:
            mag = 0
        sign = 1 if r.z > 0 else (-1 if r.z < 0 else 0)
        out.append(replace(r, bin=sign * mag))
    return out


@dataclass(frozen=True)
class BandSelection:
    """Result of the incremental autocorrelation sweep."""

    chosen_band: float
    curve: tuple[MoranResult, ...]
    start_distance: float
    peak_significant: bool
    monotone: bool


def incremental_autocorrelation(
    index: SpatialIndex,
    values: np.ndarray,
    steps: int = 10,
    step: float | None = None,
) -> BandSelection:
    """Pick the fixed distance band by sweeping Moran's I over distances.

    The start distance is the mean nearest-neighbor distance over
    non-outlier points (locational outliers are excluded from this
    calibration only). Moran's z is evaluated at ``steps`` distances spaced
    ``step`` apart (default: the start distance itself). The chosen band is
    the first local z maximum with p < 0.05; if none is significant, the
    global maximum; if the curve only ever rises, the last distance (with a
    warning, since the true scale may lie beyond the sweep).
    """
    x = np.asarray(values, dtype=float)
    if x.size != index.n:
        raise InputMismatch(f"{x.size} values for {index.n} points")
    if x.size and np.all(x == x[0]):
        raise DegenerateValues("values have zero variance")
    if steps < 1:
        raise InvalidConfig("steps must be >= 1")
    if index.n < 30:
        warnings.warn(
            f"only {index.n} points; band selection is unstable below 30",
            SmallSampleWarning,
            stacklevel=2,
        )

    nn = index.nearest_neighbor_distances()
    keep = ~nn_outlier_mask(nn)
    d0 = float(nn[keep].mean()) if keep.any() else float(nn.mean())
    if d0 <= 0:
        raise InvalidBand("mean nearest-neighbor distance is zero (all points coincide)")
    delta = d0 if step is None else float(step)
    if delta <= 0:
        raise InvalidConfig("step must be > 0")

    distances = [d0 + i * delta for i in range(steps)]
    curve = tuple(morans_i(x, build_graph(index, d, include_self=False)) for d in distances)
    z = np.array([m.z for m in curve])

    # A peak must see a decline after it, so the last distance never counts.
    peaks = [
        i
        for i in range(len(z) - 1)
        if (i == 0 or z[i] > z[i - 1]) and z[i] > z[i + 1]
    ]
    significant = [i for i in peaks if curve[i].p_two_sided < 0.05]
    monotone = bool(np.all(np.diff(z) > 0))

    if significant:
        chosen = distances[significant[0]]
        peak_significant = True
    elif monotone:
        chosen = distances[-1]
        peak_significant = False
        warnings.warn(
            "Moran z rose through the whole sweep; using the last distance",
            MonotoneCurveWarning,
            stacklevel=2,
        )
    else:
        chosen = distances[int(np.argmax(z))]
        peak_significant = False
        warnings.warn(
            "no significant peak in the sweep; using the global maximum",
            NoSignificantPeakWarning,
            stacklevel=2,
        )
    return BandSelection(chosen, curve, d0, peak_significant, monotone)
