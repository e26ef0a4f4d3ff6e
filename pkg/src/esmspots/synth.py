"""Synthetic report generation with planted spatial structure, plus the
calibration/recovery experiments that use it as ground truth.

Cluster points are Gaussian around their centers (SD = radius/2) so planted
spots have a smooth gradient instead of a hard edge. Item values are drawn
around a per-report latent, giving the high inter-item consistency real
questionnaire data shows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta, timezone
from typing import Mapping

import numpy as np

from .errors import EsmSpotsError, InvalidConfig
from .geo import GeoPoint, PlanarPoint, unproject
from .pipeline import AnalysisConfig, AnalysisResult, analyze_reports
from .reports import EsmReport, EventCategory

_T0 = datetime(2025, 3, 1, 8, 0, tzinfo=timezone.utc)
_REPORT_INTERVAL = timedelta(minutes=5)
_REPORTS_PER_TRIP = 12


@dataclass(frozen=True)
class ClusterSpec:
    """A planted cluster: where, how wide, how many reports, and how it
    shifts the experience level and event rates."""

    center: PlanarPoint
    radius: float
    n_points: int
    experience_shift: float
    event_rates: Mapping[EventCategory, float] = field(default_factory=dict)


@dataclass(frozen=True)
class SyntheticScenario:
    seed: int
    extent: float  # square side, meters
    n_background: int
    clusters: tuple[ClusterSpec, ...] = ()
    background_experience_mean: float = 3.0
    noise_sd: float = 0.5  # report-level latent noise
    item_sd: float = 0.25  # item scatter around the latent
    n_participants: int = 50
    background_event_rates: Mapping[EventCategory, float] = field(default_factory=dict)
    origin: GeoPoint = GeoPoint(50.0, 8.0)

    def validate(self) -> None:
        if self.extent <= 0:
            raise InvalidConfig("extent must be > 0")
        if self.n_background < 0:
            raise InvalidConfig("n_background must be >= 0")
        if self.n_background + sum(c.n_points for c in self.clusters) < 1:
            raise InvalidConfig("scenario generates no points")
        if self.n_participants < 1:
            raise InvalidConfig("n_participants must be >= 1")
        if self.noise_sd < 0 or self.item_sd < 0:
            raise InvalidConfig("noise SDs must be >= 0")
        for c in self.clusters:
            if c.radius <= 0:
                raise InvalidConfig("cluster radius must be > 0")
            if c.n_points < 0:
                raise InvalidConfig("cluster n_points must be >= 0")
            for rate in c.event_rates.values():
                if not 0.0 <= rate <= 1.0:
                    raise InvalidConfig("event rates must be in [0, 1]")
        for rate in self.background_event_rates.values():
            if not 0.0 <= rate <= 1.0:
                raise InvalidConfig("event rates must be in [0, 1]")


@dataclass(frozen=True)
class GroundTruth:
    """Per-report provenance: generating cluster (-1 = background) and the
    sign of its experience shift (0 = background)."""

    cluster_id: np.ndarray
    polarity: np.ndarray


def generate(scenario: SyntheticScenario) -> tuple[list[EsmReport], GroundTruth]:
    """Draw one dataset; fully reproducible from the scenario seed."""
    scenario.validate()
    rng = np.random.default_rng(scenario.seed)

    xy_blocks = [rng.uniform(0.0, scenario.extent, size=(scenario.n_background, 2))]
    cluster_id = [np.full(scenario.n_background, -1, dtype=int)]
    shifts = [np.zeros(scenario.n_background)]
    for k, c in enumerate(scenario.clusters):
        xy_blocks.append(
            rng.normal((c.center.x, c.center.y), c.radius / 2.0, size=(c.n_points, 2))
        )
        cluster_id.append(np.full(c.n_points, k, dtype=int))
        shifts.append(np.full(c.n_points, c.experience_shift))
    xy = np.vstack(xy_blocks)
    cluster_id = np.concatenate(cluster_id)
    shifts = np.concatenate(shifts)
    n = xy.shape[0]

    latent = scenario.background_experience_mean + shifts + rng.normal(0.0, scenario.noise_sd, n)
    items = np.clip(latent[:, None] + rng.normal(0.0, scenario.item_sd, (n, 8)), 1.0, 5.0)

    rate_by_cluster = [dict(scenario.background_event_rates)] + [
        dict(c.event_rates) for c in scenario.clusters
    ]
    flags = np.zeros((n, len(EventCategory)), dtype=bool)
    for ci, cat in enumerate(EventCategory):
        rates = np.array([rate_by_cluster[k + 1].get(cat, 0.0) for k in cluster_id])
        flags[:, ci] = rng.random(n) < rates

    locations = unproject(
        [PlanarPoint(float(x), float(y)) for x, y in xy], scenario.origin
    )

    reports = []
    trips_taken: dict[str, int] = {}
    categories = list(EventCategory)
    for i in range(n):
        pid = f"p{i % scenario.n_participants + 1:04d}"
        k = trips_taken.get(pid, 0)
        trips_taken[pid] = k + 1
        reports.append(
            EsmReport(
                report_id=f"r{i + 1:06d}",
                participant_id=pid,
                trip_id=f"{pid}-t{k // _REPORTS_PER_TRIP + 1:03d}",
                timestamp=_T0 + i * _REPORT_INTERVAL,
                location=locations[i],
                items=tuple(float(v) for v in items[i]),
                events=frozenset(categories[ci] for ci in np.nonzero(flags[i])[0]),
            )
        )
    polarity = np.sign(shifts).astype(int)
    return reports, GroundTruth(cluster_id=cluster_id, polarity=polarity)


def null_scenario(seed: int = 0, n_points: int = 500, extent: float = 5_000.0) -> SyntheticScenario:
    """Structure-free scenario used for significance calibration."""
    return SyntheticScenario(seed=seed, extent=extent, n_background=n_points)


def standard_scenario(seed: int = 0, radius: float = 500.0) -> SyntheticScenario:
    """Two planted clusters (one hot, one cold) over a broad background."""
    extent = 35_000.0
    return SyntheticScenario(
        seed=seed,
        extent=extent,
        n_background=2_000,
        clusters=(
            ClusterSpec(
                center=PlanarPoint(0.3 * extent, 0.3 * extent),
                radius=radius,
                n_points=300,
                experience_shift=1.5,
                event_rates={
                    EventCategory.COMFORT: 0.5,
                    EventCategory.NICE_ENVIRONMENT: 0.2,
                    EventCategory.ARRIVED_ON_SCHEDULE: 0.35,
                },
            ),
            ClusterSpec(
                center=PlanarPoint(0.7 * extent, 0.7 * extent),
                radius=radius,
                n_points=300,
                experience_shift=-1.5,
                event_rates={
                    EventCategory.DELAY: 0.4,
                    EventCategory.OVERCROWDED: 0.3,
                    EventCategory.DISRUPTIVE_PEOPLE: 0.15,
                },
            ),
        ),
        background_event_rates={
            EventCategory.TIME_WELL_SPENT: 0.25,
            EventCategory.ARRIVED_ON_SCHEDULE: 0.3,
        },
    )


@dataclass(frozen=True)
class CalibrationRow:
    """Per-replicate outcome; numeric fields are NaN/0 when `error` is set
    or (for recovery fields) when the scenario has no clusters."""

    replicate: int
    seed: int
    n_points: int
    chosen_band: float
    pre_fdr_rate: float
    significant_fraction: float
    recovery_fraction: float
    false_positive_fraction: float
    n_spots_hot: int
    n_spots_cold: int
    error: str = ""


@dataclass(frozen=True)
class CalibrationResult:
    rows: tuple[CalibrationRow, ...]

    def summary(self) -> dict[str, float]:
        ok = [r for r in self.rows if not r.error]
        if not ok:
            return {"n_replicates": float(len(self.rows)), "n_failed": float(len(self.rows))}
        out = {
            "n_replicates": float(len(self.rows)),
            "n_failed": float(len(self.rows) - len(ok)),
            "mean_pre_fdr_rate": float(np.mean([r.pre_fdr_rate for r in ok])),
            "mean_significant_fraction": float(
                np.mean([r.significant_fraction for r in ok])
            ),
            "mean_chosen_band": float(np.mean([r.chosen_band for r in ok])),
            "min_chosen_band": float(np.min([r.chosen_band for r in ok])),
            "max_chosen_band": float(np.max([r.chosen_band for r in ok])),
        }
        recovery = [r.recovery_fraction for r in ok if not math.isnan(r.recovery_fraction)]
        if recovery:
            out["mean_recovery_fraction"] = float(np.mean(recovery))
            out["mean_false_positive_fraction"] = float(
                np.mean([r.false_positive_fraction for r in ok])
            )
        return out


def _replicate_row(
    replicate: int, scenario: SyntheticScenario, config: AnalysisConfig
) -> CalibrationRow:
    reports, truth = generate(scenario)
    n = len(reports)
    try:
        result: AnalysisResult = analyze_reports(reports, config)
    except EsmSpotsError as exc:
        return CalibrationRow(
            replicate, scenario.seed, n, math.nan, math.nan, math.nan,
            math.nan, math.nan, 0, 0, error=type(exc).__name__,
        )
    z = np.array([r.z for r in result.gi])
    bins = np.array([r.bin for r in result.gi])
    planted = truth.cluster_id >= 0
    if planted.any():
        hit = (np.sign(bins) == truth.polarity) & (np.abs(bins) >= 1)
        recovery = float(np.mean(hit[planted]))
        false_pos = float(np.mean(np.abs(bins[~planted]) >= 1))
    else:
        recovery = math.nan
        false_pos = float(np.mean(np.abs(bins) >= 1))
    return CalibrationRow(
        replicate=replicate,
        seed=scenario.seed,
        n_points=n,
        chosen_band=result.band,
        pre_fdr_rate=float(np.mean(np.abs(z) > 1.96)),
        significant_fraction=float(np.mean(np.abs(bins) >= 1)),
        recovery_fraction=recovery,
        false_positive_fraction=false_pos,
        n_spots_hot=sum(1 for s in result.spots if s.polarity == "hot"),
        n_spots_cold=sum(1 for s in result.spots if s.polarity == "cold"),
        error="",
    )


def run_calibration(
    n_replicates: int,
    scenario: SyntheticScenario,
    config: AnalysisConfig = AnalysisConfig(),
) -> CalibrationResult:
    """Repeat generate-and-analyze with per-replicate seeds seed+0..seed+R-1.

    Replicates that abort (e.g. degenerate values) are recorded as failed
    rows rather than stopping the run.
    """
    if n_replicates < 1:
        raise InvalidConfig("n_replicates must be >= 1")
    rows = tuple(
        _replicate_row(r, replace(scenario, seed=scenario.seed + r), config)
        for r in range(n_replicates)
    )
    return CalibrationResult(rows)
