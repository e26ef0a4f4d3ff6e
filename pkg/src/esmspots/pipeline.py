"""End-to-end analysis: project reports, pick (or accept) the distance band,
score every point with Gi*, apply FDR binning, and group spots."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyDataset, InvalidConfig, SmallSampleWarning
from .geo import GeoPoint, SpatialIndex, project
from .reports import EsmReport, experience_scores
from .spots import Spot, group_spots
from .stats import (
    BIN_BY_MIN_CONF,
    BandSelection,
    FdrOutcome,
    GiResult,
    NeighborGraph,
    build_graph,
    classify,
    fdr_outcome,
    gi_star,
    incremental_autocorrelation,
)

RECOMMENDED_MIN_REPORTS = 30


@dataclass(frozen=True)
class AnalysisConfig:
    """Knobs of one analysis run. ``band=None`` means optimize it."""

    band: float | None = None
    min_conf: int = 90
    min_size: int = 5
    steps: int = 10
    step: float | None = None

    def validate(self) -> None:
        if self.band is not None and self.band <= 0:
            raise InvalidConfig("band must be > 0 when set")
        if self.min_conf not in BIN_BY_MIN_CONF:
            raise InvalidConfig(f"min_conf must be one of {sorted(BIN_BY_MIN_CONF)}")
        if self.min_size < 1:
            raise InvalidConfig("min_size must be >= 1")
        if self.steps < 1:
            raise InvalidConfig("steps must be >= 1")
        if self.step is not None and self.step <= 0:
            raise InvalidConfig("step must be > 0 when set")


@dataclass(frozen=True)
class AnalysisResult:
    origin: GeoPoint
    coords: np.ndarray
    scores: np.ndarray
    band: float
    band_selection: BandSelection | None
    graph: NeighborGraph
    gi: list[GiResult]
    fdr: FdrOutcome
    spots: list[Spot]
    config: AnalysisConfig = field(default_factory=AnalysisConfig)

    def bin_counts(self) -> dict[int, int]:
        counts = {b: 0 for b in range(-3, 4)}
        for r in self.gi:
            counts[r.bin] += 1
        return counts

    def spot_of(self) -> dict[int, int]:
        return {i: s.spot_id for s in self.spots for i in s.member_ids}


def analyze_reports(
    reports: list[EsmReport], config: AnalysisConfig = AnalysisConfig()
) -> AnalysisResult:
    """Run the full hot/cold spot pipeline over parsed reports."""
    config.validate()
    if not reports:
        raise EmptyDataset("no reports to analyze")
    if len(reports) < RECOMMENDED_MIN_REPORTS:
        warnings.warn(
            f"only {len(reports)} reports; results are unstable below "
            f"{RECOMMENDED_MIN_REPORTS}",
            SmallSampleWarning,
            stacklevel=2,
        )

    scores = experience_scores(reports)
    planar, origin = project([r.location for r in reports])
    index = SpatialIndex(planar)

    selection: BandSelection | None = None
    if config.band is None:
        selection = incremental_autocorrelation(
            index, scores, steps=config.steps, step=config.step
        )
        band = selection.chosen_band
    else:
        band = config.band

    graph = build_graph(index, band, include_self=True)
    gi = gi_star(scores, graph)
    fdr = fdr_outcome(np.array([r.p_two_sided for r in gi]))
    gi = classify(gi, fdr)
    spots = group_spots(
        gi, graph, index.coords, reports, min_conf=config.min_conf, min_size=config.min_size
    )
    return AnalysisResult(
        origin=origin,
        coords=index.coords,
        scores=scores,
        band=band,
        band_selection=selection,
        graph=graph,
        gi=gi,
        fdr=fdr,
        spots=spots,
        config=config,
    )
