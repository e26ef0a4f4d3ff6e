import io
import math
from dataclasses import replace

import numpy as np
import pytest

from esmspots import (
    AnalysisConfig,
    ClusterSpec,
    EventCategory,
    InvalidConfig,
    PlanarPoint,
    SyntheticScenario,
    experience_scores,
    generate,
    null_scenario,
    project,
    run_calibration,
    standard_scenario,
    write_reports,
)


class TestGenerate:
    def test_no_signal_no_noise_gives_constant_scores(self):
        scen = SyntheticScenario(
            seed=1, extent=1000.0, n_background=50, noise_sd=0.0, item_sd=0.0
        )
        reports, truth = generate(scen)
        scores = experience_scores(reports)
        np.testing.assert_allclose(scores, 3.0, atol=1e-12)
        assert (truth.cluster_id == -1).all()
        assert (truth.polarity == 0).all()

    def test_deterministic_from_seed(self):
        scen = standard_scenario(seed=9)
        a, _ = generate(scen)
        b, _ = generate(scen)
        assert a == b
        buf_a, buf_b = io.StringIO(), io.StringIO()
        write_reports(a, buf_a)
        write_reports(b, buf_b)
        assert buf_a.getvalue() == buf_b.getvalue()

    def test_different_seeds_differ(self):
        a, _ = generate(standard_scenario(seed=1))
        b, _ = generate(standard_scenario(seed=2))
        assert a != b

    def test_planted_shift_recovered_in_sample_means(self):
        # Means chosen away from the [1, 5] rails so clipping stays inactive.
        scen = SyntheticScenario(
            seed=3,
            extent=20_000.0,
            n_background=1000,
            background_experience_mean=3.8,
            noise_sd=0.3,
            item_sd=0.2,
            clusters=(
                ClusterSpec(
                    center=PlanarPoint(5000.0, 5000.0),
                    radius=400.0,
                    n_points=1000,
                    experience_shift=-1.5,
                ),
            ),
        )
        reports, truth = generate(scen)
        scores = experience_scores(reports)
        gap = scores[truth.cluster_id == -1].mean() - scores[truth.cluster_id == 0].mean()
        assert abs(gap - 1.5) < 0.1

    def test_items_clipped_to_slider_range(self):
        scen = SyntheticScenario(
            seed=4, extent=1000.0, n_background=300, background_experience_mean=4.8,
            noise_sd=1.5,
        )
        reports, _ = generate(scen)
        for r in reports:
            assert all(1.0 <= v <= 5.0 for v in r.items)

    def test_event_rates_respected(self):
        scen = SyntheticScenario(
            seed=5,
            extent=2000.0,
            n_background=4000,
            background_event_rates={EventCategory.DELAY: 0.25},
        )
        reports, _ = generate(scen)
        rate = np.mean([EventCategory.DELAY in r.events for r in reports])
        assert abs(rate - 0.25) < 0.02
        assert not any(EventCategory.COMFORT in r.events for r in reports)

    def test_participants_round_robin(self):
        scen = SyntheticScenario(seed=6, extent=1000.0, n_background=100, n_participants=7)
        reports, _ = generate(scen)
        assert len({r.participant_id for r in reports}) == 7
        assert reports[0].participant_id == reports[7].participant_id

    def test_cluster_points_near_center(self):
        scen = SyntheticScenario(
            seed=7,
            extent=10_000.0,
            n_background=0,
            clusters=(
                ClusterSpec(PlanarPoint(5000.0, 5000.0), 500.0, 500, 1.0),
            ),
        )
        reports, _ = generate(scen)
        planar, _ = project([r.location for r in reports])
        coords = np.array([(p.x, p.y) for p in planar])
        # SD = radius/2 per axis; sample SD within 10%.
        assert np.std(coords[:, 0]) == pytest.approx(250.0, rel=0.1)

    def test_invalid_scenarios_rejected(self):
        with pytest.raises(InvalidConfig):
            generate(SyntheticScenario(seed=0, extent=0.0, n_background=10))
        with pytest.raises(InvalidConfig):
            generate(SyntheticScenario(seed=0, extent=100.0, n_background=0))
        with pytest.raises(InvalidConfig):
            generate(
                SyntheticScenario(
                    seed=0,
                    extent=100.0,
                    n_background=5,
                    clusters=(ClusterSpec(PlanarPoint(0, 0), 10.0, 5, 0.0, {EventCategory.DELAY: 1.5}),),
                )
            )


class TestMultiSpotRecovery:
    def test_four_planted_clusters_recovered_as_four_spots(self):
        from esmspots import analyze_reports

        extent = 40_000.0
        centers = [(0.2, 0.2), (0.8, 0.2), (0.2, 0.8), (0.8, 0.8)]
        shifts = [1.5, -1.5, -1.5, 1.5]
        scen = SyntheticScenario(
            seed=31,
            extent=extent,
            n_background=2500,
            clusters=tuple(
                ClusterSpec(
                    center=PlanarPoint(fx * extent, fy * extent),
                    radius=500.0,
                    n_points=250,
                    experience_shift=shift,
                )
                for (fx, fy), shift in zip(centers, shifts)
            ),
        )
        reports, truth = generate(scen)
        result = analyze_reports(reports)
        assert len(result.spots) == 4
        assert sorted(s.polarity for s in result.spots) == ["cold", "cold", "hot", "hot"]
        # Each spot's members should come overwhelmingly from one cluster.
        for s in result.spots:
            ids = truth.cluster_id[list(s.member_ids)]
            planted = ids[ids >= 0]
            assert planted.size > 0
            dominant = np.bincount(planted).max() / planted.size
            assert dominant > 0.99


class TestRecoveryMonotonicity:
    def test_stronger_shift_never_detects_less(self):
        fractions = []
        for shift in (0.4, 0.9, 1.5):
            scen = standard_scenario(seed=42)
            scen = replace(
                scen,
                clusters=tuple(
                    replace(c, experience_shift=math.copysign(shift, c.experience_shift))
                    for c in scen.clusters
                ),
            )
            row = run_calibration(1, scen).rows[0]
            assert row.error == ""
            fractions.append(row.recovery_fraction)
        assert fractions[0] <= fractions[1] <= fractions[2]


@pytest.mark.filterwarnings("ignore::esmspots.errors.NoSignificantPeakWarning")
@pytest.mark.filterwarnings("ignore::esmspots.errors.MonotoneCurveWarning")
class TestRunCalibration:
    def test_row_count_and_determinism(self):
        scen = null_scenario(seed=77, n_points=120)
        a = run_calibration(4, scen)
        b = run_calibration(4, scen)
        assert a == b
        assert len(a.rows) == 4
        assert [r.seed for r in a.rows] == [77, 78, 79, 80]

    def test_null_rows_have_no_recovery_column_values(self):
        row = run_calibration(1, null_scenario(seed=5, n_points=100)).rows[0]
        assert math.isnan(row.recovery_fraction)
        assert row.error == ""

    def test_planted_replicate_recovers_cluster(self):
        row = run_calibration(1, standard_scenario(seed=8)).rows[0]
        assert row.recovery_fraction >= 0.9
        assert row.n_spots_hot == 1
        assert row.n_spots_cold == 1

    def test_degenerate_replicate_recorded_not_raised(self):
        scen = SyntheticScenario(
            seed=10, extent=1000.0, n_background=60, noise_sd=0.0, item_sd=0.0
        )
        result = run_calibration(2, scen)
        assert [r.error for r in result.rows] == ["DegenerateValues"] * 2
        assert result.summary()["n_failed"] == 2.0

    def test_invalid_replicate_count(self):
        with pytest.raises(InvalidConfig):
            run_calibration(0, null_scenario())

    def test_config_passed_through(self):
        scen = standard_scenario(seed=12)
        strict = run_calibration(1, scen, AnalysisConfig(min_conf=99)).rows[0]
        loose = run_calibration(1, scen, AnalysisConfig(min_conf=90)).rows[0]
        assert strict.n_spots_hot + strict.n_spots_cold <= loose.n_spots_hot + loose.n_spots_cold
