import csv
import math

import pytest

from scdt_nls.bench import (
    CellResult,
    MetricsReport,
    run_accuracy,
    run_data_efficiency,
    run_out_distribution,
    write_cells_csv,
)
from scdt_nls.errors import ConfigError
from scdt_nls.synth import SynthConfig, generate, proof_of_concept_templates


def cell(method, dataset, accuracy, classes, size=10, repeat=0):
    return CellResult(
        method=method,
        dataset=dataset,
        size=size,
        repeat=repeat,
        accuracy=accuracy,
        class_count=classes,
        train_seconds=0.0,
        predict_seconds=0.0,
    )


class TestMetricsAlgebra:
    # dyadic accuracies keep PCE and MPCE exactly representable

    def test_single_method_table(self):
        report = MetricsReport(
            cells=(cell("nls", "a", 0.75, 2), cell("nls", "b", 1.0, 4))
        )
        assert report.mpce("nls") == (0.25 / 2 + 0.0 / 4) / 2
        assert report.mean_rank("nls") == 1.0
        assert report.geometric_mean_rank("nls") == 1.0
        assert report.wins("nls") == 2

    def test_two_method_table(self):
        report = MetricsReport(
            cells=(
                cell("nls", "a", 0.875, 2),
                cell("dtw", "a", 0.75, 2),
                cell("nls", "b", 0.5, 4),
                cell("dtw", "b", 0.75, 4),
            )
        )
        assert report.mpce("nls") == (0.125 / 2 + 0.5 / 4) / 2
        assert report.mpce("dtw") == (0.25 / 2 + 0.25 / 4) / 2
        assert report.mean_rank("nls") == 1.5
        assert report.mean_rank("dtw") == 1.5
        assert report.wins("nls") == 1
        assert report.wins("dtw") == 1
        assert report.geometric_mean_rank("nls") == pytest.approx(
            math.sqrt(2.0), abs=1e-12
        )

    def test_tied_accuracies_get_average_rank(self):
        report = MetricsReport(
            cells=(
                cell("m1", "a", 0.5, 2),
                cell("m2", "a", 0.5, 2),
                cell("m3", "a", 0.25, 2),
            )
        )
        assert report.mean_rank("m1") == 1.5
        assert report.mean_rank("m2") == 1.5
        assert report.mean_rank("m3") == 3.0
        assert report.wins("m1") == 1 and report.wins("m2") == 1
        assert report.wins("m3") == 0

    def test_three_method_hand_table(self):
        report = MetricsReport(
            cells=(
                cell("m1", "a", 1.0, 2),
                cell("m2", "a", 0.75, 2),
                cell("m3", "a", 0.5, 2),
                cell("m1", "b", 0.25, 4),
                cell("m2", "b", 0.75, 4),
                cell("m3", "b", 0.5, 4),
            )
        )
        assert report.mean_rank("m1") == 2.0  # ranks 1 and 3
        assert report.mean_rank("m2") == 1.5  # ranks 2 and 1
        assert report.mean_rank("m3") == 2.5  # ranks 3 and 2
        assert report.geometric_mean_rank("m1") == pytest.approx(
            math.sqrt(3.0), abs=1e-12
        )
        assert report.mpce("m1") == (0.0 / 2 + 0.75 / 4) / 2

    def test_error_accuracy_consistency(self):
        c = cell("nls", "a", 0.8125, 4)
        assert c.error + c.accuracy == 1.0
        assert c.pce == c.error / 4

    def test_csv_layout(self, tmp_path):
        path = tmp_path / "cells.csv"
        write_cells_csv([cell("nls", "a", 0.5, 2, size=4, repeat=1)], path)
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == [
            "method", "dataset", "size", "repeat", "accuracy", "train_s", "predict_s",
        ]
        assert rows[1][0] == "nls"
        assert float(rows[1][4]) == 0.5


def tiny_corpus(seed=0, n=64, per_template=3, test_per_template=5):
    templates = proof_of_concept_templates(n)
    train = generate(templates, SynthConfig(samples_per_template=per_template, seed=seed))
    test = generate(
        templates, SynthConfig(samples_per_template=test_per_template, seed=seed + 1)
    )
    return train, test


class TestRunners:
    def test_run_accuracy_single_method(self):
        train, test = tiny_corpus()
        report = run_accuracy(
            ["nls"], train, test, seed=0, dataset_name="tiny",
            options={"variance_cutoff": 1.0, "k_grid": [1, 2], "n_grid": [0]},
        )
        assert report.methods() == ["nls"]
        assert report.mean_rank("nls") == 1.0
        cellr = report.cells[0]
        assert cellr.dataset == "tiny"
        assert 0.0 <= cellr.accuracy <= 1.0
        assert cellr.class_count == 3

    def test_perfect_classifier_has_zero_pce(self):
        train, test = tiny_corpus(seed=3, per_template=4, test_per_template=3)
        report = run_accuracy(
            ["nls"], train, test, seed=0,
            options={"variance_cutoff": 1.0, "k_grid": [1], "n_grid": [0]},
        )
        if report.cells[0].accuracy == 1.0:
            assert report.mpce("nls") == 0.0
        assert report.cells[0].pce == report.cells[0].error / 3

    def test_unknown_method(self):
        train, test = tiny_corpus()
        with pytest.raises(ConfigError):
            run_accuracy(["svm"], train, test)

    def test_data_efficiency_full_size_matches_run_accuracy(self):
        train, test = tiny_corpus(seed=5, per_template=3)
        options = {"variance_cutoff": 1.0, "k_grid": [1], "n_grid": [0]}
        report, curve = run_data_efficiency(
            "nls", train, test, sizes=[6], repeats=1, seed=9, options=options
        )
        # size 6 per class is the whole pool, so the subset is the full set
        single = run_accuracy(["nls"], train, test, seed=9, options=options)
        assert curve[0][0] == 6
        assert curve[0][1] == single.cells[0].accuracy
        assert curve[0][2] == 0.0

    def test_data_efficiency_deterministic(self):
        train, test = tiny_corpus(seed=6)
        options = {"variance_cutoff": 1.0, "k_grid": [1], "n_grid": [0]}
        a = run_data_efficiency(
            "nls", train, test, sizes=[2, 4], repeats=2, seed=1, options=options
        )[1]
        b = run_data_efficiency(
            "nls", train, test, sizes=[2, 4], repeats=2, seed=1, options=options
        )[1]
        assert a == b

    def test_data_efficiency_size_too_large(self):
        train, test = tiny_corpus()
        with pytest.raises(ConfigError):
            run_data_efficiency("nls", train, test, sizes=[50], repeats=1, seed=0)

    def test_data_efficiency_accuracy_nondecreasing_within_2_std(self):
        train, test = tiny_corpus(seed=8, per_template=4, test_per_template=6)
        options = {"variance_cutoff": 1.0, "k_grid": [1], "n_grid": [0]}
        _, curve = run_data_efficiency(
            "nls", train, test, sizes=[2, 8], repeats=10, seed=2, options=options
        )
        (s_small, mean_small, std_small), (s_big, mean_big, std_big) = curve
        assert s_small < s_big
        assert mean_big >= mean_small - 2 * max(std_small, std_big)

    def test_in_distribution_sanity_accuracy(self):
        from scdt_nls.bench import _fit_and_score_nls
        from scdt_nls.synth import prototype_templates

        templates = prototype_templates(128)
        train = generate(templates, SynthConfig(samples_per_template=16, seed=40))
        test = generate(templates, SynthConfig(samples_per_template=50, seed=41))
        accuracy, _, _ = _fit_and_score_nls(
            train, test, seed=0,
            options={"variance_cutoff": 1.0, "k_grid": range(1, 9), "n_grid": range(0, 3)},
        )
        assert accuracy >= 0.99

    def test_out_distribution_smoke(self):
        report = run_out_distribution(
            seed=0, sizes=(2,), test_per_class=5, n=64,
            options={"k_grid": [1], "n_grid": [0], "window_grid": [0, 2]},
        )
        assert set(report.methods()) == {"nls", "dtw"}
        doc = report.to_dict()
        assert "cells" in doc and "methods" in doc and "environment" in doc
        for stats in doc["methods"].values():
            for key in ("mpce", "mean_rank", "geometric_mean_rank", "wins"):
                assert key in stats

    def test_report_groups_by_size_and_repeat(self):
        cells = (
            cell("nls", "d", 1.0, 3, size=2, repeat=0),
            cell("dtw", "d", 0.5, 3, size=2, repeat=0),
            cell("nls", "d", 0.75, 3, size=4, repeat=0),
            cell("dtw", "d", 1.0, 3, size=4, repeat=0),
        )
        report = MetricsReport(cells=cells)
        assert len(report.groups()) == 2
        assert report.mean_rank("nls") == 1.5
        assert report.wins("nls") == 1
