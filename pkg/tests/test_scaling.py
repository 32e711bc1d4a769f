"""Tests for the critical-window cluster-size experiment."""

import json

import numpy as np
import pytest

from poisson_digraph.scaling import (
    STATISTICS,
    ScalingResult,
    assert_critical,
    scaling_exponent_experiment,
    theoretical_alpha,
)
from poisson_digraph.weights import (
    Constant,
    ConstantMarginal,
    IndependentProduct,
    ParetoMirrored,
    critical_pareto_mirrored,
)


def test_theoretical_alpha_values():
    assert theoretical_alpha(critical_pareto_mirrored(3.5)) == pytest.approx(0.6)
    assert theoretical_alpha(critical_pareto_mirrored(4.0)) == pytest.approx(2.0 / 3.0)
    assert theoretical_alpha(critical_pareto_mirrored(6.0)) == pytest.approx(2.0 / 3.0)
    assert theoretical_alpha(Constant(1.0)) == pytest.approx(2.0 / 3.0)


def test_assert_critical():
    assert_critical(Constant(1.0))
    assert_critical(critical_pareto_mirrored(3.5))
    with pytest.raises(ValueError, match="critical"):
        assert_critical(Constant(2.0))
    with pytest.raises(ValueError, match="critical"):
        assert_critical(ParetoMirrored(3.5, 1.0))


def test_experiment_rejects_bad_input():
    with pytest.raises(ValueError):
        scaling_exponent_experiment(Constant(2.0), (64, 128), reps=2)
    with pytest.raises(ValueError, match="mirrored"):
        scaling_exponent_experiment(
            IndependentProduct(ConstantMarginal(1.0), ConstantMarginal(1.0)),
            (64, 128),
            reps=2,
        )
    with pytest.raises(ValueError, match="two sizes"):
        scaling_exponent_experiment(Constant(1.0), (64,), reps=2)


def _tiny_run(threads=1, seed=3):
    return scaling_exponent_experiment(
        critical_pareto_mirrored(3.5),
        (128, 256, 512),
        reps=4,
        seed=seed,
        sources=8,
        threads=threads,
        bootstrap=25,
    )


def test_experiment_shape_and_determinism():
    a = _tiny_run()
    b = _tiny_run()
    assert a.n_values == (128, 256, 512)
    assert a.reps == 4
    for stat in STATISTICS:
        assert len(a.medians[stat]) == 3
        np.testing.assert_array_equal(a.medians[stat], b.medians[stat])
        np.testing.assert_array_equal(a.means[stat], b.means[stat])
        assert a.slopes[stat].slope == b.slopes[stat].slope
        assert np.isfinite(a.slopes[stat].slope)
    assert a.alpha_theory == pytest.approx(0.6)
    different = _tiny_run(seed=4)
    assert any(
        not np.array_equal(a.medians[s], different.medians[s]) for s in STATISTICS
    )


def test_thread_count_does_not_change_results():
    a = _tiny_run(threads=1)
    b = _tiny_run(threads=3)
    for stat in STATISTICS:
        np.testing.assert_array_equal(a.medians[stat], b.medians[stat])
        assert a.slopes[stat].slope == b.slopes[stat].slope


def test_cluster_sizes_grow_with_n():
    res = _tiny_run()
    weak = res.medians["weak"]
    assert weak[-1] > weak[0]
    for stat in STATISTICS:
        assert np.all(np.asarray(res.medians[stat]) >= 1)


def test_tsv_format():
    res = _tiny_run()
    text = res.to_tsv()
    lines = text.strip().split("\n")
    assert lines[0] == "# poisson-digraph scaling v1"
    assert any(line.startswith("# alpha_theory=") for line in lines)
    for stat in STATISTICS:
        assert any(line.startswith(f"# slope_{stat}=") for line in lines)
    data_rows = [line for line in lines if not line.startswith("#")]
    assert len(data_rows) == 3
    first = data_rows[0].split("\t")
    assert first[0] == "128"
    assert len(first) == 9


def test_json_round_trip():
    res = _tiny_run()
    payload = json.loads(res.to_json())
    assert payload["n_values"] == [128, 256, 512]
    assert payload["alpha_theory"] == pytest.approx(0.6)
    for stat in STATISTICS:
        assert len(payload["medians"][stat]) == 3
        fit = payload["slopes"][stat]
        assert set(fit) == {"slope", "ci_low", "ci_high"}
