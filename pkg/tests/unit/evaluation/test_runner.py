from __future__ import annotations

"""评估编排、报告结构、跨种子汇总与基准计时表。"""

import numpy as np
import pytest

from sf_attribution.attribution import pairing_aggregate
from sf_attribution.common.exceptions import EmptyInput, UnknownStrategy
from sf_attribution.evaluation import (
    EVALUATION_STRATEGIES,
    bench,
    build_strategy_report,
    fit_models,
    predict_split,
    run_evaluation,
    summarize_seeds,
)
from sf_attribution.evaluation.runner import aggregate_modules, module_stack, select_strategies
from sf_attribution.pmf import PMF
from sf_attribution.simulator import Dataset, SimConfig, generate


@pytest.fixture(scope="module")
def report(small_dataset):
    return run_evaluation(small_dataset, EVALUATION_STRATEGIES, grid_size=101)


def test_report_covers_every_strategy(report, small_dataset) -> None:
    """验证评估报告覆盖每个策略且累计分布、PR 曲线满足不变量。"""

    assert list(report.strategies) == list(EVALUATION_STRATEGIES)
    assert report.test_incidents == len(small_dataset.test)
    assert report.train_incidents == len(small_dataset.train)
    for name, strategy in report.strategies.items():
        assert strategy.cdf.size == small_dataset.config.t
        assert strategy.cdf[-1] == pytest.approx(1.0, abs=1e-12)
        assert np.all(np.diff(strategy.cdf) >= 0.0)
        assert not strategy.degenerate_recall, name
        assert strategy.curve[0].threshold == 0.0
        assert strategy.curve[0].recall == 1.0
        assert 0.0 <= strategy.f_measure <= 1.0


def test_report_timings_and_serialization(report) -> None:
    """验证报告的计时表与序列化内容。"""

    timings = report.timings

    assert timings.has("train", "modular")
    assert timings.has("train", "monolithic")
    assert timings.strategies("predict") == list(EVALUATION_STRATEGIES)
    assert timings.strategies("aggregate") == ["linear", "logarithmic", "pairing", "holder"]
    assert timings.get("predict", "pairing") >= timings.get("aggregate", "pairing")

    payload = report.to_dict()
    assert payload["grid_size"] == 101
    assert set(payload["strategies"]) == set(EVALUATION_STRATEGIES)
    assert payload["metadata"]["tie_break"] == "ascending actor id"


def test_evaluation_is_deterministic(report, small_dataset) -> None:
    """验证同一数据集重复评估得到相同结果。"""

    again = run_evaluation(small_dataset, EVALUATION_STRATEGIES, grid_size=101)

    for name in EVALUATION_STRATEGIES:
        assert np.allclose(again[name].cdf, report[name].cdf, atol=1e-9)
        assert again[name].f_measure == pytest.approx(report[name].f_measure, abs=1e-9)


def test_batched_pairing_matches_per_incident_trace(small_dataset) -> None:
    """验证评估中的批量配对与逐事件解释轨迹一致。"""

    models = fit_models(small_dataset.train, small_dataset.config.t, small_dataset.config.m)
    incidents = small_dataset.test[:20]
    stack = module_stack(models.bindings, incidents)
    batched = aggregate_modules("pairing", stack)

    for row, incident in enumerate(incidents):
        outputs = [(binding.name, binding.attribute(incident)) for binding in models.bindings]
        single = pairing_aggregate(outputs).final
        assert np.max(np.abs(batched[row] - single.probabilities)) <= 1e-12


def test_threaded_prediction_matches_single_thread(small_dataset) -> None:
    """验证多线程预测与单线程结果逐位一致。"""

    models = fit_models(small_dataset.train, small_dataset.config.t, small_dataset.config.m)
    single, _ = predict_split(models, small_dataset.test, ["pairing", "monolithic"], workers=1)
    threaded, _ = predict_split(models, small_dataset.test, ["pairing", "monolithic"], workers=4)

    for name in ("pairing", "monolithic"):
        assert np.array_equal(single[name], threaded[name])


def test_select_strategies() -> None:
    """验证策略去重、未知策略与空列表的处理。"""

    assert select_strategies(["pairing", "linear", "pairing"]) == ("pairing", "linear")
    with pytest.raises(UnknownStrategy):
        select_strategies(["median"])
    with pytest.raises(EmptyInput):
        select_strategies([])


def test_degenerate_recall_is_flagged() -> None:
    """验证阈值 0 下无正确归因时标记召回率退化且曲线为空。"""

    probs = np.array([[0.9, 0.1], [0.2, 0.8]])
    report = build_strategy_report("linear", probs, np.array([1, 0]), np.linspace(0.0, 1.0, 11))

    assert report.degenerate_recall
    assert report.curve == ()
    assert report.f_threshold is None
    assert report.cdf.tolist() == [0.0, 1.0]


def test_empty_test_split_raises() -> None:
    """验证测试集为空时评估抛出 EmptyInput。"""

    config = SimConfig(s=40, t=2, m=1, activity_low=0.5, activity_high=0.6, seed=1)
    dataset = generate(config)
    truncated = Dataset(config=config, incidents=dataset.train)

    with pytest.raises(EmptyInput):
        run_evaluation(truncated)


def test_summarize_seeds(small_config, report) -> None:
    """验证跨种子汇总的中位数与方向性检查项。"""

    other_dataset = generate(small_config.model_copy(update={"seed": 12}))
    other = run_evaluation(other_dataset, EVALUATION_STRATEGIES, grid_size=101)
    summary = summarize_seeds([report, other], k=2)

    assert summary.seeds == (11, 12)
    assert summary.k == 2
    assert set(summary.medians) == set(EVALUATION_STRATEGIES)
    expected = (report["pairing"].cdf_at(2) + other["pairing"].cdf_at(2)) / 2
    assert summary.medians["pairing"]["cdf_at_k"] == pytest.approx(expected)
    assert set(summary.checks) == {
        "pairing_cdf_at_k_ge_monolithic",
        "pairing_max_precision_ge_linear",
        "pairing_max_precision_ge_logarithmic",
        "pairing_max_precision_ge_holder",
        "pairing_max_precision_ge_monolithic",
    }
    assert all(isinstance(value, bool) for value in summary.checks.values())


def test_summary_checks_are_none_without_pairing(small_dataset) -> None:
    """验证缺少配对策略时方向性检查为 None，空输入抛出异常。"""

    linear_only = run_evaluation(small_dataset, ["linear"], grid_size=11)
    summary = summarize_seeds([linear_only])

    assert summary.k == 10
    assert summary.checks == {"pairing_cdf_at_k_ge_monolithic": None, "pairing_max_precision_ge_linear": None}
    with pytest.raises(EmptyInput):
        summarize_seeds([])


def test_bench_rows(small_dataset) -> None:
    """验证基准计时表的阶段、策略顺序与事件数。"""

    table = bench(small_dataset, ["pairing", "monolithic"], repeat=2)

    assert [(row.phase, row.strategy) for row in table.rows] == [
        ("train", "modular"),
        ("train", "monolithic"),
        ("predict", "pairing"),
        ("predict", "monolithic"),
        ("aggregate", "pairing"),
    ]
    assert all(row.seconds >= 0.0 for row in table.rows)
    assert table.rows[2].incidents == len(small_dataset.test)
    with pytest.raises(KeyError):
        table.get("aggregate", "monolithic")


def test_pmf_rows_of_report_are_valid(small_dataset) -> None:
    """验证批量预测的每一行都是合法 PMF。"""

    models = fit_models(small_dataset.train, small_dataset.config.t, small_dataset.config.m)
    predictions, _ = predict_split(models, small_dataset.test[:50], ["holder", "logarithmic"])

    for probs in predictions.values():
        for row in probs:
            PMF(row)
