"""评估：k-rank 累计分布、PR 曲线与最优 F 值、运行时基准。"""
from sf_attribution.evaluation.bench import bench
from sf_attribution.evaluation.metrics import (
    PRPoint,
    k_accuracy_cdf,
    max_precision,
    optimal_f_measure,
    pr_curve,
    pr_curve_arrays,
    rank_of_true,
    ranks_of_true,
)
from sf_attribution.evaluation.report import (
    EvaluationReport,
    SeedSummary,
    StrategyReport,
    TimingRow,
    TimingTable,
    build_strategy_report,
    summarize_seeds,
)
from sf_attribution.evaluation.runner import (
    EVALUATION_STRATEGIES,
    FittedModels,
    fit_models,
    predict_split,
    run_evaluation,
)

__all__ = [
    "PRPoint",
    "rank_of_true",
    "ranks_of_true",
    "k_accuracy_cdf",
    "pr_curve",
    "pr_curve_arrays",
    "optimal_f_measure",
    "max_precision",
    "TimingRow",
    "TimingTable",
    "StrategyReport",
    "EvaluationReport",
    "SeedSummary",
    "build_strategy_report",
    "summarize_seeds",
    "FittedModels",
    "fit_models",
    "predict_split",
    "run_evaluation",
    "EVALUATION_STRATEGIES",
    "bench",
]
