"""模块化威胁行为者归因：意见池、配对聚合器、合成数据集与评估工具。"""
from sf_attribution.common.config import ConfigManager, Settings
from sf_attribution.common.exceptions import AttributionError, ErrorCode
from sf_attribution.pmf import PMF, PoolWeights, holder_pool, linear_pool, log_pool, normalize
from sf_attribution.attribution import (
    AttributionTrace,
    Attributor,
    AttributorBinding,
    CompositeAttributor,
    Incident,
    aggregate,
    attribute,
    explain,
    pair_attributors,
    pairing_aggregate,
)
from sf_attribution.models import TrainedAttributor, TrainingSet, fit, fit_baseline, predict
from sf_attribution.simulator import Dataset, SimConfig, generate, interpretability_fixture
from sf_attribution.evaluation import (
    EvaluationReport,
    k_accuracy_cdf,
    optimal_f_measure,
    pr_curve,
    rank_of_true,
    run_evaluation,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigManager",
    "Settings",
    "AttributionError",
    "ErrorCode",
    "PMF",
    "PoolWeights",
    "normalize",
    "linear_pool",
    "log_pool",
    "holder_pool",
    "Incident",
    "Attributor",
    "AttributorBinding",
    "AttributionTrace",
    "CompositeAttributor",
    "attribute",
    "pair_attributors",
    "pairing_aggregate",
    "aggregate",
    "explain",
    "TrainingSet",
    "TrainedAttributor",
    "fit",
    "predict",
    "fit_baseline",
    "SimConfig",
    "Dataset",
    "generate",
    "interpretability_fixture",
    "EvaluationReport",
    "rank_of_true",
    "k_accuracy_cdf",
    "pr_curve",
    "optimal_f_measure",
    "run_evaluation",
]
