"""具体归因模型（高斯类条件模型）与持久化的公共导出。"""
from sf_attribution.models.gaussian import (
    TrainedAttributor,
    TrainingSet,
    fit,
    fit_baseline,
    make_modular_bindings,
    predict,
    predict_matrix,
)
from sf_attribution.models.persistence import load_bindings, load_model, save_bindings, save_model

__all__ = [
    "TrainingSet",
    "TrainedAttributor",
    "fit",
    "predict",
    "predict_matrix",
    "fit_baseline",
    "make_modular_bindings",
    "save_model",
    "load_model",
    "save_bindings",
    "load_bindings",
]
