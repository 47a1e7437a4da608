"""高斯类条件归因模型。

每个行为者 ``i`` 的证据由先验 ``prior_i`` 与所选特征上的独立高斯密度组成：

    log_mass_i = log prior_i + Σ_{j∈I'} log N(x_j; μ_ij, σ_ij)

对数质量经 exp-normalize 后，每个分量抬升到 ``pmf_floor`` 再重新归一，保证输出严格为正，
以便对数池使用。单特征模型即模块化归因器，全特征模型即单体基线。
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from sf_attribution.attribution.types import AttributorBinding, Incident
from sf_attribution.common.exceptions import (
    EmptyTrainingSet,
    ErrorCode,
    InputValidationError,
    InvalidIncident,
    UniverseMismatch,
)
from sf_attribution.common.logging import LoggerFactory
from sf_attribution.pmf.pmf import PMF

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

_logger = LoggerFactory.create_default_logger(__name__)


def _model_settings():
    from sf_attribution.common.config import ConfigManager

    return ConfigManager.current().settings.models


@dataclass(frozen=True, slots=True, eq=False)
class TrainingSet:
    """带标签的训练事件集合；特征矩阵与标签向量在构造时缓存。"""

    incidents: tuple[Incident, ...]
    _features: np.ndarray = field(init=False, repr=False)
    _labels: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        incidents = tuple(self.incidents)
        object.__setattr__(self, "incidents", incidents)
        if not incidents:
            object.__setattr__(self, "_features", np.empty((0, 0)))
            object.__setattr__(self, "_labels", np.empty(0, dtype=np.int64))
            return
        widths = {incident.m for incident in incidents}
        if len(widths) != 1:
            raise InvalidIncident("训练事件的特征数不一致", details={"widths": sorted(widths)})
        unlabeled = [incident.id for incident in incidents if incident.label is None]
        if unlabeled:
            raise InvalidIncident("训练事件必须带标签", details={"ids": unlabeled[:10], "count": len(unlabeled)})
        features = np.stack([incident.features for incident in incidents])
        labels = np.fromiter((incident.label for incident in incidents), dtype=np.int64, count=len(incidents))
        features.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "_features", features)
        object.__setattr__(self, "_labels", labels)

    @classmethod
    def from_incidents(cls, incidents: Iterable[Incident]) -> "TrainingSet":
        return cls(tuple(incidents))

    def __len__(self) -> int:
        return len(self.incidents)

    @property
    def m(self) -> int:
        return int(self._features.shape[1]) if self.incidents else 0

    @property
    def features(self) -> np.ndarray:
        return self._features

    @property
    def labels(self) -> np.ndarray:
        return self._labels


@dataclass(frozen=True, slots=True, eq=False)
class TrainedAttributor:
    """已训练的高斯类条件模型，训练后不可变，可跨线程共享。

    属性：
        priors：``(t,)``，Laplace 平滑后的先验。
        means / stddevs：``(t, d)``，``d = len(feature_indices)``；标准差不低于 ``sigma_floor``。
        feature_indices：模型读取的特征下标。
        t：行为者全集大小。
    """

    priors: np.ndarray
    means: np.ndarray
    stddevs: np.ndarray
    feature_indices: tuple[int, ...]
    t: int
    sigma_floor: float = 1e-6
    pmf_floor: float = 1e-12
    _log_priors: np.ndarray = field(init=False, repr=False)
    _log_norm: np.ndarray = field(init=False, repr=False)
    _index: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        priors = np.array(self.priors, dtype=np.float64)
        means = np.array(self.means, dtype=np.float64)
        stddevs = np.array(self.stddevs, dtype=np.float64)
        d = len(self.feature_indices)
        if priors.shape != (self.t,) or means.shape != (self.t, d) or stddevs.shape != (self.t, d):
            raise InputValidationError(
                ErrorCode.BAD_REQUEST,
                "模型参数形状不一致",
                details={"t": self.t, "d": d, "priors": priors.shape, "means": means.shape, "stddevs": stddevs.shape},
            )
        if np.any(priors <= 0.0) or abs(priors.sum() - 1.0) > 1e-9:
            raise InputValidationError(ErrorCode.BAD_REQUEST, "先验必须严格为正且总和为 1")
        stddevs = np.maximum(stddevs, self.sigma_floor)
        for name, array in (("priors", priors), ("means", means), ("stddevs", stddevs)):
            array.setflags(write=False)
            object.__setattr__(self, name, array)
        object.__setattr__(self, "feature_indices", tuple(int(i) for i in self.feature_indices))
        object.__setattr__(self, "_log_priors", np.log(priors))
        object.__setattr__(self, "_log_norm", -np.log(stddevs) - _LOG_SQRT_2PI)
        object.__setattr__(self, "_index", np.asarray(self.feature_indices, dtype=np.int64))

    def log_masses(self, features: np.ndarray) -> np.ndarray:
        """未归一化的对数质量：``(..., m)`` 特征 → ``(..., t)``。"""

        x = np.asarray(features, dtype=np.float64)[..., self._index]
        z = (x[..., None, :] - self.means) / self.stddevs
        return self._log_priors + (self._log_norm - 0.5 * z * z).sum(axis=-1)

    def probabilities(self, features: np.ndarray) -> np.ndarray:
        """带下限的后验概率：``(..., m)`` → ``(..., t)``，每个分量严格为正。"""

        log_mass = self.log_masses(features)
        shifted = np.exp(log_mass - log_mass.max(axis=-1, keepdims=True))
        probs = shifted / shifted.sum(axis=-1, keepdims=True)
        probs = np.maximum(probs, self.pmf_floor)
        return probs / probs.sum(axis=-1, keepdims=True)

    def predict(self, incident: Incident) -> PMF:
        if max(self.feature_indices) >= incident.m:
            raise InvalidIncident(
                "事件特征数不足",
                details={"feature_indices": list(self.feature_indices), "m": incident.m},
            )
        if incident.label is not None and incident.label >= self.t:
            raise UniverseMismatch("事件标签超出模型的行为者全集", details={"label": incident.label, "t": self.t})
        return PMF(self.probabilities(incident.features))


def fit(
    train: TrainingSet,
    feature_indices: Sequence[int],
    t: int,
    *,
    sigma_floor: float | None = None,
    pmf_floor: float | None = None,
) -> TrainedAttributor:
    """在训练集上拟合只读取 ``feature_indices`` 的高斯类条件模型。

    * 先验：``(count_i + 1) / (n + t)``；
    * 均值与标准差：各行为者样本均值与总体标准差，标准差下限为 ``sigma_floor``；
    * 训练集中没有样本的行为者：均值 0，标准差取该特征的全局标准差。

    异常：
        EmptyTrainingSet：训练集为空。
        UniverseMismatch：标签不小于 ``t``。
        InvalidIncident：特征下标超出特征数。
    """

    if len(train) == 0:
        raise EmptyTrainingSet("训练集为空，无法拟合")
    if t < 1:
        raise InputValidationError(ErrorCode.BAD_REQUEST, "行为者数量必须 >= 1", details={"t": t})
    indices = tuple(int(i) for i in feature_indices)
    if not indices or min(indices) < 0 or max(indices) >= train.m or len(set(indices)) != len(indices):
        raise InvalidIncident("特征下标非法", details={"feature_indices": list(indices), "m": train.m})
    labels = train.labels
    if labels.max() >= t:
        raise UniverseMismatch("训练标签超出行为者全集", details={"max_label": int(labels.max()), "t": t})

    settings = None
    if sigma_floor is None or pmf_floor is None:
        settings = _model_settings()
    sigma_floor = settings.sigma_floor if sigma_floor is None else sigma_floor
    pmf_floor = settings.pmf_floor if pmf_floor is None else pmf_floor

    x = train.features[:, indices]
    n, d = x.shape
    counts = np.bincount(labels, minlength=t)
    priors = (counts + 1.0) / (n + t)

    sums = np.zeros((t, d))
    np.add.at(sums, labels, x)
    seen = counts > 0
    means = np.zeros((t, d))
    means[seen] = sums[seen] / counts[seen, None]

    deviations = x - means[labels]
    squares = np.zeros((t, d))
    np.add.at(squares, labels, deviations * deviations)
    stddevs = np.zeros((t, d))
    stddevs[seen] = np.sqrt(squares[seen] / counts[seen, None])
    if not np.all(seen):
        stddevs[~seen] = x.std(axis=0)
    stddevs = np.maximum(stddevs, sigma_floor)

    return TrainedAttributor(
        priors=priors,
        means=means,
        stddevs=stddevs,
        feature_indices=indices,
        t=t,
        sigma_floor=sigma_floor,
        pmf_floor=pmf_floor,
    )


def predict(model: TrainedAttributor, incident: Incident) -> PMF:
    """模型对单个事件的 PMF，参见 :meth:`TrainedAttributor.predict`。"""

    return model.predict(incident)


def predict_matrix(model: TrainedAttributor, features: np.ndarray) -> np.ndarray:
    """批量预测：``(n, m)`` 特征矩阵 → ``(n, t)`` 概率矩阵，公式与 :func:`predict` 相同。"""

    return model.probabilities(features)


def fit_baseline(train: TrainingSet, t: int, **floors: float) -> TrainedAttributor:
    """单体基线：在全部 ``m`` 个特征上拟合同一模型。"""

    if len(train) == 0:
        raise EmptyTrainingSet("训练集为空，无法拟合")
    return fit(train, range(train.m), t, **floors)


def make_modular_bindings(train: TrainingSet, m: int, t: int, **floors: float) -> list[AttributorBinding]:
    """为每个特征各训练一个具体归因器，名称为 ``f<j>``。"""

    if m < 1:
        raise InputValidationError(ErrorCode.BAD_REQUEST, "特征数必须 >= 1", details={"m": m})
    if len(train) == 0:
        raise EmptyTrainingSet("训练集为空，无法拟合")
    if train.m != m:
        raise InputValidationError(ErrorCode.BAD_REQUEST, "特征数与训练集不一致", details={"m": m, "train_m": train.m})
    bindings = [AttributorBinding(f"f{j}", (j,), fit(train, (j,), t, **floors)) for j in range(m)]
    _logger.debug("模块化归因器训练完成", extra={"bindings": len(bindings), "n": len(train), "t": t})
    return bindings


__all__ = [
    "TrainingSet",
    "TrainedAttributor",
    "fit",
    "predict",
    "predict_matrix",
    "fit_baseline",
    "make_modular_bindings",
]
