"""模型持久化：版本化的 JSON 文档。

单个模型文档::

    {"format": 1, "t": 2, "feature_indices": [0],
     "priors": [0.5, 0.5],
     "features": [{"means": [-1.0, 1.0], "stddevs": [0.5, 0.5]}],
     "floors": {"sigma_floor": 1e-06, "pmf_floor": 1e-12}}

``features`` 按 ``feature_indices`` 顺序排列，每项给出全部行为者的均值与标准差。
一组绑定（模块化归因器 + 可选的单体基线）保存为 ``{"format": 1, "bindings": [...], "baseline": ...}``。
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from sf_attribution.attribution.types import AttributorBinding
from sf_attribution.common.exceptions import ErrorCode, InputValidationError, StorageError
from sf_attribution.models.gaussian import TrainedAttributor

FORMAT_VERSION = 1


class FeatureParameters(BaseModel):
    model_config = ConfigDict(extra="forbid")

    means: list[float]
    stddevs: list[float]


class Floors(BaseModel):
    model_config = ConfigDict(extra="forbid")

    sigma_floor: float = Field(gt=0.0)
    pmf_floor: float = Field(gt=0.0)


class ModelDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    format: Literal[1] = FORMAT_VERSION
    t: int = Field(ge=1)
    feature_indices: list[int] = Field(min_length=1)
    priors: list[float]
    features: list[FeatureParameters]
    floors: Floors

    @classmethod
    def from_model(cls, model: TrainedAttributor) -> "ModelDocument":
        return cls(
            t=model.t,
            feature_indices=list(model.feature_indices),
            priors=model.priors.tolist(),
            features=[
                FeatureParameters(means=model.means[:, j].tolist(), stddevs=model.stddevs[:, j].tolist())
                for j in range(len(model.feature_indices))
            ],
            floors=Floors(sigma_floor=model.sigma_floor, pmf_floor=model.pmf_floor),
        )

    def to_model(self) -> TrainedAttributor:
        if len(self.features) != len(self.feature_indices):
            raise InputValidationError(
                ErrorCode.BAD_REQUEST,
                "模型文档的特征参数数量与特征下标不一致",
                details={"features": len(self.features), "feature_indices": len(self.feature_indices)},
            )
        means = np.column_stack([np.asarray(f.means) for f in self.features])
        stddevs = np.column_stack([np.asarray(f.stddevs) for f in self.features])
        return TrainedAttributor(
            priors=np.asarray(self.priors),
            means=means,
            stddevs=stddevs,
            feature_indices=tuple(self.feature_indices),
            t=self.t,
            sigma_floor=self.floors.sigma_floor,
            pmf_floor=self.floors.pmf_floor,
        )


class BindingDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    model: ModelDocument


class BindingSetDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    format: Literal[1] = FORMAT_VERSION
    bindings: list[BindingDocument]
    baseline: ModelDocument | None = None


def _write(path: Path, payload: BaseModel) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload.model_dump(mode="json"), ensure_ascii=False), encoding="utf-8")
    except OSError as exc:
        raise StorageError("模型文件写入失败", details={"path": str(path), "error": str(exc)}) from exc


def _read(path: Path) -> dict:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise StorageError("模型文件不存在", details={"path": str(path)}) from exc
    except OSError as exc:
        raise StorageError("模型文件读取失败", details={"path": str(path), "error": str(exc)}) from exc
    except json.JSONDecodeError as exc:
        raise InputValidationError(
            ErrorCode.BAD_REQUEST, "模型文件不是合法 JSON", details={"path": str(path), "error": str(exc)}
        ) from exc


def _validate(document_type: type[BaseModel], data: dict, path: Path):
    try:
        return document_type.model_validate(data)
    except ValidationError as exc:
        raise InputValidationError(
            ErrorCode.BAD_REQUEST,
            "模型文档校验失败",
            details={"path": str(path), "errors": exc.errors(include_url=False)},
        ) from exc


def save_model(model: TrainedAttributor, path: str | Path) -> Path:
    target = Path(path)
    _write(target, ModelDocument.from_model(model))
    return target


def load_model(path: str | Path) -> TrainedAttributor:
    source = Path(path)
    return _validate(ModelDocument, _read(source), source).to_model()


def save_bindings(
    bindings: Sequence[AttributorBinding],
    path: str | Path,
    *,
    baseline: TrainedAttributor | None = None,
) -> Path:
    """保存一组已训练的归因器绑定（以及可选的单体基线）。"""

    documents = []
    for binding in bindings:
        if binding.model is None or not isinstance(binding.model, TrainedAttributor):
            raise InputValidationError(
                ErrorCode.UNTRAINED_MODEL, "只能保存已训练的高斯归因器", details={"name": binding.name}
            )
        documents.append(BindingDocument(name=binding.name, model=ModelDocument.from_model(binding.model)))
    payload = BindingSetDocument(
        bindings=documents,
        baseline=ModelDocument.from_model(baseline) if baseline is not None else None,
    )
    target = Path(path)
    _write(target, payload)
    return target


def load_bindings(path: str | Path) -> tuple[list[AttributorBinding], TrainedAttributor | None]:
    """读取 :func:`save_bindings` 写出的文件，返回 ``(bindings, baseline)``。"""

    source = Path(path)
    document: BindingSetDocument = _validate(BindingSetDocument, _read(source), source)
    bindings = []
    for item in document.bindings:
        model = item.model.to_model()
        bindings.append(AttributorBinding(item.name, model.feature_indices, model))
    baseline = document.baseline.to_model() if document.baseline is not None else None
    return bindings, baseline


__all__ = [
    "FORMAT_VERSION",
    "ModelDocument",
    "BindingSetDocument",
    "save_model",
    "load_model",
    "save_bindings",
    "load_bindings",
]
