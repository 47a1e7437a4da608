"""平台统一异常定义。

所有领域异常都继承 :class:`AttributionError`，携带 ``ErrorCode``、可读消息与 ``details`` 字典，
与平台其它组件 ``ExternalServiceError(ErrorCode.X, "消息", details={...})`` 的约定保持一致。

异常按类别划分，类别决定 CLI 的退出码：

* :class:`InputValidationError`：输入/配置不合法，退出码 ``1``；
* :class:`StorageError`：文件读写失败，退出码 ``2``；
* :class:`InvariantViolation`：内部不变量被破坏，退出码 ``3``。
"""
from __future__ import annotations

from enum import Enum
from typing import Any


class ErrorCode(str, Enum):
    """错误码枚举，取值即对外暴露的字符串。"""

    INVALID_PMF = "INVALID_PMF"
    INVALID_WEIGHTS = "INVALID_WEIGHTS"
    ALL_ZERO_MASS = "ALL_ZERO_MASS"
    UNIVERSE_MISMATCH = "UNIVERSE_MISMATCH"
    TOO_FEW_ATTRIBUTORS = "TOO_FEW_ATTRIBUTORS"
    UNKNOWN_STRATEGY = "UNKNOWN_STRATEGY"
    INVALID_INCIDENT = "INVALID_INCIDENT"
    UNTRAINED_MODEL = "UNTRAINED_MODEL"
    EMPTY_TRAINING_SET = "EMPTY_TRAINING_SET"
    NO_TRAINING_INCIDENTS = "NO_TRAINING_INCIDENTS"
    FIXTURE_UNUSABLE = "FIXTURE_UNUSABLE"
    EMPTY_INPUT = "EMPTY_INPUT"
    DEGENERATE_RECALL_BASE = "DEGENERATE_RECALL_BASE"
    UNKNOWN_INCIDENT_ID = "UNKNOWN_INCIDENT_ID"
    CONFIG_INVALID = "CONFIG_INVALID"
    BAD_REQUEST = "BAD_REQUEST"
    DATASET_FORMAT = "DATASET_FORMAT"
    IO_ERROR = "IO_ERROR"
    INVARIANT_VIOLATION = "INVARIANT_VIOLATION"


class AttributionError(Exception):
    """领域异常基类。

    参数：
        code：错误码，例如 ``ErrorCode.ALL_ZERO_MASS``。
        message：面向人的描述。
        details：可选的结构化上下文，例如 ``{"actor_universe": 3}``。
    """

    exit_code: int = 3

    def __init__(self, code: ErrorCode, message: str, *, details: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.code = code
        self.message = message
        self.details = details or {}

    def to_dict(self) -> dict[str, Any]:
        """序列化为日志/CLI 输出使用的字典。"""

        return {"code": self.code.value, "message": self.message, "details": self.details}

    def __str__(self) -> str:
        if not self.details:
            return f"[{self.code.value}] {self.message}"
        return f"[{self.code.value}] {self.message} {self.details}"


class InputValidationError(AttributionError):
    """输入或前置条件不满足。"""

    exit_code = 1


class StorageError(AttributionError):
    """数据集、模型或报告文件读写失败。"""

    exit_code = 2

    def __init__(self, message: str, *, details: dict[str, Any] | None = None) -> None:
        super().__init__(ErrorCode.IO_ERROR, message, details=details)


class InvariantViolation(AttributionError):
    """计算结果违反了应当恒成立的性质。"""

    exit_code = 3

    def __init__(self, message: str, *, details: dict[str, Any] | None = None) -> None:
        super().__init__(ErrorCode.INVARIANT_VIOLATION, message, details=details)


class _FixedCodeError(InputValidationError):
    """错误码固定的校验异常，子类只需声明 ``_code``。"""

    _code: ErrorCode = ErrorCode.BAD_REQUEST

    def __init__(self, message: str, *, details: dict[str, Any] | None = None) -> None:
        super().__init__(self._code, message, details=details)


class InvalidPMF(_FixedCodeError):
    _code = ErrorCode.INVALID_PMF


class InvalidWeights(_FixedCodeError):
    _code = ErrorCode.INVALID_WEIGHTS


class AllZeroMass(_FixedCodeError):
    """合并后所有参与者的质量均为 0，即输入之间完全矛盾。"""

    _code = ErrorCode.ALL_ZERO_MASS


class UniverseMismatch(_FixedCodeError):
    _code = ErrorCode.UNIVERSE_MISMATCH


class TooFewAttributors(_FixedCodeError):
    _code = ErrorCode.TOO_FEW_ATTRIBUTORS


class UnknownStrategy(_FixedCodeError):
    _code = ErrorCode.UNKNOWN_STRATEGY


class InvalidIncident(_FixedCodeError):
    _code = ErrorCode.INVALID_INCIDENT


class UntrainedModel(_FixedCodeError):
    _code = ErrorCode.UNTRAINED_MODEL


class EmptyTrainingSet(_FixedCodeError):
    _code = ErrorCode.EMPTY_TRAINING_SET


class NoTrainingIncidents(_FixedCodeError):
    _code = ErrorCode.NO_TRAINING_INCIDENTS


class FixtureUnusable(_FixedCodeError):
    _code = ErrorCode.FIXTURE_UNUSABLE


class EmptyInput(_FixedCodeError):
    _code = ErrorCode.EMPTY_INPUT


class DegenerateRecallBase(_FixedCodeError):
    """θ=0 时没有任何事件被正确归因，召回率分母为 0。"""

    _code = ErrorCode.DEGENERATE_RECALL_BASE


class UnknownIncidentId(_FixedCodeError):
    _code = ErrorCode.UNKNOWN_INCIDENT_ID


class ConfigValidationError(_FixedCodeError):
    _code = ErrorCode.CONFIG_INVALID


class DatasetFormatError(_FixedCodeError):
    _code = ErrorCode.DATASET_FORMAT


__all__ = [
    "ErrorCode",
    "AttributionError",
    "InputValidationError",
    "StorageError",
    "InvariantViolation",
    "InvalidPMF",
    "InvalidWeights",
    "AllZeroMass",
    "UniverseMismatch",
    "TooFewAttributors",
    "UnknownStrategy",
    "InvalidIncident",
    "UntrainedModel",
    "EmptyTrainingSet",
    "NoTrainingIncidents",
    "FixtureUnusable",
    "EmptyInput",
    "DegenerateRecallBase",
    "UnknownIncidentId",
    "ConfigValidationError",
    "DatasetFormatError",
]
