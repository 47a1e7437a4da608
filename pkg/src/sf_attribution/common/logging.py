"""日志工厂。

各模块统一通过 ``LoggerFactory.create_default_logger(__name__)`` 获取日志器，结构化上下文经
``extra={...}`` 传入。输出格式由 ``settings.logging`` 决定：

* 默认文本格式：``2025-01-01 10:00:00 INFO sf_attribution.x 消息 key=value``；
* ``json_format=True`` 时每条日志输出一行 JSON。
"""
from __future__ import annotations

import json
import logging
import sys
from threading import Lock
from typing import Any

_ROOT_LOGGER = "sf_attribution"

# LogRecord 自带字段，不计入 extra
_RESERVED = frozenset(
    logging.LogRecord("", 0, "", 0, "", None, None).__dict__.keys() | {"message", "asctime"}
)


def _extras(record: logging.LogRecord) -> dict[str, Any]:
    return {key: value for key, value in record.__dict__.items() if key not in _RESERVED}


class KeyValueFormatter(logging.Formatter):
    """文本格式，extra 字段以 ``key=value`` 追加在消息后。"""

    def __init__(self) -> None:
        super().__init__(fmt="%(asctime)s %(levelname)s %(name)s %(message)s", datefmt="%Y-%m-%d %H:%M:%S")

    def format(self, record: logging.LogRecord) -> str:
        base = super().format(record)
        extras = _extras(record)
        if not extras:
            return base
        suffix = " ".join(f"{key}={value}" for key, value in sorted(extras.items()))
        return f"{base} {suffix}"


class JsonFormatter(logging.Formatter):
    """单行 JSON 格式。"""

    def format(self, record: logging.LogRecord) -> str:
        payload: dict[str, Any] = {
            "ts": self.formatTime(record, "%Y-%m-%dT%H:%M:%S"),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        payload.update(_extras(record))
        if record.exc_info:
            payload["exc_info"] = self.formatException(record.exc_info)
        return json.dumps(payload, ensure_ascii=False, default=str)


class LoggerFactory:
    """进程级日志配置与日志器创建。"""

    _lock = Lock()
    _configured = False

    @classmethod
    def configure(cls, *, level: str = "INFO", json_format: bool = False) -> None:
        """(重新)配置包级根日志器，输出到 stderr。"""

        with cls._lock:
            root = logging.getLogger(_ROOT_LOGGER)
            for handler in list(root.handlers):
                root.removeHandler(handler)
            handler = logging.StreamHandler(sys.stderr)
            handler.setFormatter(JsonFormatter() if json_format else KeyValueFormatter())
            root.addHandler(handler)
            root.setLevel(level.upper())
            root.propagate = False
            cls._configured = True

    @classmethod
    def is_configured(cls) -> bool:
        return cls._configured

    @classmethod
    def create_default_logger(cls, name: str) -> logging.Logger:
        """返回 ``name`` 对应的日志器。

        输出在 ``ConfigManager`` 建立配置快照时按 ``settings.logging`` 初始化；此前记录的日志
        交由标准库默认处理（仅 WARNING 及以上）。
        """

        if not name.startswith(_ROOT_LOGGER):
            name = f"{_ROOT_LOGGER}.{name}"
        return logging.getLogger(name)


__all__ = ["LoggerFactory", "KeyValueFormatter", "JsonFormatter"]
