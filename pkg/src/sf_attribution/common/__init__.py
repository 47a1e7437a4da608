"""平台公共能力：异常与日志。

配置位于 :mod:`sf_attribution.common.config`，需显式导入；它依赖模拟器参数模型，
在此处预先导入会形成循环依赖。
"""
from sf_attribution.common.exceptions import AttributionError, ErrorCode
from sf_attribution.common.logging import LoggerFactory

__all__ = ["AttributionError", "ErrorCode", "LoggerFactory"]
