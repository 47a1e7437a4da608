"""PMF 值类型与意见池的公共导出。"""
from sf_attribution.pmf.pmf import PMF, PoolWeights, linf, normalize
from sf_attribution.pmf.pools import (
    holder_pool,
    holder_pool_stack,
    linear_pool,
    linear_pool_stack,
    log_pool,
    log_pool_stack,
)

__all__ = [
    "PMF",
    "PoolWeights",
    "normalize",
    "linf",
    "linear_pool",
    "log_pool",
    "holder_pool",
    "linear_pool_stack",
    "log_pool_stack",
    "holder_pool_stack",
]
