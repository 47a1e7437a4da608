from __future__ import annotations

"""SF-Attribution 运行时基准。

说明：
- 轻量化的桌面规模基准（``s=20000, t=32, m=8``），提供相对指标而非绝对耗时；
- 覆盖：聚合耗时占预测耗时的比例、聚合耗时随测试集规模的伸缩；
- 阈值可通过环境变量 ``SF_ATTR_BENCH_*`` 调整。

文件名不匹配 ``test_*.py``，需显式运行：``pytest tests/performance/benchmarks.py -m benchmark``。
"""

import os
import time

import numpy as np
import pytest

from sf_attribution.evaluation import bench
from sf_attribution.evaluation.runner import aggregate_modules, fit_models, module_stack
from sf_attribution.simulator import SimConfig, generate


def _threshold(name: str, default: float) -> float:
    """从环境变量读取阈值，未设置或无法解析时使用默认值。

    示例：``SF_ATTR_BENCH_AGG_SHARE_MAX=0.2``、``SF_ATTR_BENCH_SCALE_MAX=3.5``。
    """

    env_name = f"SF_ATTR_BENCH_{name}"
    try:
        return float(os.getenv(env_name, str(default)))
    except ValueError:
        return default


def _best_of(action, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        started = time.perf_counter()
        action()
        best = min(best, time.perf_counter() - started)
    return best


@pytest.fixture(scope="module")
def desk_dataset():
    return generate(SimConfig(s=20_000, t=32, m=8, seed=1))


@pytest.mark.benchmark
def test_aggregation_share_of_prediction(desk_dataset) -> None:
    """配对聚合本身只占端到端预测耗时的一小部分，默认上限 10%（``SF_ATTR_BENCH_AGG_SHARE_MAX``）。"""

    table = bench(desk_dataset, ["pairing", "logarithmic"], repeat=3)

    share_max = _threshold("AGG_SHARE_MAX", 0.10)
    for name in ("pairing", "logarithmic"):
        share = table.get("aggregate", name) / table.get("predict", name)
        print(f"{name}: aggregate/predict = {share:.3f} (max={share_max})")
        assert share <= share_max


@pytest.mark.benchmark
def test_aggregation_scales_linearly(desk_dataset) -> None:
    """测试集加倍时聚合耗时约加倍，默认允许比值落在 ``[1.0, 3.0]``。"""

    models = fit_models(desk_dataset.train, desk_dataset.config.t, desk_dataset.config.m)
    stack = module_stack(models.bindings, desk_dataset.test)
    # 复制到足够的行数，使计时稳定
    base = np.concatenate([stack] * max(1, 20_000 // stack.shape[0] + 1))
    doubled = np.concatenate([base, base])

    single = _best_of(lambda: aggregate_modules("pairing", base), repeat=5)
    double = _best_of(lambda: aggregate_modules("pairing", doubled), repeat=5)
    ratio = double / max(single, 1e-9)

    low = _threshold("SCALE_MIN", 1.0)
    high = _threshold("SCALE_MAX", 3.0)
    print(f"pairing aggregation: {single * 1000:.2f}ms -> {double * 1000:.2f}ms (ratio={ratio:.2f})")
    assert low <= ratio <= high
