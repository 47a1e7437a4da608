"""归因领域通用工具方法。"""
from __future__ import annotations

import numpy as np


def stable_argmax(matrix: np.ndarray) -> np.ndarray:
    """按最后一维取最大值下标；并列时取编号最小者（``np.argmax`` 的首个命中语义）。"""

    return np.argmax(matrix, axis=-1)


def derive_seed(seed: int, *keys: int) -> int:
    """由根种子与若干整数键派生一个确定性的子种子。

    例如 ``derive_seed(7, 3)`` 在任何平台上都返回同一个值，用于夹具重采样与多种子实验。
    """

    state = np.random.SeedSequence([seed, *keys]).generate_state(1, dtype=np.uint32)
    return int(state[0])


def threshold_grid(size: int) -> np.ndarray:
    """``[0, 1]`` 上 ``size`` 个等间距阈值。"""

    return np.linspace(0.0, 1.0, size)


__all__ = ["stable_argmax", "derive_seed", "threshold_grid"]
