"""Pytest 全局配置：以仓库默认值加载配置，并提供共享的小规模数据集。"""
from __future__ import annotations

import pytest

from sf_attribution.common.config import ConfigManager
from sf_attribution.simulator import SimConfig, generate

# 忽略外部环境变量与 .env，测试只依赖默认配置
ConfigManager.load(environ={}, dotenv_path=None)


@pytest.fixture(autouse=True)
def _restore_default_settings():
    yield
    if ConfigManager.current().sources != ["defaults"]:
        ConfigManager.load(environ={}, dotenv_path=None)


@pytest.fixture(scope="session")
def small_config() -> SimConfig:
    return SimConfig(s=3000, t=6, m=4, seed=11)


@pytest.fixture(scope="session")
def small_dataset(small_config: SimConfig):
    return generate(small_config)
