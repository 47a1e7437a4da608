from __future__ import annotations

"""行为者画像采样与漂移。"""

import numpy as np
import pytest
from pydantic import ValidationError

from sf_attribution.simulator import SimConfig, generate_profiles, step_drift
from sf_attribution.simulator.profiles import drift_in_place, expected_incident_count, incident_count_stddev


def test_sim_config_defaults_and_validation() -> None:
    """验证模拟配置的默认值与非法取值校验。"""

    config = SimConfig()

    assert (config.s, config.t, config.m) == (100_000, 128, 8)
    assert config.false_flag_prob == 0.4
    assert config.train_cutoff == 50_000
    with pytest.raises(ValidationError):
        SimConfig(activity_low=0.2, activity_high=0.1)
    with pytest.raises(ValidationError):
        SimConfig(t=1)
    with pytest.raises(ValidationError):
        SimConfig(false_flag_prob=1.5)


def test_profiles_respect_sampling_supports() -> None:
    """验证画像各字段落在采样区间内。"""

    config = SimConfig(s=1000, t=200, m=3, seed=1)
    profiles = generate_profiles(config, np.random.default_rng(config.seed))

    assert len(profiles) == 200
    assert profiles.m == 3
    assert np.all((profiles.activity >= config.activity_low) & (profiles.activity <= config.activity_high))
    assert np.all(profiles.start < 0.4 * config.s)
    assert np.all(profiles.end >= 0.6 * config.s)
    assert np.all(profiles.start < profiles.end)
    assert np.all((profiles.means >= -1.0) & (profiles.means <= 1.0))
    assert np.all((profiles.stddevs >= 0.0) & (profiles.stddevs <= 1.0 / config.t))
    assert all(profile.is_active(int(profile.start)) for profile in profiles)


def test_profiles_are_deterministic() -> None:
    """验证相同种子采样的画像一致。"""

    config = SimConfig(s=500, t=10, m=2, seed=42)
    first = generate_profiles(config, np.random.default_rng(42))
    second = generate_profiles(config, np.random.default_rng(42))

    for name in ("activity", "start", "end", "means", "stddevs"):
        assert np.array_equal(getattr(first, name), getattr(second, name))


def test_tiny_horizon_keeps_start_before_end() -> None:
    """验证极小时间范围下结束步仍晚于开始步。"""

    config = SimConfig(s=2, t=50, m=1, seed=3)
    profiles = generate_profiles(config, np.random.default_rng(3))

    assert np.all(profiles.start == 0)
    assert np.all(profiles.end == 1)


def test_step_drift_disabled_returns_same_profiles() -> None:
    """验证关闭漂移时返回原画像。"""

    config = SimConfig(s=100, t=4, m=2, drift_enabled=False)
    profiles = generate_profiles(config, np.random.default_rng(0))

    assert step_drift(profiles, config, np.random.default_rng(1)) is profiles


def test_step_drift_leaves_input_untouched_and_clamps() -> None:
    """验证漂移不修改输入画像，且标准差与活跃度被截断到合法区间。"""

    config = SimConfig(s=100, t=30, m=4, drift_sigma=0.05, seed=9)
    rng = np.random.default_rng(9)
    original = generate_profiles(config, rng)
    snapshot = original.copy()

    current = original
    for _ in range(500):
        current = step_drift(current, config, rng)
        assert np.all(current.stddevs >= 0.0)
        assert np.all((current.activity >= 0.0) & (current.activity <= config.activity_high))

    assert np.array_equal(original.means, snapshot.means)
    assert np.array_equal(original.activity, snapshot.activity)
    assert np.array_equal(current.start, snapshot.start)


def test_mean_increments_follow_drift_sigma() -> None:
    """验证均值每步增量的标准差约为 drift_sigma。"""

    config = SimConfig(s=100, t=2, m=1, drift_sigma=0.01, seed=17)
    rng = np.random.default_rng(17)
    profiles = generate_profiles(config, rng)

    trajectory = [float(profiles.means[0, 0])]
    for _ in range(1000):
        drift_in_place(profiles, config, rng)
        trajectory.append(float(profiles.means[0, 0]))

    increments = np.diff(trajectory)
    assert abs(increments.std() - 0.01) <= 0.2 * 0.01


def test_expected_incident_count_formula() -> None:
    """验证事件数期望的解析公式。"""

    config = SimConfig(s=10, t=2, m=1, seed=0)
    profiles = generate_profiles(config, np.random.default_rng(0))
    window = np.minimum(profiles.end, 9) - profiles.start + 1

    assert expected_incident_count(profiles, 10) == pytest.approx(float(np.sum(profiles.activity * window)))
    assert incident_count_stddev(profiles, 10) > 0.0


def test_drift_in_place_mutates_arrays_of_frozen_profiles() -> None:
    """冻结的画像对象上原地漂移只改写数组内容，不重新绑定字段。"""

    config = SimConfig(s=100, t=5, m=3, drift_sigma=0.05, seed=4)
    profiles = generate_profiles(config, np.random.default_rng(4))
    arrays = (profiles.means, profiles.stddevs, profiles.activity)
    before = profiles.copy()

    drift_in_place(profiles, config, np.random.default_rng(5))

    assert all(a is b for a, b in zip((profiles.means, profiles.stddevs, profiles.activity), arrays))
    assert not np.array_equal(profiles.means, before.means)
    assert not np.array_equal(profiles.activity, before.activity)
    assert np.all(profiles.stddevs >= 0.0)
    assert np.array_equal(profiles.start, before.start)
