from __future__ import annotations

"""事件发射、训练/测试划分、虚假旗帜注入与解释夹具。"""

import numpy as np
import pytest

from sf_attribution.common.exceptions import NoTrainingIncidents, UnknownIncidentId
from sf_attribution.simulator import (
    SimConfig,
    expected_incident_count,
    generate,
    incident_count_stddev,
    interpretability_fixture,
    is_train_step,
)
from sf_attribution.simulator.dataset_io import iter_lines


def test_is_train_step_uses_half_horizon() -> None:
    """验证前一半时间步属于训练集。"""

    assert [is_train_step(step, 5) for step in range(5)] == [True, True, True, False, False]
    assert [is_train_step(step, 4) for step in range(4)] == [True, True, False, False]


def test_generate_is_deterministic(small_config: SimConfig, small_dataset) -> None:
    """验证相同配置两次生成的数据集逐行一致。"""

    again = generate(small_config)

    assert list(iter_lines(again)) == list(iter_lines(small_dataset))


def test_different_seeds_differ(small_config: SimConfig, small_dataset) -> None:
    """验证不同种子生成不同的数据集。"""

    other = generate(small_config.model_copy(update={"seed": small_config.seed + 1}))

    assert list(iter_lines(other)) != list(iter_lines(small_dataset))


def test_split_and_labels(small_config: SimConfig, small_dataset) -> None:
    """验证划分、编号连续、标签在活动窗口内以及训练集无虚假旗帜。"""

    profiles = small_dataset.profiles

    assert small_dataset.train and small_dataset.test
    assert len(small_dataset.train) + len(small_dataset.test) == len(small_dataset.incidents)
    assert [incident.id for incident in small_dataset.incidents] == list(range(len(small_dataset.incidents)))
    for incident in small_dataset.incidents:
        assert incident.m == small_config.m
        assert 0 <= incident.label < small_config.t
        assert profiles.start[incident.label] <= incident.time_step <= profiles.end[incident.label]
    for incident in small_dataset.train:
        assert 2 * incident.time_step < small_config.s
        assert not any(incident.false_flag_mask)
    assert all(2 * incident.time_step >= small_config.s for incident in small_dataset.test)


def test_meta_counts(small_dataset) -> None:
    """验证 meta 中的种子、计数与虚假旗帜数。"""

    meta = small_dataset.meta

    assert meta["seed"] == 11
    assert meta["counts"] == {
        "train": len(small_dataset.train),
        "test": len(small_dataset.test),
        "total": len(small_dataset.incidents),
    }
    assert meta["false_flags"] == sum(sum(incident.false_flag_mask) for incident in small_dataset.test)


def test_find_and_split_of(small_dataset) -> None:
    """验证按编号查找事件与判断所属划分。"""

    first_test = small_dataset.test[0]

    assert small_dataset.find(first_test.id) is first_test
    assert small_dataset.split_of(first_test) == "test"
    assert small_dataset.split_of(small_dataset.train[0]) == "train"
    with pytest.raises(UnknownIncidentId):
        small_dataset.find(-1)


def test_injection_log_matches_mask() -> None:
    """验证注入日志与掩码一致，供体来自训练集中的其他行为者。"""

    config = SimConfig(s=3000, t=6, m=4, seed=23)
    dataset = generate(config, record_injections=True)

    flagged_cells = sum(sum(incident.false_flag_mask) for incident in dataset.test)
    assert len(dataset.injections) == flagged_cells > 0
    for record in dataset.injections:
        incident = dataset.find(record.incident_id)
        donor = dataset.find(record.donor_incident_id)
        assert dataset.split_of(incident) == "test"
        assert dataset.split_of(donor) == "train"
        assert incident.false_flag_mask[record.feature]
        assert donor.label == record.donor_actor != incident.label
        assert incident.features[record.feature] == record.donor_value == donor.features[record.feature]
        assert record.original != record.donor_value


def test_unflagged_features_are_untouched() -> None:
    """验证未被标记的特征与不注入时的取值相同。"""

    config = SimConfig(s=3000, t=6, m=4, seed=23)
    clean = generate(config.model_copy(update={"false_flag_prob": 0.0}))
    flagged = generate(config)

    assert len(clean.incidents) == len(flagged.incidents)
    for before, after in zip(clean.test, flagged.test):
        keep = ~np.asarray(after.false_flag_mask)
        assert np.array_equal(before.features[keep], after.features[keep])
        assert not np.any(before.features[~keep] == after.features[~keep])


def test_false_flag_fraction_on_test_split() -> None:
    """验证测试集特征的虚假旗帜比例为 0.40 ± 0.01。"""

    dataset = generate(SimConfig(s=20000, t=16, m=8, seed=3))
    masks = np.asarray([incident.false_flag_mask for incident in dataset.test])

    assert masks.size > 10_000
    assert abs(masks.mean() - 0.4) <= 0.01


def test_incident_count_matches_expectation_without_drift() -> None:
    """验证关闭漂移时事件总数在解析期望的 4σ 以内。"""

    config = SimConfig(s=4000, t=20, m=2, seed=5, drift_enabled=False)
    dataset = generate(config)
    expected = expected_incident_count(dataset.profiles, config.s)
    sigma = incident_count_stddev(dataset.profiles, config.s)

    assert abs(len(dataset.incidents) - expected) <= 4 * sigma


def test_empty_train_split_raises() -> None:
    """验证训练集为空时生成抛出 NoTrainingIncidents。"""

    config = SimConfig(s=2, t=2, m=1, activity_low=0.0, activity_high=1e-12, seed=0)

    with pytest.raises(NoTrainingIncidents):
        generate(config)


def test_interpretability_fixture() -> None:
    """验证解释夹具为三行为者、三特征，且可复现。"""

    dataset = interpretability_fixture(3)
    again = interpretability_fixture(3)

    assert (dataset.config.t, dataset.config.m, dataset.config.s) == (3, 3, 2000)
    assert {incident.label for incident in dataset.train} == {0, 1, 2}
    assert all(incident.m == 3 for incident in dataset.incidents)
    assert list(iter_lines(dataset)) == list(iter_lines(again))


@pytest.mark.slow
def test_false_flag_fraction_at_default_scale() -> None:
    """默认规模下测试集特征的虚假旗帜比例为 0.40 ± 0.01。"""

    dataset = generate(SimConfig(), trace_actors=0)
    masks = np.asarray([incident.false_flag_mask for incident in dataset.test])

    assert abs(masks.mean() - 0.4) <= 0.01


def test_activity_trace_follows_first_actors(small_config: SimConfig, small_dataset) -> None:
    """活跃度轨迹逐步记录前四个行为者，起点等于初始画像且始终在合法区间内。"""

    trace = small_dataset.activity_trace

    assert trace.shape == (small_config.s, 4)
    assert np.array_equal(trace[0], small_dataset.profiles.activity[:4])
    assert np.all((trace >= 0.0) & (trace <= small_config.activity_high))
    assert not np.array_equal(trace[0], trace[-1])


def test_activity_trace_is_flat_without_drift_and_optional() -> None:
    """关闭漂移时轨迹保持常数；``trace_actors=0`` 时不记录。"""

    config = SimConfig(s=500, t=3, m=2, seed=8, drift_enabled=False)
    traced = generate(config, trace_actors=10)
    untraced = generate(config, trace_actors=0)

    assert traced.activity_trace.shape == (500, 3)
    assert np.all(traced.activity_trace == traced.profiles.activity)
    assert untraced.activity_trace is None
    assert list(iter_lines(traced)) == list(iter_lines(untraced))


def test_actor_counts_partition_incidents(small_config: SimConfig, small_dataset) -> None:
    """每个行为者的事件数按训练/测试划分相加等于总数，并出现在 meta 中。"""

    total = small_dataset.actor_counts()
    labels = [incident.label for incident in small_dataset.incidents]

    assert total.shape == (small_config.t,)
    assert total.tolist() == [labels.count(actor) for actor in range(small_config.t)]
    assert np.array_equal(small_dataset.actor_counts("train") + small_dataset.actor_counts("test"), total)
    assert small_dataset.meta["actor_counts"] == total.tolist()
    assert sum(small_dataset.meta["actor_counts"]) == small_dataset.meta["counts"]["total"]
