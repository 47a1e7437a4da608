from __future__ import annotations

"""PMF 值类型、归一化与权重的测试。"""

import numpy as np
import pytest

from sf_attribution.common.exceptions import AllZeroMass, InvalidPMF, InvalidWeights
from sf_attribution.pmf import PMF, PoolWeights, linf, normalize


def test_pmf_accepts_explicit_zeros_and_is_read_only() -> None:
    """验证 PMF 允许显式 0 且底层数组只读。"""

    pmf = PMF.from_sequence([0.0, 0.25, 0.75])

    assert pmf.actor_universe_size == 3
    assert pmf.as_dict() == {0: 0.0, 1: 0.25, 2: 0.75}
    with pytest.raises(ValueError):
        pmf.probabilities[0] = 1.0


def test_pmf_copies_its_input() -> None:
    """验证 PMF 复制输入数组，外部修改不影响实例。"""

    raw = np.array([0.5, 0.5])
    pmf = PMF(raw)
    raw[0] = 0.9

    assert pmf[0] == 0.5


@pytest.mark.parametrize(
    "values",
    [
        [0.6, 0.6],
        [1.2, -0.2],
        [float("nan"), 1.0],
        [],
        [[0.5, 0.5]],
    ],
)
def test_pmf_rejects_invalid_vectors(values) -> None:
    """验证非法向量被 PMF 拒绝。"""

    with pytest.raises(InvalidPMF):
        PMF(np.asarray(values, dtype=float))


def test_pmf_sum_tolerance_is_1e9() -> None:
    """验证 PMF 求和容差为 1e-9。"""

    PMF(np.array([0.5, 0.5 + 5e-10]))
    with pytest.raises(InvalidPMF):
        PMF(np.array([0.5, 0.5 + 1e-8]))


def test_argmax_and_top_break_ties_by_actor_id() -> None:
    """验证 argmax 与 top 在平局时按行为者编号升序。"""

    pmf = PMF.from_sequence([0.4, 0.4, 0.2])

    assert pmf.argmax() == 0
    assert pmf.top(2) == [(0, 0.4), (1, 0.4)]


def test_json_round_trip_uses_plain_array() -> None:
    """验证 PMF 的 JSON 形式是普通数组。"""

    pmf = PMF.from_sequence([0.25, 0.75])

    assert pmf.to_json() == "[0.25, 0.75]"
    assert PMF.from_json(pmf.to_json()).isclose(pmf, atol=0.0)


def test_uniform() -> None:
    """验证均匀分布的构造与非法大小。"""

    pmf = PMF.uniform(4)

    assert pmf.to_list() == [0.25, 0.25, 0.25, 0.25]
    with pytest.raises(InvalidPMF):
        PMF.uniform(0)


@pytest.mark.parametrize(
    ("raw", "expected"),
    [
        ([2.0, 2.0], [0.5, 0.5]),
        ([0.16, 0.16], [0.5, 0.5]),
        ([1.0, 3.0], [0.25, 0.75]),
    ],
)
def test_normalize(raw, expected) -> None:
    """验证归一化非负向量。"""

    result = normalize(raw)

    assert np.allclose(result.probabilities, expected, atol=1e-12)
    assert abs(result.probabilities.sum() - 1.0) <= 1e-9


def test_normalize_all_zero_mass() -> None:
    """验证全零向量归一化抛出 AllZeroMass。"""

    with pytest.raises(AllZeroMass):
        normalize([0.0, 0.0])


def test_normalize_rejects_negative_entries() -> None:
    """验证含负值的向量不能归一化。"""

    with pytest.raises(InvalidPMF):
        normalize([1.0, -0.5])


def test_linf_distance() -> None:
    """验证两个 PMF 的 L∞ 距离。"""

    a = PMF.from_sequence([0.9, 0.1])
    b = PMF.from_sequence([0.6, 0.4])

    assert linf(a, b) == pytest.approx(0.3)


def test_pool_weights_validation() -> None:
    """验证权重的等权构造与非法权重校验。"""

    assert PoolWeights.equal(4).weights == (0.25, 0.25, 0.25, 0.25)
    assert len(PoolWeights.from_sequence([0.3, 0.7])) == 2
    with pytest.raises(InvalidWeights):
        PoolWeights((0.5, 0.6))
    with pytest.raises(InvalidWeights):
        PoolWeights((1.5, -0.5))
    with pytest.raises(InvalidWeights):
        PoolWeights(())
