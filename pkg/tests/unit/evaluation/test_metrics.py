from __future__ import annotations

"""名次、k-准确率累计分布、PR 曲线与 F 值。"""

import numpy as np
import pytest

from sf_attribution.common.exceptions import DegenerateRecallBase, EmptyInput, InputValidationError, UniverseMismatch
from sf_attribution.evaluation import (
    PRPoint,
    k_accuracy_cdf,
    max_precision,
    optimal_f_measure,
    pr_curve,
    rank_of_true,
    ranks_of_true,
)
from sf_attribution.pmf import PMF


def _pmf(*values: float) -> PMF:
    return PMF.from_sequence(values)


def _point(threshold: float, precision: float, recall: float) -> PRPoint:
    return PRPoint(threshold, precision, recall, recall, attributed=1, correct=1)


# ---- 名次 ------------------------------------------------------------------


def test_rank_of_true_examples() -> None:
    """验证真实行为者排名在固定算例上的取值、平局规则与越界标签。"""

    assert rank_of_true(_pmf(0.5, 0.3, 0.2), 1) == 2
    assert rank_of_true(_pmf(0.4, 0.4, 0.2), 1) == 2
    assert rank_of_true(_pmf(0.4, 0.4, 0.2), 0) == 1
    assert rank_of_true(PMF.uniform(5), 4) == 5
    with pytest.raises(UniverseMismatch):
        rank_of_true(_pmf(0.5, 0.5), 2)


def test_rank_one_iff_argmax_matches() -> None:
    """验证排名为 1 当且仅当 argmax 等于真实行为者。"""

    rng = np.random.default_rng(3)
    probs = rng.dirichlet(np.ones(4), size=300)
    probs[::7] = 0.25
    labels = rng.integers(0, 4, size=300)

    ranks = ranks_of_true(probs, labels)
    for row, (q, label) in enumerate(zip(probs, labels)):
        pmf = PMF(q)
        assert ranks[row] == rank_of_true(pmf, int(label))
        assert (ranks[row] == 1) == (pmf.argmax() == label)


# ---- k-准确率 ---------------------------------------------------------------


def test_k_accuracy_cdf_examples() -> None:
    """验证 k-准确率累计分布在固定算例上的取值。"""

    assert k_accuracy_cdf([1, 1, 2], 2).tolist() == pytest.approx([2 / 3, 1.0])
    assert k_accuracy_cdf([1, 1, 1], 4).tolist() == [1.0, 1.0, 1.0, 1.0]
    assert k_accuracy_cdf([3], 3).tolist() == [0.0, 0.0, 1.0]


def test_k_accuracy_cdf_errors() -> None:
    """验证空排名或越界排名的累计分布抛出异常。"""

    with pytest.raises(EmptyInput):
        k_accuracy_cdf([], 3)
    with pytest.raises(InputValidationError):
        k_accuracy_cdf([4], 3)


# ---- PR 曲线 ---------------------------------------------------------------


@pytest.fixture
def four_predictions() -> list[tuple[PMF, int]]:
    # argmax 正确性 [T, T, F, T]，最大概率 [0.9, 0.6, 0.8, 0.5]
    return [
        (_pmf(0.9, 0.1), 0),
        (_pmf(0.6, 0.4), 0),
        (_pmf(0.8, 0.2), 1),
        (_pmf(0.5, 0.5), 0),
    ]


def test_pr_curve_threshold_rule(four_predictions) -> None:
    """验证 PR 曲线按最大概率不低于阈值判定归因。"""

    curve = pr_curve(four_predictions, [0.0, 0.7, 1.0])

    assert [point.threshold for point in curve] == [0.0, 0.7]
    at_zero, at_07 = curve
    assert (at_zero.precision, at_zero.recall) == (0.75, 1.0)
    assert at_zero.standard_recall == 0.75
    assert (at_07.attributed, at_07.correct) == (2, 1)
    assert at_07.precision == 0.5
    assert at_07.recall == pytest.approx(1 / 3)
    assert at_07.standard_recall == 0.25


def test_pr_curve_is_monotone_on_dense_grid() -> None:
    """验证密集阈值网格上召回率单调不增。"""

    rng = np.random.default_rng(12)
    probs = rng.dirichlet(np.ones(5) * 0.5, size=400)
    labels = np.where(rng.random(400) < 0.6, probs.argmax(axis=1), rng.integers(0, 5, size=400))
    curve = pr_curve([(PMF(q), int(y)) for q, y in zip(probs, labels)], np.linspace(0.0, 1.0, 1001))

    assert curve[0].recall == 1.0
    for earlier, later in zip(curve, curve[1:]):
        assert later.recall <= earlier.recall
        assert later.attributed <= earlier.attributed
    assert all(0.0 <= p.precision <= 1.0 and p.correct <= p.attributed for p in curve)


def test_pr_curve_errors() -> None:
    """验证空输入、阈值 0 下无正确归因与非递增阈值时 PR 曲线抛出异常。"""

    with pytest.raises(EmptyInput):
        pr_curve([], [0.0])
    with pytest.raises(DegenerateRecallBase):
        pr_curve([(_pmf(0.9, 0.1), 1), (_pmf(0.2, 0.8), 0)], [0.0, 0.5])
    with pytest.raises(InputValidationError):
        pr_curve([(_pmf(0.9, 0.1), 0)], [0.5, 0.2])


# ---- F 值 ------------------------------------------------------------------


def test_optimal_f_measure_examples() -> None:
    """验证最优 F 值与对应阈值在固定算例上的取值。"""

    assert optimal_f_measure([_point(0.3, 1.0, 1.0)]) == (1.0, 0.3)

    f, theta = optimal_f_measure([_point(0.8, 1.0, 1 / 3), _point(0.2, 0.75, 1.0)])
    assert f == pytest.approx(6 / 7)
    assert theta == 0.2

    assert optimal_f_measure([_point(0.1, 0.0, 0.0), _point(0.5, 0.0, 0.0)]) == (0.0, 0.1)


def test_optimal_f_measure_prefers_smallest_threshold_on_ties() -> None:
    """验证 F 值相同时取最小阈值。"""

    f, theta = optimal_f_measure([_point(0.6, 0.5, 0.5), _point(0.4, 0.5, 0.5)])

    assert (f, theta) == (0.5, 0.4)


def test_empty_curve_errors() -> None:
    """验证空曲线的最优 F 值抛出 EmptyInput。"""

    with pytest.raises(EmptyInput):
        optimal_f_measure([])
    with pytest.raises(EmptyInput):
        max_precision([])
