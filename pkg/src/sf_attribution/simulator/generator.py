"""带标签事件数据集的生成。

生成过程：

1. 用 ``numpy.random.default_rng(seed)`` 采样初始画像；
2. 对每个时间步，每个处于活动窗口内的行为者以概率 ``a_i`` 产生一个事件，特征从其当前高斯分布采样；
   随后所有画像漂移一步；
3. 全部时间步结束后，对测试集事件逐特征以 ``false_flag_prob`` 的概率注入虚假旗帜：
   先在训练集中有事件的其他行为者中均匀选择供体，再在该供体的训练事件中均匀选择一条，
   取其同一特征的取值。

同一 ``SimConfig``（含 ``seed``）总是得到完全相同的数据集。
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

from sf_attribution.attribution.types import Incident
from sf_attribution.common.exceptions import FixtureUnusable, NoTrainingIncidents, UnknownIncidentId
from sf_attribution.common.logging import LoggerFactory
from sf_attribution.simulator.config import SimConfig
from sf_attribution.simulator.profiles import (
    SAMPLING_SIGMA_FLOOR,
    ProfileSet,
    drift_in_place,
    generate_profiles,
)
from sf_attribution.utils import derive_seed

_logger = LoggerFactory.create_default_logger(__name__)

FIXTURE_MAX_ATTEMPTS = 100
ACTIVITY_TRACE_ACTORS = 4


@dataclass(frozen=True, slots=True)
class InjectionRecord:
    """一次虚假旗帜注入。"""

    incident_id: int
    feature: int
    original: float
    donor_actor: int
    donor_incident_id: int
    donor_value: float


@dataclass(frozen=True, slots=True, eq=False)
class Dataset:
    """生成的数据集，不可变，可跨线程共享。

    属性：
        config：生成时使用的配置。
        incidents：按编号升序排列的全部事件。
        profiles：初始画像（未序列化，读回的数据集为 ``None``）。
        injections：``record_injections=True`` 时的注入日志。
        activity_trace：形状 ``(s, n)``，前 ``n`` 个行为者每个时间步发射事件时的活跃度（未序列化）。
    """

    config: SimConfig
    incidents: tuple[Incident, ...]
    profiles: ProfileSet | None = None
    injections: tuple[InjectionRecord, ...] = ()
    activity_trace: np.ndarray | None = None
    _by_id: dict[int, int] = field(init=False, repr=False)
    _train: tuple[Incident, ...] = field(init=False, repr=False)
    _test: tuple[Incident, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        incidents = tuple(self.incidents)
        object.__setattr__(self, "incidents", incidents)
        object.__setattr__(self, "_by_id", {incident.id: pos for pos, incident in enumerate(incidents)})
        s = self.config.s
        object.__setattr__(self, "_train", tuple(i for i in incidents if is_train_step(i.time_step, s)))
        object.__setattr__(self, "_test", tuple(i for i in incidents if not is_train_step(i.time_step, s)))

    @property
    def train(self) -> tuple[Incident, ...]:
        return self._train

    @property
    def test(self) -> tuple[Incident, ...]:
        return self._test

    @property
    def meta(self) -> dict[str, Any]:
        return {
            "seed": self.config.seed,
            "counts": {"train": len(self._train), "test": len(self._test), "total": len(self.incidents)},
            "false_flags": int(sum(sum(i.false_flag_mask or ()) for i in self._test)),
            "actor_counts": self.actor_counts().tolist(),
        }

    def actor_counts(self, split: str | None = None) -> np.ndarray:
        """每个行为者的事件数，长度为 ``t``；``split`` 取 ``"train"``、``"test"`` 或 ``None``（全部）。"""

        incidents = {"train": self._train, "test": self._test, None: self.incidents}[split]
        labels = np.fromiter((i.label for i in incidents), dtype=np.int64, count=len(incidents))
        return np.bincount(labels, minlength=self.config.t)

    def find(self, incident_id: int) -> Incident:
        """按编号查找事件。

        异常：
            UnknownIncidentId：编号不存在。
        """

        pos = self._by_id.get(incident_id)
        if pos is None:
            raise UnknownIncidentId("事件编号不存在", details={"incident_id": incident_id})
        return self.incidents[pos]

    def split_of(self, incident: Incident) -> str:
        return "train" if is_train_step(incident.time_step, self.config.s) else "test"


def is_train_step(step: int, s: int) -> bool:
    """``step < s / 2`` 属于训练集（整数比较）。"""

    return 2 * step < s


def generate(
    config: SimConfig,
    *,
    record_injections: bool = False,
    trace_actors: int = ACTIVITY_TRACE_ACTORS,
) -> Dataset:
    """按 ``config`` 生成数据集。

    参数：
        config：模拟参数（含种子）。
        record_injections：为 ``True`` 时在 :attr:`Dataset.injections` 中记录每次虚假旗帜注入。
        trace_actors：记录前几个行为者的活跃度轨迹（:attr:`Dataset.activity_trace`），``0`` 表示不记录。

    返回：:class:`Dataset`。

    异常：
        NoTrainingIncidents：训练集为空（极端配置）。
    """

    started = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    initial = generate_profiles(config, rng)
    profiles = initial.copy()
    _logger.info("开始生成数据集", extra={"s": config.s, "t": config.t, "m": config.m, "seed": config.seed})

    traced = max(0, min(trace_actors, config.t))
    trace = np.empty((config.s, traced))
    steps: list[np.ndarray] = []
    actors: list[np.ndarray] = []
    features: list[np.ndarray] = []
    for step in range(config.s):
        trace[step] = profiles.activity[:traced]
        active = profiles.active_mask(step)
        fired = active & (rng.random(config.t) < profiles.activity)
        emitting = np.flatnonzero(fired)
        if emitting.size:
            sigma = np.maximum(profiles.stddevs[emitting], SAMPLING_SIGMA_FLOOR)
            features.append(rng.normal(profiles.means[emitting], sigma))
            actors.append(emitting)
            steps.append(np.full(emitting.size, step, dtype=np.int64))
        drift_in_place(profiles, config, rng)

    if features:
        x = np.concatenate(features)
        labels = np.concatenate(actors)
        time_steps = np.concatenate(steps)
    else:
        x = np.empty((0, config.m))
        labels = np.empty(0, dtype=np.int64)
        time_steps = np.empty(0, dtype=np.int64)

    train_rows = 2 * time_steps < config.s
    if not np.any(train_rows):
        raise NoTrainingIncidents(
            "训练集为空，无法生成数据集",
            details={"s": config.s, "t": config.t, "seed": config.seed, "total": int(labels.size)},
        )

    mask, log = _inject_false_flags(x, labels, train_rows, config, rng, record=record_injections)

    incidents = tuple(
        Incident(
            id=row,
            time_step=int(time_steps[row]),
            features=x[row],
            label=int(labels[row]),
            false_flag_mask=tuple(bool(v) for v in mask[row]),
        )
        for row in range(labels.size)
    )
    dataset = Dataset(
        config=config,
        incidents=incidents,
        profiles=initial,
        injections=tuple(log),
        activity_trace=trace if traced else None,
    )
    _logger.info(
        "数据集生成完成",
        extra={**dataset.meta["counts"], "false_flags": int(mask.sum()), "duration_s": round(time.perf_counter() - started, 3)},
    )
    return dataset


def _inject_false_flags(
    x: np.ndarray,
    labels: np.ndarray,
    train_rows: np.ndarray,
    config: SimConfig,
    rng: np.random.Generator,
    *,
    record: bool,
) -> tuple[np.ndarray, list[InjectionRecord]]:
    """原地替换 ``x`` 中测试行的特征值，返回 ``(mask, 注入日志)``。"""

    n, m = x.shape
    mask = np.zeros((n, m), dtype=bool)
    test_rows = np.flatnonzero(~train_rows)
    if test_rows.size == 0:
        return mask, []

    drawn = rng.random((test_rows.size, m)) < config.false_flag_prob
    cells = np.argwhere(drawn)
    if cells.size == 0:
        return mask, []
    rows = test_rows[cells[:, 0]]
    cols = cells[:, 1]
    true_actor = labels[rows]

    # 供体池：训练集中出现过的行为者，按编号排列；其训练事件按行为者分组
    train_idx = np.flatnonzero(train_rows)
    train_labels = labels[train_idx]
    grouped = train_idx[np.argsort(train_labels, kind="stable")]
    counts = np.bincount(train_labels, minlength=config.t)
    offsets = np.concatenate(([0], np.cumsum(counts)[:-1]))
    donors = np.flatnonzero(counts)

    pos = np.searchsorted(donors, true_actor)
    self_in_pool = (pos < donors.size) & (donors[np.minimum(pos, donors.size - 1)] == true_actor)
    choices = donors.size - self_in_pool.astype(np.int64)
    usable = choices > 0
    if not np.all(usable):
        _logger.warning(
            "虚假旗帜供体池为空，跳过注入",
            extra={"skipped": int((~usable).sum()), "donor_actors": int(donors.size)},
        )
        rows, cols, true_actor, pos, self_in_pool, choices = (
            rows[usable],
            cols[usable],
            true_actor[usable],
            pos[usable],
            self_in_pool[usable],
            choices[usable],
        )
        if rows.size == 0:
            return mask, []

    pick = rng.integers(0, choices)
    pick = pick + (self_in_pool & (pick >= pos))
    donor_actor = donors[pick]
    donor_rows = grouped[offsets[donor_actor] + rng.integers(0, counts[donor_actor])]

    original = x[rows, cols].copy()
    x[rows, cols] = x[donor_rows, cols]
    mask[rows, cols] = True

    log: list[InjectionRecord] = []
    if record:
        log = [
            InjectionRecord(
                incident_id=int(r),
                feature=int(c),
                original=float(o),
                donor_actor=int(a),
                donor_incident_id=int(d),
                donor_value=float(x[d, c]),
            )
            for r, c, o, a, d in zip(rows, cols, original, donor_actor, donor_rows)
        ]
    return mask, log


def interpretability_fixture(seed: int, s: int = 2000, *, base: SimConfig | None = None) -> Dataset:
    """三个行为者、三个特征的小型数据集，用于解释轨迹演示。

    若某个行为者没有训练事件，则以派生种子重新生成，最多尝试 100 次。

    异常：
        FixtureUnusable：多次重试后仍有行为者缺少训练事件。
    """

    template = (base or SimConfig()).model_copy(update={"s": s, "t": 3, "m": 3})
    for attempt in range(FIXTURE_MAX_ATTEMPTS):
        attempt_seed = seed if attempt == 0 else derive_seed(seed, attempt)
        config = template.model_copy(update={"seed": attempt_seed})
        try:
            dataset = generate(config)
        except NoTrainingIncidents:
            dataset = None
        if dataset is not None and _covers_all_actors(dataset.train, config.t):
            if attempt:
                _logger.info("夹具在重新生成后可用", extra={"seed": seed, "attempt": attempt, "used_seed": attempt_seed})
            return dataset
        _logger.warning("夹具缺少部分行为者的训练事件，重新生成", extra={"seed": seed, "attempt": attempt})
    raise FixtureUnusable(
        "无法生成覆盖全部行为者的解释夹具",
        details={"seed": seed, "s": s, "attempts": FIXTURE_MAX_ATTEMPTS},
    )


def _covers_all_actors(train: Iterable[Incident], t: int) -> bool:
    return {incident.label for incident in train} >= set(range(t))


__all__ = [
    "Dataset",
    "InjectionRecord",
    "generate",
    "interpretability_fixture",
    "is_train_step",
    "FIXTURE_MAX_ATTEMPTS",
    "ACTIVITY_TRACE_ACTORS",
]
