"""子命令实现：simulate / evaluate / explain / bench。

每个命令在 :class:`ConfigManager` 加载完成后执行，返回写出的文件路径。
"""
from __future__ import annotations

from pathlib import Path

from sf_attribution.attribution.aggregator import explain
from sf_attribution.cli.run_config import RunConfig
from sf_attribution.common.config import ConfigManager
from sf_attribution.common.logging import LoggerFactory
from sf_attribution.converter.report_writer import ReportWriter
from sf_attribution.converter.trace_formatter import TraceFormatter
from sf_attribution.evaluation.bench import bench
from sf_attribution.evaluation.report import EvaluationReport, summarize_seeds
from sf_attribution.evaluation.runner import fit_models, run_evaluation
from sf_attribution.models.persistence import load_bindings, save_bindings
from sf_attribution.simulator.dataset_io import read_dataset, write_dataset
from sf_attribution.simulator.generator import Dataset, generate, interpretability_fixture

_logger = LoggerFactory.create_default_logger(__name__)

MODELS_FILE = "models.json"
DATASET_FILE = "dataset.jsonl"


def cmd_simulate(run: RunConfig) -> list[Path]:
    """按当前配置生成数据集并写出 JSONL 文件，同目录写出 ``actor_counts.csv`` 与 ``activity.csv``。"""

    config = ConfigManager.current().settings.simulation
    dataset = generate(config)
    target = write_dataset(dataset, run.out or run.out_dir / DATASET_FILE)
    return [target, *ReportWriter(target.parent).write_dataset_profile(dataset)]


def _evaluate_one(dataset: Dataset, out_dir: Path) -> tuple[EvaluationReport, list[Path]]:
    models = fit_models(dataset.train, dataset.config.t, dataset.config.m)
    report = run_evaluation(dataset, models=models)
    writer = ReportWriter(out_dir)
    paths = writer.write_report(report)
    paths.append(save_bindings(models.bindings, out_dir / MODELS_FILE, baseline=models.baseline))
    return report, paths


def cmd_evaluate(run: RunConfig) -> list[Path]:
    """训练模块化归因器与单体基线，在测试集上评估每个策略并写出报告。

    给出 ``--seeds`` 时，每个种子在 ``out_dir/seed-<n>/`` 下生成数据集并评估，
    最后写出跨种子的 ``summary.json``。
    """

    if run.dataset is not None:
        _, paths = _evaluate_one(read_dataset(run.dataset), run.out_dir)
        return paths

    base = ConfigManager.current().settings.simulation
    reports: list[EvaluationReport] = []
    paths: list[Path] = []
    for seed in run.seeds or ():
        seed_dir = run.out_dir / f"seed-{seed}"
        dataset = generate(base.model_copy(update={"seed": seed}))
        paths.append(write_dataset(dataset, seed_dir / DATASET_FILE))
        paths.extend(ReportWriter(seed_dir).write_dataset_profile(dataset))
        report, written = _evaluate_one(dataset, seed_dir)
        reports.append(report)
        paths.extend(written)

    summary = summarize_seeds(reports)
    paths.append(ReportWriter(run.out_dir).write_summary(summary))
    failed = [name for name, ok in summary.checks.items() if ok is False]
    if failed:
        _logger.warning("方向性检查未通过", extra={"checks": ",".join(failed), "seeds": len(reports)})
    return paths


def cmd_explain(run: RunConfig) -> Path:
    """为一个事件写出三层解释轨迹。

    ``--fixture`` 时使用三行为者、三特征的解释夹具；未指定 ``--incident-id`` 时取第一个测试事件。
    ``--models`` 缺省时在数据集的训练部分上现场训练。

    异常：
        UnknownIncidentId：事件编号不存在。
    """

    if run.fixture:
        seed = ConfigManager.current().settings.simulation.seed if run.seed is None else run.seed
        dataset = interpretability_fixture(seed, run.fixture_steps)
    else:
        dataset = read_dataset(run.dataset)

    if run.models is not None:
        bindings, _ = load_bindings(run.models)
    else:
        bindings = list(fit_models(dataset.train, dataset.config.t, dataset.config.m).bindings)

    if run.incident_id is not None:
        incident = dataset.find(run.incident_id)
    else:
        incident = (dataset.test or dataset.incidents)[0]

    trace = explain(bindings, incident)
    suffix = "json" if run.format == "json" else "txt"
    target = run.out or run.out_dir / f"trace-{incident.id}.{suffix}"
    text = TraceFormatter().format_trace(trace, format_type=run.format, incident_id=incident.id, label=incident.label)
    ReportWriter(target.parent).write_text(target.name, text)
    _logger.info("解释轨迹已写出", extra={"path": str(target), "incident_id": incident.id})
    return target


def cmd_bench(run: RunConfig) -> Path:
    """单线程计时并写出 ``timings.csv``。"""

    dataset = read_dataset(run.dataset)
    strategies = ConfigManager.current().settings.evaluation.strategies
    table = bench(dataset, strategies, repeat=run.repeat)
    return ReportWriter(run.out_dir).write_timings(table)


COMMANDS = {
    "simulate": cmd_simulate,
    "evaluate": cmd_evaluate,
    "explain": cmd_explain,
    "bench": cmd_bench,
}


__all__ = ["cmd_simulate", "cmd_evaluate", "cmd_explain", "cmd_bench", "COMMANDS"]
