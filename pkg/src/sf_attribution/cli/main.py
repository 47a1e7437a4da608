"""命令行入口：``sf-attribution <command> [options]``。

退出码：0 成功；1 参数或输入校验失败；2 文件读写失败；3 内部不变量被破坏或未预期的异常。

示例::

    sf-attribution simulate --seed 7 --s 20000 --t 32 --out d.jsonl
    sf-attribution evaluate --dataset d.jsonl --out-dir runs/seed-7
    sf-attribution evaluate --seeds 1,2,3,4,5 --s 20000 --t 32 --out-dir runs/desk
    sf-attribution explain --fixture --seed 3 --format text
    sf-attribution bench --dataset d.jsonl --repeat 3
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from sf_attribution.cli.commands import COMMANDS
from sf_attribution.cli.run_config import RunConfig
from sf_attribution.common.config import ConfigManager
from sf_attribution.common.exceptions import AttributionError
from sf_attribution.common.logging import LoggerFactory

_logger = LoggerFactory.create_default_logger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 3


class _ArgumentParser(argparse.ArgumentParser):
    """用法错误按校验失败处理（退出码 1）。"""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(item) for item in text.replace(" ", ",").split(",") if item]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid integer list: {text!r}") from exc


def _str_list(text: str) -> list[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--seed", type=int, help="PRNG seed (overrides simulation.seed)")
    shared.add_argument("--config", type=Path, dest="config_file", help="flat key-value config file (section.key = value)")
    shared.add_argument("--out-dir", type=Path, default=Path("out"), help="output directory (default: out)")

    simulation = argparse.ArgumentParser(add_help=False)
    group = simulation.add_argument_group("simulation")
    group.add_argument("--s", type=int, help="total time steps")
    group.add_argument("--t", type=int, help="number of threat actors")
    group.add_argument("--m", type=int, help="number of features")
    group.add_argument("--false-flag-prob", type=float)
    group.add_argument("--drift-sigma", type=float)
    group.add_argument("--no-drift", action="store_true", help="keep profiles fixed over time")
    group.add_argument("--activity-low", type=float)
    group.add_argument("--activity-high", type=float)

    strategies = argparse.ArgumentParser(add_help=False)
    strategies.add_argument(
        "--strategies",
        type=_str_list,
        help="comma separated subset of linear,logarithmic,pairing,holder,monolithic",
    )

    parser = _ArgumentParser(prog="sf-attribution", description="Modular threat actor attribution experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    simulate = sub.add_parser("simulate", parents=[shared, simulation], help="generate a synthetic incident dataset")
    simulate.add_argument("--out", type=Path, help="dataset path (default: <out-dir>/dataset.jsonl)")

    evaluate = sub.add_parser(
        "evaluate", parents=[shared, simulation, strategies], help="train, predict and score every strategy"
    )
    evaluate.add_argument("--dataset", type=Path, help="dataset written by simulate")
    evaluate.add_argument("--seeds", type=_int_list, help="simulate and evaluate one dataset per seed, e.g. 1,2,3")
    evaluate.add_argument("--grid-size", type=int, help="number of thresholds in [0, 1]")
    evaluate.add_argument("--workers", type=int, help="prediction threads")

    explain = sub.add_parser("explain", parents=[shared], help="write the attribution trace of one incident")
    explain.add_argument("--dataset", type=Path)
    explain.add_argument("--fixture", action="store_true", help="use the 3-actor, 3-feature fixture")
    explain.add_argument("--fixture-steps", type=int, default=2000)
    explain.add_argument("--incident-id", type=int)
    explain.add_argument("--models", type=Path, help="models.json written by evaluate")
    explain.add_argument("--format", choices=["json", "text"], default="json")
    explain.add_argument("--out", type=Path)

    bench = sub.add_parser("bench", parents=[shared, strategies], help="single-threaded runtime benchmark")
    bench.add_argument("--dataset", type=Path)
    bench.add_argument("--repeat", type=int, default=1, help="best of N runs")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    values: dict[str, Any] = {key: value for key, value in vars(args).items() if value is not None}
    simulation = {
        key: values.pop(key)
        for key in ("s", "t", "m", "false_flag_prob", "drift_sigma", "activity_low", "activity_high")
        if key in values
    }
    if values.pop("no_drift", False):
        simulation["drift_enabled"] = False
    values["simulation"] = simulation
    return RunConfig.build(**values)


def main(argv: Sequence[str] | None = None) -> int:
    """解析参数、加载配置并执行子命令，返回进程退出码。"""

    args = build_parser().parse_args(argv)
    try:
        run = _run_config(args)
        ConfigManager.load(run.config_file, overrides=run.config_overrides())
        result = COMMANDS[run.command](run)
    except AttributionError as exc:
        _logger.error("命令执行失败", extra={"command": args.command, "code": exc.code.value})
        print(json.dumps({"error": exc.to_dict()}, ensure_ascii=False, default=str), file=sys.stderr)
        return exc.exit_code
    except Exception:
        _logger.exception("命令执行出现未预期的异常", extra={"command": args.command})
        return EXIT_INTERNAL

    paths = result if isinstance(result, list) else [result]
    for path in paths:
        print(path)
    return EXIT_OK


__all__ = ["main", "build_parser"]
