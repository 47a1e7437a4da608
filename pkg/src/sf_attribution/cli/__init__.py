"""命令行：simulate → evaluate → explain → bench。"""
from sf_attribution.cli.main import build_parser, main
from sf_attribution.cli.run_config import RunConfig

__all__ = ["main", "build_parser", "RunConfig"]
