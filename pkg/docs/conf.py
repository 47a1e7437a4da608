"""
SF-Attribution 文档的 Sphinx 配置。

启用 autodoc、napoleon、viewcode、mathjax 与 myst-parser（Markdown 指南）。
"""
from __future__ import annotations

import sys
from datetime import datetime
from pathlib import Path

# autodoc 直接从 src 导入 sf_attribution，无需先安装
SRC_ROOT = Path(__file__).resolve().parents[1] / "src"
if str(SRC_ROOT) not in sys.path:
    sys.path.insert(0, str(SRC_ROOT))

from sf_attribution import __version__  # noqa: E402

project = "SF-Attribution"
author = "SemanticForge Team"
copyright = f"{datetime.now():%Y}"
release = __version__
version = ".".join(__version__.split(".")[:2])

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.napoleon",
    "sphinx.ext.viewcode",
    "sphinx.ext.mathjax",
    "sphinx_autodoc_typehints",
    "myst_parser",
]

autodoc_default_options = {
    "members": True,
    "member-order": "bysource",
    "special-members": "__init__",
    "undoc-members": True,
}
autodoc_typehints = "description"

napoleon_google_docstring = True
napoleon_numpy_docstring = False
napoleon_include_init_with_doc = True

templates_path = ["_templates"]
exclude_patterns: list[str] = ["_build"]

html_theme = "furo"
html_title = f"SF-Attribution {release}"
html_static_path = ["_static"]

source_suffix = {
    ".rst": "restructuredtext",
    ".md": "markdown",
}

master_doc = "index"
