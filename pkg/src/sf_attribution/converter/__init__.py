"""轨迹与报告的格式化、导出。"""
from sf_attribution.converter.report_writer import ReportWriter
from sf_attribution.converter.trace_formatter import TraceFormat, TraceFormatter

__all__ = ["TraceFormatter", "TraceFormat", "ReportWriter"]
