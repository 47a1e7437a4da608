"""归因器接口、聚合策略与解释轨迹的公共导出。"""
from sf_attribution.attribution.types import (
    AttributionModel,
    AttributionTrace,
    Attributor,
    AttributorBinding,
    Incident,
)
from sf_attribution.attribution.aggregator import (
    AGGREGATION_STRATEGIES,
    CompositeAttributor,
    aggregate,
    aggregate_stack,
    attribute,
    explain,
    get_aggregator,
    pair_attributors,
    pairing_aggregate,
    repool_trace,
)

__all__ = [
    "Incident",
    "Attributor",
    "AttributionModel",
    "AttributorBinding",
    "AttributionTrace",
    "CompositeAttributor",
    "AGGREGATION_STRATEGIES",
    "attribute",
    "pair_attributors",
    "pairing_aggregate",
    "aggregate",
    "aggregate_stack",
    "get_aggregator",
    "explain",
    "repool_trace",
]
