"""Metric implementations and the registry that addresses them by id."""
from .registry import METRIC_IDS, REGISTRY, MetricConfig, MetricSpec, evaluate, get, resolve

__all__ = ["METRIC_IDS", "REGISTRY", "MetricConfig", "MetricSpec", "evaluate", "get", "resolve"]
