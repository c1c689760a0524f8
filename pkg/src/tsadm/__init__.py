"""Evaluation metrics for time-series anomaly detection and a benchmark that audits them."""
__version__ = "0.1.0"
