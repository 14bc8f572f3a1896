"""Workbench for mining, annotating and classifying two-noun compounds."""

__version__ = "0.1.0"
