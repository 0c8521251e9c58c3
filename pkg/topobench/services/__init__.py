"""
Services module for the topobench toolkit.

This module contains the graph oracles, task generators, filtering lab,
kernel baselines, tensor embedding machinery and dataset serialization.
"""
