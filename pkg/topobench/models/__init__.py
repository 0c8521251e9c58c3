"""
Models module for the topobench toolkit.

Pydantic models for graphs, dataset records, generator and filter
configuration, manifests and reports.
"""
