"""
Command handlers for the topobench command-line interface.
"""
