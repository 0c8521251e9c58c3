"""
Core module for the topobench toolkit.

This module contains shared configuration, error types and exit-code
conversion used by every service and command.
"""
