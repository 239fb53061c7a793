"""
Unit tests for mtdc-hinf.

Tests for isolated component behavior.
"""
