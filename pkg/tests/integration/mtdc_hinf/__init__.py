"""
Integration tests for mtdc-hinf.

Tests for the synthesis pipeline and the case-study protocols on the nominal plant.
"""
