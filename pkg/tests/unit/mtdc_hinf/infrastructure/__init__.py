"""
Unit tests for the Infrastructure layer.
"""
