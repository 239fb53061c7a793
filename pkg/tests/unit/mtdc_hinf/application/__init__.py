"""
Unit tests for the Application layer.
"""
