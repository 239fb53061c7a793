"""
Unit tests for the Domain layer.
"""
