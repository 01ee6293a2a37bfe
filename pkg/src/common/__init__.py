"""Shared paths, errors and persistence helpers."""
