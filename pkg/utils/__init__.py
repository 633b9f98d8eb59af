"""Utility helpers: exact numbers, seeds and documents."""
