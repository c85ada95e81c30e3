"""Preparation circuits shipped as JSON data."""
