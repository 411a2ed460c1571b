"""Tension-level analysis of news videos."""
