"""Certified computation for unimodal-sequence counts."""
