"""Semantic expert finding over a document corpus with entity-graph author profiles."""

__version__ = "0.1.0"
