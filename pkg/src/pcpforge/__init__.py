"""Desk-scale tooling for the GF(2) hypergraph-coloring reduction pipeline."""

__version__ = "0.1.0"
