"""Combinatorial causal bandits on binary generalized linear models."""

__version__ = "0.1.0"
