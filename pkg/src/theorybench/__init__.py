"""Workbench for decision procedures over equivalence-relation theories,
counter-machine witness races, capped arithmetic models, and the diagonal
recursion that ties them together."""

__version__ = "0.1.0"
