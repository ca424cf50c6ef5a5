"""Closure-conversion workbench.

A small laboratory for studying closure conversion over a call-by-value
lambda calculus with tuples: three calculi (source, intermediate,
target), the translations between them, one tupled abstract machine per
calculus, and a differential harness that checks the machines against
the calculi step by step.
"""

__version__ = "0.1.0"
