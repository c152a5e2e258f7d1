"""Shapley-value attribution for database facts.

Two settings share one kernel: the contribution of endogenous facts to a
Boolean query answer, and the contribution of facts to inconsistency under
functional dependencies.
"""
__version__ = "0.1.0"
