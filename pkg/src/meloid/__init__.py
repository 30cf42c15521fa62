"""Inductive prover for a first-order equational language, with learned induction recommendations."""

__version__ = "0.1.0"
