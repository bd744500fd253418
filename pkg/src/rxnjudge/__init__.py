"""Practicality judgment for chemical reactions from SMILES text alone."""

__version__ = "0.1.0"
