"""Delegated generalized Pandora's box: instances, solvers, OCRS, mechanisms, agents and gap harness."""

__version__ = "0.1.0"
