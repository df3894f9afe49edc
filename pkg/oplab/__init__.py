"""Finite-dimensional laboratory for operator-Lipschitz estimates on Schatten classes."""
