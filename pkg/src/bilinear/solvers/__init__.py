"""Equilibrium solvers."""
