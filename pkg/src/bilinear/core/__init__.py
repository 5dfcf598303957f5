"""Exact rational arithmetic, linear algebra and linear programming."""
