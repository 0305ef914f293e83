"""Exact computations in the finite quotients of free solvable groups."""
