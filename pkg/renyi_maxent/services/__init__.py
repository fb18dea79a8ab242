"""Numerical services: quadrature, references, partition functions, solvers and checks."""
