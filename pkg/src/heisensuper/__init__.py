"""Superunitary representations of Heisenberg supergroups."""
